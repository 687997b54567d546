use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::classify::{classify, Outcome};
use crate::qubit::{overlap_fidelity, DensityMatrix, PureState};
use crate::sme::TrajectoryRecord;

/// Overlap fidelities of the conditional mean states. `None` marks an empty
/// conditional set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub s_th: f64,
    pub f_plus: Option<f64>,
    pub f_minus: Option<f64>,
    pub n_even: usize,
    pub n_odd: usize,
    pub n_inconclusive: usize,
    pub accepted_fraction: f64,
}

impl FidelityReport {
    /// Mean of the defined fidelities.
    pub fn f_mean(&self) -> Option<f64> {
        match (self.f_plus, self.f_minus) {
            (Some(a), Some(b)) => Some(0.5 * (a + b)),
            (a, b) => a.or(b),
        }
    }

    pub fn fraction(&self, outcome: Outcome) -> f64 {
        let total = (self.n_even + self.n_odd + self.n_inconclusive).max(1) as f64;
        match outcome {
            Outcome::Even => self.n_even as f64 / total,
            Outcome::Odd => self.n_odd as f64 / total,
            Outcome::Inconclusive => self.n_inconclusive as f64 / total,
        }
    }
}

/// Target states for the two outcomes.
#[derive(Debug, Clone, Copy)]
pub struct Targets {
    pub plus: PureState,
    pub minus: PureState,
}

impl Default for Targets {
    fn default() -> Self {
        Self { plus: PureState::psi_plus(), minus: PureState::psi_minus() }
    }
}

/// `F_± = √⟨ψ_±|E_±[ρ]|ψ_±⟩`, with `E_±[ρ]` the plain average of the final
/// states classified Even / Odd at threshold `s_th`.
pub fn conditional_fidelity(
    records: &[TrajectoryRecord],
    targets: &Targets,
    s_th: f64,
    sign_cal: f64,
) -> FidelityReport {
    let outcomes: Vec<Outcome> = records.iter().map(|r| classify(r.s, s_th, sign_cal).label).collect();
    let pick = |o: Outcome| records.iter().zip(&outcomes).filter(move |(_, &x)| x == o).map(|(r, _)| &r.final_state);
    let fid = |o: Outcome, target: &PureState| DensityMatrix::mean(pick(o)).map(|rho| overlap_fidelity(target, &rho));
    let n_even = outcomes.iter().filter(|&&o| o == Outcome::Even).count();
    let n_odd = outcomes.iter().filter(|&&o| o == Outcome::Odd).count();
    FidelityReport {
        s_th,
        f_plus: fid(Outcome::Even, &targets.plus),
        f_minus: fid(Outcome::Odd, &targets.minus),
        n_even,
        n_odd,
        n_inconclusive: records.len() - n_even - n_odd,
        accepted_fraction: if records.is_empty() { 0.0 } else { (n_even + n_odd) as f64 / records.len() as f64 },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub s_th: f64,
    pub f_plus: Option<f64>,
    pub f_minus: Option<f64>,
    /// Bootstrap standard deviations; `None` when fewer than two resamples
    /// had a non-empty conditional set.
    pub f_plus_err: Option<f64>,
    pub f_minus_err: Option<f64>,
    pub accepted_fraction: f64,
}

pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// `F_±` and the accepted fraction on a grid of thresholds, with bootstrap
/// error bars from `resamples` resamplings drawn from a stream seeded by `seed`.
///
/// `⟨ψ|E[ρ]|ψ⟩` is linear in the states, so each record is reduced to its
/// two overlaps once and the resamples only average scalars.
pub fn threshold_sweep(
    records: &[TrajectoryRecord],
    targets: &Targets,
    grid: &[f64],
    sign_cal: f64,
    resamples: usize,
    seed: u64,
) -> Vec<SweepPoint> {
    let n = records.len();
    let overlaps: Vec<(f64, f64, f64)> = records
        .iter()
        .map(|r| {
            let o = |t: &PureState| overlap_fidelity(t, &r.final_state).powi(2);
            (sign_cal * r.s, o(&targets.plus), o(&targets.minus))
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<Vec<usize>> = (0..resamples).map(|_| (0..n).map(|_| rng.random_range(0..n)).collect()).collect();

    let estimate = |idx: &mut dyn Iterator<Item = usize>, th: f64| {
        let (mut sp, mut np, mut sm, mut nm) = (0.0, 0usize, 0.0, 0usize);
        for i in idx {
            let (x, op, om) = overlaps[i];
            if x > th {
                sp += op;
                np += 1;
            } else if x < -th {
                sm += om;
                nm += 1;
            }
        }
        let f = |s: f64, k: usize| (k > 0).then(|| (s / k as f64).clamp(0.0, 1.0).sqrt());
        (f(sp, np), f(sm, nm), np + nm)
    };
    let spread = |xs: Vec<f64>| {
        (xs.len() >= 2).then(|| {
            let m = xs.iter().sum::<f64>() / xs.len() as f64;
            (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
        })
    };

    grid.iter()
        .map(|&th| {
            let (f_plus, f_minus, accepted) = estimate(&mut (0..n), th);
            let (mut bp, mut bm) = (Vec::new(), Vec::new());
            for d in &draws {
                let (p, m, _) = estimate(&mut d.iter().copied(), th);
                bp.extend(p);
                bm.extend(m);
            }
            SweepPoint {
                s_th: th,
                f_plus,
                f_minus,
                f_plus_err: spread(bp),
                f_minus_err: spread(bm),
                accepted_fraction: if n == 0 { 0.0 } else { accepted as f64 / n as f64 },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sme::Diagnostics;

    fn record(s: f64, psi: PureState) -> TrajectoryRecord {
        TrajectoryRecord {
            seed: 0,
            current: vec![],
            s,
            final_state: psi.into(),
            snapshots: vec![],
            diagnostics: Diagnostics { min_eigenvalue: 0.0, max_trace_drift: 0.0 },
        }
    }

    fn perfect(n: usize) -> Vec<TrajectoryRecord> {
        (0..n)
            .map(|k| {
                let s = 1.0 + k as f64;
                if k % 2 == 0 {
                    record(s, PureState::psi_plus())
                } else {
                    record(-s, PureState::psi_minus())
                }
            })
            .collect()
    }

    #[test]
    fn perfect_records_give_unit_fidelity() {
        let rep = conditional_fidelity(&perfect(10), &Targets::default(), 0.0, 1.0);
        assert_eq!(rep.f_plus, Some(1.0));
        assert_eq!(rep.f_minus, Some(1.0));
        assert_eq!(rep.accepted_fraction, 1.0);
        assert_eq!(rep.n_even + rep.n_odd + rep.n_inconclusive, 10);
    }

    #[test]
    fn empty_set_is_flagged() {
        let recs: Vec<_> = (0..4).map(|k| record(1.0 + k as f64, PureState::psi_plus())).collect();
        let rep = conditional_fidelity(&recs, &Targets::default(), 0.0, 1.0);
        assert_eq!(rep.f_minus, None);
        assert_eq!(rep.f_mean(), Some(1.0));
        let rep = conditional_fidelity(&recs, &Targets::default(), 100.0, 1.0);
        assert_eq!((rep.f_plus, rep.accepted_fraction), (None, 0.0));
    }

    #[test]
    fn misclassified_half_mixes() {
        let mut recs = perfect(4);
        recs.push(record(3.0, PureState::psi_minus()));
        let rep = conditional_fidelity(&recs, &Targets::default(), 0.0, 1.0);
        // Two ψ_+ and one ψ_- in the even set: ⟨ψ_+|ρ|ψ_+⟩ = 2/3.
        assert!((rep.f_plus.unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sweep_matches_direct_evaluation() {
        let mut recs = perfect(30);
        recs.push(record(0.5, PureState::psi_minus()));
        recs.push(record(-2.5, PureState::psi_plus()));
        let grid = [0.0, 1.0, 3.0, 10.0, 100.0];
        let sweep = threshold_sweep(&recs, &Targets::default(), &grid, 1.0, 50, 7);
        let mut last = 1.0;
        for (pt, &th) in sweep.iter().zip(&grid) {
            let direct = conditional_fidelity(&recs, &Targets::default(), th, 1.0);
            assert!(pt.accepted_fraction <= last);
            last = pt.accepted_fraction;
            assert_eq!(pt.accepted_fraction, direct.accepted_fraction);
            for (a, b) in [(pt.f_plus, direct.f_plus), (pt.f_minus, direct.f_minus)] {
                match (a, b) {
                    (Some(x), Some(y)) => assert!((x - y).abs() < 1e-12),
                    (x, y) => assert_eq!(x, y),
                }
            }
        }
        assert_eq!(sweep[0].accepted_fraction, 1.0);
        assert!(sweep[0].f_plus_err.unwrap() > 0.0);
        assert_eq!(sweep[4].f_plus, None);
        assert_eq!(sweep[4].f_plus_err, None);
    }
}

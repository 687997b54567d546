use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointer::{steady_state_sigma, PointerTable, SystemParams};
use crate::qubit::{BasisLabel, Parity, DIM};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// `(⟨s_+⟩ − ⟨s_−⟩) / √(Var s_+ + Var s_−)` with sample moments.
pub fn empirical_snr(s_even: &[f64], s_odd: &[f64]) -> Result<f64> {
    let got = s_even.len().min(s_odd.len());
    if got < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got });
    }
    Ok((mean(s_even) - mean(s_odd)) / (sample_variance(s_even) + sample_variance(s_odd)).sqrt())
}

fn steps_for(table: &PointerTable, tau: f64) -> Result<usize> {
    let steps = (tau / table.dt()).round() as usize;
    if !(tau > 0.0) || steps > table.steps() {
        return Err(Error::OutOfSpan { t: tau, t_end: table.t_end() });
    }
    Ok(steps)
}

/// `∫_0^τ Σ_μ w_μ q(Σ_μ) dt` over one parity sector, with the weights
/// normalized within the sector. Uses the left-point rule, which is what the
/// trajectory integrator accumulates into `s`.
fn sector_signal(
    table: &PointerTable,
    params: &SystemParams,
    weights: &[f64; DIM],
    parity: Parity,
    steps: usize,
) -> f64 {
    let labels: Vec<usize> = BasisLabel::sector(parity).map(|l| l.index()).collect();
    let total: f64 = labels.iter().map(|&l| weights[l]).sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for n in 0..steps {
        let s = table.sigma(n);
        acc += labels.iter().map(|&l| weights[l] * params.quadrature(s[l])).sum::<f64>();
    }
    acc * table.dt() / total
}

/// SNR expected from the table for a state with populations `weights`:
/// `√(2η/τ) ∫ (Σ_even w q − Σ_odd w q) dt`.
pub fn predicted_snr(table: &PointerTable, params: &SystemParams, weights: &[f64; DIM], tau: f64) -> Result<f64> {
    let steps = steps_for(table, tau)?;
    let even = sector_signal(table, params, weights, Parity::Even, steps);
    let odd = sector_signal(table, params, weights, Parity::Odd, steps);
    Ok((2.0 * params.eta / tau).sqrt() * (even - odd))
}

/// Steady-state SNR with transients neglected: `2√2 √η |q_111| ε √τ`, where
/// `q_111` is the measured quadrature of `Σ_111` per unit drive.
pub fn ideal_snr(params: &SystemParams, eps_ss: f64, tau: f64) -> Result<f64> {
    let s = steady_state_sigma(params, 1.0)?;
    let q = params.quadrature(s[BasisLabel::new(1, 1, 1)?.index()]).abs();
    Ok(2.0 * 2f64.sqrt() * params.eta.sqrt() * q * eps_ss * tau.sqrt())
}

/// Two-Gaussian model of the integrated signal for the uniform states of
/// each parity sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianModel {
    pub mean_plus: f64,
    pub mean_minus: f64,
    /// `√τ`; the variance of `∫ dW` over `[0, τ]` is `τ`.
    pub std: f64,
}

impl GaussianModel {
    pub fn snr(&self) -> f64 {
        (self.mean_plus - self.mean_minus) / (2.0 * self.std * self.std).sqrt()
    }

    pub fn density(&self, s: f64, parity: Parity) -> f64 {
        let mu = match parity {
            Parity::Even => self.mean_plus,
            Parity::Odd => self.mean_minus,
        };
        let z = (s - mu) / self.std;
        (-0.5 * z * z).exp() / (self.std * (2.0 * std::f64::consts::PI).sqrt())
    }
}

pub fn gaussian_model(table: &PointerTable, params: &SystemParams, tau: f64) -> Result<GaussianModel> {
    let steps = steps_for(table, tau)?;
    let uniform = [1.0; DIM];
    let scale = 2.0 * params.eta.sqrt();
    Ok(GaussianModel {
        mean_plus: scale * sector_signal(table, params, &uniform, Parity::Even, steps),
        mean_minus: scale * sector_signal(table, params, &uniform, Parity::Odd, steps),
        std: tau.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointer::{integrate_pointer_fields, DrivePulse};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn snr_needs_two_samples_each() {
        assert!(empirical_snr(&[1.0], &[0.0, 1.0]).is_err());
        assert!(empirical_snr(&[1.0, 2.0], &[0.0, 1.0]).is_ok());
    }

    #[test]
    fn identical_groups_have_no_contrast() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 * 0.7).sin()).collect();
        assert_eq!(empirical_snr(&xs, &xs).unwrap(), 0.0);
    }

    #[test]
    fn ideal_snr_scalings() {
        let p = SystemParams::reference();
        // Matched settings give 4√2 at both efficiencies.
        let eps = 2.0 * (1.0f64 / 20.0).sqrt();
        assert_relative_eq!(ideal_snr(&p, eps, 20.0).unwrap(), 4.0 * 2f64.sqrt(), max_relative = 1e-12);
        let half = p.clone().with_eta(0.5);
        assert_relative_eq!(ideal_snr(&half, eps, 40.0).unwrap(), 4.0 * 2f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(
            ideal_snr(&half, eps, 20.0).unwrap(),
            ideal_snr(&p, eps, 20.0).unwrap() / 2f64.sqrt(),
            max_relative = 1e-12
        );
        // ε√τ fixed
        assert_relative_eq!(ideal_snr(&p, 1.0, 4.0).unwrap(), ideal_snr(&p, 0.5, 16.0).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn predicted_approaches_ideal() {
        let p = SystemParams::reference();
        let t = integrate_pointer_fields(&p, &DrivePulse::arctan(0.3, 10.0), 400.0, 1e-3).unwrap();
        let w = [1.0; DIM];
        let gap = |tau: f64| {
            let ideal = ideal_snr(&p, 0.3, tau).unwrap();
            (ideal - predicted_snr(&t, &p, &w, tau).unwrap()) / ideal
        };
        let (g25, g100, g400) = (gap(25.0), gap(100.0), gap(400.0));
        assert!(g25 > 0.0 && g100 < g25 && g400 < g100);
        // The transient deficit is a fixed area, so the relative gap falls as 1/τ.
        assert_relative_eq!(g400 * 400.0, g100 * 100.0, max_relative = 2e-2);
    }

    #[test]
    fn predicted_scales_with_efficiency() {
        let p = SystemParams::reference();
        let t = integrate_pointer_fields(&p, &DrivePulse::arctan(0.3, 10.0), 10.0, 1e-3).unwrap();
        let w = [1.0; DIM];
        let full = predicted_snr(&t, &p, &w, 10.0).unwrap();
        let half = predicted_snr(&t, &p.clone().with_eta(0.5), &w, 10.0).unwrap();
        assert_relative_eq!(half, full / 2f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn gaussian_model_symmetry_and_linearity() {
        let p = SystemParams::reference();
        let a = integrate_pointer_fields(&p, &DrivePulse::arctan(0.3, 10.0), 20.0, 1e-3).unwrap();
        let b = integrate_pointer_fields(&p, &DrivePulse::arctan(0.9, 10.0), 20.0, 1e-3).unwrap();
        let (ma, mb) = (gaussian_model(&a, &p, 20.0).unwrap(), gaussian_model(&b, &p, 20.0).unwrap());
        assert_relative_eq!(ma.mean_plus, -ma.mean_minus, max_relative = 1e-12);
        assert_relative_eq!(mb.mean_plus, 3.0 * ma.mean_plus, max_relative = 1e-12);
        assert_eq!(ma.std, mb.std);
        assert_relative_eq!(ma.std * ma.std, 20.0, max_relative = 1e-15);
    }

    #[test]
    fn wiener_integral_variance_matches_model() {
        let (tau, dt): (f64, f64) = (5.0, 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 4000;
        let sums: Vec<f64> = (0..n)
            .map(|_| (0..(tau / dt) as usize).map(|_| dt.sqrt() * rng.sample::<f64, _>(StandardNormal)).sum())
            .collect();
        let var = sample_variance(&sums);
        // Relative standard error of a sample variance is √(2/(n−1)).
        assert!((var / tau - 1.0).abs() < 4.0 * (2.0 / (n as f64 - 1.0)).sqrt(), "{var}");
    }

    proptest! {
        #[test]
        fn snr_shift_invariant(
            a in prop::collection::vec(-10.0f64..10.0, 3..40),
            b in prop::collection::vec(-10.0f64..10.0, 3..40),
            shift in -100.0f64..100.0,
        ) {
            prop_assume!(sample_variance(&a) + sample_variance(&b) > 1e-6);
            let base = empirical_snr(&a, &b).unwrap();
            let a2: Vec<f64> = a.iter().map(|x| x + shift).collect();
            let b2: Vec<f64> = b.iter().map(|x| x + shift).collect();
            prop_assert!((empirical_snr(&a2, &b2).unwrap() - base).abs() < 1e-8 * (1.0 + base.abs()));
        }
    }
}

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::generator::{FieldDephasing, Generator, Mat8};
use crate::error::{Error, Result};
use crate::pointer::{PointerTable, SystemParams};
use crate::qubit::{DensityMatrix, Operator8, DIM};

/// Integration settings for a single conditional trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmeConfig {
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    #[serde(default = "one")]
    pub renormalize_every: usize,
    #[serde(default)]
    pub record_current: bool,
    /// Snapshot stride in steps; `0` keeps only the final state.
    #[serde(default)]
    pub record_state_stride: usize,
    /// Steps between eigenvalue checks; `0` disables them.
    #[serde(default = "default_positivity_stride")]
    pub positivity_stride: usize,
    #[serde(default)]
    pub field_dephasing: FieldDephasing,
}

fn one() -> usize {
    1
}

fn default_positivity_stride() -> usize {
    100
}

impl SmeConfig {
    pub fn new(dt: f64, t_end: f64, seed: u64) -> Self {
        Self {
            dt,
            t_end,
            seed,
            renormalize_every: 1,
            record_current: false,
            record_state_stride: 0,
            positivity_stride: default_positivity_stride(),
            field_dephasing: FieldDephasing::Polaron,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Checks the step against the table grid and the duration against its span.
    pub fn validate(&self, table: &PointerTable) -> Result<()> {
        if !(self.dt > 0.0 && self.t_end > 0.0) {
            return Err(Error::InvalidParameter(format!("dt={} and t_end={} must be positive", self.dt, self.t_end)));
        }
        if (self.dt - table.dt()).abs() > 1e-12 * table.dt() {
            return Err(Error::InvalidParameter(format!("dt={} differs from the table step {}", self.dt, table.dt())));
        }
        if self.steps() > table.steps() {
            return Err(Error::OutOfSpan { t: self.t_end, t_end: table.t_end() });
        }
        if self.renormalize_every == 0 {
            return Err(Error::InvalidParameter("renormalize_every must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Smallest eigenvalue seen at the checked steps and at the end.
    pub min_eigenvalue: f64,
    /// Largest `|tr ρ − 1|` removed by renormalization. The measurement
    /// update changes the trace at order `√dt`, so this is not a rounding
    /// diagnostic.
    pub max_trace_drift: f64,
}

#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub seed: u64,
    /// `j(t_n)` for `n = 0..steps`; empty unless requested.
    pub current: Vec<f64>,
    /// `s(τ) = Σ_n j_n dt`
    pub s: f64,
    pub final_state: DensityMatrix,
    pub snapshots: Vec<(f64, DensityMatrix)>,
    pub diagnostics: Diagnostics,
}

/// First-order conditional update in Kraus form.
///
/// With `dy = √η⟨c + c†⟩dt + dW` and the diagonal operator
/// `M = 1 − (iH + ½Σ_k L_k†L_k + ½c†c)dt + √η c dy + ½η c²(dy² − dt)`,
/// the unnormalized state is
/// `MρM† + dt[(1 − η)cρc† + Σ_k L_k ρ L_k†]`. Expanding to first order
/// reproduces the drift and the `√η M[c]ρ dW` diffusion of the SME, and
/// every term is completely positive, so no negative eigenvalues appear.
/// The `Printed` field model is not of this form; its difference from
/// `D[c]` is added as an extra elementwise drift.
pub(crate) struct Stepper<'a> {
    generator: Generator,
    table: &'a PointerTable,
    sqrt_eta: f64,
    eta: f64,
    lo: C64,
    dt: f64,
}

impl<'a> Stepper<'a> {
    pub fn new(table: &'a PointerTable, params: &SystemParams, model: FieldDephasing) -> Self {
        Self {
            generator: Generator::new(params, model),
            table,
            sqrt_eta: params.eta.sqrt(),
            eta: params.eta,
            lo: C64::from_polar(1.0, -params.phi_lo),
            dt: table.dt(),
        }
    }

    /// Advances `rho` in place from grid point `n` and returns `j_n = dy/dt`.
    /// The result is Hermitian but not renormalized.
    #[inline]
    pub fn step(&self, rho: &mut Mat8, n: usize, dw: f64) -> f64 {
        let dt = self.dt;
        let fields = self.table.at(n);
        let sigma = fields.sigma();
        let c: [C64; DIM] = sigma.map(|s| s * self.lo);
        let mean: f64 = (0..DIM).map(|m| 2.0 * rho[m][m].re * c[m].re).sum();
        let dy = self.sqrt_eta * mean * dt + dw;
        let ito = dy * dy - dt;

        let polaron = self.generator.model() == FieldDephasing::Polaron;
        let diag = self.generator.diag();
        let kraus: [C64; DIM] = std::array::from_fn(|m| {
            let h_field = if polaron { fields.drive * sigma[m].re } else { 0.0 };
            C64::from(1.0)
                + (diag[m] - I * h_field - 0.5 * c[m].norm_sqr()) * dt
                + c[m] * (self.sqrt_eta * dy)
                + c[m] * c[m] * (0.5 * self.eta * ito)
        });
        let extra = (!polaron).then(|| {
            let mut x = self.generator.field_terms(&fields);
            for m in 0..DIM {
                for n in 0..DIM {
                    x[m][n] -= c[m] * c[n].conj() - 0.5 * (c[m].norm_sqr() + c[n].norm_sqr());
                }
            }
            x
        });

        let jump = self.generator.dephase_jump();
        let unread = (1.0 - self.eta) * dt;
        let mut next = [[C64::default(); DIM]; DIM];
        for m in 0..DIM {
            for n in m..DIM {
                let mut coef = kraus[m] * kraus[n].conj() + jump[m][n] * dt + c[m] * c[n].conj() * unread;
                if let Some(x) = &extra {
                    coef += x[m][n] * dt;
                }
                next[m][n] = rho[m][n] * coef;
            }
        }
        self.generator.add_jumps_upper(rho, dt, &mut next);
        // Mirror the upper triangle: the update is Hermitian-compatible, so
        // this is the symmetrization (ρ + ρ†)/2 up to rounding.
        for m in 0..DIM {
            next[m][m].im = 0.0;
            for n in (m + 1)..DIM {
                next[n][m] = next[m][n].conj();
            }
        }
        *rho = next;
        dy / dt
    }
}

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn trace(m: &Mat8) -> f64 {
    (0..DIM).map(|i| m[i][i].re).sum()
}

/// One step from grid time `t` driven by the Wiener increment `dw`. Returns
/// the renormalized state and the current sample `j` with
/// `j dt = √η⟨c + c†⟩dt + dW`, evaluated on the incoming state.
pub fn sme_step(
    rho: &DensityMatrix,
    t: f64,
    table: &PointerTable,
    params: &SystemParams,
    config: &SmeConfig,
    dw: f64,
) -> Result<(DensityMatrix, f64)> {
    let n = table.index_of(t)?;
    if n >= table.steps() {
        return Err(Error::OutOfSpan { t, t_end: table.t_end() });
    }
    let stepper = Stepper::new(table, params, config.field_dephasing);
    let mut m = rho.as_operator().0;
    let j = stepper.step(&mut m, n, dw);
    let mut out = DensityMatrix::from_operator_unchecked(Operator8(m));
    if !out.is_finite() {
        return Err(Error::Numerical { step: n, reason: "non-finite state".into() });
    }
    out.renormalize()?;
    Ok((out, j))
}

/// Integrates one conditional trajectory over `[0, config.t_end]`.
pub fn run_trajectory(
    initial: &DensityMatrix,
    table: &PointerTable,
    params: &SystemParams,
    config: &SmeConfig,
) -> Result<TrajectoryRecord> {
    config.validate(table)?;
    params.validate()?;
    let stepper = Stepper::new(table, params, config.field_dephasing);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let sqrt_dt = config.dt.sqrt();
    let steps = config.steps();

    let mut rho = initial.as_operator().0;
    let mut current = Vec::with_capacity(if config.record_current { steps } else { 0 });
    let mut snapshots = Vec::new();
    let mut s = 0.0;
    let mut diagnostics = Diagnostics { min_eigenvalue: initial.min_eigenvalue(), max_trace_drift: 0.0 };
    let snap = |rho: &Mat8| DensityMatrix::from_operator_unchecked(Operator8(*rho));

    for n in 0..steps {
        if config.record_state_stride > 0 && n % config.record_state_stride == 0 {
            snapshots.push((table.t(n), snap(&rho)));
        }
        let dw = sqrt_dt * rng.sample::<f64, _>(StandardNormal);
        let j = stepper.step(&mut rho, n, dw);
        s += j * config.dt;
        if config.record_current {
            current.push(j);
        }

        if (n + 1) % config.renormalize_every == 0 || n + 1 == steps {
            let tr = trace(&rho);
            if !tr.is_finite() || tr <= 0.0 {
                return Err(Error::Numerical { step: n, reason: format!("trace became {tr}") });
            }
            diagnostics.max_trace_drift = diagnostics.max_trace_drift.max((tr - 1.0).abs());
            let inv = 1.0 / tr;
            rho.iter_mut().flatten().for_each(|z| *z *= inv);
        }
        if config.positivity_stride > 0 && (n + 1) % config.positivity_stride == 0 {
            let state = snap(&rho);
            if !state.is_finite() {
                return Err(Error::Numerical { step: n, reason: "non-finite state".into() });
            }
            diagnostics.min_eigenvalue = diagnostics.min_eigenvalue.min(state.min_eigenvalue());
        }
    }

    let final_state = snap(&rho);
    if !final_state.is_finite() {
        return Err(Error::Numerical { step: steps, reason: "non-finite final state".into() });
    }
    diagnostics.min_eigenvalue = diagnostics.min_eigenvalue.min(final_state.min_eigenvalue());
    if diagnostics.min_eigenvalue < -1e-6 {
        log::warn!("seed {}: state lost positivity (min eigenvalue {:.3e})", config.seed, diagnostics.min_eigenvalue);
    }
    if config.record_state_stride > 0 {
        snapshots.push((table.t(steps), final_state));
    }
    Ok(TrajectoryRecord { seed: config.seed, current, s, final_state, snapshots, diagnostics })
}

use num_complex::Complex64 as C64;

use super::params::{DrivePulse, SystemParams};
use crate::error::{Error, Result};
use crate::qubit::{BasisLabel, DIM};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Coherent amplitudes of both modes for every basis label on a uniform grid.
#[derive(Debug, Clone)]
pub struct PointerTable {
    dt: f64,
    sqrt_ka: f64,
    sqrt_kb: f64,
    alpha: Vec<[C64; DIM]>,
    beta: Vec<[C64; DIM]>,
    drive: Vec<f64>,
}

impl PointerTable {
    /// Number of grid points (`steps() + 1`).
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.t(self.steps())
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|n| self.t(n))
    }

    pub fn alpha(&self, n: usize) -> &[C64; DIM] {
        &self.alpha[n]
    }

    pub fn beta(&self, n: usize) -> &[C64; DIM] {
        &self.beta[n]
    }

    /// `ε(t_n)` used during integration.
    pub fn drive(&self, n: usize) -> f64 {
        self.drive[n]
    }

    /// `Σ = √κ_a α + √κ_b β` for all labels at grid point `n`.
    pub fn sigma(&self, n: usize) -> [C64; DIM] {
        let (a, b) = (&self.alpha[n], &self.beta[n]);
        std::array::from_fn(|l| a[l] * self.sqrt_ka + b[l] * self.sqrt_kb)
    }

    pub fn sigma_of(&self, n: usize, label: BasisLabel) -> C64 {
        let l = label.index();
        self.alpha[n][l] * self.sqrt_ka + self.beta[n][l] * self.sqrt_kb
    }

    /// Sum field `ξ = Σ_000 + Σ_011`.
    pub fn xi(&self, n: usize) -> C64 {
        let s = self.sigma(n);
        s[0] + s[3]
    }

    /// Difference field `δ = Σ_000 − Σ_011`.
    pub fn delta(&self, n: usize) -> C64 {
        let s = self.sigma(n);
        s[0] - s[3]
    }

    pub fn last_sigma(&self) -> [C64; DIM] {
        self.sigma(self.steps())
    }

    /// Grid index of `t`, accepting a relative mismatch of `1e-9` steps.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let x = t / self.dt;
        let n = x.round();
        if (x - n).abs() > 1e-9 * x.abs().max(1.0) || n < 0.0 {
            return Err(Error::OffGrid { t });
        }
        let n = n as usize;
        if n > self.steps() {
            return Err(Error::OutOfSpan { t, t_end: self.t_end() });
        }
        Ok(n)
    }

    /// Linear interpolation of `(α, β, ε)` at an arbitrary time inside the span.
    pub fn sample(&self, t: f64) -> Result<FieldSample> {
        let t_end = self.t_end();
        if !(0.0..=t_end * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::OutOfSpan { t, t_end });
        }
        let x = (t / self.dt).min(self.steps() as f64);
        let n = (x.floor() as usize).min(self.steps().saturating_sub(1));
        let w = x - n as f64;
        let m = (n + 1).min(self.steps());
        let lerp = |u: C64, v: C64| u * (1.0 - w) + v * w;
        Ok(FieldSample {
            alpha: std::array::from_fn(|l| lerp(self.alpha[n][l], self.alpha[m][l])),
            beta: std::array::from_fn(|l| lerp(self.beta[n][l], self.beta[m][l])),
            drive: self.drive[n] * (1.0 - w) + self.drive[m] * w,
            sqrt_ka: self.sqrt_ka,
            sqrt_kb: self.sqrt_kb,
        })
    }

    /// Field values at grid point `n`.
    pub fn at(&self, n: usize) -> FieldSample {
        FieldSample {
            alpha: self.alpha[n],
            beta: self.beta[n],
            drive: self.drive[n],
            sqrt_ka: self.sqrt_ka,
            sqrt_kb: self.sqrt_kb,
        }
    }
}

/// Fields at a single instant.
#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    pub alpha: [C64; DIM],
    pub beta: [C64; DIM],
    pub drive: f64,
    pub sqrt_ka: f64,
    pub sqrt_kb: f64,
}

impl FieldSample {
    pub fn zero() -> Self {
        Self { alpha: [C64::default(); DIM], beta: [C64::default(); DIM], drive: 0.0, sqrt_ka: 0.0, sqrt_kb: 0.0 }
    }

    pub fn sigma(&self) -> [C64; DIM] {
        std::array::from_fn(|l| self.alpha[l] * self.sqrt_ka + self.beta[l] * self.sqrt_kb)
    }
}

/// Per-label coefficients of the linear field equations
/// `α' = a_d α + c β + f_a ε`, `β' = b_d β + c α + f_b ε`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FieldCoefficients {
    pub a_diag: [C64; DIM],
    pub b_diag: [C64; DIM],
    pub cross: C64,
    pub force_a: C64,
    pub force_b: C64,
}

impl FieldCoefficients {
    pub fn new(params: &SystemParams) -> Self {
        let (ka, kb) = (params.kappa_a, params.kappa_b);
        Self {
            a_diag: std::array::from_fn(|l| {
                let lab = BasisLabel::from_index(l).expect("index < 8");
                -I * (params.delta_a + params.shift_a(lab)) - ka / 2.0
            }),
            b_diag: std::array::from_fn(|l| {
                let lab = BasisLabel::from_index(l).expect("index < 8");
                -I * (params.delta_b + params.shift_b(lab)) - kb / 2.0
            }),
            cross: C64::from(-(ka * kb).sqrt() / 2.0),
            force_a: -I * ka.sqrt(),
            force_b: -I * kb.sqrt(),
        }
    }

    fn rhs(&self, eps: f64, a: &[C64; DIM], b: &[C64; DIM]) -> ([C64; DIM], [C64; DIM]) {
        let da = std::array::from_fn(|l| self.a_diag[l] * a[l] + self.cross * b[l] + self.force_a * eps);
        let db = std::array::from_fn(|l| self.b_diag[l] * b[l] + self.cross * a[l] + self.force_b * eps);
        (da, db)
    }
}

fn axpy(y: &[C64; DIM], h: f64, k: &[C64; DIM]) -> [C64; DIM] {
    std::array::from_fn(|l| y[l] + k[l] * h)
}

/// Integrates the driven two-mode field equations for all eight labels from
/// vacuum with classical RK4.
///
/// The grid has `round(t_end / dt)` steps of exactly `dt`.
pub fn integrate_pointer_fields(
    params: &SystemParams,
    pulse: &DrivePulse,
    t_end: f64,
    dt: f64,
) -> Result<PointerTable> {
    params.validate()?;
    pulse.validate()?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_end={t_end} must be positive")));
    }
    let max = params.max_field_step();
    if !(dt > 0.0) || dt > max * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt, max });
    }
    let steps = (t_end / dt).round().max(1.0) as usize;
    let coef = FieldCoefficients::new(params);

    let mut alpha = Vec::with_capacity(steps + 1);
    let mut beta = Vec::with_capacity(steps + 1);
    let mut drive = Vec::with_capacity(steps + 1);
    let (mut a, mut b) = ([C64::default(); DIM], [C64::default(); DIM]);
    alpha.push(a);
    beta.push(b);
    drive.push(pulse.amplitude(0.0));

    for n in 0..steps {
        let t = n as f64 * dt;
        let (e0, e1, e2) = (pulse.amplitude(t), pulse.amplitude(t + dt / 2.0), pulse.amplitude(t + dt));
        let (ka1, kb1) = coef.rhs(e0, &a, &b);
        let (ka2, kb2) = coef.rhs(e1, &axpy(&a, dt / 2.0, &ka1), &axpy(&b, dt / 2.0, &kb1));
        let (ka3, kb3) = coef.rhs(e1, &axpy(&a, dt / 2.0, &ka2), &axpy(&b, dt / 2.0, &kb2));
        let (ka4, kb4) = coef.rhs(e2, &axpy(&a, dt, &ka3), &axpy(&b, dt, &kb3));
        for l in 0..DIM {
            a[l] += (ka1[l] + ka2[l] * 2.0 + ka3[l] * 2.0 + ka4[l]) * (dt / 6.0);
            b[l] += (kb1[l] + kb2[l] * 2.0 + kb3[l] * 2.0 + kb4[l]) * (dt / 6.0);
        }
        alpha.push(a);
        beta.push(b);
        drive.push(e2);
    }

    Ok(PointerTable { dt, sqrt_ka: params.kappa_a.sqrt(), sqrt_kb: params.kappa_b.sqrt(), alpha, beta, drive })
}

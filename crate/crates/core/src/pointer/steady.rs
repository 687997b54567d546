use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::params::{measured_quadrature, orthogonal_quadrature, SystemParams};
use super::table::FieldCoefficients;
use crate::error::{Error, Result};
use crate::qubit::{BasisLabel, Parity, DIM};

/// Steady-state `(α, β)` for every label under constant drive `eps_ss`.
pub fn steady_state_fields(params: &SystemParams, eps_ss: f64) -> Result<[(C64, C64); DIM]> {
    params.validate()?;
    let coef = FieldCoefficients::new(params);
    let mut out = [(C64::default(), C64::default()); DIM];
    for (l, slot) in out.iter_mut().enumerate() {
        // [a c; c b] [α; β] = -[f_a; f_b] ε
        let (a, b, c) = (coef.a_diag[l], coef.b_diag[l], coef.cross);
        let det = a * b - c * c;
        let scale = (a * b).norm() + (c * c).norm();
        if det.norm() < 1e-14 * scale {
            return Err(Error::SingularSystem { label: BasisLabel::from_index(l)?.to_string(), det: det.norm() });
        }
        let (ra, rb) = (-coef.force_a * eps_ss, -coef.force_b * eps_ss);
        *slot = ((ra * b - c * rb) / det, (a * rb - c * ra) / det);
    }
    Ok(out)
}

/// Steady-state output field `Σ = √κ_a α + √κ_b β` per label.
pub fn steady_state_sigma(params: &SystemParams, eps_ss: f64) -> Result<[C64; DIM]> {
    let f = steady_state_fields(params, eps_ss)?;
    let (sa, sb) = (params.kappa_a.sqrt(), params.kappa_b.sqrt());
    Ok(std::array::from_fn(|l| f[l].0 * sa + f[l].1 * sb))
}

/// Default relative tolerance for the quadrature conditions.
pub const LOCUS_TOL: f64 = 1e-9;

/// Local-oscillator phase that makes the measured quadrature equal within
/// each parity sector and opposite between them, at unit steady drive.
pub fn calibrate_lo_phase(params: &SystemParams) -> Result<f64> {
    calibrate_from_sigma(&steady_state_sigma(params, 1.0)?, LOCUS_TOL)
}

/// Phase calibration from a given set of output fields.
///
/// Every within-parity difference and the common-mode sum
/// `mean(Σ_even) + mean(Σ_odd)` must vanish in the measured quadrature.
/// The returned phase lies in `[0, π)`; the other solution is `φ + π`.
pub fn calibrate_from_sigma(sigma: &[C64; DIM], tol: f64) -> Result<f64> {
    let scale = sigma.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::NotOnLocus("all output fields vanish".into()));
    }
    let mean = |p: Parity| BasisLabel::sector(p).map(|l| sigma[l.index()]).sum::<C64>() / 4.0;
    let (even, odd) = (mean(Parity::Even), mean(Parity::Odd));

    let mut constraints = vec![even + odd];
    for p in [Parity::Even, Parity::Odd] {
        let labels: Vec<_> = BasisLabel::sector(p).collect();
        for w in labels.windows(2) {
            constraints.push(sigma[w[0].index()] - sigma[w[1].index()]);
        }
    }
    let pivot = constraints.iter().copied().fold(C64::default(), |m, z| if z.norm() > m.norm() { z } else { m });
    let phi = if pivot.norm() <= tol * scale { (even - odd).arg() } else { pivot.arg() + PI / 2.0 }.rem_euclid(PI);

    if let Some(bad) = constraints.iter().find(|z| measured_quadrature(**z, phi).abs() > tol * scale) {
        return Err(Error::NotOnLocus(format!(
            "no quadrature separates the parities (residual {:.3e})",
            measured_quadrature(*bad, phi).abs() / scale
        )));
    }
    if measured_quadrature(even - odd, phi).abs() <= tol * scale {
        return Err(Error::NotOnLocus("even and odd fields coincide".into()));
    }
    // Fold values within rounding of π back onto 0.
    Ok(if PI - phi < 1e-12 { 0.0 } else { phi })
}

/// Grid for [`parity_condition_scan`] in units of `chi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanSpec {
    pub chi: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub n_kappa: usize,
    pub delta_min: f64,
    pub delta_max: f64,
    pub n_delta: usize,
    pub phi_lo: f64,
    pub tol: f64,
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self {
            chi: 1.0,
            kappa_min: 0.5,
            kappa_max: 10.0,
            n_kappa: 20,
            delta_min: 0.1,
            delta_max: 4.0,
            n_delta: 40,
            phi_lo: 0.0,
            tol: LOCUS_TOL,
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Labels with `χ_ijk = −3χ, +χ` (even) and `−χ, +3χ` (odd).
pub const REPRESENTATIVE_LABELS: [&str; 4] = ["000", "011", "001", "111"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceRow {
    pub kappa: f64,
    pub delta: f64,
    pub label: String,
    pub sigma_re: f64,
    pub sigma_im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocusPoint {
    pub kappa: f64,
    pub delta: f64,
    /// Measured quadrature of the two parity sectors per unit drive.
    pub q_even: f64,
    pub q_odd: f64,
    /// The orthogonal quadrature also coincides within each parity.
    pub orthogonal_match: bool,
    /// `q_even = −q_odd` within tolerance.
    pub mirrored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCheck {
    pub kappa: f64,
    pub delta: f64,
    pub within_parity_gap: f64,
    pub on_locus: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub surface: Vec<SurfaceRow>,
    pub locus: Vec<LocusPoint>,
    pub reference: ReferenceCheck,
}

impl ScanReport {
    pub fn orthogonal_sublocus(&self) -> impl Iterator<Item = &LocusPoint> {
        self.locus.iter().filter(|p| p.orthogonal_match)
    }
}

struct Representative {
    even: [C64; 2],
    odd: [C64; 2],
}

fn representative(chi: f64, kappa: f64, delta: f64) -> Result<Representative> {
    let s = steady_state_sigma(&SystemParams::symmetric(chi, kappa, delta), 1.0)?;
    let at = |l: &str| s[l.parse::<BasisLabel>().expect("valid label").index()];
    Ok(Representative { even: [at("000"), at("011")], odd: [at("001"), at("111")] })
}

/// Scans the symmetric family over `(κ, Δ)`, records the output fields of the
/// four distinct shifts, and locates the within-parity coincidence locus by
/// bisection in `Δ` for every `κ`, plus a golden-section search at local
/// minima of the gap to catch tangent roots.
pub fn parity_condition_scan(spec: &ScanSpec) -> Result<ScanReport> {
    if spec.n_kappa > 0 && !(spec.kappa_min > 0.0 && spec.kappa_max >= spec.kappa_min) {
        return Err(Error::InvalidParameter("kappa range must be positive and ordered".into()));
    }
    if spec.n_delta > 0 && spec.delta_max < spec.delta_min {
        return Err(Error::InvalidParameter("delta range must be ordered".into()));
    }
    let q = |z: C64| measured_quadrature(z, spec.phi_lo);
    let gap = |r: &Representative| q(r.even[0] - r.even[1]);

    let kappas = linspace(spec.kappa_min, spec.kappa_max, spec.n_kappa);
    let deltas = linspace(spec.delta_min, spec.delta_max, spec.n_delta);

    let mut surface = Vec::with_capacity(kappas.len() * deltas.len() * 4);
    let mut locus = Vec::new();
    for &kappa in &kappas {
        let mut gaps = Vec::with_capacity(deltas.len());
        for &delta in &deltas {
            let r = representative(spec.chi, kappa, delta)?;
            for (name, z) in REPRESENTATIVE_LABELS.iter().zip(r.even.iter().chain(&r.odd)) {
                surface.push(SurfaceRow { kappa, delta, label: name.to_string(), sigma_re: z.re, sigma_im: z.im });
            }
            gaps.push(gap(&r));
        }
        let gap_at = |d: f64| Ok(gap(&representative(spec.chi, kappa, d)?));
        let mut roots = Vec::new();
        for i in 0..gaps.len() {
            if gaps[i] == 0.0 {
                roots.push(deltas[i]);
            }
            if i > 0 && gaps[i - 1] != 0.0 && gaps[i] != 0.0 && gaps[i - 1].signum() != gaps[i].signum() {
                roots.push(bisect(gap_at, deltas[i - 1], deltas[i], gaps[i - 1])?);
            }
            // Tangent roots never change sign.
            if i > 0 && i + 1 < gaps.len() && gaps[i].abs() < gaps[i - 1].abs() && gaps[i].abs() < gaps[i + 1].abs() {
                roots.push(golden_min(|d| Ok(gap_at(d)?.abs()), deltas[i - 1], deltas[i + 1])?);
            }
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() < 1e-7);
        for root in roots {
            locus.push(locus_point(spec, kappa, root)?);
        }
    }
    locus.retain(|p| p.q_even.is_finite());

    let (rk, rd) = (2.0 * spec.chi, 3f64.sqrt() * spec.chi);
    let r = representative(spec.chi, rk, rd)?;
    let scale = r.even.iter().chain(&r.odd).map(|z| z.norm()).fold(0.0, f64::max);
    let within = gap(&r).abs().max(q(r.odd[0] - r.odd[1]).abs()) / scale;
    Ok(ScanReport {
        surface,
        locus,
        reference: ReferenceCheck { kappa: rk, delta: rd, within_parity_gap: within, on_locus: within < spec.tol },
    })
}

fn bisect(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-15 * mid.abs().max(1.0) {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn golden_min(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<f64> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > 1e-13 * b.abs().max(1.0) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { c } else { d })
}

fn locus_point(spec: &ScanSpec, kappa: f64, delta: f64) -> Result<LocusPoint> {
    let r = representative(spec.chi, kappa, delta)?;
    let scale = r.even.iter().chain(&r.odd).map(|z| z.norm()).fold(0.0, f64::max);
    let q = |z: C64| measured_quadrature(z, spec.phi_lo);
    let p = |z: C64| orthogonal_quadrature(z, spec.phi_lo);
    let coincide = (q(r.even[0] - r.even[1]).abs().max(q(r.odd[0] - r.odd[1]).abs())) <= spec.tol * scale;
    if !coincide {
        // A sign change across a discontinuity rather than a true root.
        return Ok(LocusPoint {
            kappa,
            delta,
            q_even: f64::NAN,
            q_odd: f64::NAN,
            orthogonal_match: false,
            mirrored: false,
        });
    }
    let q_even = q(r.even[0]);
    let q_odd = q(r.odd[0]);
    Ok(LocusPoint {
        kappa,
        delta,
        q_even,
        q_odd,
        orthogonal_match: p(r.even[0] - r.even[1]).abs().max(p(r.odd[0] - r.odd[1]).abs()) <= spec.tol * scale,
        mirrored: (q_even + q_odd).abs() <= spec.tol * scale,
    })
}

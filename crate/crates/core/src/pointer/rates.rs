use serde::{Deserialize, Serialize};

use super::params::{DrivePulse, SystemParams};
use super::table::{integrate_pointer_fields, PointerTable};
use crate::error::{Error, Result};

/// Parity and intra-parity measurement rates on the table grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRates {
    pub parity: Vec<f64>,
    pub intra_parity: Vec<f64>,
}

/// `Γ^P = η q(ξ)²` and `Γ^IP = η q(δ)²` in the measured quadrature.
pub fn measurement_rates(table: &PointerTable, params: &SystemParams) -> MeasurementRates {
    let (parity, intra_parity) = (0..table.len())
        .map(|n| {
            let (x, d) = (params.quadrature(table.xi(n)), params.quadrature(table.delta(n)));
            (params.eta * x * x, params.eta * d * d)
        })
        .unzip();
    MeasurementRates { parity, intra_parity }
}

/// Trapezoid rule on a uniform grid.
pub fn trapezoid(values: &[f64], dt: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => dt * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakagePoint {
    pub sigma: f64,
    /// `∫ |q(δ)| dt`
    pub integral: f64,
    pub peak: f64,
    /// Time from `t = 0` to the last grid point where `|q(δ)|` exceeds half its peak.
    pub support: f64,
}

/// Integrated intra-parity field difference for arctan pulses of each rise
/// rate in `sigmas`.
///
/// Each pulse is switched on at `10/σ` and followed for `200/σ + 50/κ` after
/// that, long enough for the arctan tail to contribute below a percent.
pub fn intra_parity_leakage(params: &SystemParams, eps_ss: f64, sigmas: &[f64]) -> Result<Vec<LeakagePoint>> {
    let kappa = params.kappa_a.min(params.kappa_b);
    sigmas
        .iter()
        .map(|&sigma| {
            if !(sigma > 0.0) {
                return Err(Error::InvalidParameter(format!("sigma={sigma} must be positive")));
            }
            let pulse = DrivePulse::arctan(eps_ss, sigma);
            let t_end = pulse.turn_on() + 200.0 / sigma + 50.0 / kappa;
            let dt = params.max_field_step().min(0.02 / sigma).min(1e-3);
            let table = integrate_pointer_fields(params, &pulse, t_end, dt)?;
            let q: Vec<f64> = (0..table.len()).map(|n| params.quadrature(table.delta(n)).abs()).collect();
            let peak = q.iter().copied().fold(0.0, f64::max);
            let support = q.iter().rposition(|&v| v > 0.5 * peak).map_or(0.0, |n| table.t(n));
            Ok(LeakagePoint { sigma, integral: trapezoid(&q, table.dt()), peak, support })
        })
        .collect()
}

/// Relative spread `(max − min) / min` of the leakage integrals.
pub fn leakage_variation(points: &[LeakagePoint]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let (lo, hi) =
        points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.integral), hi.max(p.integral)));
    (hi - lo) / lo.abs().max(f64::MIN_POSITIVE)
}

/// Detuning and coupling implied by a Purcell rate through the dispersive
/// relation: `Δ = 4χ²/γ_p`, `g = √(4χ³/γ_p)`.
pub fn physical_backout(chi: f64, gamma_p: f64) -> Result<(f64, f64)> {
    if !(gamma_p > 0.0) || !chi.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma_p={gamma_p} must be positive")));
    }
    Ok((4.0 * chi * chi / gamma_p, (4.0 * chi.powi(3) / gamma_p).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn backout_published_numbers() {
        // χ = 1 MHz, γ_p = χ/400
        let (delta, g) = physical_backout(1e6, 1e6 / 400.0).unwrap();
        assert_relative_eq!(delta, 1.6e9, max_relative = 1e-12);
        assert_relative_eq!(g, 4e7, max_relative = 1e-12);
        let (d2, g2) = physical_backout(1e6, 4e6 / 400.0).unwrap();
        assert_relative_eq!(g2, g / 2.0, max_relative = 1e-12);
        assert_relative_eq!(d2 * 4e6 / 400.0, 4e12, max_relative = 1e-12);
        assert!(physical_backout(1.0, 0.0).is_err());
    }

    #[test]
    fn trapezoid_rule() {
        assert_eq!(trapezoid(&[], 0.1), 0.0);
        assert_relative_eq!(trapezoid(&[0.0, 1.0, 2.0], 0.5), 1.0);
    }

    #[test]
    fn rates_vanish_without_efficiency() {
        let p = SystemParams::reference().with_eta(0.0);
        let t = integrate_pointer_fields(&p, &DrivePulse::arctan(1.0, 10.0), 3.0, 1e-3).unwrap();
        let r = measurement_rates(&t, &p);
        assert!(r.parity.iter().chain(&r.intra_parity).all(|&v| v == 0.0));
    }

    #[test]
    fn intra_parity_rate_transient_then_zero() {
        let p = SystemParams::reference();
        let t = integrate_pointer_fields(&p, &DrivePulse::arctan(1.0, 10.0), 3.0, 1e-3).unwrap();
        assert!(measurement_rates(&t, &p).intra_parity[1500] > 1e-3);
        let t = integrate_pointer_fields(&p, &DrivePulse::constant(1.0), 30.0, 1e-3).unwrap();
        let r = measurement_rates(&t, &p);
        let last = *r.intra_parity.last().unwrap();
        assert!(last <= 1e-12 * r.parity.last().unwrap(), "{last}");
    }

    #[test]
    fn leakage_linear_in_drive() {
        let p = SystemParams::reference();
        let a = intra_parity_leakage(&p, 1.0, &[10.0]).unwrap()[0].integral;
        let b = intra_parity_leakage(&p, 0.25, &[10.0]).unwrap()[0].integral;
        assert_relative_eq!(b, a / 4.0, max_relative = 1e-10);
    }

    #[test]
    fn sharper_edge_higher_peak_shorter_support() {
        let p = SystemParams::reference();
        let pts = intra_parity_leakage(&p, 1.0, &[1.0, 20.0]).unwrap();
        assert!(pts[1].peak > pts[0].peak);
        assert!(pts[1].support - 10.0 / 20.0 < pts[0].support - 10.0);
    }
}

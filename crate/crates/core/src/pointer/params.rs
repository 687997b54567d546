use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubit::BasisLabel;

/// Circuit and decoherence rates. Times are measured in units of `1/chi`
/// when `chi = 1`, which is what every scenario uses.
///
/// The frame co-rotates with each dressed qubit frequency, so
/// `omega_frame` holds only what is left over after that choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SystemParams {
    pub chi: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    /// Per-qubit dispersive shift seen by mode a.
    pub chi_a: [f64; 3],
    /// Per-qubit dispersive shift seen by mode b.
    pub chi_b: [f64; 3],
    pub gamma_1: [f64; 3],
    pub gamma_phi: [f64; 3],
    /// Aggregate Purcell rate, applied to every qubit as a `σ_-` channel.
    pub gamma_p: f64,
    /// Per-mode Purcell factors `g/Δ`; zero unless an asymmetric study sets them.
    pub lambda_a: [f64; 3],
    pub lambda_b: [f64; 3],
    pub eta: f64,
    pub phi_lo: f64,
    pub omega_frame: [f64; 3],
}

/// Missing fields in a config take the reference-point values.
impl Default for SystemParams {
    fn default() -> Self {
        Self::reference()
    }
}

impl SystemParams {
    /// `κ_a = κ_b = kappa`, `Δ_a = -Δ_b = delta`, every qubit shifting both
    /// modes by `chi`. No decoherence, unit efficiency, `φ = 0`.
    pub fn symmetric(chi: f64, kappa: f64, delta: f64) -> Self {
        Self {
            chi,
            kappa_a: kappa,
            kappa_b: kappa,
            delta_a: delta,
            delta_b: -delta,
            chi_a: [chi; 3],
            chi_b: [chi; 3],
            gamma_1: [0.0; 3],
            gamma_phi: [0.0; 3],
            gamma_p: 0.0,
            lambda_a: [0.0; 3],
            lambda_b: [0.0; 3],
            eta: 1.0,
            phi_lo: 0.0,
            omega_frame: [0.0; 3],
        }
    }

    /// The optimal operating point `κ = 2χ`, `Δ = √3 χ` with `χ = 1`.
    ///
    /// `phi_lo = 0` is the calibrated quadrature at this point (see
    /// [`crate::pointer::calibrate_lo_phase`]).
    pub fn reference() -> Self {
        Self::symmetric(1.0, 2.0, 3f64.sqrt())
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_phi_lo(mut self, phi: f64) -> Self {
        self.phi_lo = phi;
        self
    }

    /// Purcell rate `gamma_p` on every qubit and pure dephasing `gamma_phi`.
    pub fn with_decoherence(mut self, gamma_p: f64, gamma_phi: f64) -> Self {
        self.gamma_p = gamma_p;
        self.gamma_phi = [gamma_phi; 3];
        self
    }

    pub fn without_decoherence(mut self) -> Self {
        self.gamma_p = 0.0;
        self.gamma_1 = [0.0; 3];
        self.gamma_phi = [0.0; 3];
        self.lambda_a = [0.0; 3];
        self.lambda_b = [0.0; 3];
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let finite =
            [self.chi, self.kappa_a, self.kappa_b, self.delta_a, self.delta_b, self.gamma_p, self.eta, self.phi_lo]
                .into_iter()
                .chain(self.chi_a)
                .chain(self.chi_b)
                .chain(self.gamma_1)
                .chain(self.gamma_phi)
                .chain(self.lambda_a)
                .chain(self.lambda_b)
                .chain(self.omega_frame)
                .all(f64::is_finite);
        if !finite {
            return bad("all parameters must be finite".into());
        }
        if self.kappa_a <= 0.0 || self.kappa_b <= 0.0 {
            return bad(format!("linewidths must be positive (kappa_a={}, kappa_b={})", self.kappa_a, self.kappa_b));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return bad(format!("eta={} outside [0, 1]", self.eta));
        }
        if self.gamma_p < 0.0 || self.gamma_1.iter().chain(&self.gamma_phi).any(|&g| g < 0.0) {
            return bad("decoherence rates must be non-negative".into());
        }
        Ok(())
    }

    /// `κ_a = κ_b`, `Δ_a = -Δ_b` and all eight per-qubit shifts equal to `chi`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()));
        close(self.kappa_a, self.kappa_b)
            && close(self.delta_a, -self.delta_b)
            && self.chi_a.iter().chain(&self.chi_b).all(|&c| close(c, self.chi))
    }

    /// `χ^a_ijk = ⟨ijk| Σ_l χ^a_l σ_z^(l) |ijk⟩`
    pub fn shift_a(&self, label: BasisLabel) -> f64 {
        label.weighted_z(&self.chi_a)
    }

    pub fn shift_b(&self, label: BasisLabel) -> f64 {
        label.weighted_z(&self.chi_b)
    }

    /// Total `σ_-` rate on qubit `q` (0-based): intrinsic, aggregate Purcell
    /// and the per-mode Purcell channels.
    pub fn relaxation_rate(&self, q: usize) -> f64 {
        self.gamma_1[q]
            + self.gamma_p
            + self.kappa_a * self.lambda_a[q].powi(2)
            + self.kappa_b * self.lambda_b[q].powi(2)
    }

    pub fn has_decoherence(&self) -> bool {
        (0..3).any(|q| self.relaxation_rate(q) > 0.0 || self.gamma_phi[q] > 0.0)
    }

    /// Quadrature of an output amplitude picked out by the local oscillator:
    /// `Re(z e^{-iφ})`. At `φ = π/2` this is `Im z`.
    pub fn quadrature(&self, z: C64) -> f64 {
        measured_quadrature(z, self.phi_lo)
    }

    /// Largest integration step allowed by the pointer-field stability rule.
    pub fn max_field_step(&self) -> f64 {
        let fastest = self.kappa_a.max(self.kappa_b).max(self.chi.abs());
        0.01 / fastest
    }
}

/// `Re(z e^{-iφ})`
pub fn measured_quadrature(z: C64, phi: f64) -> f64 {
    (z * C64::from_polar(1.0, -phi)).re
}

/// The orthogonal quadrature `Im(z e^{-iφ})`.
pub fn orthogonal_quadrature(z: C64, phi: f64) -> f64 {
    (z * C64::from_polar(1.0, -phi)).im
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseShape {
    Arctan,
    Constant,
}

/// Measurement-tone envelope `ε(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrivePulse {
    pub shape: PulseShape,
    pub eps_ss: f64,
    /// Inverse rise time of the arctan edge.
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    /// Turn-on centre; defaults to `10/sigma`.
    #[serde(default)]
    pub t_on: Option<f64>,
}

fn default_sigma() -> f64 {
    10.0
}

impl DrivePulse {
    pub fn arctan(eps_ss: f64, sigma: f64) -> Self {
        Self { shape: PulseShape::Arctan, eps_ss, sigma, t_on: None }
    }

    pub fn constant(eps_ss: f64) -> Self {
        Self { shape: PulseShape::Constant, eps_ss, sigma: default_sigma(), t_on: None }
    }

    pub fn with_t_on(mut self, t_on: f64) -> Self {
        self.t_on = Some(t_on);
        self
    }

    pub fn with_eps(mut self, eps_ss: f64) -> Self {
        self.eps_ss = eps_ss;
        self
    }

    pub fn turn_on(&self) -> f64 {
        self.t_on.unwrap_or(10.0 / self.sigma)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_ss.is_finite() && self.eps_ss >= 0.0) {
            return Err(Error::InvalidParameter(format!("eps_ss={} must be finite and >= 0", self.eps_ss)));
        }
        if self.shape == PulseShape::Arctan && !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma={} must be positive", self.sigma)));
        }
        if !self.turn_on().is_finite() {
            return Err(Error::InvalidParameter("t_on must be finite".into()));
        }
        Ok(())
    }

    pub fn amplitude(&self, t: f64) -> f64 {
        match self.shape {
            PulseShape::Constant => self.eps_ss,
            PulseShape::Arctan => self.eps_ss / PI * ((self.sigma * (t - self.turn_on())).atan() + PI / 2.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn arctan_midpoint_and_limit() {
        let p = DrivePulse::arctan(2.0, 10.0).with_t_on(3.0);
        assert_relative_eq!(p.amplitude(3.0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(p.amplitude(1e12), 2.0, epsilon = 1e-9);
        assert!(p.amplitude(-1e12) < 1e-9);
    }

    #[test]
    fn default_turn_on_residual() {
        let p = DrivePulse::arctan(1.0, 10.0);
        assert_relative_eq!(p.turn_on(), 1.0);
        // ε(0) = ε_ss arctan(1/(σ t_on)) / π
        assert_relative_eq!(p.amplitude(0.0), (0.1f64).atan() / PI, max_relative = 1e-14);
    }

    #[test]
    fn pointer_run_drive_setting() {
        let p = DrivePulse::arctan(1f64.sqrt(), 10.0);
        assert_eq!(p.eps_ss, 1.0);
        assert!(p.validate().is_ok());
        assert!(DrivePulse::arctan(1.0, 0.0).validate().is_err());
        assert!(DrivePulse::constant(-1.0).validate().is_err());
    }

    #[test]
    fn reference_is_symmetric() {
        let p = SystemParams::reference();
        assert!(p.validate().is_ok());
        assert!(p.is_symmetric(1e-12));
        let l111: BasisLabel = "111".parse().unwrap();
        let l000: BasisLabel = "000".parse().unwrap();
        assert_eq!(p.shift_a(l111), 3.0);
        assert_eq!(p.shift_b(l000), -3.0);
    }

    #[test]
    fn validation_rejects_bad_rates() {
        let mut p = SystemParams::reference();
        p.kappa_a = 0.0;
        assert!(p.validate().is_err());
        let p = SystemParams::reference().with_eta(1.5);
        assert!(p.validate().is_err());
        let p = SystemParams::reference().with_decoherence(-1.0, 0.0);
        assert!(p.validate().is_err());
    }

    #[test]
    fn quadrature_convention() {
        let z = C64::new(0.3, -0.7);
        assert_relative_eq!(measured_quadrature(z, 0.0), 0.3);
        assert_relative_eq!(measured_quadrature(z, PI / 2.0), -0.7, epsilon = 1e-15);
        assert_relative_eq!(orthogonal_quadrature(z, 0.0), -0.7);
    }
}

//! JSON scenario configuration. Every field except `scenario` has a default,
//! so `{"scenario": "transients"}` is a complete config.

use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use parity_core::pointer::{DrivePulse, ScanSpec, SystemParams};
use parity_core::qubit::{BasisLabel, DensityMatrix, PureState, DIM};
use parity_core::sme::FieldDephasing;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    SteadyScan,
    PointerTraj,
    Efficiency,
    Transients,
    Risetime,
    Optimal,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().expect("string"))
    }
}

/// Initial qubit state: `"psi_pre"`, `"psi_plus"`, `"psi_minus"`, a basis
/// label such as `"011"`, or eight `[re, im]` amplitudes (normalized on load).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Named(String),
    Amplitudes(Vec<[f64; 2]>),
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Named("psi_pre".into())
    }
}

impl InitialState {
    pub fn resolve(&self) -> Result<DensityMatrix, ConfigError> {
        let psi = match self {
            InitialState::Named(name) => match name.as_str() {
                "psi_pre" => PureState::psi_pre(),
                "psi_plus" => PureState::psi_plus(),
                "psi_minus" => PureState::psi_minus(),
                label => PureState::basis(
                    label.parse::<BasisLabel>().map_err(|_| ConfigError(format!("unknown initial state {name:?}")))?,
                ),
            },
            InitialState::Amplitudes(a) => {
                if a.len() != DIM {
                    return Err(ConfigError(format!("expected {DIM} amplitudes, got {}", a.len())));
                }
                let amps: [C64; DIM] = std::array::from_fn(|i| C64::new(a[i][0], a[i][1]));
                PureState::normalized(amps).map_err(|e| ConfigError(e.to_string()))?
            }
        };
        Ok(psi.into())
    }
}

/// One ensemble: measurement time and an optional efficiency override.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunPoint {
    pub tau: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

impl RunPoint {
    pub fn new(tau: f64) -> Self {
        Self { tau, eta: None }
    }

    pub fn with_eta(tau: f64, eta: f64) -> Self {
        Self { tau, eta: Some(eta) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decoherence {
    pub gamma_p: f64,
    pub gamma_phi: f64,
}

impl Decoherence {
    /// `γ_p = χ/400`, `γ_φ = χ/300`.
    pub fn standard() -> Self {
        Self { gamma_p: 1.0 / 400.0, gamma_phi: 1.0 / 300.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub params: SystemParams,
    /// Pulse shape; `eps_ss` is replaced per run when `snr_target` is set.
    #[serde(default = "default_pulse")]
    pub pulse: DrivePulse,
    /// Drive chosen per run so that the steady-state SNR estimate equals
    /// this value.
    #[serde(default)]
    pub snr_target: Option<f64>,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub field_dephasing: FieldDephasing,
    #[serde(default = "default_n")]
    pub n_trajectories: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub initial: InitialState,
    #[serde(default)]
    pub s_th: f64,
    /// Threshold grid for post-selection sweeps.
    #[serde(default = "default_grid")]
    pub s_th_grid: Vec<f64>,
    /// Ensembles to run. Empty means the scenario default.
    #[serde(default)]
    pub runs: Vec<RunPoint>,
    /// Applied on top of `params`; `null` leaves the rates in `params` alone.
    #[serde(default)]
    pub decoherence: Option<Decoherence>,
    /// Measurement time of the threshold sweep in `optimal`.
    #[serde(default = "default_sweep_tau")]
    pub sweep_tau: f64,
    /// Histogram bin count; `null` uses Freedman–Diaconis.
    #[serde(default)]
    pub bins: Option<usize>,
    #[serde(default)]
    pub scan: ScanSpec,
    /// Duration of the pointer-field run.
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    /// Grid points between written rows of time series.
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default = "default_sigmas")]
    pub sigmas: Vec<f64>,
    /// Step of the no-measurement benchmark curve.
    #[serde(default = "default_benchmark_dt")]
    pub benchmark_dt: f64,
    /// Only used to annotate reports with physical times.
    #[serde(default)]
    pub chi_hz: Option<f64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_pulse() -> DrivePulse {
    DrivePulse::arctan(1.0, 10.0)
}
fn default_dt() -> f64 {
    1e-3
}
fn default_n() -> usize {
    1000
}
fn default_grid() -> Vec<f64> {
    (0..=30).map(|i| 0.5 * i as f64).collect()
}
fn default_sweep_tau() -> f64 {
    10.0
}
fn default_t_end() -> f64 {
    10.0
}
fn default_stride() -> usize {
    10
}
fn default_sigmas() -> Vec<f64> {
    // log-spaced over [0.5, 50]
    (0..=8).map(|i| 0.5 * 10f64.powf(i as f64 / 4.0)).collect()
}
fn default_benchmark_dt() -> f64 {
    1e-2
}

pub const FAST_TRAJECTORIES: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl ScenarioConfig {
    /// The setting used for the corresponding study, with 1000 trajectories.
    pub fn default_for(scenario: Scenario) -> Self {
        let mut c: Self = serde_json::from_value(serde_json::json!({ "scenario": scenario })).expect("defaults");
        let snr = |x: f64| Some(x * 2f64.sqrt());
        match scenario {
            Scenario::SteadyScan | Scenario::Risetime => {}
            Scenario::PointerTraj => c.pulse = DrivePulse::arctan(1.0, 10.0),
            Scenario::Efficiency => {
                c.snr_target = snr(4.0);
                c.runs = vec![RunPoint::with_eta(20.0, 1.0), RunPoint::with_eta(40.0, 0.5)];
            }
            Scenario::Transients => {
                c.snr_target = snr(4.0);
                c.runs = vec![RunPoint::new(10.0), RunPoint::new(100.0)];
            }
            Scenario::Optimal => {
                c.snr_target = snr(2.0);
                c.s_th = 5.0;
                c.runs = [2.5, 5.0, 10.0, 20.0, 40.0].into_iter().map(RunPoint::new).collect();
            }
        }
        c
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        let c: Self = serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        c.validate()?;
        Ok(c)
    }

    /// Scenario defaults for `runs`, filled in when the list is empty.
    pub fn with_default_runs(mut self) -> Self {
        if self.runs.is_empty() {
            self.runs = Self::default_for(self.scenario).runs;
        }
        if self.snr_target.is_none()
            && matches!(self.scenario, Scenario::Efficiency | Scenario::Transients | Scenario::Optimal)
        {
            self.snr_target = Self::default_for(self.scenario).snr_target;
        }
        self
    }

    /// `params` with the decoherence override applied.
    pub fn system(&self) -> SystemParams {
        match self.decoherence {
            Some(d) => self.params.clone().without_decoherence().with_decoherence(d.gamma_p, d.gamma_phi),
            None => self.params.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |m: String| Err(ConfigError(m));
        self.system().validate().map_err(|e| ConfigError(e.to_string()))?;
        self.pulse.validate().map_err(|e| ConfigError(e.to_string()))?;
        self.initial.resolve()?;
        if !(self.dt > 0.0 && self.dt <= self.params.max_field_step()) {
            return err(format!("dt={} must be in (0, {}]", self.dt, self.params.max_field_step()));
        }
        if self.n_trajectories == 0 {
            return err("n_trajectories must be positive".into());
        }
        if !(self.s_th >= 0.0) || self.s_th_grid.iter().any(|&x| !(x >= 0.0)) {
            return err("thresholds must be non-negative".into());
        }
        if let Some(x) = self.snr_target {
            if !(x > 0.0 && x.is_finite()) {
                return err(format!("snr_target={x} must be positive"));
            }
        }
        for r in &self.runs {
            if !(r.tau > 0.0 && r.tau.is_finite()) {
                return err(format!("run tau={} must be positive", r.tau));
            }
            if let Some(eta) = r.eta {
                if !(0.0..=1.0).contains(&eta) || eta == 0.0 && self.snr_target.is_some() {
                    return err(format!("run eta={eta} must be in (0, 1]"));
                }
            }
        }
        if !(self.t_end > 0.0) || !(self.benchmark_dt > 0.0) || self.stride == 0 {
            return err("t_end, benchmark_dt and stride must be positive".into());
        }
        if self.sigmas.iter().any(|&s| !(s > 0.0)) {
            return err("sigmas must be positive".into());
        }
        if self.bins == Some(0) {
            return err("bins must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses() {
        let c: ScenarioConfig = serde_json::from_str(r#"{"scenario": "steady-scan"}"#).unwrap();
        assert_eq!(c.params, SystemParams::reference());
        assert_eq!(c.n_trajectories, 1000);
        c.validate().unwrap();
    }

    #[test]
    fn partial_params_fill_from_reference() {
        let c: ScenarioConfig =
            serde_json::from_str(r#"{"scenario": "transients", "params": {"eta": 0.5}, "scan": {"n_kappa": 0}}"#)
                .unwrap();
        assert_eq!(c.params, SystemParams::reference().with_eta(0.5));
        assert_eq!(c.scan.n_kappa, 0);
        assert_eq!(c.scan.n_delta, ScanSpec::default().n_delta);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<ScenarioConfig>(r#"{"scenario": "optimal", "tua": 3}"#).is_err());
        assert!(serde_json::from_str::<ScenarioConfig>(r#"{"scenario": "unknown"}"#).is_err());
    }

    #[test]
    fn initial_state_forms() {
        let pre = InitialState::default().resolve().unwrap();
        assert!((pre.population("101".parse().unwrap()) - 0.125).abs() < 1e-15);
        let basis = InitialState::Named("011".into()).resolve().unwrap();
        assert_eq!(basis.population("011".parse().unwrap()), 1.0);
        let amps: InitialState = serde_json::from_str("[[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,1]]").unwrap();
        assert!((amps.resolve().unwrap().population("111".parse().unwrap()) - 0.5).abs() < 1e-15);
        assert!(InitialState::Named("psi_zero".into()).resolve().is_err());
        assert!(InitialState::Amplitudes(vec![[1.0, 0.0]]).resolve().is_err());
    }

    #[test]
    fn defaults_round_trip() {
        for s in [
            Scenario::SteadyScan,
            Scenario::PointerTraj,
            Scenario::Efficiency,
            Scenario::Transients,
            Scenario::Risetime,
            Scenario::Optimal,
        ] {
            let c = ScenarioConfig::default_for(s);
            c.validate().unwrap();
            let back: ScenarioConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn default_sigma_grid_spans_two_decades() {
        let s = default_sigmas();
        assert!((s[0] - 0.5).abs() < 1e-15 && (s[8] - 50.0).abs() < 1e-12);
    }

    #[test]
    fn bad_values_rejected() {
        let mut c = ScenarioConfig::default_for(Scenario::Transients);
        c.dt = 0.1;
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::default_for(Scenario::Transients);
        c.runs[0].tau = -1.0;
        assert!(c.validate().is_err());
    }
}

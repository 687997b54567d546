//! One function per study. Each writes into a single run directory and
//! returns the JSON summary it wrote.

use std::path::Path;

use anyhow::Result;
use log::info;
use parity_core::analysis::{
    gaussian_model, ideal_snr, predicted_snr, sign_calibration, threshold_sweep, EnsembleAnalysis, GaussianModel,
    Summary, SweepPoint, Targets, BOOTSTRAP_RESAMPLES,
};
use parity_core::io::{create, write_histograms, write_json, write_pointer_table, write_records, write_rows};
use parity_core::pointer::{
    integrate_pointer_fields, intra_parity_leakage, leakage_variation, parity_condition_scan, physical_backout,
    steady_state_sigma, PointerTable, SystemParams,
};
use parity_core::qubit::{overlap_fidelity, BasisLabel, DensityMatrix, PureState, DIM};
use parity_core::sme::{lindblad_evolve, run_ensemble, SmeConfig, TrajectoryRecord};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{RunPoint, Scenario, ScenarioConfig};

/// Drive that makes the steady-state SNR estimate equal `snr` at time `tau`.
pub fn drive_for_snr(params: &SystemParams, snr: f64, tau: f64) -> Result<f64> {
    Ok(snr / ideal_snr(params, 1.0, tau)?)
}

/// A finished ensemble with everything needed to report on it.
pub struct EnsembleRun {
    pub name: String,
    pub tau: f64,
    pub eta: f64,
    pub eps_ss: f64,
    pub params: SystemParams,
    pub table: PointerTable,
    pub records: Vec<TrajectoryRecord>,
    pub sign_cal: f64,
}

impl EnsembleRun {
    pub fn analysis(&self, s_th: f64, bins: Option<usize>) -> EnsembleAnalysis {
        EnsembleAnalysis::new(&self.records, &Targets::default(), s_th, self.sign_cal, bins)
    }

    pub fn model(&self) -> Result<GaussianModel> {
        Ok(gaussian_model(&self.table, &self.params, self.tau)?)
    }

    /// Predicted SNR for the initial populations, oriented like the empirical one.
    pub fn snr_predicted(&self, initial: &DensityMatrix) -> Result<f64> {
        let w: [f64; DIM] = std::array::from_fn(|i| initial.get(i, i).re);
        Ok(self.sign_cal * predicted_snr(&self.table, &self.params, &w, self.tau)?)
    }

    pub fn snr_ideal(&self) -> Result<f64> {
        Ok(ideal_snr(&self.params, self.eps_ss, self.tau)?)
    }

    pub fn summary(&self, initial: &DensityMatrix, s_th: f64, bins: Option<usize>) -> Result<Summary> {
        Ok(self.analysis(s_th, bins).summary(Some(self.snr_predicted(initial)?), Some(self.snr_ideal()?)))
    }
}

/// Runs `n` trajectories of one run point of `cfg` from `initial`.
pub fn run_point(cfg: &ScenarioConfig, point: RunPoint, n: usize, initial: &DensityMatrix) -> Result<EnsembleRun> {
    let mut params = cfg.system();
    if let Some(eta) = point.eta {
        params = params.with_eta(eta);
    }
    let eps_ss = match cfg.snr_target {
        Some(snr) => drive_for_snr(&params, snr, point.tau)?,
        None => cfg.pulse.eps_ss,
    };
    let pulse = cfg.pulse.clone().with_eps(eps_ss);
    let table = integrate_pointer_fields(&params, &pulse, point.tau, cfg.dt)?;
    let mut sme = SmeConfig::new(cfg.dt, point.tau, 0);
    sme.field_dephasing = cfg.field_dephasing;
    let name = match point.eta {
        Some(eta) => format!("tau={}_eta={}", point.tau, eta),
        None => format!("tau={}", point.tau),
    };
    info!("{name}: eps_ss={eps_ss:.6}, {n} trajectories");
    let ens = run_ensemble(n, cfg.base_seed, initial, &table, &params, &sme)?;
    let sign_cal = sign_calibration(&table, &params, point.tau)?;
    Ok(EnsembleRun { name, tau: point.tau, eta: params.eta, eps_ss, params, table, records: ens.records, sign_cal })
}

#[derive(Debug, Serialize)]
pub struct GroupReport {
    pub group: String,
    pub tau: f64,
    pub eta: f64,
    pub eps_ss: f64,
    pub n: usize,
    pub n_even: usize,
    pub n_odd: usize,
    pub n_inconclusive: usize,
    #[serde(flatten)]
    pub summary: Summary,
    #[serde(rename = "F_plus_zero_threshold")]
    pub f_plus_zero: Option<f64>,
    #[serde(rename = "F_minus_zero_threshold")]
    pub f_minus_zero: Option<f64>,
    pub model_mean_plus: f64,
    pub model_mean_minus: f64,
    pub model_std: f64,
    pub min_eigenvalue: f64,
}

fn group_report(run: &EnsembleRun, cfg: &ScenarioConfig, initial: &DensityMatrix) -> Result<GroupReport> {
    let a = run.analysis(cfg.s_th, cfg.bins);
    let zero = run.analysis(0.0, cfg.bins);
    let m = run.model()?;
    Ok(GroupReport {
        group: run.name.clone(),
        tau: run.tau,
        eta: run.eta,
        eps_ss: run.eps_ss,
        n: run.records.len(),
        n_even: a.fidelity.n_even,
        n_odd: a.fidelity.n_odd,
        n_inconclusive: a.fidelity.n_inconclusive,
        summary: a.summary(Some(run.snr_predicted(initial)?), Some(run.snr_ideal()?)),
        f_plus_zero: zero.fidelity.f_plus,
        f_minus_zero: zero.fidelity.f_minus,
        model_mean_plus: m.mean_plus,
        model_mean_minus: m.mean_minus,
        model_std: m.std,
        min_eigenvalue: run.records.iter().map(|r| r.diagnostics.min_eigenvalue).fold(f64::INFINITY, f64::min),
    })
}

/// Run directory writer.
pub struct RunDir<'a>(pub &'a Path);

impl RunDir<'_> {
    pub fn json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<()> {
        write_json(create(&self.0.join(name))?, value)?;
        Ok(())
    }

    pub fn file(&self, name: &str) -> Result<std::io::BufWriter<std::fs::File>> {
        Ok(create(&self.0.join(name))?)
    }
}

/// Runs `cfg` (already validated) into `out`, which is created if needed.
pub fn run_scenario(cfg: &ScenarioConfig, out: &Path) -> Result<Value> {
    std::fs::create_dir_all(out)?;
    let dir = RunDir(out);
    dir.json("config.json", cfg)?;
    let summary = match cfg.scenario {
        Scenario::SteadyScan => steady_scan(cfg, &dir)?,
        Scenario::PointerTraj => pointer_traj(cfg, &dir)?,
        Scenario::Risetime => risetime(cfg, &dir)?,
        Scenario::Efficiency | Scenario::Transients | Scenario::Optimal => ensembles(cfg, &dir)?,
    };
    dir.json("summary.json", &summary)?;
    Ok(summary)
}

fn steady_scan(cfg: &ScenarioConfig, dir: &RunDir) -> Result<Value> {
    let report = parity_condition_scan(&cfg.scan)?;
    write_rows(dir.file("records.csv")?, &report.surface)?;
    write_rows(dir.file("locus.csv")?, &report.locus)?;
    let sqrt3 = report.locus.iter().filter(|p| (p.delta - 3f64.sqrt() * cfg.scan.chi).abs() < 1e-6).count();
    Ok(json!({
        "scenario": cfg.scenario,
        "surface_rows": report.surface.len(),
        "locus_points": report.locus.len(),
        "orthogonal_locus_points": report.orthogonal_sublocus().count(),
        "sqrt3_locus_points": sqrt3,
        "reference": report.reference,
    }))
}

fn pointer_traj(cfg: &ScenarioConfig, dir: &RunDir) -> Result<Value> {
    let params = cfg.system();
    let table = integrate_pointer_fields(&params, &cfg.pulse, cfg.t_end, cfg.dt)?;
    write_pointer_table(dir.file("records.csv")?, &table, cfg.stride)?;
    let end = table.last_sigma();
    let steady = steady_state_sigma(&params, cfg.pulse.eps_ss)?;
    let deviation = (0..DIM).map(|i| (end[i] - steady[i]).norm()).fold(0.0, f64::max);
    let scale = steady.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let endpoints: Vec<Value> = BasisLabel::all()
        .map(|l| {
            let (e, s) = (end[l.index()], steady[l.index()]);
            json!({ "label": l.to_string(), "end_re": e.re, "end_im": e.im, "steady_re": s.re, "steady_im": s.im })
        })
        .collect();
    Ok(json!({
        "scenario": cfg.scenario,
        "t_end": table.t_end(),
        "eps_ss": cfg.pulse.eps_ss,
        "endpoint_max_deviation": deviation,
        "endpoint_relative_deviation": if scale > 0.0 { deviation / scale } else { 0.0 },
        "endpoints": endpoints,
    }))
}

#[derive(Serialize)]
struct RiseRow {
    sigma: f64,
    integral: f64,
    peak: f64,
    support: f64,
    integral_orthogonal: f64,
}

fn risetime(cfg: &ScenarioConfig, dir: &RunDir) -> Result<Value> {
    let params = cfg.system();
    let measured = intra_parity_leakage(&params, cfg.pulse.eps_ss, &cfg.sigmas)?;
    let orth_params = params.clone().with_phi_lo(params.phi_lo + std::f64::consts::FRAC_PI_2);
    let orthogonal = intra_parity_leakage(&orth_params, cfg.pulse.eps_ss, &cfg.sigmas)?;
    let rows = measured.iter().zip(&orthogonal).map(|(m, o)| RiseRow {
        sigma: m.sigma,
        integral: m.integral,
        peak: m.peak,
        support: m.support,
        integral_orthogonal: o.integral,
    });
    write_rows(dir.file("records.csv")?, rows)?;
    Ok(json!({
        "scenario": cfg.scenario,
        "eps_ss": cfg.pulse.eps_ss,
        "variation": leakage_variation(&measured),
        "variation_orthogonal": leakage_variation(&orthogonal),
    }))
}

#[derive(Serialize)]
struct BenchmarkRow {
    t: f64,
    #[serde(rename = "F_plus")]
    f_plus: f64,
    #[serde(rename = "F_minus")]
    f_minus: f64,
}

/// `F_±(t)` without measurement: Lindblad evolution of `ψ_±` with no drive.
pub fn no_measurement_benchmark(params: &SystemParams, t_end: f64, dt: f64) -> Result<Vec<(f64, f64, f64)>> {
    let evolve = |psi: PureState| -> Result<Vec<(f64, f64)>> {
        let out = lindblad_evolve(&psi.into(), None, params, Default::default(), t_end, dt, 1)?;
        Ok(out.into_iter().map(|(t, rho)| (t, overlap_fidelity(&psi, &rho))).collect())
    };
    let plus = evolve(PureState::psi_plus())?;
    let minus = evolve(PureState::psi_minus())?;
    Ok(plus.into_iter().zip(minus).map(|((t, p), (_, m))| (t, p, m)).collect())
}

fn interpolate(curve: &[(f64, f64, f64)], t: f64) -> (f64, f64) {
    let k = curve.partition_point(|c| c.0 < t).clamp(1, curve.len() - 1);
    let (a, b) = (curve[k - 1], curve[k]);
    let w = if b.0 > a.0 { ((t - a.0) / (b.0 - a.0)).clamp(0.0, 1.0) } else { 1.0 };
    (a.1 + w * (b.1 - a.1), a.2 + w * (b.2 - a.2))
}

fn ensembles(cfg: &ScenarioConfig, dir: &RunDir) -> Result<Value> {
    let cfg = cfg.clone().with_default_runs();
    let initial = cfg.initial.resolve()?;
    let runs: Vec<EnsembleRun> =
        cfg.runs.iter().map(|&p| run_point(&cfg, p, cfg.n_trajectories, &initial)).collect::<Result<_>>()?;

    write_records(dir.file("records.csv")?, runs.iter().map(|r| (r.name.as_str(), r.records.as_slice())))?;
    let analyses: Vec<_> = runs.iter().map(|r| r.analysis(cfg.s_th, cfg.bins)).collect();
    write_histograms(
        dir.file("histogram.csv")?,
        runs.iter().zip(&analyses).map(|(r, a)| (r.name.as_str(), &a.histogram)),
    )?;
    let groups: Vec<GroupReport> = runs.iter().map(|r| group_report(r, &cfg, &initial)).collect::<Result<_>>()?;

    let mut summary = json!({
        "scenario": cfg.scenario,
        "n_trajectories": cfg.n_trajectories,
        "base_seed": cfg.base_seed,
        "s_th": cfg.s_th,
        "groups": groups,
    });
    let f_mean = |g: &GroupReport| g.f_plus_zero.zip(g.f_minus_zero).map(|(a, b)| 0.5 * (a + b));
    match cfg.scenario {
        Scenario::Efficiency | Scenario::Transients if groups.len() >= 2 => {
            let (a, b) = (&groups[0], &groups[groups.len() - 1]);
            summary["F_difference_last_minus_first"] = json!(f_mean(b).zip(f_mean(a)).map(|(x, y)| x - y));
        }
        Scenario::Optimal => {
            let params = cfg.system();
            let t_max = cfg.runs.iter().map(|r| r.tau).fold(cfg.sweep_tau, f64::max);
            let curve = no_measurement_benchmark(&params, t_max, cfg.benchmark_dt)?;
            write_rows(
                dir.file("benchmark.csv")?,
                curve.iter().map(|&(t, f_plus, f_minus)| BenchmarkRow { t, f_plus, f_minus }),
            )?;
            let bench: Vec<Value> = runs
                .iter()
                .map(|r| {
                    let (p, m) = interpolate(&curve, r.tau);
                    json!({ "tau": r.tau, "F_plus": p, "F_minus": m })
                })
                .collect();
            summary["benchmark"] = json!(bench);

            let sweep_run = match runs.iter().find(|r| (r.tau - cfg.sweep_tau).abs() < 1e-12) {
                Some(r) => r,
                None => &run_point(&cfg, RunPoint::new(cfg.sweep_tau), cfg.n_trajectories, &initial)?,
            };
            let sweep = threshold_sweep(
                &sweep_run.records,
                &Targets::default(),
                &cfg.s_th_grid,
                sweep_run.sign_cal,
                BOOTSTRAP_RESAMPLES,
                cfg.base_seed ^ 0xB007,
            );
            write_rows(dir.file("sweep.csv")?, sweep.iter().map(SweepRow::from))?;
            summary["sweep_tau"] = json!(cfg.sweep_tau);
            if params.gamma_p > 0.0 {
                if let (Some(hz), Ok((delta, g))) = (cfg.chi_hz, physical_backout(params.chi, params.gamma_p)) {
                    summary["physical"] = json!({
                        "T1_s": 1.0 / (params.gamma_p * hz),
                        "detuning_hz": delta * hz,
                        "coupling_hz": g * hz,
                    });
                }
            }
        }
        _ => {}
    }
    Ok(summary)
}

#[derive(Serialize)]
struct SweepRow {
    s_th: f64,
    #[serde(rename = "F_plus")]
    f_plus: Option<f64>,
    #[serde(rename = "F_minus")]
    f_minus: Option<f64>,
    #[serde(rename = "F_plus_err")]
    f_plus_err: Option<f64>,
    #[serde(rename = "F_minus_err")]
    f_minus_err: Option<f64>,
    accepted_fraction: f64,
}

impl From<&SweepPoint> for SweepRow {
    fn from(p: &SweepPoint) -> Self {
        Self {
            s_th: p.s_th,
            f_plus: p.f_plus,
            f_minus: p.f_minus,
            f_plus_err: p.f_plus_err,
            f_minus_err: p.f_minus_err,
            accepted_fraction: p.accepted_fraction,
        }
    }
}

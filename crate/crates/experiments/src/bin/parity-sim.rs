use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use parity_experiments::acceptance::{Settings, Suite};
use parity_experiments::config::{ConfigError, Decoherence, Scenario, ScenarioConfig, FAST_TRAJECTORIES};
use parity_experiments::scenarios::run_scenario;
use parity_experiments::{exit_code, EXIT_ACCEPTANCE};

#[derive(Parser)]
#[command(name = "parity-sim", version, about = "Three-qubit parity readout simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario config (JSON). Missing fields take the scenario defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Run directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to RAYON_NUM_THREADS or the core count).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// 100 trajectories per ensemble instead of 1000.
    #[arg(long, global = true)]
    fast: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Steady-state parity-condition scan over (κ, Δ).
    SteadyScan,
    /// Pointer-field trajectories in the IQ plane.
    PointerTraj,
    /// Matched-SNR ensembles at two measurement efficiencies.
    Efficiency,
    /// Short versus long measurement at fixed ε√τ.
    Transients,
    /// Intra-parity leakage against the pulse rise rate.
    Risetime,
    /// Fixed-SNR study over τ with threshold sweep and no-measurement benchmark.
    Optimal {
        #[arg(long, value_enum)]
        decoherence: Option<Switch>,
    },
    /// Runs the acceptance criteria; exits 4 if any fails.
    Selfcheck {
        /// Criterion numbers to run (default all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

fn scenario_of(c: &Command) -> Option<Scenario> {
    Some(match c {
        Command::SteadyScan => Scenario::SteadyScan,
        Command::PointerTraj => Scenario::PointerTraj,
        Command::Efficiency => Scenario::Efficiency,
        Command::Transients => Scenario::Transients,
        Command::Risetime => Scenario::Risetime,
        Command::Optimal { .. } => Scenario::Optimal,
        Command::Selfcheck { .. } => return None,
    })
}

fn load(cli: &Cli, scenario: Scenario) -> Result<ScenarioConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let cfg = ScenarioConfig::load(path)?;
            if cfg.scenario != scenario {
                return Err(ConfigError(format!("config is for {}, not {scenario}", cfg.scenario)).into());
            }
            cfg
        }
        None => ScenarioConfig::default_for(scenario),
    };
    if let Some(seed) = cli.seed {
        cfg.base_seed = seed;
    }
    if cli.fast {
        cfg.n_trajectories = cfg.n_trajectories.min(FAST_TRAJECTORIES);
    }
    if let Command::Optimal { decoherence: Some(d) } = cli.command {
        cfg.decoherence = Some(match d {
            Switch::On => Decoherence::standard(),
            Switch::Off => Decoherence { gamma_p: 0.0, gamma_phi: 0.0 },
        });
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("building worker pool")?;
    }
    match &cli.command {
        Command::Selfcheck { only } => {
            let mut settings = if cli.fast { Settings::fast() } else { Settings::full() };
            if let Some(seed) = cli.seed {
                settings.base_seed = seed;
            }
            let suite = Suite::new(settings);
            let ids: Vec<u8> = if only.is_empty() { (1..=10).collect() } else { only.clone() };
            if let Some(&bad) = ids.iter().find(|&&id| !(1..=10).contains(&id)) {
                return Err(ConfigError(format!("no criterion {bad}")).into());
            }
            let mut all = true;
            for id in ids {
                let r = suite.run(id);
                println!("{r}");
                all &= r.passed;
            }
            Ok(all)
        }
        command => {
            let scenario = scenario_of(command).expect("scenario command");
            let cfg = load(cli, scenario)?;
            let out =
                cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from(format!("runs/{scenario}-{}", cfg.base_seed)));
            info!("{scenario} -> {}", out.display());
            let summary = run_scenario(&cfg, &out)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_ACCEPTANCE as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

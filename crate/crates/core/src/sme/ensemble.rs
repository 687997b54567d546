use rayon::prelude::*;

use super::trajectory::{run_trajectory, SmeConfig, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::pointer::{PointerTable, SystemParams};
use crate::qubit::{DensityMatrix, Parity};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trajectory `k`: the `k`-th output of a SplitMix64 stream started at `base`.
pub fn trajectory_seed(base: u64, k: u64) -> u64 {
    splitmix64(base.wrapping_add(k.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// Parity sector holding most of the final population.
pub fn final_parity(rho: &DensityMatrix) -> Parity {
    if rho.parity_population(Parity::Even) > 0.5 {
        Parity::Even
    } else {
        Parity::Odd
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleSummary {
    pub n: usize,
    pub mean_s: f64,
    pub mean_state: DensityMatrix,
    /// Trajectories ending mostly in the even / odd sector.
    pub n_even: usize,
    pub n_odd: usize,
    pub mean_state_even: Option<DensityMatrix>,
    pub mean_state_odd: Option<DensityMatrix>,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone)]
pub struct Ensemble {
    pub records: Vec<TrajectoryRecord>,
    pub summary: EnsembleSummary,
}

/// Runs `n` independent trajectories on the current rayon pool.
///
/// Trajectory `k` uses [`trajectory_seed`]`(base_seed, k)` and results are
/// returned in index order, so the output does not depend on the pool size.
pub fn run_ensemble(
    n: usize,
    base_seed: u64,
    initial: &DensityMatrix,
    table: &PointerTable,
    params: &SystemParams,
    config: &SmeConfig,
) -> Result<Ensemble> {
    if n == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    config.validate(table)?;
    let records = (0..n as u64)
        .into_par_iter()
        .map(|k| run_trajectory(initial, table, params, &config.clone().with_seed(trajectory_seed(base_seed, k))))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&records);
    Ok(Ensemble { records, summary })
}

pub fn summarize(records: &[TrajectoryRecord]) -> EnsembleSummary {
    let by = |p: Parity| records.iter().filter(move |r| final_parity(&r.final_state) == p);
    EnsembleSummary {
        n: records.len(),
        mean_s: records.iter().map(|r| r.s).sum::<f64>() / records.len().max(1) as f64,
        mean_state: DensityMatrix::mean(records.iter().map(|r| &r.final_state))
            .unwrap_or_else(DensityMatrix::maximally_mixed),
        n_even: by(Parity::Even).count(),
        n_odd: by(Parity::Odd).count(),
        mean_state_even: DensityMatrix::mean(by(Parity::Even).map(|r| &r.final_state)),
        mean_state_odd: DensityMatrix::mean(by(Parity::Odd).map(|r| &r.final_state)),
        min_eigenvalue: records.iter().map(|r| r.diagnostics.min_eigenvalue).fold(f64::INFINITY, f64::min),
    }
}

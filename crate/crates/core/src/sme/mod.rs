//! Effective stochastic master equation for the qubits alone, driven by a
//! precomputed pointer table.

mod ensemble;
mod generator;
mod lindblad;
mod trajectory;

pub use ensemble::{final_parity, run_ensemble, summarize, trajectory_seed, Ensemble, EnsembleSummary};
pub use generator::{deterministic_generator, FieldDephasing, Generator};
pub use lindblad::lindblad_evolve;
pub use trajectory::{run_trajectory, sme_step, Diagnostics, SmeConfig, TrajectoryRecord};

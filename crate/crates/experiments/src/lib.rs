//! Scenario runner for the parity readout simulator: JSON configs, seeded
//! ensembles, CSV/JSON run directories and the acceptance suite.

pub mod acceptance;
pub mod config;
pub mod scenarios;

use config::ConfigError;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_ACCEPTANCE: i32 = 4;

/// Process exit code for a failed run.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    use parity_core::Error as E;
    if err.downcast_ref::<ConfigError>().is_some() {
        return EXIT_CONFIG;
    }
    match err.downcast_ref::<E>() {
        Some(E::Numerical { .. } | E::SingularSystem { .. }) => EXIT_NUMERICAL,
        Some(E::Io(_) | E::Csv(_) | E::Json(_)) | None => 1,
        Some(_) => EXIT_CONFIG,
    }
}

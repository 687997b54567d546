use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {0} out of range (expected 1..=3)")]
    InvalidQubit(usize),

    #[error("basis bits must be 0 or 1, got ({0}, {1}, {2})")]
    InvalidBasisBits(u8, u8, u8),

    #[error("basis index {0} out of range (expected 0..8)")]
    InvalidBasisIndex(usize),

    #[error("cannot parse basis label {0:?}")]
    BadLabel(String),

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("step dt = {dt} exceeds the stability limit {max}")]
    StepTooLarge { dt: f64, max: f64 },

    #[error("steady-state system is singular for label {label} (|det| = {det:e})")]
    SingularSystem { label: String, det: f64 },

    #[error("parameters are off the parity locus: {0}")]
    NotOnLocus(String),

    #[error("time {t} is not on the pointer-table grid")]
    OffGrid { t: f64 },

    #[error("time {t} lies outside the pointer table span [0, {t_end}]")]
    OutOfSpan { t: f64, t_end: f64 },

    #[error("numerical failure at step {step}: {reason}")]
    Numerical { step: usize, reason: String },

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

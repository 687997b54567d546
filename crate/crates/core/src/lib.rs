//! Simulation kernel for a direct three-qubit parity measurement through two
//! dispersively coupled readout modes.
//!
//! Units: `chi = 1` sets the rate scale, so times are in `1/chi`.

pub mod analysis;
pub mod error;
pub mod io;
pub mod pointer;
pub mod qubit;
pub mod sme;

pub use error::{Error, Result};

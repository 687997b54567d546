use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointer::{PointerTable, SystemParams};
use crate::qubit::Parity;

use super::snr::gaussian_model;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Even,
    Odd,
    Inconclusive,
}

impl Outcome {
    pub fn parity(self) -> Option<Parity> {
        match self {
            Outcome::Even => Some(Parity::Even),
            Outcome::Odd => Some(Parity::Odd),
            Outcome::Inconclusive => None,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Outcome::Even => Outcome::Odd,
            Outcome::Odd => Outcome::Even,
            Outcome::Inconclusive => Outcome::Inconclusive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationOutcome {
    pub label: Outcome,
    pub s: f64,
    pub s_th: f64,
}

/// Thresholded parity decision. `sign_cal` is the sign of the expected
/// signal for an even state.
pub fn classify(s: f64, s_th: f64, sign_cal: f64) -> ClassificationOutcome {
    let x = sign_cal * s;
    let label = if x > s_th {
        Outcome::Even
    } else if x < -s_th {
        Outcome::Odd
    } else {
        Outcome::Inconclusive
    };
    ClassificationOutcome { label, s, s_th }
}

/// Sign of the predicted mean signal for the uniform even-sector state over
/// `[0, tau]`.
pub fn sign_calibration(table: &PointerTable, params: &SystemParams, tau: f64) -> Result<f64> {
    let model = gaussian_model(table, params, tau)?;
    if model.mean_plus == 0.0 || !model.mean_plus.is_finite() {
        return Err(Error::NotOnLocus("the even-sector signal vanishes in the measured quadrature".into()));
    }
    Ok(model.mean_plus.signum())
}

//! Outcome classification, SNR estimates and conditional fidelities computed
//! from trajectory records.

mod classify;
mod fidelity;
mod histogram;
mod snr;

pub use classify::{classify, sign_calibration, ClassificationOutcome, Outcome};
pub use fidelity::{conditional_fidelity, threshold_sweep, FidelityReport, SweepPoint, Targets, BOOTSTRAP_RESAMPLES};
pub use histogram::{freedman_diaconis_bins, quantile, Histogram, MAX_BINS};
pub use snr::{empirical_snr, gaussian_model, ideal_snr, mean, predicted_snr, sample_variance, GaussianModel};

use serde::{Deserialize, Serialize};

use crate::qubit::{DensityMatrix, Parity};
use crate::sme::{final_parity, TrajectoryRecord};

/// Integrated signals split by the sector holding most of each final state.
pub fn split_by_true_parity(records: &[TrajectoryRecord]) -> (Vec<f64>, Vec<f64>) {
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for r in records {
        match final_parity(&r.final_state) {
            Parity::Even => even.push(r.s),
            Parity::Odd => odd.push(r.s),
        }
    }
    (even, odd)
}

/// Everything derived from one ensemble at one threshold.
#[derive(Debug, Clone)]
pub struct EnsembleAnalysis {
    pub fidelity: FidelityReport,
    pub mean_state_even: Option<DensityMatrix>,
    pub mean_state_odd: Option<DensityMatrix>,
    /// `None` when a true-parity group has fewer than two records.
    pub snr_empirical: Option<f64>,
    pub histogram: Histogram,
}

impl EnsembleAnalysis {
    pub fn new(records: &[TrajectoryRecord], targets: &Targets, s_th: f64, sign_cal: f64, bins: Option<usize>) -> Self {
        let fidelity = conditional_fidelity(records, targets, s_th, sign_cal);
        let conditional = |o: Outcome| {
            DensityMatrix::mean(
                records.iter().filter(|r| classify(r.s, s_th, sign_cal).label == o).map(|r| &r.final_state),
            )
        };
        let (even, odd) = split_by_true_parity(records);
        Self {
            fidelity,
            mean_state_even: conditional(Outcome::Even),
            mean_state_odd: conditional(Outcome::Odd),
            snr_empirical: empirical_snr(&even, &odd).ok().map(|x| sign_cal * x),
            histogram: Histogram::build(&even, &odd, bins),
        }
    }

    pub fn summary(&self, snr_predicted: Option<f64>, snr_ideal: Option<f64>) -> Summary {
        Summary {
            snr_empirical: self.snr_empirical,
            snr_predicted,
            snr_ideal,
            f_plus: self.fidelity.f_plus,
            f_minus: self.fidelity.f_minus,
            accepted_fraction: self.fidelity.accepted_fraction,
            s_th: self.fidelity.s_th,
        }
    }
}

/// Per-run JSON summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub snr_empirical: Option<f64>,
    pub snr_predicted: Option<f64>,
    pub snr_ideal: Option<f64>,
    #[serde(rename = "F_plus")]
    pub f_plus: Option<f64>,
    #[serde(rename = "F_minus")]
    pub f_minus: Option<f64>,
    pub accepted_fraction: f64,
    pub s_th: f64,
}

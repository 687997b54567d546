//! Classical pointer fields of the two readout modes.

mod params;
mod rates;
mod steady;
mod table;

pub use params::{measured_quadrature, orthogonal_quadrature, DrivePulse, PulseShape, SystemParams};
pub use rates::{
    intra_parity_leakage, leakage_variation, measurement_rates, physical_backout, trapezoid, LeakagePoint,
    MeasurementRates,
};
pub use steady::{
    calibrate_from_sigma, calibrate_lo_phase, parity_condition_scan, steady_state_fields, steady_state_sigma,
    LocusPoint, ReferenceCheck, ScanReport, ScanSpec, SurfaceRow, LOCUS_TOL, REPRESENTATIVE_LABELS,
};
pub use table::{integrate_pointer_fields, FieldSample, PointerTable};

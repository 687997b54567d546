//! 200 trajectories from the uniform superposition at the reference point,
//! classified at a few thresholds.

use parity_core::analysis::{
    conditional_fidelity, empirical_snr, ideal_snr, sign_calibration, split_by_true_parity, Targets,
};
use parity_core::pointer::{integrate_pointer_fields, DrivePulse, SystemParams};
use parity_core::qubit::PureState;
use parity_core::sme::{run_ensemble, SmeConfig};

fn main() -> parity_core::Result<()> {
    let params = SystemParams::reference().with_decoherence(1.0 / 400.0, 1.0 / 300.0);
    let tau = 10.0;
    let eps = 2.0 * 2f64.sqrt() / ideal_snr(&params, 1.0, tau)?;
    let table = integrate_pointer_fields(&params, &DrivePulse::arctan(eps, 10.0), tau, 1e-3)?;
    let ens = run_ensemble(200, 7, &PureState::psi_pre().into(), &table, &params, &SmeConfig::new(1e-3, tau, 0))?;
    let cal = sign_calibration(&table, &params, tau)?;

    let (even, odd) = split_by_true_parity(&ens.records);
    println!("eps_ss = {eps:.4}, empirical SNR = {:.3}", cal * empirical_snr(&even, &odd)?);
    for s_th in [0.0, 2.0, 5.0] {
        let r = conditional_fidelity(&ens.records, &Targets::default(), s_th, cal);
        println!(
            "s_th = {s_th}: F+ = {:.4}, F- = {:.4}, accepted = {:.2}",
            r.f_plus.unwrap_or(f64::NAN),
            r.f_minus.unwrap_or(f64::NAN),
            r.accepted_fraction
        );
    }
    Ok(())
}

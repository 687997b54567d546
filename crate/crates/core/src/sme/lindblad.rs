use super::generator::{FieldDephasing, Generator, Mat8};
use crate::error::{Error, Result};
use crate::pointer::{FieldSample, PointerTable, SystemParams};
use crate::qubit::{DensityMatrix, Operator8, DIM};

/// Unconditional evolution under the deterministic generator with RK4.
///
/// Fields are taken from `table` (linearly interpolated at half steps) or set
/// to zero when no table is given. Returns `(t, ρ(t))` every `stride` steps
/// and always at `t_end`.
pub fn lindblad_evolve(
    initial: &DensityMatrix,
    table: Option<&PointerTable>,
    params: &SystemParams,
    model: FieldDephasing,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Vec<(f64, DensityMatrix)>> {
    params.validate()?;
    if !(dt > 0.0 && t_end > 0.0) {
        return Err(Error::InvalidParameter(format!("dt={dt} and t_end={t_end} must be positive")));
    }
    if let Some(tab) = table {
        if t_end > tab.t_end() * (1.0 + 1e-12) {
            return Err(Error::OutOfSpan { t: t_end, t_end: tab.t_end() });
        }
    }
    let generator = Generator::new(params, model);
    let fields = |t: f64| -> Result<FieldSample> {
        match table {
            Some(tab) => tab.sample(t.min(tab.t_end())),
            None => Ok(FieldSample::zero()),
        }
    };
    let axpy = |y: &Mat8, h: f64, k: &Mat8| -> Mat8 {
        std::array::from_fn(|m| std::array::from_fn(|n| y[m][n] + k[m][n] * h))
    };

    let steps = (t_end / dt).round().max(1.0) as usize;
    let stride = stride.max(1);
    let mut rho = initial.as_operator().0;
    let mut out = vec![(0.0, *initial)];
    for s in 0..steps {
        let t = s as f64 * dt;
        let (f0, fh, f1) = (fields(t)?, fields(t + dt / 2.0)?, fields(t + dt)?);
        let k1 = generator.apply(&rho, &f0);
        let k2 = generator.apply(&axpy(&rho, dt / 2.0, &k1), &fh);
        let k3 = generator.apply(&axpy(&rho, dt / 2.0, &k2), &fh);
        let k4 = generator.apply(&axpy(&rho, dt, &k3), &f1);
        for m in 0..DIM {
            for n in 0..DIM {
                rho[m][n] += (k1[m][n] + k2[m][n] * 2.0 + k3[m][n] * 2.0 + k4[m][n]) * (dt / 6.0);
            }
        }
        let mut state = DensityMatrix::from_operator_unchecked(Operator8(rho));
        state.hermitize();
        if !state.is_finite() {
            return Err(Error::Numerical { step: s, reason: "non-finite state".into() });
        }
        rho = state.as_operator().0;
        if (s + 1) % stride == 0 || s + 1 == steps {
            out.push(((s + 1) as f64 * dt, state));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::{overlap_fidelity, PureState};

    #[test]
    fn free_evolution_is_constant() {
        let p = SystemParams::reference();
        let rho: DensityMatrix = PureState::psi_pre().into();
        let path = lindblad_evolve(&rho, None, &p, FieldDephasing::Polaron, 5.0, 0.01, 100).unwrap();
        assert_eq!(path.len(), 6);
        assert!(path.last().unwrap().1.trace_distance(&rho) < 1e-14);
    }

    #[test]
    fn frame_rotation_only_rotates() {
        let mut p = SystemParams::reference();
        p.omega_frame = [0.4, 0.0, 0.0];
        let rho: DensityMatrix = PureState::psi_pre().into();
        let end = lindblad_evolve(&rho, None, &p, FieldDephasing::Polaron, 2.0, 1e-3, 2000).unwrap().pop().unwrap().1;
        assert!((end.purity() - 1.0).abs() < 1e-10);
        // Coherence between |000⟩ and |100⟩ picks up the phase e^{-i·0.4·t}.
        let expect = num_complex::Complex64::from_polar(1.0 / 8.0, 0.8);
        assert!((end.get(0, 4) - expect).norm() < 1e-10);
    }

    #[test]
    fn pure_dephasing_decay_of_sector_state() {
        // Each qubit pair in ψ_+ dephases under σ_z noise: populations stay, overlaps shrink.
        let p = SystemParams::reference().with_decoherence(0.0, 0.1);
        let rho: DensityMatrix = PureState::psi_plus().into();
        let end = lindblad_evolve(&rho, None, &p, FieldDephasing::Polaron, 3.0, 1e-3, 3000).unwrap().pop().unwrap().1;
        // Off-diagonals within the even sector differ in two bits: decay e^{-2·γ_φ·t}.
        let f2 = 0.25 * (1.0 + 3.0 * (-0.2f64 * 3.0).exp());
        assert!((overlap_fidelity(&PureState::psi_plus(), &end).powi(2) - f2).abs() < 1e-10);
    }
}

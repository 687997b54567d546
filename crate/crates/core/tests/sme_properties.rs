use num_complex::Complex64 as C64;
use parity_core::io::write_records;
use parity_core::pointer::{integrate_pointer_fields, DrivePulse, PointerTable, SystemParams};
use parity_core::qubit::{BasisLabel, DensityMatrix, PureState, DIM};
use parity_core::sme::{
    deterministic_generator, lindblad_evolve, run_ensemble, run_trajectory, sme_step, FieldDephasing, SmeConfig,
};
use proptest::prelude::*;

const DT: f64 = 1e-3;

fn table(eps: f64, t_end: f64) -> PointerTable {
    integrate_pointer_fields(&SystemParams::reference(), &DrivePulse::arctan(eps, 10.0), t_end, DT).unwrap()
}

fn state_from(re: &[f64], im: &[f64]) -> DensityMatrix {
    let amps: [C64; DIM] = std::array::from_fn(|i| C64::new(re[i], im[i]));
    PureState::normalized(amps).unwrap().into()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn steps_preserve_trace_hermiticity_positivity(
        re in prop::collection::vec(-1.0f64..1.0, DIM),
        im in prop::collection::vec(-1.0f64..1.0, DIM),
        noise in prop::collection::vec(-3.0f64..3.0, 200),
        eta in 0.0f64..=1.0,
        decohere in any::<bool>(),
        printed in any::<bool>(),
    ) {
        prop_assume!(re.iter().chain(&im).any(|x| x.abs() > 0.1));
        let mut p = SystemParams::reference().with_eta(eta);
        if decohere {
            p = p.with_decoherence(1.0 / 400.0, 1.0 / 300.0);
        }
        let t = table(0.6, 0.5);
        let mut cfg = SmeConfig::new(DT, 0.5, 0);
        if printed {
            cfg.field_dephasing = FieldDephasing::Printed;
        }
        let mut rho = state_from(&re, &im);
        for (n, z) in noise.iter().enumerate() {
            let (next, _) = sme_step(&rho, n as f64 * DT, &t, &p, &cfg, z * DT.sqrt()).unwrap();
            rho = next;
            prop_assert!((rho.trace() - 1.0).abs() < 1e-12);
            prop_assert!(rho.as_operator().is_hermitian(1e-12));
        }
        // The printed field term is not completely positive; allow it a small excursion.
        let floor = if printed { -1e-4 } else { -1e-12 };
        prop_assert!(rho.min_eigenvalue() > floor, "{}", rho.min_eigenvalue());
    }

    #[test]
    fn generator_is_trace_free_and_hermitian(
        re in prop::collection::vec(-1.0f64..1.0, DIM),
        im in prop::collection::vec(-1.0f64..1.0, DIM),
        n in 0usize..2000,
    ) {
        prop_assume!(re.iter().chain(&im).any(|x| x.abs() > 0.1));
        let p = SystemParams::reference().with_decoherence(0.01, 0.02);
        let t = table(1.0, 2.0);
        let rho = state_from(&re, &im);
        for model in [FieldDephasing::Polaron, FieldDephasing::Printed] {
            let l = deterministic_generator(&rho, n as f64 * DT, &t, &p, model).unwrap();
            prop_assert!(l.trace().norm() < 1e-12);
            prop_assert!(l.is_hermitian(1e-12));
        }
    }
}

#[test]
fn basis_states_are_fixed_points() {
    let tau = 100.0;
    let t = table(0.2, tau);
    let p = SystemParams::reference();
    for l in BasisLabel::all() {
        let rec = run_trajectory(&PureState::basis(l).into(), &t, &p, &SmeConfig::new(DT, tau, 5)).unwrap();
        let leakage = 1.0 - rec.final_state.population(l);
        assert!(leakage <= 1e-8, "{l}: {leakage}");
    }
}

#[test]
fn lindblad_preserves_trace_under_decoherence() {
    let p = SystemParams::reference().with_decoherence(0.05, 0.03);
    let t = table(0.6, 5.0);
    let out =
        lindblad_evolve(&PureState::psi_pre().into(), Some(&t), &p, FieldDephasing::Polaron, 5.0, DT, 500).unwrap();
    for (_, rho) in &out {
        assert!((rho.trace() - 1.0).abs() < 1e-10);
        assert!(rho.min_eigenvalue() > -1e-10);
    }
}

#[test]
fn identical_seeds_give_identical_bytes() {
    let tau = 2.0;
    let t = table(1.0, tau);
    let p = SystemParams::reference().with_decoherence(1.0 / 400.0, 1.0 / 300.0);
    let cfg = SmeConfig::new(DT, tau, 0);
    let bytes = |seed| {
        let e = run_ensemble(16, seed, &PureState::psi_pre().into(), &t, &p, &cfg).unwrap();
        let mut buf = Vec::new();
        write_records(&mut buf, [("a", e.records.as_slice())]).unwrap();
        buf
    };
    let a = bytes(42);
    assert_eq!(a, bytes(42));
    assert_ne!(a, bytes(43));
}

use num_complex::Complex64 as C64;
use parity_core::pointer::{
    calibrate_lo_phase, integrate_pointer_fields, parity_condition_scan, steady_state_fields, DrivePulse, ScanSpec,
    SystemParams,
};
use parity_core::qubit::{BasisLabel, Parity};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Cramer's rule on the 2×2 steady-state system, written out independently.
fn cramer(p: &SystemParams, label: BasisLabel, eps: f64) -> (C64, C64) {
    let i = C64::i();
    let ka = p.kappa_a;
    let kb = p.kappa_b;
    let xa: f64 = (0..3).map(|q| p.chi_a[q] * label.z(q + 1).unwrap()).sum();
    let xb: f64 = (0..3).map(|q| p.chi_b[q] * label.z(q + 1).unwrap()).sum();
    let a11 = -i * (p.delta_a + xa) - ka / 2.0;
    let a22 = -i * (p.delta_b + xb) - kb / 2.0;
    let c = C64::from(-(ka * kb).sqrt() / 2.0);
    let (fa, fb) = (i * ka.sqrt() * eps, i * kb.sqrt() * eps);
    let det = a11 * a22 - c * c;
    ((fa * a22 - c * fb) / det, (a11 * fb - c * fa) / det)
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

#[test]
fn linear_solve_matches_cramer() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let mut p = SystemParams::symmetric(
            rng.random_range(0.2..2.0),
            rng.random_range(0.3..6.0),
            rng.random_range(-4.0..4.0),
        );
        p.kappa_b = rng.random_range(0.3..6.0);
        p.delta_b = rng.random_range(-4.0..4.0);
        for q in 0..3 {
            p.chi_a[q] = rng.random_range(0.1..2.0);
            p.chi_b[q] = rng.random_range(0.1..2.0);
        }
        let eps = rng.random_range(0.1..2.0);
        let solved = steady_state_fields(&p, eps).unwrap();
        for l in BasisLabel::all() {
            let (a, b) = cramer(&p, l, eps);
            let (sa, sb) = solved[l.index()];
            assert!(rel(sa, a) < 1e-12 && rel(sb, b) < 1e-12, "{l}");
        }
    }
}

#[test]
fn relaxes_onto_steady_state_for_random_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..20 {
        let kappa: f64 = rng.random_range(0.5..5.0);
        // Δ ≥ κ/2 keeps the slowest mode decaying at κ/2.
        let p = SystemParams::symmetric(
            rng.random_range(0.2..2.0),
            kappa,
            rng.random_range(kappa / 2.0..kappa / 2.0 + 3.0),
        );
        let eps = rng.random_range(0.1..2.0);
        let table = integrate_pointer_fields(&p, &DrivePulse::constant(eps), 50.0 / kappa, p.max_field_step()).unwrap();
        let n = table.steps();
        for l in BasisLabel::all() {
            let (a, b) = cramer(&p, l, eps);
            assert!(rel(table.alpha(n)[l.index()], a) < 1e-8, "alpha {l} {p:?}");
            assert!(rel(table.beta(n)[l.index()], b) < 1e-8, "beta {l} {p:?}");
        }
    }
}

#[test]
fn reference_point_values() {
    // At κ = 2, Δ = √3, χ = 1 each sector collapses onto a single value.
    let p = SystemParams::reference();
    let eps = 0.7;
    let sigma = |l: BasisLabel| {
        let (a, b) = cramer(&p, l, eps);
        p.kappa_a.sqrt() * a + p.kappa_b.sqrt() * b
    };
    for l in BasisLabel::all() {
        let want = match l.parity() {
            Parity::Even => C64::new(1.0, -1.0) * eps,
            Parity::Odd => C64::new(-1.0, -1.0) * eps,
        };
        assert!((sigma(l) - want).norm() < 1e-12, "{l}: {}", sigma(l));
    }
    assert!(calibrate_lo_phase(&p).unwrap().abs() < 1e-12);
}

#[test]
fn locus_holds_along_sqrt3_line() {
    for kappa in [1.0, 2.0, 5.0] {
        let p = SystemParams::symmetric(1.0, kappa, 3f64.sqrt());
        let s: Vec<C64> = BasisLabel::all()
            .map(|l| {
                let (a, b) = cramer(&p, l, 1.0);
                p.kappa_a.sqrt() * a + p.kappa_b.sqrt() * b
            })
            .collect();
        for parity in [Parity::Even, Parity::Odd] {
            let vals: Vec<C64> = BasisLabel::sector(parity).map(|l| s[l.index()]).collect();
            for v in &vals[1..] {
                assert!(rel(*v, vals[0]) < 1e-10, "κ={kappa}");
            }
        }
        let phi = calibrate_lo_phase(&p).unwrap();
        let q = |z: C64| (z * C64::from_polar(1.0, -phi)).re;
        let (even, odd) = (s[0], s[BasisLabel::new(0, 0, 1).unwrap().index()]);
        assert!((q(even) + q(odd)).abs() < 1e-10 * q(even).abs(), "κ={kappa}");
    }
}

#[test]
fn scan_locus_contains_reference_point() {
    let report = parity_condition_scan(&ScanSpec::default()).unwrap();
    assert!(report.reference.on_locus);
    let near: Vec<_> = report.locus.iter().filter(|pt| (pt.delta - 3f64.sqrt()).abs() < 1e-6).collect();
    assert!(near.len() >= 3, "{}", near.len());
    assert!(near.iter().any(|pt| (pt.kappa - 2.0).abs() < 0.3 && pt.mirrored));
}

mod common;

use odeim_core::cartan::AlgebraKind;
use odeim_core::error::Error;
use odeim_core::linalg::{cr, C64};
use odeim_core::ode::ConnectionParams;
use odeim_core::psi::FundamentalSystem;
use odeim_core::spectral::{find_zeros, psi_at_origin, q_at_zero_l0, winding_number, SpectralSystem, ZeroEllSystem};

#[test]
fn shooting_oracle_harmonic_levels() {
    // M = 1 is the radial oscillator with E_n = 4n + 2ℓ + 3.
    let ev = common::shooting_eigenvalues(0.27, 2, 3);
    for (n, e) in ev.iter().enumerate() {
        let exact = 4.0 * n as f64 + 3.54;
        assert!(((e - exact) / exact).abs() < 1e-9, "{e} vs {exact}");
    }
}

fn a1_zeros(m: f64, ell: f64, window: f64) -> Vec<f64> {
    let s = SpectralSystem::new(AlgebraKind::a(1), m, vec![cr(ell)], 1e-11).unwrap();
    let z = find_zeros(|e| s.q(1, e), 0.0, window, 81, 5).unwrap();
    assert!(z.unrefined.is_empty());
    z.zeros.iter().map(|z| z.re).collect()
}

#[test]
fn a1_zeros_match_shooting_quadratic() {
    let q = a1_zeros(1.0, 0.27, 30.0);
    let s = common::shooting_eigenvalues(0.27, 2, 5);
    assert_eq!(q.len(), 5);
    for (a, b) in q.iter().zip(&s) {
        assert!(((a - b) / b).abs() < 1e-6, "{a} vs {b}");
    }
}

#[test]
fn a1_zeros_match_shooting_cubic() {
    let q = a1_zeros(1.5, 0.27, 45.0);
    let s = common::shooting_eigenvalues(0.27, 3, 5);
    assert_eq!(q.len(), 5);
    for (a, b) in q.iter().zip(&s) {
        assert!(((a - b) / b).abs() < 1e-6, "{a} vs {b}");
    }
}

fn a2_system() -> SpectralSystem {
    // ℓ = C⁻¹(0.37, 0.29).
    let ell = vec![cr((2.0 * 0.37 + 0.29) / 3.0), cr((0.37 + 2.0 * 0.29) / 3.0)];
    SpectralSystem::new(AlgebraKind::a(2), 1.0, ell, 1e-10).unwrap()
}

#[test]
fn a2_qq_relation() {
    let s = a2_system();
    for e in [C64::new(0.5, 0.3), cr(3.0), C64::new(-2.0, 1.0), C64::new(6.0, -0.5), cr(-4.5)] {
        for node in 1..=2 {
            let r = s.qq_residual(node, e).unwrap();
            assert!(r.relative() < 1e-6, "node {node} E {e}: {}", r.relative());
        }
    }
}

#[test]
fn a2_bethe_equations_at_first_zeros() {
    let s = a2_system();
    let z = find_zeros(|e| s.q(1, e), 0.0, 45.0, 46, 3).unwrap();
    assert_eq!(z.zeros.len(), 3);
    let known = [7.6386, 22.5879, 42.0912];
    for (w, k) in z.zeros.iter().zip(known) {
        assert!((w.re - k).abs() < 1e-3);
        assert!(s.bethe_residual(1, *w).unwrap().norm() < 1e-6);
    }
    let count = winding_number(|e| s.q(1, e), 0.0, 30.0, -2.0, 2.0, 24).unwrap();
    assert_eq!(count, 2);
}

#[test]
fn bethe_product_does_not_depend_on_the_frobenius_point() {
    let s = a2_system();
    let mut t = a2_system();
    t.x0 = 0.6;
    let e = C64::new(2.0, 0.7);
    let a = s.bethe_residual(1, e).unwrap();
    let b = t.bethe_residual(1, e).unwrap();
    assert!((a - b).norm() < 1e-7 * a.norm());
    // Away from a zero the product is not −1.
    assert!(a.norm() > 1e-3);
}

#[test]
fn q_is_independent_of_the_evaluation_point() {
    let s = a2_system();
    let e = C64::new(1.2, -0.4);
    let a = s.q_pair_at(1, e, 0.3).unwrap();
    let b = s.q_pair_at(1, e, 0.6).unwrap();
    assert!((a.q - b.q).norm() < 1e-7 * a.q.norm());
    assert!((a.qt - b.qt).norm() < 1e-7 * a.qt.norm());
}

#[test]
fn zero_ell_is_rejected_for_the_frobenius_route() {
    let r = SpectralSystem::new(AlgebraKind::a(2), 1.0, vec![cr(0.0), cr(0.0)], 1e-10);
    assert!(matches!(r, Err(Error::NonGeneric(_))));
}

#[test]
fn zero_ell_zeros_are_odd_oscillator_levels() {
    let kind = AlgebraKind::a(1);
    let sys = FundamentalSystem::new(kind).unwrap();
    let f = |e: C64| Ok(q_at_zero_l0(&sys, 1, &ConnectionParams::new(kind, 1.0, e), &[])?.q);
    let z = find_zeros(f, 0.0, 12.0, 49, 5).unwrap();
    let got: Vec<f64> = z.zeros.iter().map(|z| z.re).collect();
    assert_eq!(got.len(), 3);
    for (a, b) in got.iter().zip([3.0, 7.0, 11.0]) {
        assert!((a - b).abs() < 1e-8, "{a}");
    }
}

#[test]
fn linear_potential_shift() {
    // p = x − E: Ψ(x, E) = Ψ(x − E, 0)·const, and at x = 0 with the
    // subdominant normalization the constant is 1.
    let kind = AlgebraKind::a(2);
    let sys = FundamentalSystem::new(kind).unwrap();
    let m = 1.0 / 3.0;
    let p = ConnectionParams::new(kind, m, cr(-1.5));
    let at_zero = psi_at_origin(&sys, 1, &p).unwrap();
    let conn = sys.connection(1, &ConnectionParams::new(kind, m, cr(0.0))).unwrap();
    let shifted = conn.subdominant(&[1.5]).unwrap().samples[0].1.clone();
    assert!((&at_zero - &shifted).norm() < 1e-8 * shifted.norm());
}

#[test]
fn linear_potential_decay_rate() {
    let kind = AlgebraKind::a(2);
    let sys = FundamentalSystem::new(kind).unwrap();
    let h = 3.0;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for k in 0..8 {
        let e = -5.0 - 15.0 * k as f64 / 7.0;
        let q = q_at_zero_l0(&sys, 1, &ConnectionParams::new(kind, 1.0 / h, cr(e)), &[]).unwrap().q;
        xs.push((-e).powf((h + 1.0) / h));
        ys.push(q.norm().ln());
    }
    let slope = common::fit_slope(&xs, &ys);
    let want = -sys.lambda[0].re * h / (h + 1.0);
    assert!((slope / want - 1.0).abs() < 0.05, "{slope} vs {want}");
}

#[test]
fn zero_ell_bethe_equations() {
    for (kind, window) in [(AlgebraKind::a(1), 12.0), (AlgebraKind::a(2), 30.0)] {
        let s = ZeroEllSystem::new(kind, 1.0, vec![], 1e-11).unwrap();
        let z = find_zeros(|e| s.q(1, e), 0.0, window, 61, 3).unwrap();
        assert!(!z.zeros.is_empty());
        for e in &z.zeros {
            let r = s.bethe_residual(1, *e).unwrap();
            assert!(r.norm() < 1e-6, "{kind} E* = {e}: {}", r.norm());
        }
    }
}

//! Acceptance run: one PASS/FAIL line per criterion, with the measured
//! numbers and wall time. Fails at the end if any criterion failed.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use odeim_core::airy::{airy_a, airy_asymptote_a, cross_validate, AiryKind};
use odeim_core::cartan::{all_kinds_up_to, cartan_data, e6_node4_printed, pf_closed_form, pf_vector, AlgebraKind, Family};
use odeim_core::linalg::{cis, cr, eigvals, CVec, C64};
use odeim_core::ode::ConnectionParams;
use odeim_core::psi::{default_grid, psi_system_residual_with, FundamentalSystem};
use odeim_core::rep::{exterior_power, fundamental_rep, lambda_matrix, maximal_eigenpair, rep_d_standard, spin_reps_d, tensor_product, MatrixRep};
use odeim_core::spectral::{find_zeros, q_at_zero_l0, winding_number, SpectralSystem};

const MASS_TOL: f64 = 1e-12;
const REP_TOL: f64 = 1e-12;
const PSI1_TOL: f64 = 1e-12;
const BLAMBDA_TOL: f64 = 1e-10;
const TWIST_TOL: f64 = 1e-10;
const PSI_SYSTEM_TOL: f64 = 1e-6;
const PSI_TIGHTENING: f64 = 10.0;
const QQ_TOL: f64 = 1e-6;
const BETHE_TOL: f64 = 1e-4;
const SHOOTING_REL: f64 = 1e-6;
const AIRY_REL: f64 = 1e-8;
const STEEPEST_DESCENT: f64 = 0.01;
const AIRY_ZERO_TOL: f64 = 1e-10;
const SLOPE_REL: f64 = 0.05;

struct Outcome {
    passed: bool,
    detail: String,
}

fn run(id: usize, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let out = f();
    let dt = t.elapsed();
    let ok = out.passed && dt <= budget;
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {id}: {verdict} ({:.2} s of {} s) {}", dt.as_secs_f64(), budget.as_secs(), out.detail);
    ok
}

fn c1_masses() -> Outcome {
    let mut worst = 0.0f64;
    let mut kinds: Vec<AlgebraKind> = all_kinds_up_to(8).into_iter().filter(|k| k.family != Family::E).collect();
    kinds.extend([AlgebraKind::e(6), AlgebraKind::e(7), AlgebraKind::e(8)]);
    for kind in &kinds {
        let pf = pf_vector(&cartan_data(*kind).unwrap());
        for (a, b) in pf.iter().zip(pf_closed_form(*kind)) {
            worst = worst.max((a - b).abs());
        }
    }
    let e6 = pf_vector(&cartan_data(AlgebraKind::e(6)).unwrap());
    Outcome {
        passed: worst < MASS_TOL,
        detail: format!(
            "{} algebras, max |pf - closed form| = {worst:.2e}; E6 node 4 printed {:.6} vs {:.6}",
            kinds.len(),
            e6_node4_printed(),
            e6[3]
        ),
    }
}

fn rep_residual(r: &MatrixRep) -> f64 {
    let data = cartan_data(r.kind).unwrap();
    r.chevalley_residual(&data).max(r.grading_residual())
}

fn c2_representations() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut check = |r: &MatrixRep| {
        worst = worst.max(rep_residual(r));
        count += 1;
    };
    for n in 1..=5 {
        let kind = AlgebraKind::a(n);
        let fund: Vec<MatrixRep> = (1..=n).map(|i| fundamental_rep(kind, i).unwrap()).collect();
        fund.iter().for_each(&mut check);
        let data = cartan_data(kind).unwrap();
        for i in 1..=n {
            let factors: Vec<&MatrixRep> = data.neighbours(i).iter().map(|&j| &fund[j - 1]).collect();
            if !factors.is_empty() {
                check(&tensor_product(&factors).unwrap());
            }
        }
    }
    for n in 3..=5 {
        let base = rep_d_standard(n, cr(0.0)).unwrap();
        check(&base);
        for p in 2..=n {
            check(&exterior_power(&base, p).unwrap());
        }
        for i in 2..=n - 2 {
            check(&fundamental_rep(AlgebraKind::d(n), i).unwrap());
        }
        let (s1, s2) = spin_reps_d(n, cr(n as f64 / 2.0)).unwrap();
        check(&s1);
        check(&s2);
    }
    Outcome { passed: worst < REP_TOL, detail: format!("{count} representations, max residual {worst:.2e}") }
}

/// Greedy nearest matching; the largest distance between paired entries.
fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .fold((usize::MAX, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

fn c3_spectrum() -> Outcome {
    let mut psi_err = 0.0f64;
    for n in 1..=8 {
        let r = fundamental_rep(AlgebraKind::a(n), 1).unwrap();
        let want = CVec::from_element(n + 1, cr(1.0));
        let got = maximal_eigenpair(&r).unwrap().maximal.unwrap().psi;
        psi_err = psi_err.max((&got - &want / cr(want.norm())).norm());
    }
    for n in 3..=8 {
        let r = fundamental_rep(AlgebraKind::d(n), 1).unwrap();
        let mut want = CVec::from_element(2 * n, cr(1.0));
        want[n - 1] = cr(0.5);
        want[2 * n - 1] = cr(0.5);
        let got = maximal_eigenpair(&r).unwrap().maximal.unwrap().psi;
        psi_err = psi_err.max((&got - &want / cr(want.norm())).norm());
    }

    let mut blambda = 0.0f64;
    let mut twist = 0.0f64;
    let kinds: Vec<AlgebraKind> = (1..=5).map(AlgebraKind::a).chain((3..=5).map(AlgebraKind::d)).collect();
    for kind in kinds {
        let data = cartan_data(kind).unwrap();
        let reps: Vec<MatrixRep> = (1..=kind.rank).map(|i| fundamental_rep(kind, i).unwrap()).collect();
        let lam: Vec<f64> = reps.iter().map(|r| maximal_eigenpair(r).unwrap().maximal.unwrap().lambda.re).collect();
        let c = 2.0 * (PI / kind.hvee() as f64).cos();
        for i in 0..kind.rank {
            let s: f64 = (0..kind.rank).map(|j| data.b[(i, j)] as f64 * lam[j]).sum();
            blambda = blambda.max((s - c * lam[i]).abs());
        }
        for r in &reps {
            let base = eigvals(&lambda_matrix(r)).unwrap();
            for k in [0.25, 0.5, 1.0 / 3.0, 1.0] {
                let shifted = eigvals(&lambda_matrix(&r.retwisted(r.twist + cr(k)))).unwrap();
                let g = cis(2.0 * PI * k / kind.hvee() as f64);
                let scaled: Vec<C64> = base.iter().map(|z| z * g).collect();
                twist = twist.max(multiset_distance(&shifted, &scaled));
            }
        }
    }
    Outcome {
        passed: psi_err < PSI1_TOL && blambda < BLAMBDA_TOL && twist < TWIST_TOL,
        detail: format!("psi(1) error {psi_err:.2e}, B.lambda error {blambda:.2e}, twist multiset distance {twist:.2e}"),
    }
}

fn psi_system_max(sys: &FundamentalSystem, energy: C64, tol: f64) -> f64 {
    let p = ConnectionParams::new(sys.kind, 1.0, energy).with_tol(tol);
    (1..=sys.kind.rank)
        .map(|node| psi_system_residual_with(sys, node, &p, &default_grid()).unwrap().max_corrected)
        .fold(0.0, f64::max)
}

fn c4_psi_system() -> Outcome {
    let mut cases = Vec::new();
    for kind in [AlgebraKind::a(2), AlgebraKind::a(3)] {
        for e in [0.0, 1.0, -2.0] {
            cases.push((kind, e));
        }
    }
    cases.push((AlgebraKind::d(4), 0.0));
    let mut worst = 0.0f64;
    let mut gain = f64::INFINITY;
    for (kind, e) in cases {
        let sys = FundamentalSystem::new(kind).unwrap();
        let r = psi_system_max(&sys, cr(e), 1e-10);
        let tight = psi_system_max(&sys, cr(e), 1e-12);
        worst = worst.max(r);
        gain = gain.min(r / tight);
    }
    Outcome {
        passed: worst < PSI_SYSTEM_TOL && gain >= PSI_TIGHTENING,
        detail: format!("max residual {worst:.2e} at tol 1e-10, smallest gain {gain:.1}x at tol 1e-12"),
    }
}

fn a2_generic() -> SpectralSystem {
    // ℓ = C⁻¹(0.37, 0.29).
    let ell = vec![cr((2.0 * 0.37 + 0.29) / 3.0), cr((0.37 + 2.0 * 0.29) / 3.0)];
    SpectralSystem::new(AlgebraKind::a(2), 1.0, ell, 1e-10).unwrap()
}

fn c5_qq() -> Outcome {
    let s = a2_generic();
    let mut worst = 0.0f64;
    for e in [C64::new(0.5, 0.3), cr(3.0), C64::new(-2.0, 1.0), C64::new(6.0, -0.5), cr(-4.5)] {
        for node in 1..=2 {
            worst = worst.max(s.qq_residual(node, e).unwrap().relative());
        }
    }
    Outcome { passed: worst < QQ_TOL, detail: format!("A2, 5 energies, both nodes, max relative residual {worst:.2e}") }
}

fn c6_bethe() -> Outcome {
    let s = a2_generic();
    let z = find_zeros(|e| s.q(1, e), 0.0, 45.0, 46, 3).unwrap();
    let count = winding_number(|e| s.q(1, e), 0.0, 45.0, -2.0, 2.0, 24).unwrap();
    let worst = z.zeros.iter().map(|e| s.bethe_residual(1, *e).unwrap().norm()).fold(0.0, f64::max);
    let zs: Vec<String> = z.zeros.iter().map(|e| format!("{:.5}", e.re)).collect();
    Outcome {
        passed: z.zeros.len() == 3 && count == 3 && worst < BETHE_TOL,
        detail: format!("zeros [{}], winding count {count}, max |product + 1| {worst:.2e}", zs.join(", ")),
    }
}

fn c7_shooting() -> Outcome {
    let ell = 0.27;
    let mut worst = 0.0f64;
    let mut found = true;
    for (two_m, window) in [(2usize, 30.0), (3, 45.0)] {
        let m = two_m as f64 / 2.0;
        let s = SpectralSystem::new(AlgebraKind::a(1), m, vec![cr(ell)], 1e-11).unwrap();
        let z = find_zeros(|e| s.q(1, e), 0.0, window, 81, 5).unwrap();
        let oracle = common::shooting_eigenvalues(ell, two_m, 5);
        found &= z.zeros.len() == 5;
        for (a, b) in z.zeros.iter().zip(&oracle) {
            worst = worst.max(((a.re - b) / b).abs());
        }
    }
    Outcome { passed: found && worst < SHOOTING_REL, detail: format!("M = 1 and 3/2, first 5 zeros, max relative error {worst:.2e}") }
}

fn c8_airy() -> Outcome {
    let xs: Vec<f64> = (0..11).map(|k| 0.5 + 0.25 * k as f64).collect();
    let mut cross = 0.0f64;
    for kind in [AiryKind::a(3).unwrap(), AiryKind::a(4).unwrap(), AiryKind::d(3).unwrap()] {
        cross = cross.max(cross_validate(kind, 0, &xs, 1.0, 1e-12).unwrap().max_rel);
    }
    let ratios: Vec<f64> = (1..=3).map(|j| airy_a(3, j, cr(6.0)).unwrap().re / airy_asymptote_a(3, j, 6.0)).collect();
    let sd = ratios.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    let far: Vec<String> = [12.0, 24.0, 48.0]
        .iter()
        .map(|&x| {
            let d = (1..=3).map(|j| (airy_a(3, j, cr(x)).unwrap().re / airy_asymptote_a(3, j, x) - 1.0).abs()).fold(0.0, f64::max);
            format!("x={x}: {d:.2e}")
        })
        .collect();
    let ai0 = 3f64.powf(-2.0 / 3.0) / common::gamma(2.0 / 3.0);
    let zero = (airy_a(2, 1, cr(0.0)).unwrap() - cr(ai0)).norm();
    let rs: Vec<String> = ratios.iter().map(|r| format!("{r:.5}")).collect();
    Outcome {
        passed: cross < AIRY_REL && sd < STEEPEST_DESCENT && zero < AIRY_ZERO_TOL,
        detail: format!(
            "quadrature vs ODE {cross:.2e}; steepest-descent ratios at x=6 [{}], max |r-1| {sd:.4} (bound {STEEPEST_DESCENT}); farther out {}; Ai(0) error {zero:.2e}",
            rs.join(", "),
            far.join(", ")
        ),
    }
}

fn c9_asymptotics() -> Outcome {
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for n in 1..=3 {
        let kind = AlgebraKind::a(n);
        let sys = FundamentalSystem::new(kind).unwrap();
        let h = kind.hvee() as f64;
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for k in 0..8 {
            let e = -5.0 - 15.0 * k as f64 / 7.0;
            let q = q_at_zero_l0(&sys, 1, &ConnectionParams::new(kind, 1.0 / h, cr(e)), &[]).unwrap().q;
            xs.push((-e).powf((h + 1.0) / h));
            ys.push(q.norm().ln());
        }
        let slope = common::fit_slope(&xs, &ys);
        let want = -sys.lambda[0].re * h / (h + 1.0);
        worst = worst.max((slope / want - 1.0).abs());
        parts.push(format!("{kind} {:.4}", slope / want));
    }
    Outcome { passed: worst < SLOPE_REL, detail: format!("slope / predicted: {}", parts.join(", ")) }
}

#[test]
fn acceptance() {
    let s = Duration::from_secs;
    let results = [
        run(1, s(1), c1_masses),
        run(2, s(30), c2_representations),
        run(3, s(30), c3_spectrum),
        run(4, s(600), c4_psi_system),
        run(5, s(300), c5_qq),
        run(6, s(600), c6_bethe),
        run(7, s(120), c7_shooting),
        run(8, s(120), c8_airy),
        run(9, s(300), c9_asymptotics),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

//! Half-spin representations of `D_n` from a fermionic Clifford module.
//!
//! With the Gram matrix `G = J S` of the standard representation, Clifford
//! generators on the `2^n`-dimensional Fock space are `Γ_k = a_k†` and
//! `Γ_{k'} = 2 G_{k k'} a_k` (Jordan–Wigner signs), so that
//! `{Γ_a, Γ_b} = 2 G_ab`. An element `X` of `so(2n)` then acts by
//! `ρ(X) = ¼ Σ_ab (X G⁻¹)_ab Γ_a Γ_b`, and the even/odd occupation sectors are
//! the two half-spin modules.

use super::{d_forms, rep_d_standard, MatrixRep};
use crate::cartan::AlgebraKind;
use crate::error::{Error, Result};
use crate::linalg::{common_null_vector, cr, inverse, CMat, C64};

/// Clifford generator `a` applied to Fock state `s`: `(coefficient, state)`.
fn gamma_apply(n: usize, g: &CMat, a: usize, s: usize) -> Option<(C64, usize)> {
    let d = 2 * n;
    let (mode, create) = if a < n { (a, true) } else { (d - 1 - a, false) };
    let occupied = (s >> mode) & 1 == 1;
    if create == occupied {
        return None;
    }
    let sign = if (s & ((1usize << mode) - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    let t = s ^ (1 << mode);
    let coef = if create { cr(sign) } else { g[(mode, d - 1 - mode)] * 2.0 * sign };
    Some((coef, t))
}

/// Spinor action of a `2n × 2n` matrix in the standard `D_n` conventions.
fn spinor(n: usize, g: &CMat, g_inv: &CMat, x: &CMat) -> CMat {
    let d = 2 * n;
    let dim = 1usize << n;
    let k = x * g_inv;
    let mut out = CMat::zeros(dim, dim);
    for a in 0..d {
        for b in 0..d {
            let kab = k[(a, b)];
            if kab.re == 0.0 && kab.im == 0.0 {
                continue;
            }
            for s in 0..dim {
                if let Some((cb, t)) = gamma_apply(n, g, b, s) {
                    if let Some((ca, u)) = gamma_apply(n, g, a, t) {
                        out[(u, s)] += kab * ca * cb * 0.25;
                    }
                }
            }
        }
    }
    out
}

fn restrict(m: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// The two half-spin representations `(V^(n−1), V^(n))` of `D_n`, both with
/// twist `k`. They are told apart by the weight of their highest-weight
/// vector (`h_{n−1}` eigenvalue 1 for `V^(n−1)`).
pub fn spin_reps_d(n: usize, k: C64) -> Result<(MatrixRep, MatrixRep)> {
    let kind = AlgebraKind::new(crate::cartan::Family::D, n)?;
    let std_rep = rep_d_standard(n, cr(0.0))?;
    let (s, j) = d_forms(n);
    let g = &j * &s;
    let g_inv = inverse(&g)?;
    let rho = |x: &CMat| spinor(n, &g, &g_inv, x);
    let dim = 1usize << n;
    let mut sectors = Vec::new();
    for parity in 0..2u32 {
        let idx: Vec<usize> = (0..dim).filter(|s| s.count_ones() % 2 == parity).collect();
        let sub = |x: &CMat| restrict(&rho(x), &idx);
        let e: Vec<CMat> = std_rep.e.iter().map(sub).collect();
        let f: Vec<CMat> = std_rep.f.iter().map(sub).collect();
        let h: Vec<CMat> = std_rep.h.iter().map(sub).collect();
        let e0 = sub(&std_rep.e0);
        let rep = MatrixRep::from_parts(kind, e, f, h, e0, k, String::new())?;
        sectors.push(rep);
    }
    let mut plus = None;
    let mut minus = None;
    for rep in sectors {
        let v = common_null_vector(&rep.e, rep.dim);
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let weight = |x: &CMat| (v.dotc(&(x * &v))).re / norm2;
        if (weight(&rep.h[n - 2]) - 1.0).abs() < 1e-9 {
            plus = Some(rep);
        } else if (weight(&rep.h[n - 1]) - 1.0).abs() < 1e-9 {
            minus = Some(rep);
        }
    }
    match (plus, minus) {
        (Some(mut p), Some(mut m)) => {
            p.label = format!("V^({}) of {kind}", n - 1);
            m.label = format!("V^({n}) of {kind}");
            Ok((p.self_check()?, m.self_check()?))
        }
        _ => Err(Error::Construction(format!("could not identify half-spin modules of {kind}"))),
    }
}

//! The morphisms `m_i : ∧²V^(i)_{1/2} → M^(i) = ⊗_j V^(j)^{⊗B_ij}`.
//!
//! The submodule `W ⊂ ∧²` generated by the highest-weight vector
//! `f_i v_i ∧ v_i` is swept out by words in the lowering operators, with the
//! same words applied to `⊗_j v_j` on the target side. The kernel is the
//! invariant complement of `W`: the common null space of the functionals
//! obtained from the highest-weight coordinate functional by repeated raising.
//! (The plain orthogonal complement is not invariant for `D_n`, whose
//! generators are not unitary in the coordinate inner product.)

use super::{exterior_power, fundamental_rep, tensor_product, MatrixRep};
use crate::cartan::{cartan_data, AlgebraKind};
use crate::error::{Error, Result};
use crate::linalg::{common_null_vector, cr, inverse, kron_vec, max_abs, orthonormal_complement, CMat, CVec, Sparse, C64};
use crate::tolerance;

#[derive(Clone, Debug)]
pub struct Intertwiner {
    /// 1-based node `i`.
    pub node: usize,
    /// 1-based nodes of the tensor factors, in order.
    pub factors: Vec<usize>,
    pub source_label: String,
    pub target_label: String,
    pub matrix: CMat,
}

/// Coordinates of `u ∧ v` in the lexicographic basis of `∧²`.
pub(crate) fn wedge2(u: &CVec, v: &CVec) -> CVec {
    let d = u.len();
    let mut out = CVec::zeros(d * (d - 1) / 2);
    let mut k = 0;
    for a in 0..d {
        for b in a + 1..d {
            out[k] = u[a] * v[b] - u[b] * v[a];
            k += 1;
        }
    }
    out
}

/// Modified Gram–Schmidt step with a paired image. Returns false when `s`
/// is dependent on the current basis.
fn paired_add(basis: &mut Vec<CVec>, images: &mut Vec<CVec>, mut s: CVec, mut t: CVec) -> bool {
    for _ in 0..2 {
        for (b, im) in basis.iter().zip(images.iter()) {
            let c = b.dotc(&s);
            s -= b * c;
            t -= im * c;
        }
    }
    let n = s.norm();
    if n > tolerance::INDEPENDENCE {
        let inv = C64::new(1.0 / n, 0.0);
        basis.push(s * inv);
        images.push(t * inv);
        true
    } else {
        false
    }
}

fn single_add(basis: &mut Vec<CVec>, mut s: CVec) -> bool {
    for _ in 0..2 {
        for b in basis.iter() {
            let c = b.dotc(&s);
            s -= b * c;
        }
    }
    let n = s.norm();
    if n > tolerance::INDEPENDENCE {
        basis.push(s / C64::new(n, 0.0));
        true
    } else {
        false
    }
}

/// Max residual of `m X_src − X_tgt m` over all generators and `e₀`.
pub fn equivariance_residual(m: &CMat, src: &MatrixRep, tgt: &MatrixRep) -> f64 {
    let mut res: f64 = 0.0;
    let mut check = |a: &CMat, b: &CMat| {
        let left = Sparse::from_dense(a).left_mul_dense(m);
        let right = Sparse::from_dense(b).mul_dense(m);
        res = res.max(max_abs(&(left - right)));
    };
    for k in 0..src.e.len() {
        check(&src.e[k], &tgt.e[k]);
        check(&src.f[k], &tgt.f[k]);
        check(&src.h[k], &tgt.h[k]);
    }
    check(&src.e0, &tgt.e0);
    res
}

/// Build `m_i` from `V^(i)` and the factors `V^(j)` (with multiplicity).
/// Returns the intertwiner with its source `∧²V^(i)_{twist+1/2}` and target.
pub fn intertwiner_from(vi: &MatrixRep, node: usize, factors: &[(usize, &MatrixRep)]) -> Result<(Intertwiner, MatrixRep, MatrixRep)> {
    let kind = vi.kind;
    kind.check_node(node)?;
    let shifted = vi.retwisted(vi.twist + cr(0.5));
    let src = exterior_power(&shifted, 2)?;
    let tgt = if factors.is_empty() {
        MatrixRep::trivial(kind)
    } else {
        let reps: Vec<&MatrixRep> = factors.iter().map(|(_, r)| *r).collect();
        tensor_product(&reps)?
    };

    let v = common_null_vector(&vi.e, vi.dim);
    let fv = &vi.f[node - 1] * &v;
    let s0 = wedge2(&fv, &v);
    let mut t0 = CVec::from_element(1, cr(1.0));
    for (_, r) in factors {
        t0 = kron_vec(&t0, &common_null_vector(&r.e, r.dim));
    }

    let sf: Vec<Sparse> = src.f.iter().map(Sparse::from_dense).collect();
    let tf: Vec<Sparse> = tgt.f.iter().map(Sparse::from_dense).collect();
    let mut basis = Vec::new();
    let mut images = Vec::new();
    if !paired_add(&mut basis, &mut images, s0.clone(), t0.clone()) {
        return Err(Error::Construction("vanishing highest-weight vector in the wedge square".into()));
    }
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &k in &frontier {
            for (a, b) in sf.iter().zip(&tf) {
                let s = a.mul_vec(&basis[k]);
                let t = b.mul_vec(&images[k]);
                if paired_add(&mut basis, &mut images, s, t) {
                    next.push(basis.len() - 1);
                }
            }
        }
        frontier = next;
    }

    let mut a = 0;
    for i in 1..s0.len() {
        if s0[i].norm() > s0[a].norm() {
            a = i;
        }
    }
    let se: Vec<Sparse> = src.e.iter().map(Sparse::from_dense).collect();
    let mut rows: Vec<CVec> = Vec::new();
    let mut start = CVec::zeros(src.dim);
    start[a] = cr(1.0);
    single_add(&mut rows, start);
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &k in &frontier {
            for x in &se {
                let r = x.tr_mul_vec(&rows[k]);
                if single_add(&mut rows, r) {
                    next.push(rows.len() - 1);
                }
            }
        }
        frontier = next;
    }
    if rows.len() != basis.len() {
        return Err(Error::Construction(format!(
            "submodule dimension {} differs from its dual {}",
            basis.len(),
            rows.len()
        )));
    }
    let conj_rows: Vec<CVec> = rows.iter().map(|r| r.map(|z| z.conj())).collect();
    let kernel = orthonormal_complement(&conj_rows, src.dim);
    if basis.len() + kernel.len() != src.dim {
        return Err(Error::Construction("rank-deficient complement".into()));
    }

    let d = src.dim;
    let mut big = CMat::zeros(d, d);
    let mut tt = CMat::zeros(tgt.dim, d);
    for (k, (b, t)) in basis.iter().zip(&images).enumerate() {
        big.set_column(k, b);
        tt.set_column(k, t);
    }
    for (k, u) in kernel.iter().enumerate() {
        big.set_column(basis.len() + k, u);
    }
    let matrix = tt * inverse(&big)?;

    let res = equivariance_residual(&matrix, &src, &tgt);
    if res > tolerance::EQUIVARIANCE {
        return Err(Error::Construction(format!("equivariance residual {res:.3e}")));
    }
    let it = Intertwiner {
        node,
        factors: factors.iter().map(|(j, _)| *j).collect(),
        source_label: format!("wedge^2 {}", shifted.label),
        target_label: tgt.label.clone(),
        matrix,
    };
    Ok((it, src, tgt))
}

/// `m_i` for node `i` of an `A` or `D` algebra.
pub fn build_intertwiner(kind: AlgebraKind, node: usize) -> Result<Intertwiner> {
    let data = cartan_data(kind)?;
    kind.check_node(node)?;
    let vi = fundamental_rep(kind, node)?;
    let nbrs = data.neighbours(node);
    let reps: Vec<MatrixRep> = nbrs.iter().map(|&j| fundamental_rep(kind, j)).collect::<Result<_>>()?;
    let factors: Vec<(usize, &MatrixRep)> = nbrs.iter().cloned().zip(reps.iter()).collect();
    Ok(intertwiner_from(&vi, node, &factors)?.0)
}

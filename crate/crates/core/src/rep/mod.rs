//! Evaluation representations of the affine algebra as explicit matrices.
//!
//! Generators follow the elementary-matrix conventions for `A_n`
//! (`e_i = E_{i,i+1}`, `e₀ = ζ E_{n+1,1}`) and for `D_n` (the `F_ij`, `F̃_ij`
//! combinations preserving the bilinear form `S`). All Cartan generators are
//! diagonal in every basis produced here, so weight spaces are coordinate
//! subspaces.

mod intertwiner;
mod spectrum;
mod spin;

pub(crate) use intertwiner::wedge2;
pub use intertwiner::{build_intertwiner, equivariance_residual, intertwiner_from, Intertwiner};
pub use spectrum::{fix_phase, maximal_eigenpair, Maximal, SpectrumReport, SpectrumSummary};
pub use spin::spin_reps_d;

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::cartan::{cartan_data, AlgebraKind, CartanData, Family};
use crate::error::{Error, Result};
use crate::linalg::{cis, commutator_residual, cr, exp_scaled, max_abs, CMat, Sparse, C64};
use crate::tolerance;

#[derive(Clone, Debug)]
pub struct MatrixRep {
    pub kind: AlgebraKind,
    pub dim: usize,
    pub e: Vec<CMat>,
    pub f: Vec<CMat>,
    pub h: Vec<CMat>,
    /// `e₀` including the evaluation factor `ζ = exp(2πi·twist)`.
    pub e0: CMat,
    /// Grading element `h` with `[h, e_i] = e_i`.
    pub grading: CMat,
    /// Twist `k` of `V_k`; zero for tensor products, whose factors carry their own.
    pub twist: C64,
    pub label: String,
}

impl MatrixRep {
    fn from_parts(kind: AlgebraKind, e: Vec<CMat>, f: Vec<CMat>, h: Vec<CMat>, e0_untwisted: CMat, twist: C64, label: String) -> Result<Self> {
        let dim = e0_untwisted.nrows();
        let zeta = (C64::new(0.0, 2.0 * PI) * twist).exp();
        let data = cartan_data(kind)?;
        let grading = grading_from(&data, &h);
        Ok(MatrixRep { kind, dim, e, f, h, e0: e0_untwisted * zeta, grading, twist, label })
    }

    /// The one-dimensional trivial representation.
    pub fn trivial(kind: AlgebraKind) -> Self {
        let z = CMat::zeros(1, 1);
        let n = kind.rank;
        MatrixRep {
            kind,
            dim: 1,
            e: vec![z.clone(); n],
            f: vec![z.clone(); n],
            h: vec![z.clone(); n],
            e0: z.clone(),
            grading: z,
            twist: cr(0.0),
            label: format!("trivial of {kind}"),
        }
    }

    /// The same representation with twist `k`.
    pub fn retwisted(&self, k: C64) -> Self {
        let factor = (C64::new(0.0, 2.0 * PI) * (k - self.twist)).exp();
        let mut out = self.clone();
        out.e0 = &self.e0 * factor;
        out.twist = k;
        out.label = relabel_twist(&self.label, k);
        out
    }

    /// `Λ = e₀ + Σ e_i`.
    pub fn lambda_matrix(&self) -> CMat {
        lambda_matrix(self)
    }

    /// `Σ e_i`.
    pub fn e_sum(&self) -> CMat {
        let mut s = CMat::zeros(self.dim, self.dim);
        for x in &self.e {
            s += x;
        }
        s
    }

    /// `Σ ℓ_j h_j`.
    pub fn ell_matrix(&self, ell: &[C64]) -> CMat {
        let mut s = CMat::zeros(self.dim, self.dim);
        for (x, l) in self.h.iter().zip(ell) {
            s += x * *l;
        }
        s
    }

    /// Weight of basis vector `k`: the diagonal entries of the `h_j`.
    pub fn weight(&self, k: usize) -> Vec<f64> {
        self.h.iter().map(|x| x[(k, k)].re).collect()
    }

    /// Max residual of the Chevalley relations.
    pub fn chevalley_residual(&self, data: &CartanData) -> f64 {
        let n = self.e.len();
        let se: Vec<Sparse> = self.e.iter().map(Sparse::from_dense).collect();
        let sf: Vec<Sparse> = self.f.iter().map(Sparse::from_dense).collect();
        let sh: Vec<Sparse> = self.h.iter().map(Sparse::from_dense).collect();
        let zero = CMat::zeros(self.dim, self.dim);
        let mut res: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let cij = data.c[(i, j)] as f64;
                res = res.max(commutator_residual(&sh[i], &sh[j], &self.h[j], &self.h[i], &zero));
                res = res.max(commutator_residual(&sh[i], &se[j], &self.e[j], &self.h[i], &(&self.e[j] * cr(cij))));
                res = res.max(commutator_residual(&sh[i], &sf[j], &self.f[j], &self.h[i], &(&self.f[j] * cr(-cij))));
                let rhs = if i == j { self.h[i].clone() } else { zero.clone() };
                res = res.max(commutator_residual(&se[i], &sf[j], &self.f[j], &self.e[i], &rhs));
            }
        }
        res
    }

    /// Max residual of `[h, e_i] = e_i` and `[h, e₀] = −(h∨−1) e₀`.
    pub fn grading_residual(&self) -> f64 {
        let hv = self.kind.hvee() as f64;
        let sg = Sparse::from_dense(&self.grading);
        let mut res: f64 = 0.0;
        for x in &self.e {
            res = res.max(commutator_residual(&sg, &Sparse::from_dense(x), x, &self.grading, x));
        }
        res = res.max(commutator_residual(
            &sg,
            &Sparse::from_dense(&self.e0),
            &self.e0,
            &self.grading,
            &(&self.e0 * cr(-(hv - 1.0))),
        ));
        res
    }

    fn self_check(self) -> Result<Self> {
        let data = cartan_data(self.kind)?;
        let r = self.chevalley_residual(&data).max(self.grading_residual());
        if r > tolerance::CHEVALLEY {
            return Err(Error::Construction(format!("{}: relation residual {r:.3e}", self.label)));
        }
        Ok(self)
    }
}

fn relabel_twist(label: &str, k: C64) -> String {
    let base = label.split(" [twist").next().unwrap_or(label);
    format!("{base} [twist {}]", fmt_twist(k))
}

fn fmt_twist(k: C64) -> String {
    if k.im == 0.0 {
        format!("{}", k.re)
    } else {
        format!("{}{:+}i", k.re, k.im)
    }
}

/// Coefficients `a` with `Σ_j a_j C_ji = 1`.
pub fn grading_coefficients(data: &CartanData) -> Vec<f64> {
    let ct = data.c_f64().transpose();
    let n = data.rank();
    let a = ct.lu().solve(&nalgebra::DVector::from_element(n, 1.0)).expect("C invertible");
    a.iter().cloned().collect()
}

fn grading_from(data: &CartanData, h: &[CMat]) -> CMat {
    let a = grading_coefficients(data);
    let dim = h.first().map(|x| x.nrows()).unwrap_or(1);
    let mut g = CMat::zeros(dim, dim);
    for (x, aj) in h.iter().zip(a) {
        g += x * cr(aj);
    }
    g
}

fn unit(d: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    m[(i - 1, j - 1)] = cr(1.0);
    m
}

/// Standard representation of `A_n` on `C^{n+1}` with twist `k`.
pub fn rep_a_standard(n: usize, k: C64) -> Result<MatrixRep> {
    let kind = AlgebraKind::new(Family::A, n)?;
    let d = n + 1;
    let e = (1..=n).map(|i| unit(d, i, i + 1)).collect();
    let f = (1..=n).map(|i| unit(d, i + 1, i)).collect();
    let h = (1..=n).map(|i| unit(d, i, i) - unit(d, i + 1, i + 1)).collect();
    MatrixRep::from_parts(kind, e, f, h, unit(d, n + 1, 1), k, format!("V^(1) of {kind} [twist {}]", fmt_twist(k)))
}

/// Standard representation of `D_n` on `C^{2n}` with twist `k`.
pub fn rep_d_standard(n: usize, k: C64) -> Result<MatrixRep> {
    let kind = AlgebraKind::new(Family::D, n)?;
    let d = 2 * n;
    let p = |i: usize| 2 * n + 1 - i;
    let sgn = |i: usize, j: usize| if (i + j + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let fm = |i: usize, j: usize| unit(d, i, j) + unit(d, p(j), p(i)) * cr(sgn(i, j));
    let ft = |i: usize, j: usize| unit(d, i, p(j)) + unit(d, j, p(i)) * cr(sgn(i, j));
    let mut e: Vec<CMat> = (1..n).map(|i| fm(i, i + 1)).collect();
    e.push(ft(n - 1, n) * cr(0.5));
    let mut f: Vec<CMat> = (1..n).map(|i| fm(i + 1, i)).collect();
    f.push(ft(p(n), p(n - 1)) * cr(2.0));
    let mut h: Vec<CMat> = (1..n).map(|i| fm(i, i) - fm(i + 1, i + 1)).collect();
    h.push(fm(n - 1, n - 1) + fm(n, n));
    let e0 = ft(2 * n - 1, 2 * n) * cr(0.5);
    MatrixRep::from_parts(kind, e, f, h, e0, k, format!("V^(1) of {kind} [twist {}]", fmt_twist(k)))
}

/// Diagonal form `S` and antidiagonal `J` of the `D_n` conventions: every
/// generator `X` satisfies `X S + S J Xᵀ J = 0`.
pub fn d_forms(n: usize) -> (CMat, CMat) {
    let d = 2 * n;
    let mut s = CMat::zeros(d, d);
    let mut j = CMat::zeros(d, d);
    for k in 1..=d {
        let m = k.min(d + 1 - k);
        s[(k - 1, k - 1)] = cr(if (m + 1) % 2 == 0 { 1.0 } else { -1.0 });
        j[(k - 1, d - k)] = cr(1.0);
    }
    (s, j)
}

/// Lexicographic basis of `p`-subsets of `0..d`.
pub fn wedge_basis(d: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(p);
    fn rec(start: usize, d: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            if d - i < p - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, d, p, cur, out);
            cur.pop();
        }
    }
    rec(0, d, p, &mut cur, &mut out);
    out
}

/// Derivation action of `x` on the `p`-th exterior power.
pub fn wedge_operator(x: &CMat, basis: &[Vec<usize>], index: &HashMap<Vec<usize>, usize>) -> CMat {
    let d = x.nrows();
    let mut m = CMat::zeros(basis.len(), basis.len());
    for (col, b) in basis.iter().enumerate() {
        for (pos, &i) in b.iter().enumerate() {
            for r in 0..d {
                let z = x[(r, i)];
                if z.re == 0.0 && z.im == 0.0 {
                    continue;
                }
                if r != i && b.contains(&r) {
                    continue;
                }
                let (lo, hi) = if r < i { (r, i) } else { (i, r) };
                let between = b.iter().filter(|&&t| t != i && t > lo && t < hi).count();
                let sign = if between % 2 == 0 { 1.0 } else { -1.0 };
                let mut nb = b.clone();
                nb[pos] = r;
                nb.sort_unstable();
                let row = index[&nb];
                m[(row, col)] += z * sign;
            }
        }
    }
    m
}

/// `p`-th exterior power; the twist of `rep` is inherited.
pub fn exterior_power(rep: &MatrixRep, p: usize) -> Result<MatrixRep> {
    if p == 0 || p > rep.dim {
        return Err(Error::Dimension(format!("exterior power {p} of a {}-dimensional rep", rep.dim)));
    }
    let basis = wedge_basis(rep.dim, p);
    let index: HashMap<Vec<usize>, usize> = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
    let w = |x: &CMat| wedge_operator(x, &basis, &index);
    Ok(MatrixRep {
        kind: rep.kind,
        dim: basis.len(),
        e: rep.e.iter().map(w).collect(),
        f: rep.f.iter().map(w).collect(),
        h: rep.h.iter().map(w).collect(),
        e0: w(&rep.e0),
        grading: w(&rep.grading),
        twist: rep.twist,
        label: format!("wedge^{p} {}", rep.label),
    })
}

fn leibniz(ops: &[&CMat], dims: &[usize]) -> CMat {
    let total: usize = dims.iter().product();
    let mut out = CMat::zeros(total, total);
    for (k, x) in ops.iter().enumerate() {
        let mut t = CMat::identity(1, 1);
        for (j, &d) in dims.iter().enumerate() {
            t = if j == k { t.kronecker(*x) } else { t.kronecker(&CMat::identity(d, d)) };
        }
        out += t;
    }
    out
}

/// Tensor product with the Leibniz action; each factor contributes its own
/// twisted `e₀`.
pub fn tensor_product(reps: &[&MatrixRep]) -> Result<MatrixRep> {
    let first = reps.first().ok_or_else(|| Error::Dimension("empty tensor product".into()))?;
    let kind = first.kind;
    if reps.iter().any(|r| r.kind != kind) {
        return Err(Error::Dimension("tensor factors of different algebras".into()));
    }
    let dims: Vec<usize> = reps.iter().map(|r| r.dim).collect();
    let n = kind.rank;
    let gen = |pick: &dyn Fn(&MatrixRep) -> &CMat| {
        let ops: Vec<&CMat> = reps.iter().map(|r| pick(r)).collect();
        leibniz(&ops, &dims)
    };
    let e = (0..n).map(|i| gen(&|r| &r.e[i])).collect();
    let f = (0..n).map(|i| gen(&|r| &r.f[i])).collect();
    let h = (0..n).map(|i| gen(&|r| &r.h[i])).collect();
    let label = reps.iter().map(|r| r.label.clone()).collect::<Vec<_>>().join(" (x) ");
    Ok(MatrixRep {
        kind,
        dim: dims.iter().product(),
        e,
        f,
        h,
        e0: gen(&|r| &r.e0),
        grading: gen(&|r| &r.grading),
        twist: cr(0.0),
        label,
    })
}

/// Fundamental representation `V^(i)` with twist `p(i)/2`.
pub fn fundamental_rep(kind: AlgebraKind, node: usize) -> Result<MatrixRep> {
    kind.check_node(node)?;
    let data = cartan_data(kind)?;
    let twist = cr(data.parity[node - 1] as f64 / 2.0);
    let n = kind.rank;
    let rep = match kind.family {
        Family::A => {
            let base = rep_a_standard(n, twist)?;
            if node == 1 {
                base
            } else {
                exterior_power(&base, node)?
            }
        }
        Family::D => {
            if node <= n - 2 {
                let base = rep_d_standard(n, twist)?;
                if node == 1 {
                    base
                } else {
                    exterior_power(&base, node)?
                }
            } else {
                let (plus, minus) = spin_reps_d(n, twist)?;
                if node == n - 1 {
                    plus
                } else {
                    minus
                }
            }
        }
        Family::E => {
            return Err(Error::Unsupported(format!("representation matrices for {kind}")));
        }
    };
    let mut rep = rep;
    rep.label = format!("V^({node}) of {kind}");
    Ok(rep)
}

/// All fundamental representations of an `A` or `D` algebra.
pub fn fundamental_reps(kind: AlgebraKind) -> Result<Vec<MatrixRep>> {
    (1..=kind.rank).map(|i| fundamental_rep(kind, i)).collect()
}

pub fn lambda_matrix(rep: &MatrixRep) -> CMat {
    rep.e_sum() + &rep.e0
}

/// `γ^{kH} = exp(k ln γ · H)`, principal logarithm `ln γ = 2πi/h∨`.
pub fn gamma_h_twist(rep: &MatrixRep, k: C64) -> CMat {
    let lg = C64::new(0.0, 2.0 * PI / rep.kind.hvee() as f64);
    exp_scaled(&rep.grading, k * lg)
}

/// For the standard `A_n` representation the grading element derived from
/// the commutation constraints is `diag(n/2, …, −n/2)`; returns a note when
/// it is the negative of the increasing diagonal `diag(−n/2, …, n/2)`.
pub fn grading_note(rep: &MatrixRep) -> Option<String> {
    if rep.kind.family != Family::A || rep.dim != rep.kind.rank + 1 {
        return None;
    }
    let n = rep.kind.rank as f64;
    let increasing: Vec<f64> = (0..rep.dim).map(|k| -n / 2.0 + k as f64).collect();
    let flipped = (0..rep.dim).all(|k| (rep.grading[(k, k)].re + increasing[k]).abs() < 1e-14);
    if flipped {
        Some(format!(
            "grading element is diag({}, ..., {}); the increasing diagonal would give [h,e] = -e",
            n / 2.0,
            -n / 2.0
        ))
    } else {
        None
    }
}

/// Max residual of `γ^{kH} Λ_{V_{t+k}} γ^{−kH} − γ^k Λ_{V_t}`.
pub fn twist_identity_residual(rep: &MatrixRep, k: f64) -> f64 {
    let g = gamma_h_twist(rep, cr(k));
    let gi = gamma_h_twist(rep, cr(-k));
    let shifted = rep.retwisted(rep.twist + cr(k));
    let lhs = &g * lambda_matrix(&shifted) * &gi;
    let rhs = lambda_matrix(rep) * cis(2.0 * PI * k / rep.kind.hvee() as f64);
    max_abs(&(lhs - rhs))
}

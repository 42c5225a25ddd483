//! Dense complex linear algebra helpers.
//!
//! nalgebra supplies LU, SVD, Hessenberg reduction and Hermitian eigensolvers.
//! The general (non-Hermitian) eigenproblem is solved here by a single-shift
//! complex QR iteration on the Hessenberg form, with an exceptional shift every
//! tenth sweep. The cyclic matrices Λ = e₀ + e are permutation-like and stall
//! plain Wilkinson-shifted iterations, so the exceptional shift is essential.

use nalgebra::{linalg::Hessenberg, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `exp(i θ)`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

pub fn vmax_abs(v: &CVec) -> f64 {
    v.iter().fold(0.0, |a, z| a.max(z.norm()))
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Kronecker product.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    let mut out = CVec::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

/// True when every off-diagonal entry vanishes exactly.
pub fn is_diagonal(m: &CMat) -> bool {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i != j && m[(i, j)] != C64::new(0.0, 0.0) {
                return false;
            }
        }
    }
    true
}

/// Row-compressed sparse view of a dense matrix, for cheap products with
/// generator matrices of large tensor representations.
#[derive(Clone, Debug)]
pub struct Sparse {
    pub nrows: usize,
    pub ncols: usize,
    rows: Vec<Vec<(usize, C64)>>,
}

impl Sparse {
    pub fn from_dense(m: &CMat) -> Self {
        let mut rows = vec![Vec::new(); m.nrows()];
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let z = m[(i, j)];
                if z.re != 0.0 || z.im != 0.0 {
                    rows[i].push((j, z));
                }
            }
        }
        Sparse { nrows: m.nrows(), ncols: m.ncols(), rows }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// `self * b`.
    pub fn mul_dense(&self, b: &CMat) -> CMat {
        let mut out = CMat::zeros(self.nrows, b.ncols());
        for (i, row) in self.rows.iter().enumerate() {
            for &(k, z) in row {
                for j in 0..b.ncols() {
                    out[(i, j)] += z * b[(k, j)];
                }
            }
        }
        out
    }

    /// `a * self`.
    pub fn left_mul_dense(&self, a: &CMat) -> CMat {
        let mut out = CMat::zeros(a.nrows(), self.ncols);
        for (k, row) in self.rows.iter().enumerate() {
            for &(j, z) in row {
                for i in 0..a.nrows() {
                    out[(i, j)] += a[(i, k)] * z;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &CVec) -> CVec {
        let mut out = CVec::zeros(self.nrows);
        for (i, row) in self.rows.iter().enumerate() {
            let mut s = C64::new(0.0, 0.0);
            for &(k, z) in row {
                s += z * v[k];
            }
            out[i] = s;
        }
        out
    }

    /// `selfᵀ v` (plain transpose, no conjugation).
    pub fn tr_mul_vec(&self, v: &CVec) -> CVec {
        let mut out = CVec::zeros(self.ncols);
        for (i, row) in self.rows.iter().enumerate() {
            for &(k, z) in row {
                out[k] += z * v[i];
            }
        }
        out
    }
}

/// Max-norm of `[a, b] - rhs` using sparse products.
pub fn commutator_residual(a: &Sparse, b: &Sparse, b_dense: &CMat, a_dense: &CMat, rhs: &CMat) -> f64 {
    let ab = a.mul_dense(b_dense);
    let ba = b.mul_dense(a_dense);
    max_abs(&(ab - ba - rhs))
}

fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    let nrm = ax.hypot(ay);
    if nrm == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    (ax / nrm, (x / ax) * y.conj() / nrm)
}

fn wilkinson(a: C64, b: C64, cc: C64, d: C64) -> C64 {
    let tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * cc).sqrt();
    let l1 = tr + disc;
    let l2 = tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Schur decomposition `a = q t qᴴ` with `t` upper triangular.
pub fn schur(a: &CMat) -> Result<(CMat, CMat)> {
    let n = a.nrows();
    if n <= 1 {
        return Ok((CMat::identity(n, n), a.clone()));
    }
    let (mut q, mut h) = Hessenberg::new(a.clone()).unpack();
    let eps = f64::EPSILON;
    let scale = max_abs(&h).max(f64::MIN_POSITIVE);
    let zero = C64::new(0.0, 0.0);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if s == 0.0 {
                s = scale;
            }
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = zero;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 60 * n + 300 {
            return Err(Error::Eigen);
        }
        let shift = if iter.is_multiple_of(10) {
            let sub = h[(hi, hi - 1)].norm();
            h[(hi, hi)] + C64::new(0.75 * sub, 0.4375 * sub)
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        let mut x = h[(l, l)] - shift;
        let mut y = h[(l + 1, l)];
        for k in l..hi {
            if k > l {
                x = h[(k, k - 1)];
                y = h[(k + 1, k - 1)];
            }
            let (cg, sg) = givens(x, y);
            let j0 = if k > l { k - 1 } else { l };
            for j in j0..n {
                let a1 = h[(k, j)];
                let b1 = h[(k + 1, j)];
                h[(k, j)] = a1 * cg + sg * b1;
                h[(k + 1, j)] = -sg.conj() * a1 + b1 * cg;
            }
            let imax = (k + 2).min(hi);
            for i in 0..=imax {
                let a1 = h[(i, k)];
                let b1 = h[(i, k + 1)];
                h[(i, k)] = a1 * cg + b1 * sg.conj();
                h[(i, k + 1)] = -a1 * sg + b1 * cg;
            }
            for i in 0..n {
                let a1 = q[(i, k)];
                let b1 = q[(i, k + 1)];
                q[(i, k)] = a1 * cg + b1 * sg.conj();
                q[(i, k + 1)] = -a1 * sg + b1 * cg;
            }
            if k > l {
                h[(k + 1, k - 1)] = zero;
            }
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = zero;
        }
    }
    Ok((q, h))
}

/// Eigenvector of the upper triangular `t` for its `k`-th diagonal entry.
fn triangular_eigvec(t: &CMat, k: usize) -> CVec {
    let n = t.nrows();
    let small = f64::EPSILON * max_abs(t).max(f64::MIN_POSITIVE);
    let lam = t[(k, k)];
    let mut v = CVec::zeros(n);
    v[k] = C64::new(1.0, 0.0);
    for j in (0..k).rev() {
        let mut s = C64::new(0.0, 0.0);
        for m in j + 1..=k {
            s += t[(j, m)] * v[m];
        }
        let mut den = t[(j, j)] - lam;
        if den.norm() < small {
            den = C64::new(small, 0.0);
        }
        v[j] = -s / den;
    }
    v
}

/// Eigenvalues and unit eigenvectors (columns). Eigenvectors attached to
/// repeated eigenvalues are not reliable; use [`eigenvector`] for a simple one.
pub fn eig(a: &CMat) -> Result<(Vec<C64>, CMat)> {
    let n = a.nrows();
    let (q, t) = schur(a)?;
    let vals: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();
    let mut vecs = CMat::zeros(n, n);
    for k in 0..n {
        let v = &q * triangular_eigvec(&t, k);
        let nv = v.norm();
        vecs.set_column(k, &(v / C64::new(nv, 0.0)));
    }
    Ok((vals, vecs))
}

/// Eigenvalues only.
pub fn eigvals(a: &CMat) -> Result<Vec<C64>> {
    let (_, t) = schur(a)?;
    Ok((0..a.nrows()).map(|k| t[(k, k)]).collect())
}

/// Unit eigenvector for a simple eigenvalue `lam`, by inverse iteration.
pub fn eigenvector(a: &CMat, lam: C64) -> Result<CVec> {
    let n = a.nrows();
    let scale = max_abs(a).max(1.0);
    let shifted = a - CMat::identity(n, n) * (lam + C64::new(scale * 1e-13, 0.0));
    let lu = shifted.lu();
    let mut v = CVec::from_element(n, C64::new(1.0, 0.3));
    for _ in 0..3 {
        v = match lu.solve(&v) {
            Some(w) => w,
            None => {
                return Err(Error::Construction("singular shifted matrix in inverse iteration".into()));
            }
        };
        let nv = v.norm();
        v /= C64::new(nv, 0.0);
    }
    Ok(v)
}

/// Matrix exponential by scaling and squaring of a Taylor series.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = (0..n)
        .map(|i| (0..n).map(|j| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut s = 0i32;
    if norm > 0.5 {
        s = (norm / 0.5).log2().ceil() as i32;
    }
    let b = a / C64::new(2f64.powi(s), 0.0);
    let mut out = CMat::identity(n, n);
    let mut term = CMat::identity(n, n);
    for k in 1..40 {
        term = &term * &b / C64::new(k as f64, 0.0);
        out += &term;
        if max_abs(&term) < 1e-18 * max_abs(&out) {
            break;
        }
    }
    for _ in 0..s {
        out = &out * &out;
    }
    out
}

/// `exp(t·d)` for diagonal `d`, otherwise the general exponential.
pub fn exp_scaled(d: &CMat, t: C64) -> CMat {
    if is_diagonal(d) {
        let n = d.nrows();
        let mut out = CMat::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = (t * d[(i, i)]).exp();
        }
        out
    } else {
        expm(&(d * t))
    }
}

pub fn solve(a: &CMat, b: &CVec) -> Result<CVec> {
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Construction("singular linear system".into()))
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    a.clone()
        .try_inverse()
        .ok_or_else(|| Error::Construction("singular matrix".into()))
}

/// 2-norm condition number.
pub fn cond(a: &CMat) -> f64 {
    let sv = a.clone().singular_values();
    let mx = sv.iter().cloned().fold(0.0, f64::max);
    let mn = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if mn == 0.0 {
        f64::INFINITY
    } else {
        mx / mn
    }
}

/// Vector of unit norm spanning the common kernel of `mats` (smallest
/// eigenvector of Σ Xᴴ X), scaled so its largest-modulus entry equals 1.
pub fn common_null_vector(mats: &[CMat], dim: usize) -> CVec {
    let mut g = CMat::zeros(dim, dim);
    for x in mats {
        g += x.adjoint() * x;
    }
    let se = nalgebra::linalg::SymmetricEigen::new(g);
    let mut k = 0;
    for i in 1..dim {
        if se.eigenvalues[i] < se.eigenvalues[k] {
            k = i;
        }
    }
    let v: CVec = se.eigenvectors.column(k).into_owned();
    normalize_max(&v)
}

/// Scale so the largest-modulus entry equals exactly 1.
pub fn normalize_max(v: &CVec) -> CVec {
    let mut k = 0;
    for i in 1..v.len() {
        if v[i].norm() > v[k].norm() {
            k = i;
        }
    }
    let mut out = v / v[k];
    out[k] = C64::new(1.0, 0.0);
    out
}

/// Orthonormal basis of the Hermitian complement of `span(basis)` in Cᵈ.
/// `basis` must already be orthonormal.
pub fn orthonormal_complement(basis: &[CVec], dim: usize) -> Vec<CVec> {
    let mut all: Vec<CVec> = basis.to_vec();
    let mut out = Vec::new();
    for k in 0..dim {
        if all.len() == dim {
            break;
        }
        let mut v = CVec::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in &all {
                let p = b.dotc(&v);
                v -= b * p;
            }
        }
        let nv = v.norm();
        if nv > 1e-8 {
            v /= C64::new(nv, 0.0);
            all.push(v.clone());
            out.push(v);
        }
    }
    out
}

/// Orthonormal basis of the column space of `a` (left singular vectors with
/// singular value above `rtol` times the largest).
pub fn range_basis(a: &CMat, rtol: f64) -> Vec<CVec> {
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let mx = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let mut out = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s > rtol * mx {
            out.push(u.column(k).into_owned());
        }
    }
    out
}

//! Spectral determinants `Q^(i)(E;ℓ)` and `Q̃^(i)(E;ℓ)`.
//!
//! For generic `ℓ` the subdominant solution at a small `x₀` is expanded in
//! the Frobenius basis at the regular singularity `x = 0`. Since every `ℓ`
//! matrix is diagonal, the Frobenius solution with exponent `−μ_a` starts at
//! the coordinate vector `e_a`. `Q` and `Q̃` are the coefficients on the two
//! most singular solutions `χ` and `φ`, normalized so that
//! `m_i(χ^(i) ∧ φ^(i)) = ⊗_j χ^(j)^{⊗B_ij}`.
//!
//! For `ℓ = 0` the point `x = 0` is regular and `Q`, `Q̃` are read off
//! `Ψ(0,E)` along the weight vectors `v^w` and `f^w v^w`.

use rayon::prelude::*;

use crate::cartan::{phases_h, AlgebraKind, Phases};
use crate::error::{Error, Result};
use crate::linalg::{cond, cr, expm, CMat, CVec, Sparse, C64};
use crate::ode::ConnectionParams;
use crate::psi::{resonance_factor, tensor_embed, wedge_embed, FundamentalSystem};
use crate::rep::MatrixRep;
use crate::tolerance;

/// Default evaluation point of the Frobenius series.
pub const X0: f64 = 0.3;
/// Default starting order of the Frobenius series.
pub const ORDER: usize = 40;
const MAX_ORDER: usize = 5120;

/// `Mh∨` as a positive integer, which makes `p(x,E)` polynomial.
pub fn integral_mh(m: f64, hvee: usize) -> Result<usize> {
    let mh = m * hvee as f64;
    if mh < 0.5 || (mh - mh.round()).abs() > 1e-12 {
        return Err(Error::Domain(format!("M h = {mh} must be a positive integer")));
    }
    Ok(mh.round() as usize)
}

#[derive(Clone, Debug)]
pub struct WeylData {
    pub node: usize,
    /// `w_ℓ(ω_i)(ℓ)`: the `ℓ`-eigenvalue of largest real part on `V^(i)`.
    pub lstar: C64,
    /// `w_ℓ(ω_i − α_i)(ℓ)`: the runner-up.
    pub second: C64,
    pub chi_index: usize,
    pub phi_index: usize,
    pub chi_vec: CVec,
    pub phi_vec: CVec,
    /// `θ_i = w_ℓ(α_i)(ℓ+h)`.
    pub theta: C64,
    /// `β_j = w_ℓ(ω_j)(ℓ+h) / (2Mh∨)` for every node `j`.
    pub beta: Vec<C64>,
}

fn ell_diagonal(rep: &MatrixRep, ell: &[C64]) -> Vec<C64> {
    let l = rep.ell_matrix(ell);
    (0..rep.dim).map(|k| l[(k, k)]).collect()
}

/// Indices of the largest and second largest real parts, each separated
/// from the rest by more than the genericity threshold.
fn top_two(vals: &[C64], label: &str) -> Result<(usize, usize)> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|a, b| vals[*b].re.partial_cmp(&vals[*a].re).unwrap_or(std::cmp::Ordering::Equal));
    if idx.len() < 2 {
        return Err(Error::NonGeneric(format!("{label} has dimension {}", idx.len())));
    }
    let gap = |i: usize, j: usize| vals[idx[i]].re - vals[idx[j]].re;
    if gap(0, 1) <= tolerance::GENERIC {
        return Err(Error::NonGeneric(format!(
            "{label}: leading ell-eigenvalues {} and {} collide",
            vals[idx[0]], vals[idx[1]]
        )));
    }
    if idx.len() > 2 && gap(1, 2) <= tolerance::GENERIC {
        return Err(Error::NonGeneric(format!(
            "{label}: ell-eigenvalues {} and {} collide",
            vals[idx[1]], vals[idx[2]]
        )));
    }
    Ok((idx[0], idx[1]))
}

fn unit(d: usize, k: usize) -> CVec {
    let mut v = CVec::zeros(d);
    v[k] = cr(1.0);
    v
}

/// Weight data for node `i` at `ℓ = Σ ℓ_j h_j`, with `χ^(i)` the coordinate
/// vector of the top weight and `φ^(i)` rescaled so that
/// `m_i(χ^(i) ∧ φ^(i)) = ⊗_j χ^(j)`.
pub fn weyl_data(sys: &FundamentalSystem, node: usize, ell: &[C64], m: f64) -> Result<WeylData> {
    sys.kind.check_node(node)?;
    let n = sys.kind.rank;
    if ell.len() != n {
        return Err(Error::Dimension(format!("{} ell coefficients for rank {n}", ell.len())));
    }
    let h2m = 2.0 * m * sys.kind.hvee() as f64;
    let mut tops = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    for (j, rep) in sys.reps.iter().enumerate() {
        let diag = ell_diagonal(rep, ell);
        let (a, _) = top_two(&diag, &rep.label)?;
        tops.push(a);
        beta.push((diag[a] + rep.grading[(a, a)]) / h2m);
        debug_assert_eq!(j + 1, tops.len());
    }
    let rep = &sys.reps[node - 1];
    let diag = ell_diagonal(rep, ell);
    let (a, b) = top_two(&diag, &rep.label)?;
    let plus = |k: usize| diag[k] + rep.grading[(k, k)];
    let theta = plus(a) - plus(b);

    let chi = unit(rep.dim, a);
    let it = &sys.intertwiners[node - 1];
    let img = &it.matrix * wedge_embed(&chi, &unit(rep.dim, b))?;
    let tgt = tensor_embed(&it.factors.iter().map(|&j| unit(sys.reps[j - 1].dim, tops[j - 1])).collect::<Vec<_>>());
    let c = tgt.dotc(&img) / tgt.dotc(&tgt);
    if c.norm() < 1e-12 || (&img - &tgt * c).norm() > 1e-9 * img.norm() {
        return Err(Error::Construction(format!("node {node}: chi wedge phi is not a highest-weight image")));
    }
    Ok(WeylData {
        node,
        lstar: diag[a],
        second: diag[b],
        chi_index: a,
        phi_index: b,
        chi_vec: chi,
        phi_vec: unit(rep.dim, b) / c,
        theta,
        beta,
    })
}

/// Local solutions `x^{−μ_a}(e_a + Σ_{m≥1} c_m x^m)` at `x = 0`.
#[derive(Clone, Debug)]
pub struct FrobeniusBasis {
    /// `−μ_a` for each coordinate `a`.
    pub exponents: Vec<C64>,
    pub series: Vec<Vec<CVec>>,
    /// Root-test estimate of the radius of accuracy of the truncation.
    pub radius_hint: f64,
    /// Length of the coupling stencil, `Mh∨ + 1`.
    stride: usize,
}

pub fn frobenius_basis(rep: &MatrixRep, params: &ConnectionParams, order: usize) -> Result<FrobeniusBasis> {
    params.validate()?;
    let hvee = rep.kind.hvee();
    let big_n = integral_mh(params.m, hvee)?;
    let mu = ell_diagonal(rep, &params.ell);
    let d = rep.dim;
    for a in 0..d {
        for b in 0..d {
            let diff = mu[a] - mu[b];
            let k = diff.re.round();
            if k >= 1.0 && (diff - cr(k)).norm() < 1e-9 {
                return Err(Error::NonGeneric(format!(
                    "resonant exponents {} and {} differ by the integer {k}",
                    -mu[a], -mu[b]
                )));
            }
        }
    }
    let low = Sparse::from_dense(&(rep.e_sum() - &rep.e0 * params.energy));
    let e0 = Sparse::from_dense(&rep.e0);
    let mut series = Vec::with_capacity(d);
    let mut radius: f64 = f64::INFINITY;
    for a in 0..d {
        let mut cs: Vec<CVec> = vec![unit(d, a)];
        for m in 1..=order {
            let mut rhs = -low.mul_vec(&cs[m - 1]);
            if m > big_n {
                rhs -= e0.mul_vec(&cs[m - 1 - big_n]);
            }
            let mut c = rhs;
            for b in 0..d {
                c[b] /= cr(m as f64) - mu[a] + mu[b];
            }
            cs.push(c);
        }
        let tail = cs[order].norm();
        if tail > 0.0 {
            radius = radius.min(tail.powf(-1.0 / order as f64));
        }
        series.push(cs);
    }
    Ok(FrobeniusBasis { exponents: mu.iter().map(|z| -z).collect(), series, radius_hint: radius, stride: big_n + 1 })
}

impl FrobeniusBasis {
    pub fn order(&self) -> usize {
        self.series.first().map_or(0, |s| s.len() - 1)
    }

    /// Value of solution `a` at real `x > 0`, with a tail estimate relative
    /// to the value: the largest of the last `Mh∨ + 3` terms.
    pub fn eval(&self, a: usize, x: f64) -> (CVec, f64) {
        let cs = &self.series[a];
        let d = cs[0].len();
        let mut sum = CVec::zeros(d);
        let mut xm = 1.0;
        let mut tail: f64 = 0.0;
        let window = self.stride + 2;
        for (m, c) in cs.iter().enumerate() {
            sum += c * cr(xm);
            if m + window >= cs.len() {
                tail = tail.max(c.norm() * xm);
            }
            xm *= x;
        }
        let scale = (self.exponents[a] * x.ln()).exp();
        let rel = tail / sum.norm().max(1e-300);
        (sum * scale, rel)
    }

    /// The `d × d` basis matrix at `x` and the worst tail estimate.
    pub fn matrix(&self, x: f64) -> (CMat, f64) {
        let d = self.series.len();
        let mut out = CMat::zeros(d, d);
        let mut worst: f64 = 0.0;
        for a in 0..d {
            let (v, t) = self.eval(a, x);
            out.set_column(a, &v);
            worst = worst.max(t);
        }
        (out, worst)
    }
}

/// Frobenius basis whose truncation error at `x0` is below the tail tolerance.
pub fn converged_basis(rep: &MatrixRep, params: &ConnectionParams, x0: f64) -> Result<(FrobeniusBasis, CMat)> {
    let mut order = ORDER;
    loop {
        let fb = frobenius_basis(rep, params, order)?;
        let (mat, tail) = fb.matrix(x0);
        if tail < tolerance::FROBENIUS_TAIL {
            return Ok((fb, mat));
        }
        if order >= MAX_ORDER {
            return Err(Error::IllConditioned(tail));
        }
        order *= 2;
    }
}

/// Coefficients of `v` in the columns of `basis`, after column equilibration.
fn coefficients(basis: &CMat, v: &CVec) -> Result<CVec> {
    let d = basis.ncols();
    let norms: Vec<f64> = (0..d).map(|k| basis.column(k).norm()).collect();
    let mut scaled = basis.clone();
    for (k, n) in norms.iter().enumerate() {
        scaled.column_mut(k).scale_mut(1.0 / n);
    }
    let c = cond(&scaled);
    if !(c < tolerance::FROBENIUS_COND) {
        return Err(Error::IllConditioned(c));
    }
    let y = scaled.lu().solve(v).ok_or(Error::IllConditioned(f64::INFINITY))?;
    Ok(CVec::from_iterator(d, y.iter().zip(&norms).map(|(z, n)| z / *n)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QPair {
    pub q: C64,
    pub qt: C64,
}

/// The fundamental system together with the data needed for `Q`, `Q̃`.
#[derive(Clone, Debug)]
pub struct SpectralSystem {
    pub sys: FundamentalSystem,
    pub m: f64,
    pub ell: Vec<C64>,
    pub tol: f64,
    pub x0: f64,
    pub weyl: Vec<WeylData>,
    pub phases: Phases,
}

impl SpectralSystem {
    pub fn new(kind: AlgebraKind, m: f64, ell: Vec<C64>, tol: f64) -> Result<Self> {
        let sys = FundamentalSystem::new(kind)?;
        Self::from_system(sys, m, ell, tol)
    }

    pub fn from_system(sys: FundamentalSystem, m: f64, ell: Vec<C64>, tol: f64) -> Result<Self> {
        let hvee = sys.kind.hvee();
        integral_mh(m, hvee)?;
        let weyl = (1..=sys.kind.rank).map(|i| weyl_data(&sys, i, &ell, m)).collect::<Result<Vec<_>>>()?;
        let phases = phases_h(hvee, m)?;
        Ok(SpectralSystem { sys, m, ell, tol, x0: X0, weyl, phases })
    }

    pub fn kind(&self) -> AlgebraKind {
        self.sys.kind
    }

    pub fn params(&self, energy: C64) -> ConnectionParams {
        ConnectionParams::new(self.sys.kind, self.m, energy).with_ell(self.ell.clone()).with_tol(self.tol)
    }

    /// `(Q^(i)(E), Q̃^(i)(E))` with the Frobenius basis evaluated at `x0`.
    pub fn q_pair_at(&self, node: usize, energy: C64, x0: f64) -> Result<QPair> {
        self.sys.kind.check_node(node)?;
        let params = self.params(energy);
        let rep = &self.sys.reps[node - 1];
        let conn = self.sys.connection(node, &params)?;
        let trace = conn.subdominant(&[x0])?;
        let (_, basis) = converged_basis(rep, &params, x0)?;
        let c = coefficients(&basis, &trace.samples[0].1)?;
        let w = &self.weyl[node - 1];
        let eta = w.phi_vec[w.phi_index];
        Ok(QPair { q: c[w.chi_index], qt: c[w.phi_index] / eta })
    }

    pub fn q_pair(&self, node: usize, energy: C64) -> Result<QPair> {
        self.q_pair_at(node, energy, self.x0)
    }

    pub fn q(&self, node: usize, energy: C64) -> Result<C64> {
        Ok(self.q_pair(node, energy)?.q)
    }

    fn resonance(&self, node: usize, energy: C64) -> C64 {
        resonance_factor(self.m, self.sys.kind.hvee(), self.sys.lambda[node - 1], energy)
    }

    /// Both sides of the QQ̃ relation at node `i`.
    pub fn qq_residual(&self, node: usize, energy: C64) -> Result<QQResidual> {
        self.sys.kind.check_node(node)?;
        let ph = &self.phases;
        let w = &self.weyl[node - 1];
        let half = ph.big_omega_pow(0.5);
        let minus = self.q_pair(node, energy / half)?;
        let plus = self.q_pair(node, energy * half)?;
        let mut lhs = self.resonance(node, energy);
        for &j in &self.sys.intertwiners[node - 1].factors {
            lhs *= self.q(j, energy)?;
        }
        let wt = ph.omega_cpow(w.theta * 0.5);
        let derived = wt * minus.q * plus.qt - minus.qt * plus.q / wt;
        let printed = minus.q * plus.qt / wt - wt * plus.q * minus.qt;
        Ok(QQResidual { energy, lhs, derived, printed })
    }

    /// `Π_j Ω^{−2β_j C_ij} Q^(j)(Ω^{C_ij/2}E*)/Q^(j)(Ω^{−C_ij/2}E*) + 1`.
    pub fn bethe_residual(&self, node: usize, estar: C64) -> Result<C64> {
        self.sys.kind.check_node(node)?;
        let beta = &self.weyl[node - 1].beta;
        bethe(&self.sys, self.m, beta, node, estar, |j, e| self.q_pair(j, e))
    }
}

/// Bethe product at a zero of `Q^(i)`, with the common-zero check on `Q̃^(i)`
/// and the resonance correction.
fn bethe<F>(sys: &FundamentalSystem, m: f64, beta: &[C64], node: usize, estar: C64, q: F) -> Result<C64>
where
    F: Fn(usize, C64) -> Result<QPair>,
{
    let hvee = sys.kind.hvee();
    let ph = phases_h(hvee, m)?;
    let c = &sys.data.c;
    let mut prod = cr(1.0);
    for j in 1..=sys.kind.rank {
        let cij = c[(node - 1, j - 1)] as f64;
        if cij == 0.0 {
            continue;
        }
        let up = q(j, estar * ph.big_omega_pow(cij / 2.0))?.q;
        let down = q(j, estar * ph.big_omega_pow(-cij / 2.0))?.q;
        let scale = up.norm().max(down.norm());
        if down.norm() < 1e-8 * scale || up.norm() < 1e-8 * scale {
            return Err(Error::Degenerate(format!("Q^({j}) vanishes at a shifted point of E* = {estar}")));
        }
        let phase = (C64::new(0.0, 2.0 * std::f64::consts::PI * m / (m + 1.0)) * (beta[j - 1] * (-2.0 * cij))).exp();
        prod *= phase * up / down;
    }
    let qt = q(node, estar)?.qt;
    let near = q(node, estar + 0.05 * estar.norm().max(1.0))?.qt;
    if qt.norm() < 1e-6 * near.norm() {
        return Err(Error::Degenerate(format!("Q and Q-tilde of node {node} share the zero {estar}")));
    }
    let half = ph.big_omega_pow(0.5);
    let lam = sys.lambda[node - 1];
    prod *= resonance_factor(m, hvee, lam, estar / half) / resonance_factor(m, hvee, lam, estar * half);
    Ok(prod + cr(1.0))
}

/// `Q`, `Q̃` for `ℓ = 0` and a Weyl word `w`, with the data of the Bethe
/// equations: `β_j` from the grading of `v_j^w` and `θ_i` from the pair
/// `(v_i^w, f_i^w v_i^w)`.
#[derive(Clone, Debug)]
pub struct ZeroEllSystem {
    pub sys: FundamentalSystem,
    pub m: f64,
    pub word: Vec<usize>,
    pub tol: f64,
    pub beta: Vec<C64>,
    pub theta: Vec<C64>,
}

impl ZeroEllSystem {
    pub fn new(kind: AlgebraKind, m: f64, word: Vec<usize>, tol: f64) -> Result<Self> {
        let sys = FundamentalSystem::new(kind)?;
        let mh = integral_mh(m, kind.hvee())? as f64;
        let mut beta = Vec::new();
        let mut theta = Vec::new();
        for (j, rep) in sys.reps.iter().enumerate() {
            let (a, b) = weyl_pair(rep, j + 1, &word)?;
            let g = |k: usize| rep.grading[(k, k)];
            beta.push(g(a) / (2.0 * mh));
            theta.push(g(a) - g(b));
        }
        Ok(ZeroEllSystem { sys, m, word, tol, beta, theta })
    }

    pub fn params(&self, energy: C64) -> ConnectionParams {
        ConnectionParams::new(self.sys.kind, self.m, energy).with_tol(self.tol)
    }

    pub fn q_pair(&self, node: usize, energy: C64) -> Result<QPair> {
        q_at_zero_l0(&self.sys, node, &self.params(energy), &self.word)
    }

    pub fn q(&self, node: usize, energy: C64) -> Result<C64> {
        Ok(self.q_pair(node, energy)?.q)
    }

    pub fn bethe_residual(&self, node: usize, estar: C64) -> Result<C64> {
        self.sys.kind.check_node(node)?;
        bethe(&self.sys, self.m, &self.beta, node, estar, |j, e| self.q_pair(j, e))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QQResidual {
    pub energy: C64,
    /// `Π_j Q^(j)(E)^{B_ij}`, times the resonance factor when present.
    pub lhs: C64,
    /// `ω^{θ/2} Q(Ω^{−1/2}E) Q̃(Ω^{1/2}E) − ω^{−θ/2} Q(Ω^{1/2}E) Q̃(Ω^{−1/2}E)`.
    pub derived: C64,
    /// The same with `θ → −θ`.
    pub printed: C64,
}

impl QQResidual {
    pub fn relative(&self) -> f64 {
        (self.lhs - self.derived).norm() / self.lhs.norm().max(self.derived.norm()).max(1e-300)
    }

    pub fn relative_printed(&self) -> f64 {
        (self.lhs - self.printed).norm() / self.lhs.norm().max(self.printed.norm()).max(1e-300)
    }
}

/// Lift of the simple reflection `s_j`: `exp(e_j) exp(−f_j) exp(e_j)`.
pub fn weyl_lift(rep: &MatrixRep, word: &[usize]) -> Result<CMat> {
    let mut out = CMat::identity(rep.dim, rep.dim);
    for &j in word {
        rep.kind.check_node(j)?;
        let ej = expm(&rep.e[j - 1]);
        let n = &ej * expm(&(-&rep.f[j - 1])) * &ej;
        out *= n;
    }
    Ok(out)
}

/// `ℓ = 0`: `(Q, Q̃)` as the coefficients of `Ψ^(i)(0,E)` along `v^w` and
/// `f^w v^w`, with `w` a word in the simple reflections (empty for the
/// identity).
pub fn q_at_zero_l0(sys: &FundamentalSystem, node: usize, params: &ConnectionParams, word: &[usize]) -> Result<QPair> {
    let psi0 = psi_at_origin(sys, node, params)?;
    let rep = &sys.reps[node - 1];
    let nw = weyl_lift(rep, word)?;
    let v = crate::linalg::common_null_vector(&rep.e, rep.dim);
    let vw = &nw * &v;
    let fvw = &nw * (&rep.f[node - 1] * &v);
    let (a, b) = (largest(&vw), largest(&fvw));
    Ok(QPair { q: psi0[a] / vw[a], qt: psi0[b] / fvw[b] })
}

fn largest(u: &CVec) -> usize {
    let mut k = 0;
    for i in 1..u.len() {
        if u[i].norm() > u[k].norm() {
            k = i;
        }
    }
    k
}

/// Coordinates carrying `v^w` and `f^w v^w` in `V^(node)`.
fn weyl_pair(rep: &MatrixRep, node: usize, word: &[usize]) -> Result<(usize, usize)> {
    let nw = weyl_lift(rep, word)?;
    let v = crate::linalg::common_null_vector(&rep.e, rep.dim);
    Ok((largest(&(&nw * &v)), largest(&(&nw * (&rep.f[node - 1] * &v)))))
}

/// `Ψ^(i)(0, E)` for `ℓ = 0`.
pub fn psi_at_origin(sys: &FundamentalSystem, node: usize, params: &ConnectionParams) -> Result<CVec> {
    if params.ell.iter().any(|z| z.norm() != 0.0) {
        return Err(Error::Domain("the x = 0 evaluation needs ell = 0".into()));
    }
    integral_mh(params.m, sys.kind.hvee())?;
    let conn = sys.connection(node, params)?;
    let xm = match params.x_match {
        Some(x) => x,
        None => conn.default_x_match(1.0)?,
    };
    let at = conn.matched_value(xm)?;
    conn.segment(cr(xm), cr(0.0), &at)
}

#[derive(Clone, Debug, Default)]
pub struct ZeroSearch {
    pub zeros: Vec<C64>,
    /// Candidates where the secant iteration did not converge.
    pub unrefined: Vec<C64>,
}

/// Zeros of an analytic `f` near the real window `[a, b]`: sign or phase
/// flips and local minima of `|f|` on a uniform grid, refined by complex
/// secant iteration.
pub fn find_zeros<F>(f: F, a: f64, b: f64, n_grid: usize, max_count: usize) -> Result<ZeroSearch>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    let mut out = ZeroSearch::default();
    if !(b > a) || n_grid < 2 || max_count == 0 {
        return Ok(out);
    }
    let grid: Vec<f64> = (0..n_grid).map(|k| a + (b - a) * k as f64 / (n_grid - 1) as f64).collect();
    let vals: Vec<C64> = grid.par_iter().map(|&e| f(cr(e))).collect::<Result<_>>()?;
    let mut brackets: Vec<(usize, usize)> = Vec::new();
    for k in 0..n_grid - 1 {
        if (vals[k] * vals[k + 1].conj()).re <= 0.0 {
            brackets.push((k, k + 1));
        }
    }
    for k in 1..n_grid - 1 {
        let n = vals[k].norm();
        if n < vals[k - 1].norm() && n < vals[k + 1].norm() && !brackets.iter().any(|&(i, j)| i == k || j == k) {
            brackets.push((k - 1, k + 1));
        }
    }
    brackets.sort();
    let refined: Vec<(C64, bool)> = brackets
        .par_iter()
        .map(|&(i, j)| {
            let scale = vals[i].norm().max(vals[j].norm());
            secant(&f, cr(grid[i]), cr(grid[j]), vals[i], vals[j], scale)
        })
        .collect::<Result<_>>()?;
    for (z, ok) in refined {
        if !ok {
            out.unrefined.push(z);
            continue;
        }
        if z.re < a - 1e-9 || z.re > b + 1e-9 {
            continue;
        }
        if out.zeros.iter().any(|w| (w - z).norm() < 1e-8 * z.norm().max(1.0)) {
            continue;
        }
        out.zeros.push(z);
    }
    out.zeros.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap_or(std::cmp::Ordering::Equal));
    out.zeros.truncate(max_count);
    Ok(out)
}

fn secant<F: Fn(C64) -> Result<C64>>(f: &F, mut x0: C64, mut x1: C64, mut f0: C64, mut f1: C64, scale: f64) -> Result<(C64, bool)> {
    for _ in 0..60 {
        let den = f1 - f0;
        if den.norm() == 0.0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / den;
        let step = (x2 - x1).norm();
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x1)?;
        if step < 1e-13 * x1.norm().max(1.0) || f1.norm() == 0.0 {
            return Ok((x1, f1.norm() < 1e-8 * scale));
        }
    }
    Ok((x1, f1.norm() < 1e-8 * scale))
}

/// Winding number of `f` around the rectangle `[re0, re1] × [im0, im1]`,
/// bisecting boundary pieces until the phase increments are below `π/4`.
pub fn winding_number<F>(f: F, re0: f64, re1: f64, im0: f64, im1: f64, per_side: usize) -> Result<i64>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    let corners = [C64::new(re0, im0), C64::new(re1, im0), C64::new(re1, im1), C64::new(re0, im1)];
    let mut pts = Vec::new();
    for s in 0..4 {
        let (p, q) = (corners[s], corners[(s + 1) % 4]);
        for k in 0..per_side.max(1) {
            pts.push(p + (q - p) * (k as f64 / per_side.max(1) as f64));
        }
    }
    let vals: Vec<C64> = pts.par_iter().map(|z| f(*z)).collect::<Result<_>>()?;
    let mut total = 0.0;
    for k in 0..pts.len() {
        let (za, zb) = (pts[k], pts[(k + 1) % pts.len()]);
        total += arg_increment(&f, za, zb, vals[k], vals[(k + 1) % pts.len()], 0)?;
    }
    Ok((total / (2.0 * std::f64::consts::PI)).round() as i64)
}

fn arg_increment<F: Fn(C64) -> Result<C64>>(f: &F, za: C64, zb: C64, fa: C64, fb: C64, depth: usize) -> Result<f64> {
    let d = (fb / fa).arg();
    if d.abs() < std::f64::consts::FRAC_PI_4 || depth > 14 {
        return Ok(d);
    }
    let zm = (za + zb) * 0.5;
    let fm = f(zm)?;
    Ok(arg_increment(f, za, zm, fa, fm, depth + 1)? + arg_increment(f, zm, zb, fm, fb, depth + 1)?)
}

/// Sampled `Q`, `Q̃` with zeros and their Bethe residuals.
#[derive(Clone, Debug, Default)]
pub struct QTable {
    pub node: usize,
    pub samples: Vec<(C64, QPair)>,
    pub zeros: Vec<C64>,
    pub residuals: Vec<C64>,
}

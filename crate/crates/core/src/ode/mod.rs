//! Solutions of `(∂_x + ℓ/x + e + p(x,E) e₀) Ψ = 0` with `p = x^{Mh∨} − E`.
//!
//! The subdominant solution is pinned by its behaviour
//! `Ψ ~ e^{−λS(x,E)} q(x,E)^{−H} ψ` at large positive `x`. Matching happens in
//! two stages. Far out, the gauge `Ψ = e^{−λŜ} q̂^{−H} Φ` (with the exact
//! `q̂ = x^M (1 − E x^{−Mh∨})^{1/h∨}` and its full primitive `Ŝ`) turns the
//! problem into a stiff system for `Φ → ψ`, which a Radau IIA integrator
//! carries from a first-order initial value at `x_far` down to `x_match`.
//! From `x_match` inward the raw connection is integrated with
//! Dormand–Prince; in that direction the subdominant solution grows, so
//! errors along other solutions are damped.

mod radau;
mod rk;

use std::f64::consts::PI;

use crate::cartan::AlgebraKind;
use crate::error::{Error, Result};
use crate::linalg::{cis, cr, eigenvector, inverse, orthonormal_complement, CMat, CVec, C64};
use crate::rep::{maximal_eigenpair, MatrixRep};
use crate::tolerance;

#[derive(Clone, Debug)]
pub struct ConnectionParams {
    pub kind: AlgebraKind,
    pub m: f64,
    pub energy: C64,
    /// Coefficients of `ℓ = Σ ℓ_i h_i`.
    pub ell: Vec<C64>,
    pub tol: f64,
    /// Matching radius; chosen automatically when absent.
    pub x_match: Option<f64>,
}

impl ConnectionParams {
    pub fn new(kind: AlgebraKind, m: f64, energy: C64) -> Self {
        ConnectionParams { kind, m, energy, ell: vec![cr(0.0); kind.rank], tol: tolerance::ODE_TOL, x_match: None }
    }

    pub fn with_ell(mut self, ell: Vec<C64>) -> Self {
        self.ell = ell;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_x_match(mut self, x: f64) -> Self {
        self.x_match = Some(x);
        self
    }

    pub fn with_energy(&self, energy: C64) -> Self {
        ConnectionParams { energy, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(Error::Domain(format!("M must be positive, got {}", self.m)));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-2) {
            return Err(Error::Domain(format!("tolerance {} outside (0, 1e-2]", self.tol)));
        }
        if self.ell.len() != self.kind.rank {
            return Err(Error::Dimension(format!("{} ell coefficients for rank {}", self.ell.len(), self.kind.rank)));
        }
        if !self.energy.re.is_finite() || !self.energy.im.is_finite() {
            return Err(Error::Domain("energy is not finite".into()));
        }
        if let Some(x) = self.x_match {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::Domain(format!("matching radius {x} must be positive")));
            }
        }
        Ok(())
    }
}

/// Truncated large-`x` expansion `q = x^M + Σ_{j≤s} c_j x^{M(1−h∨j)}` of `p^{1/h∨}`.
#[derive(Clone, Debug, PartialEq)]
pub struct QExpansion {
    pub s: usize,
    pub c: Vec<C64>,
    pub delta: f64,
}

/// Generalized binomial coefficient.
pub fn binom(a: f64, j: usize) -> f64 {
    let mut out = 1.0;
    for m in 0..j {
        out *= (a - m as f64) / (m as f64 + 1.0);
    }
    out
}

fn ratio(m: f64, hvee: usize) -> (f64, bool) {
    let r = (m + 1.0) / (hvee as f64 * m);
    let near = (r - r.round()).abs() < 1e-12;
    (if near { r.round() } else { r }, near)
}

pub fn q_expansion(m: f64, hvee: usize, energy: C64) -> QExpansion {
    let (r, _) = ratio(m, hvee);
    let s = r.floor() as usize;
    let c = (1..=s).map(|j| (-energy).powu(j as u32) * binom(1.0 / hvee as f64, j)).collect();
    let delta = m * (hvee as f64 * (1.0 + s as f64) - 1.0) - 1.0;
    QExpansion { s, c, delta }
}

fn check_cut(x: C64) -> Result<()> {
    if x.im == 0.0 && x.re <= 0.0 {
        return Err(Error::Domain(format!("x = {} lies on the branch cut", x.re)));
    }
    Ok(())
}

/// `S(x,E)`, the termwise primitive of the truncated `q`, principal branch.
/// In the resonant case `(M+1)/(h∨M) ∈ Z` the last term is `c_s log x`.
pub fn action(x: C64, qe: &QExpansion, m: f64, hvee: usize) -> Result<C64> {
    check_cut(x)?;
    let (_, resonant) = ratio(m, hvee);
    let lx = x.ln();
    let mut s = (lx * (m + 1.0)).exp() / (m + 1.0);
    for (idx, cj) in qe.c.iter().enumerate() {
        let j = idx + 1;
        if resonant && j == qe.s {
            s += cj * lx;
        } else {
            let ex = m * (1.0 - hvee as f64 * j as f64) + 1.0;
            s += cj * (lx * ex).exp() / ex;
        }
    }
    Ok(s)
}

/// The truncated `q(x,E)`.
pub fn q_truncated(x: C64, qe: &QExpansion, m: f64, hvee: usize) -> Result<C64> {
    check_cut(x)?;
    let lx = x.ln();
    let mut q = (lx * m).exp();
    for (idx, cj) in qe.c.iter().enumerate() {
        let ex = m * (1.0 - hvee as f64 * (idx + 1) as f64);
        q += cj * (lx * ex).exp();
    }
    Ok(q)
}

/// `x^{Mh∨}`, exact for integral exponents.
fn pow_mh(x: C64, mh: f64) -> C64 {
    if (mh - mh.round()).abs() < 1e-12 && mh.round().abs() < 1e6 {
        x.powi(mh.round() as i32)
    } else {
        x.powf(mh)
    }
}

/// Exact `q̂ = x^M (1 − E x^{−Mh∨})^{1/h∨}` for real `x > 0`.
fn q_hat(x: f64, m: f64, hvee: usize, e: C64) -> C64 {
    let u = e * x.powf(-m * hvee as f64);
    (cr(1.0) - u).powf(1.0 / hvee as f64) * x.powf(m)
}

/// Full primitive of `q̂`, summed termwise; requires `|E| x^{−Mh∨} < 1`.
fn s_hat(x: f64, m: f64, hvee: usize, e: C64) -> Result<C64> {
    let h = hvee as f64;
    if e.norm() * x.powf(-m * h) >= 1.0 {
        return Err(Error::Domain(format!("action series diverges at x = {x}")));
    }
    let mut s = cr(x.powf(m + 1.0) / (m + 1.0));
    let mut cj = cr(1.0);
    for j in 1..5000usize {
        cj *= -e * ((1.0 / h - (j - 1) as f64) / j as f64);
        let ex = m * (1.0 - h * j as f64) + 1.0;
        let t = if ex.abs() < 1e-12 { cj * x.ln() } else { cj * x.powf(ex) / ex };
        s += t;
        if cj.norm() == 0.0 || t.norm() < 1e-18 * s.norm() {
            return Ok(s);
        }
    }
    Err(Error::Domain(format!("action series did not converge at x = {x}")))
}

#[derive(Clone, Debug)]
pub struct SolutionTrace {
    pub rep_label: String,
    /// Argument of the integration ray in the `x`-plane.
    pub ray_angle: f64,
    /// `(x, Ψ(x))`. For rotated solutions `x` is the real argument of `Ψ_k`.
    pub samples: Vec<(C64, CVec)>,
    pub k: C64,
    pub x_match: f64,
    pub tol: f64,
}

/// A connection in a fixed representation, ready to integrate.
#[derive(Clone, Debug)]
pub struct Connection {
    pub label: String,
    pub m: f64,
    pub hvee: usize,
    pub energy: C64,
    pub tol: f64,
    pub x_match: Option<f64>,
    pub lambda: C64,
    pub psi: CVec,
    pub ell: CMat,
    pub e: CMat,
    pub e0: CMat,
    /// Diagonal of the grading element.
    pub grading: Vec<f64>,
    lambda_mat: CMat,
}

fn integration_error(x: C64, reason: &str) -> Error {
    Error::Integration { re: x.re, im: x.im, reason: reason.into() }
}

impl Connection {
    pub fn new(rep: &MatrixRep, params: &ConnectionParams) -> Result<Self> {
        params.validate()?;
        if rep.kind != params.kind {
            return Err(Error::Dimension(format!("{} representation for {} parameters", rep.kind, params.kind)));
        }
        let report = maximal_eigenpair(rep)?;
        let mx = report.maximal.ok_or_else(|| Error::NoMaximalEigenvalue(rep.label.clone()))?;
        Ok(Connection {
            label: rep.label.clone(),
            m: params.m,
            hvee: rep.kind.hvee(),
            energy: params.energy,
            tol: params.tol,
            x_match: params.x_match,
            lambda: mx.lambda,
            psi: mx.psi,
            ell: rep.ell_matrix(&params.ell),
            e: rep.e_sum(),
            e0: rep.e0.clone(),
            grading: (0..rep.dim).map(|k| rep.grading[(k, k)].re).collect(),
            lambda_mat: rep.lambda_matrix(),
        })
    }

    /// Replace the eigenvector fixing the normalization.
    pub fn with_psi(mut self, psi: CVec) -> Self {
        self.psi = psi;
        self
    }

    pub fn with_energy(&self, energy: C64) -> Self {
        Connection { energy, ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        self.psi.len()
    }

    fn mh(&self) -> f64 {
        self.m * self.hvee as f64
    }

    pub fn p(&self, x: C64) -> C64 {
        pow_mh(x, self.mh()) - self.energy
    }

    /// `A(x) = ℓ/x + e + p(x,E) e₀`, so that `Ψ' = −A Ψ`.
    pub fn coefficient(&self, x: C64) -> CMat {
        let a = &self.e + &self.e0 * self.p(x);
        if self.ell_is_zero() {
            a
        } else {
            a + &self.ell / x
        }
    }

    fn ell_is_zero(&self) -> bool {
        self.ell.iter().all(|z| z.norm() == 0.0)
    }

    /// With `ℓ = 0` and `Mh∨` integral the connection is entire in `x`.
    pub fn regular_at_origin(&self) -> bool {
        let mh = self.mh();
        self.ell_is_zero() && (mh - mh.round()).abs() < 1e-12
    }

    /// `‖Ψ' + AΨ‖ / ‖Ψ‖`.
    pub fn residual(&self, x: C64, psi: &CVec, dpsi: &CVec) -> f64 {
        (dpsi + self.coefficient(x) * psi).norm() / psi.norm().max(1e-300)
    }

    /// `diag(exp(t H))`.
    pub fn grading_exp(&self, t: C64) -> CVec {
        CVec::from_iterator(self.dim(), self.grading.iter().map(|g| (t * *g).exp()))
    }

    /// Straight segment from `from` to `to`.
    pub fn segment(&self, from: C64, to: C64, y: &CVec) -> Result<CVec> {
        if from == to {
            return Ok(y.clone());
        }
        if !self.regular_at_origin() {
            check_segment(from, to)?;
        }
        let dx = to - from;
        let b = |s: f64| -self.coefficient(from + dx * s) * dx;
        rk::integrate(b, 0.0, 1.0, y, self.tol, None)
            .map(|r| r.0)
            .map_err(|f| integration_error(from + dx * f.s, "step size underflow"))
    }

    /// Arc `x = r e^{iφ}` from `phi0` to `phi1`.
    pub fn arc(&self, r: f64, phi0: f64, phi1: f64, y: &CVec) -> Result<CVec> {
        let b = |phi: f64| {
            let x = cis(phi) * r;
            -self.coefficient(x) * (C64::new(0.0, 1.0) * x)
        };
        rk::integrate(b, phi0, phi1, y, self.tol, None)
            .map(|r| r.0)
            .map_err(|f| integration_error(cis(f.s) * r, "step size underflow on arc"))
    }

    /// Default matching radius: the first point of the grid `max(r,1)·1.1^j`
    /// with `|E| x^{−Mh∨} ≤ 1/4` and `Re λŜ(x) ≥ 25`.
    pub fn default_x_match(&self, r: f64) -> Result<f64> {
        let mut x = r.max(1.0);
        for _ in 0..5000 {
            if self.energy.norm() * x.powf(-self.mh()) <= 0.25 {
                let s = s_hat(x, self.m, self.hvee, self.energy)?;
                if (self.lambda * s).re >= tolerance::MATCH_ACTION {
                    return Ok(x);
                }
            }
            x *= 1.1;
        }
        Err(Error::Domain("no admissible matching radius".into()))
    }

    fn matching_radius(&self, r: f64) -> Result<f64> {
        match self.x_match {
            Some(x) => {
                if self.energy.norm() * x.powf(-self.mh()) > 0.5 {
                    return Err(Error::Domain(format!("matching radius {x} too small for |E| = {}", self.energy.norm())));
                }
                Ok(x)
            }
            None => self.default_x_match(r),
        }
    }

    /// `Ψ(x_m)` of the subdominant solution.
    pub fn matched_value(&self, x_m: f64) -> Result<CVec> {
        let d = self.dim();
        let (m, h, e) = (self.m, self.hvee, self.energy);
        let mh = self.mh();
        let mut shifted = self.lambda_mat.clone();
        for k in 0..d {
            shifted[(k, k)] -= self.lambda;
        }
        // range(Λ − λ) is the annihilator of the left eigenvector.
        let left = eigenvector(&self.lambda_mat.adjoint(), self.lambda.conj())?;
        let left = &left / C64::new(left.norm(), 0.0);
        let w = orthonormal_complement(std::slice::from_ref(&left), d);
        if w.len() + 1 != d {
            return Err(Error::Degenerate("range of Lambda - lambda has wrong rank".into()));
        }
        let mut v = CMat::zeros(d, d);
        v.set_column(0, &self.psi);
        for (k, col) in w.iter().enumerate() {
            v.set_column(k + 1, col);
        }
        let vi = inverse(&v)?;
        let mut dm = &vi * &shifted * &v;
        for k in 0..d {
            dm[(0, k)] = cr(0.0);
            dm[(k, 0)] = cr(0.0);
        }
        let hmat = CMat::from_diagonal(&CVec::from_iterator(d, self.grading.iter().map(|g| cr(*g))));
        let lt = &vi * &self.ell * &v;
        let ht = &vi * hmat * &v;
        let g_at = |x: f64| {
            let xm = cr(x.powf(mh));
            &lt - &ht * (xm * m / (xm - e))
        };

        let tol = self.tol;
        let gnorm = g_at(x_m).norm();
        let x_far = (2.0 * x_m).max(((1.0 + gnorm).powi(2) / (tol * 1e-2)).powf(1.0 / (2.0 * (m + 1.0))));

        let mut y = CVec::zeros(d);
        let big_x = q_hat(x_far, m, h, e) * x_far;
        let g = g_at(x_far);
        if g[(0, 0)].norm() > 1e-8 * (1.0 + g.norm()) {
            return Err(Error::Degenerate(format!("eigenvector component of the gauge term is {:.3e}", g[(0, 0)].norm())));
        }
        if d > 1 {
            let kmat = dm.view((1, 1), (d - 1, d - 1)).into_owned();
            let kinv = inverse(&kmat)?;
            let gz0 = g.view((1, 0), (d - 1, 1)).into_owned();
            let g0z = g.view((0, 1), (1, d - 1)).into_owned();
            let z = -(&kinv * &gz0) / big_x;
            let a = (&g0z * &kinv * &gz0)[(0, 0)];
            y[0] = (-a / (big_x * (m + 1.0))).exp();
            for k in 1..d {
                y[k] = z[(k - 1, 0)];
            }
        } else {
            y[0] = cr(1.0);
        }
        let kfun = |t: f64| {
            let x = t.exp();
            -(&dm * (q_hat(x, m, h, e) * x) + g_at(x))
        };
        let (y, _) = radau::integrate(kfun, x_far.ln(), x_m.ln(), &y, tol)
            .map_err(|f| integration_error(cr(f.s.exp()), "far-field step size underflow"))?;
        let phi = &v * y;
        let pref = (-self.lambda * s_hat(x_m, m, h, e)?).exp();
        let scale = self.grading_exp(-q_hat(x_m, m, h, e).ln());
        Ok(phi.component_mul(&scale) * pref)
    }

    /// Subdominant solution at the real sample points.
    pub fn subdominant(&self, samples: &[f64]) -> Result<SolutionTrace> {
        let xs = sorted_samples(samples)?;
        let x_m = self.matching_radius(xs[0])?;
        let mut psi = self.matched_value(x_m)?;
        let mut here = cr(x_m);
        let mut out = Vec::with_capacity(xs.len());
        for x in xs {
            psi = self.segment(here, cr(x), &psi)?;
            here = cr(x);
            out.push((here, psi.clone()));
        }
        Ok(SolutionTrace { rep_label: self.label.clone(), ray_angle: 0.0, samples: out, k: cr(0.0), x_match: x_m, tol: self.tol })
    }

    /// `Ψ_k(x,E) = ω^{−kH} Ψ(ω^k x, Ω^k E)` at the real sample points.
    /// The value at `ω^k x` is reached by matching on the real axis at the
    /// largest sample radius, following the arc to the rotated ray, then
    /// integrating inward along it.
    pub fn rotated(&self, k: f64, samples: &[f64]) -> Result<SolutionTrace> {
        if k == 0.0 {
            return self.subdominant(samples);
        }
        let h = self.hvee as f64;
        let theta = 2.0 * PI * k / (h * (self.m + 1.0));
        let bound = PI / (2.0 * (self.m + 1.0));
        if theta.abs() > bound * (1.0 + 1e-12) {
            return Err(Error::Domain(format!("rotation k = {k} leaves the sector |arg x| <= pi/(2(M+1))")));
        }
        let xs = sorted_samples(samples)?;
        let big_omega_k = cis(2.0 * PI * k * self.m / (self.m + 1.0));
        let rot = self.with_energy(self.energy * big_omega_k);
        let r_out = xs[0];
        let start = rot.subdominant(&[r_out])?;
        let mut psi = rot.arc(r_out, 0.0, theta, &start.samples[0].1)?;
        let u = cis(theta);
        let mut here = r_out;
        let twist = self.grading_exp(C64::new(0.0, -theta));
        let mut out = Vec::with_capacity(xs.len());
        for x in xs {
            psi = rot.segment(u * here, u * x, &psi)?;
            here = x;
            out.push((cr(x), psi.component_mul(&twist)));
        }
        Ok(SolutionTrace {
            rep_label: self.label.clone(),
            ray_angle: theta,
            samples: out,
            k: cr(k),
            x_match: start.x_match,
            tol: self.tol,
        })
    }
}

fn sorted_samples(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::Domain("no sample points".into()));
    }
    if let Some(bad) = samples.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(Error::Domain(format!("sample point {bad} is not a positive real")));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(xs)
}

fn check_segment(from: C64, to: C64) -> Result<()> {
    // Distance from the origin to the segment, and crossings of the cut.
    let d = to - from;
    let t = (-(from.conj() * d).re / d.norm_sqr()).clamp(0.0, 1.0);
    if (from + d * t).norm() == 0.0 {
        return Err(Error::Domain("segment passes through x = 0".into()));
    }
    if from.im * to.im < 0.0 {
        let s = from.im / (from.im - to.im);
        if (from + d * s).re < 0.0 {
            return Err(Error::Domain("segment crosses the branch cut".into()));
        }
    }
    Ok(())
}

/// Leading asymptotics `e^{−λS(x0,E)} exp(−ln q(x0,E)·H) ψ` with the truncated
/// `q` and `S`.
pub fn subdominant_initial(rep: &MatrixRep, params: &ConnectionParams, x0: C64) -> Result<CVec> {
    let conn = Connection::new(rep, params)?;
    initial_from(&conn, x0)
}

pub(crate) fn initial_from(conn: &Connection, x0: C64) -> Result<CVec> {
    let qe = q_expansion(conn.m, conn.hvee, conn.energy);
    let s = action(x0, &qe, conn.m, conn.hvee)?;
    let q = q_truncated(x0, &qe, conn.m, conn.hvee)?;
    Ok(conn.psi.component_mul(&conn.grading_exp(-q.ln())) * (-conn.lambda * s).exp())
}

/// Integrate the raw connection along a straight segment, recording the
/// solution at each requested point (taken in order of distance from
/// `x_from`) and at `x_to`.
pub fn integrate(rep: &MatrixRep, params: &ConnectionParams, x_from: C64, x_to: C64, init: &CVec, samples: &[C64]) -> Result<SolutionTrace> {
    let conn = Connection::new_unnormalized(rep, params)?;
    if init.len() != conn.dim() {
        return Err(Error::Dimension(format!("initial vector of length {} for dimension {}", init.len(), conn.dim())));
    }
    let mut pts: Vec<C64> = samples.to_vec();
    pts.sort_by(|a, b| (a - x_from).norm().partial_cmp(&(b - x_from).norm()).unwrap());
    pts.push(x_to);
    let mut here = x_from;
    let mut y = init.clone();
    let mut out = Vec::new();
    for p in pts {
        y = conn.segment(here, p, &y)?;
        here = p;
        out.push((p, y.clone()));
    }
    let d = x_to - x_from;
    Ok(SolutionTrace {
        rep_label: conn.label,
        ray_angle: d.arg(),
        samples: out,
        k: cr(0.0),
        x_match: x_from.norm(),
        tol: conn.tol,
    })
}

impl Connection {
    /// A connection without eigenpair data, for plain integration.
    pub fn new_unnormalized(rep: &MatrixRep, params: &ConnectionParams) -> Result<Self> {
        params.validate()?;
        Ok(Connection {
            label: rep.label.clone(),
            m: params.m,
            hvee: rep.kind.hvee(),
            energy: params.energy,
            tol: params.tol,
            x_match: params.x_match,
            lambda: cr(0.0),
            psi: CVec::zeros(rep.dim),
            ell: rep.ell_matrix(&params.ell),
            e: rep.e_sum(),
            e0: rep.e0.clone(),
            grading: (0..rep.dim).map(|k| rep.grading[(k, k)].re).collect(),
            lambda_mat: rep.lambda_matrix(),
        })
    }
}

/// The subdominant solution at the given real points.
pub fn subdominant_solution(rep: &MatrixRep, params: &ConnectionParams, samples: &[f64]) -> Result<SolutionTrace> {
    Connection::new(rep, params)?.subdominant(samples)
}

/// The rotated solution `Ψ_k`, a solution in `V_{twist+k}`.
pub fn psi_k(rep: &MatrixRep, params: &ConnectionParams, k: f64, samples: &[f64]) -> Result<SolutionTrace> {
    Connection::new(rep, params)?.rotated(k, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::rep::fundamental_rep;
    use proptest::prelude::*;

    #[test]
    fn expansion_trivial_energy() {
        let qe = q_expansion(1.0, 2, cr(0.0));
        assert_eq!(qe.s, 1);
        assert!(qe.c.iter().all(|z| z.norm() == 0.0));
        let s = action(cr(3.0), &qe, 1.0, 2).unwrap();
        assert!((s - cr(4.5)).norm() < 1e-14);
    }

    #[test]
    fn expansion_squares_back() {
        let qe = q_expansion(1.0, 2, cr(1.0));
        assert_eq!(qe.s, 1);
        assert!((qe.c[0] - cr(-0.5)).norm() < 1e-15);
        assert!((qe.delta - 2.0).abs() < 1e-15);
        // (x + c₁/x)² − (x² − 1) = c₁²/x².
        for x in [10.0, 100.0] {
            let q = q_truncated(cr(x), &qe, 1.0, 2).unwrap();
            let diff = q * q - cr(x * x - 1.0);
            assert!((diff - cr(0.25 / (x * x))).norm() < 1e-10);
        }
    }

    #[test]
    fn resonant_action() {
        let qe = q_expansion(1.0, 2, cr(1.0));
        let s = action(cr(2.0), &qe, 1.0, 2).unwrap();
        assert!((s - cr(2.0 - 0.5 * 2f64.ln())).norm() < 1e-14);
    }

    #[test]
    fn cut_is_rejected() {
        let qe = q_expansion(1.0, 2, cr(0.0));
        assert!(matches!(action(cr(-1.0), &qe, 1.0, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn degree_of_coefficients() {
        // c_j(tE) = t^j c_j(E).
        let e = c(0.3, -1.1);
        let a = q_expansion(0.2, 3, e);
        let b = q_expansion(0.2, 3, e * 2.0);
        assert!(a.s >= 2);
        for (j, (x, y)) in a.c.iter().zip(&b.c).enumerate() {
            assert!((y - x * 2f64.powi(j as i32 + 1)).norm() < 1e-12 * y.norm().max(1.0));
        }
    }

    #[test]
    fn series_action_agrees_with_truncation_at_large_x() {
        let (m, h, e) = (0.5, 3, c(2.0, 1.0));
        let qe = q_expansion(m, h, e);
        for x in [1e3, 1e4] {
            let full = s_hat(x, m, h, e).unwrap();
            let tr = action(cr(x), &qe, m, h).unwrap();
            assert!((full - tr).norm() < 10.0 * x.powf(-qe.delta));
        }
    }

    proptest! {
        #[test]
        fn action_rotation(m in prop_oneof![0.2f64..0.45, 0.55f64..0.95, 1.05f64..2.0], er in -3.0f64..3.0, ei in -3.0f64..3.0, x in 2.0f64..6.0, kk in -1i32..=1) {
            let h = 3usize;
            let k = kk as f64 * 0.25;
            let om = cis(2.0 * PI * k / (h as f64 * (m + 1.0)));
            let big = cis(2.0 * PI * k * m / (m + 1.0));
            let gam = cis(2.0 * PI * k / h as f64);
            let e = c(er, ei);
            let lhs = action(om * x, &q_expansion(m, h, big * e), m, h).unwrap();
            let rhs = gam * action(cr(x), &q_expansion(m, h, e), m, h).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn resonant_rotation_offset() {
        // M = 1, h∨ = 2: S carries −(E/2) log x and rotation adds γ c₁(E) log ω.
        let (m, h, e) = (1.0, 2usize, c(0.4, 0.2));
        let om = cis(PI / 2.0);
        let big = cis(PI);
        let gam = cis(PI);
        let lhs = action(om * 2.0, &q_expansion(m, h, big * e), m, h).unwrap();
        let rhs = gam * action(cr(2.0), &q_expansion(m, h, e), m, h).unwrap();
        let c1 = q_expansion(m, h, e).c[0];
        assert!((lhs - rhs - gam * c1 * C64::new(0.0, PI / 2.0)).norm() < 1e-13);
    }

    fn a1(m: f64, e: f64) -> (MatrixRep, ConnectionParams) {
        let kind = AlgebraKind::a(1);
        (fundamental_rep(kind, 1).unwrap(), ConnectionParams::new(kind, m, cr(e)))
    }

    #[test]
    fn zero_initial_vector() {
        let (rep, p) = a1(1.0, 0.5);
        let tr = integrate(&rep, &p, cr(2.0), cr(0.5), &CVec::zeros(2), &[cr(1.0)]).unwrap();
        assert!(tr.samples.iter().all(|(_, v)| v.norm() == 0.0));
    }

    #[test]
    fn initial_value_formula() {
        let (rep, p) = a1(1.0, 0.0);
        let x = 3.0;
        let v = subdominant_initial(&rep, &p, cr(x)).unwrap();
        let s = 0.5f64.sqrt() * (-x * x / 2.0).exp();
        assert!((v[0] - cr(s * x.powf(-0.5))).norm() < 1e-14);
        assert!((v[1] - cr(s * x.powf(0.5))).norm() < 1e-14);
    }

    #[test]
    fn matched_value_close_to_leading_order() {
        let (rep, p) = a1(1.0, -2.0);
        let conn = Connection::new(&rep, &p).unwrap();
        let xm = conn.default_x_match(1.0).unwrap();
        let v = conn.matched_value(xm).unwrap();
        let w = initial_from(&conn, cr(xm)).unwrap();
        for k in 0..2 {
            assert!((v[k] / w[k] - cr(1.0)).norm() < 1e-2);
        }
    }

    #[test]
    fn negative_energy_gives_real_solution() {
        let (rep, p) = a1(1.0, -1.5);
        let tr = subdominant_solution(&rep, &p, &[2.0, 1.0, 0.5]).unwrap();
        for (_, v) in &tr.samples {
            for z in v.iter() {
                assert!(z.im.abs() < 1e-9 * v.norm());
            }
        }
    }

    #[test]
    fn sector_violation() {
        let (rep, p) = a1(1.0, 0.0);
        // h∨ = 2: the bound is |k| ≤ 1/2.
        assert!(psi_k(&rep, &p, 0.5, &[1.0]).is_ok());
        assert!(matches!(psi_k(&rep, &p, 0.75, &[1.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn rotation_zero_is_plain() {
        let (rep, p) = a1(1.0, 0.7);
        let a = psi_k(&rep, &p, 0.0, &[1.0]).unwrap();
        let b = subdominant_solution(&rep, &p, &[1.0]).unwrap();
        assert_eq!(a.samples[0].1, b.samples[0].1);
    }
}

//! Generalized Airy functions: `Ψ(x) = (1/2πi) ∫_c e^{−xs} Φ(s) ds` for the
//! linear potential with `ℓ = 0`, where `(−s + e + e₀ d/ds) Φ = 0` in the
//! standard representation.
//!
//! Type A is indexed by the matrix size `n` (algebra `A_{n−1}`), type D by
//! the rank. The exponent is `s^N/N` with `N = n+1` and `N = 2n−1`
//! respectively; the contour runs from `e^{−iπ/N}∞` to `e^{iπ/N}∞`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;

use crate::cartan::{AlgebraKind, Family};
use crate::error::{Error, Result};
use crate::linalg::{cr, vmax_abs, CMat, CVec, C64};
use crate::ode::{Connection, ConnectionParams};
use crate::rep::fundamental_rep;

const GL_POINTS: usize = 20;
const MAX_PANELS: usize = 4096;
const MAX_RADIUS: f64 = 1e6;
/// Tail cut relative to the largest integrand value on the contour.
const TAIL_LOG: f64 = -36.0;

fn gauss_legendre() -> &'static (Vec<f64>, Vec<f64>) {
    static GL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    GL.get_or_init(|| {
        let n = GL_POINTS;
        let mut xs = Vec::with_capacity(n);
        let mut ws = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            xs.push(x);
            ws.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        (xs, ws)
    })
}

/// Family and size of a g-Airy problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AiryKind {
    pub family: Family,
    pub n: usize,
}

impl AiryKind {
    pub fn a(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("A-type Airy needs matrix size n >= 2, got {n}")));
        }
        Ok(AiryKind { family: Family::A, n })
    }

    pub fn d(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("D-type Airy needs n >= 3, got {n}")));
        }
        Ok(AiryKind { family: Family::D, n })
    }

    /// Degree of the exponent `s^N/N`.
    pub fn order(&self) -> usize {
        match self.family {
            Family::A => self.n + 1,
            _ => 2 * self.n - 1,
        }
    }

    pub fn components(&self) -> usize {
        match self.family {
            Family::A => self.n,
            _ => 2 * self.n,
        }
    }

    pub fn algebra(&self) -> AlgebraKind {
        match self.family {
            Family::A => AlgebraKind::a(self.n - 1),
            _ => AlgebraKind::d(self.n),
        }
    }

    /// `M = 1/h∨`, which turns `x^{Mh∨} − E` into the linear potential.
    pub fn m(&self) -> f64 {
        1.0 / self.algebra().hvee() as f64
    }

    /// `Φ_j = Σ c s^p · Φ₁` as lists of `(c, p)`.
    fn monomials(&self) -> Vec<Vec<(f64, i32)>> {
        let n = self.n as i32;
        match self.family {
            Family::A => (0..n).map(|p| vec![(1.0, p)]).collect(),
            _ => {
                let mut out: Vec<Vec<(f64, i32)>> = (0..n - 1).map(|p| vec![(1.0, p)]).collect();
                out.push(vec![(0.5, n - 1)]);
                out.push(vec![(1.0, n - 1)]);
                for j in 2..n {
                    out.push(vec![(1.0, n + j - 2)]);
                }
                out.push(vec![(0.5, 2 * n - 2), (0.25, -1)]);
                out
            }
        }
    }

    /// `Φ₁'/Φ₁ = s^{N−1} − a/s` with `a = 0` (A) or `1/2` (D).
    fn branch_power(&self) -> f64 {
        match self.family {
            Family::A => 0.0,
            _ => 0.5,
        }
    }
}

/// Integrand vector `Φ(s)` with `κ = 1`.
pub fn phi(kind: AiryKind, s: C64) -> CVec {
    let (v, _) = phi_and_derivative(kind, s);
    v
}

fn phi_and_derivative(kind: AiryKind, s: C64) -> (CVec, CVec) {
    let big_n = kind.order() as i32;
    let a = kind.branch_power();
    let phi1 = (s.powi(big_n) / big_n as f64).exp() * s.powf(-a);
    let log_d = s.powi(big_n - 1) - a / s;
    let mons = kind.monomials();
    let mut v = CVec::zeros(mons.len());
    let mut d = CVec::zeros(mons.len());
    for (j, terms) in mons.iter().enumerate() {
        for &(c, p) in terms {
            let sp = s.powi(p);
            v[j] += sp * c;
            d[j] += (s.powi(p - 1) * p as f64 + sp * log_d) * c;
        }
    }
    (v * phi1, d * phi1)
}

/// `(−s + e + e₀ d/ds) Φ(s)` in the standard representation, max-norm
/// relative to `|s|·|Φ|`.
pub fn integrand_residual(kind: AiryKind, s: C64) -> Result<f64> {
    let rep = fundamental_rep(kind.algebra(), 1)?;
    let e0 = CMat::from_iterator(rep.dim, rep.dim, rep.e0.iter().cloned());
    let (v, d) = phi_and_derivative(kind, s);
    let r = &v * (-s) + rep.e_sum() * &v + e0 * d;
    Ok(vmax_abs(&r) / (vmax_abs(&v) * s.norm().max(1.0)))
}

/// Realized contour: vertex, corner points on the rays and truncation radii.
#[derive(Clone, Debug, Serialize)]
pub struct ContourSpec {
    pub kind: AiryKind,
    /// Rotation `ρ` applied to the contour.
    pub rotation: (f64, f64),
    pub vertex: (f64, f64),
    /// Outer radius on the lower and upper ray.
    pub radius: (f64, f64),
    pub panels: usize,
    /// Largest integrand modulus at a truncation point, relative to the
    /// largest modulus on the contour.
    pub tail: f64,
}

struct Piece {
    a: C64,
    b: C64,
}

/// `ρ ∫_c e^{−xρt} Φ(ρt) dt / 2πi`, all components.
fn contour_integral(kind: AiryKind, x: C64, rho: C64) -> Result<(CVec, ContourSpec)> {
    let big_n = kind.order();
    let y = x * rho;
    let f = |t: C64| -> CVec { phi(kind, rho * t) * ((-y * t).exp() * rho) };
    let log_size = |t: C64| -> f64 { vmax_abs(&f(t)).ln() };

    // Vertex at the principal saddle of −y t + t^N/N.
    let mut v = if y.norm() > 0.0 { y.powf(1.0 / (big_n as f64 - 1.0)) } else { cr(1.0) };
    let floor = 0.5;
    if v.norm() < floor {
        v *= floor / v.norm();
    }
    let half = PI / big_n as f64;
    let corner = |sign: f64| {
        let dir = C64::from_polar(1.0, sign * half);
        // Intersection of the ray with the line through v orthogonal to
        // the real axis, pushed out to at least |v|.
        let r = (v.re / half.cos()).max(v.norm());
        dir * r
    };
    let (lo, hi) = (corner(-1.0), corner(1.0));
    let gmax = [lo, v, hi].iter().map(|t| log_size(*t)).fold(f64::NEG_INFINITY, f64::max);
    let ray_end = |p: C64| -> Result<(C64, f64)> {
        let dir = p / p.norm();
        let mut r = p.norm();
        let mut prev = log_size(p);
        loop {
            r *= 1.1;
            let g = log_size(dir * r);
            if g - gmax < TAIL_LOG && g < prev {
                return Ok((dir * r, (g - gmax).exp()));
            }
            if r > MAX_RADIUS {
                return Err(Error::Radius(format!("no truncation radius below {MAX_RADIUS} for x = {x}")));
            }
            prev = g;
        }
    };
    let (lo_end, t_lo) = ray_end(lo)?;
    let (hi_end, t_hi) = ray_end(hi)?;
    let pieces = [Piece { a: lo_end, b: lo }, Piece { a: lo, b: v }, Piece { a: v, b: hi }, Piece { a: hi, b: hi_end }];
    let d = kind.components();
    let mut total = CVec::zeros(d);
    let mut panels = 0;
    for p in &pieces {
        let (val, k) = integrate_piece(&f, p, d)?;
        total += val;
        panels += k;
    }
    total /= C64::new(0.0, 2.0 * PI);
    let spec = ContourSpec {
        kind,
        rotation: (rho.re, rho.im),
        vertex: (v.re, v.im),
        radius: (lo_end.norm(), hi_end.norm()),
        panels,
        tail: t_lo.max(t_hi),
    };
    Ok((total, spec))
}

fn panel_sum<F: Fn(C64) -> CVec>(f: &F, p: &Piece, m: usize, d: usize) -> (CVec, f64) {
    let (xs, ws) = gauss_legendre();
    let len = p.b - p.a;
    let mut sum = CVec::zeros(d);
    let mut l1 = 0.0;
    for k in 0..m {
        let a = p.a + len * (k as f64 / m as f64);
        let half = len * (0.5 / m as f64);
        let mid = a + half;
        for (x, w) in xs.iter().zip(ws) {
            let val = f(mid + half * *x) * (half * *w);
            l1 += vmax_abs(&val);
            sum += val;
        }
    }
    (sum, l1)
}

fn integrate_piece<F: Fn(C64) -> CVec>(f: &F, p: &Piece, d: usize) -> Result<(CVec, usize)> {
    let mut m = 2;
    let (mut prev, _) = panel_sum(f, p, m, d);
    loop {
        m *= 2;
        let (cur, l1) = panel_sum(f, p, m, d);
        if vmax_abs(&(&cur - &prev)) <= 1e-13 * l1.max(1e-300) {
            return Ok((cur, m));
        }
        if m >= MAX_PANELS {
            return Err(Error::Radius(format!("quadrature did not settle with {m} panels")));
        }
        prev = cur;
    }
}

/// All components of the g-Airy vector at `x`.
pub fn airy_vector(kind: AiryKind, x: C64) -> Result<(CVec, ContourSpec)> {
    contour_integral(kind, x, cr(1.0))
}

fn component(kind: AiryKind, j: usize, x: C64) -> Result<C64> {
    if j == 0 || j > kind.components() {
        return Err(Error::Domain(format!("component {j} outside 1..={}", kind.components())));
    }
    Ok(airy_vector(kind, x)?.0[j - 1])
}

/// `(1/2πi) ∫ s^{j−1} e^{−xs + s^{n+1}/(n+1)} ds`.
pub fn airy_a(n: usize, j: usize, x: C64) -> Result<C64> {
    component(AiryKind::a(n)?, j, x)
}

/// Component `j` of the `D_n`-Airy vector.
pub fn airy_d(n: usize, j: usize, x: C64) -> Result<C64> {
    component(AiryKind::d(n)?, j, x)
}

/// Steepest-descent leading term
/// `(2πn)^{−1/2} x^{(2j−1−n)/(2n)} e^{−n x^{(n+1)/n}/(n+1)}`.
pub fn airy_asymptote_a(n: usize, j: usize, x: f64) -> f64 {
    let nf = n as f64;
    (2.0 * PI * nf).powf(-0.5) * x.powf((2.0 * j as f64 - 1.0 - nf) / (2.0 * nf)) * (-nf / (nf + 1.0) * x.powf((nf + 1.0) / nf)).exp()
}

/// Integral along the contour rotated by `ρ = e^{2kπi/N}`.
pub fn rotated_airy(kind: AiryKind, k: i32, x: C64) -> Result<CVec> {
    let big_n = kind.order() as f64;
    // For D the rotated rays must stay clear of the cut of s^{−1/2}.
    if kind.family != Family::A && (2.0 * k.abs() as f64 + 1.0) / big_n >= 1.0 {
        return Err(Error::Domain(format!("rotation index {k} leaves the convergent sectors")));
    }
    let rho = C64::from_polar(1.0, 2.0 * PI * k as f64 / big_n);
    Ok(contour_integral(kind, x, rho)?.0)
}

/// Quadrature against the ODE subdominant solution.
#[derive(Clone, Debug, Serialize)]
pub struct CrossCheck {
    pub kind: AiryKind,
    pub x_ref: f64,
    /// `c` with `airy = c·Ψ_ODE` at `x_ref`.
    pub constant: (f64, f64),
    pub xs: Vec<f64>,
    pub rel: Vec<f64>,
    pub max_rel: f64,
}

/// Compare the g-Airy vector with the connection solution for
/// `p = x` (`M = 1/h∨`, `E = 0`, `ℓ = 0`) after matching one constant at `x_ref`.
pub fn cross_validate(kind: AiryKind, k: i32, xs: &[f64], x_ref: f64, tol: f64) -> Result<CrossCheck> {
    let alg = kind.algebra();
    let rep = fundamental_rep(alg, 1)?;
    let params = ConnectionParams::new(alg, kind.m(), cr(0.0)).with_tol(tol);
    let conn = Connection::new(&rep, &params)?;
    let mut grid = xs.to_vec();
    grid.push(x_ref);
    let trace = conn.rotated(k as f64, &grid)?;
    let lookup = |x: f64| trace.samples.iter().find(|(z, _)| (z.re - x).abs() < 1e-12).map(|(_, v)| v.clone());
    let airy = |x: f64| rotated_airy(kind, k, cr(x));
    let ode_ref = lookup(x_ref).ok_or_else(|| Error::Domain("missing reference sample".into()))?;
    let a_ref = airy(x_ref)?;
    let c = ode_ref.dotc(&a_ref) / ode_ref.dotc(&ode_ref);
    let mut rel = Vec::with_capacity(xs.len());
    for &x in xs {
        let o = lookup(x).ok_or_else(|| Error::Domain("missing sample".into()))?;
        let a = airy(x)?;
        rel.push((&a - &o * c).norm() / a.norm());
    }
    let max_rel = rel.iter().cloned().fold(0.0, f64::max);
    Ok(CrossCheck { kind, x_ref, constant: (c.re, c.im), xs: xs.to_vec(), rel, max_rel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (xs, ws) = gauss_legendre();
        let s: f64 = ws.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let q: f64 = xs.iter().zip(ws).map(|(x, w)| w * x.powi(38)).sum();
        assert!((q - 2.0 / 39.0).abs() < 1e-14);
    }

    #[test]
    fn component_counts() {
        assert_eq!(AiryKind::a(4).unwrap().components(), 4);
        assert_eq!(AiryKind::d(5).unwrap().components(), 10);
        assert!(AiryKind::d(2).is_err());
    }

    #[test]
    fn d_middle_components() {
        let k = AiryKind::d(4).unwrap();
        let s = C64::new(0.8, 0.3);
        let v = phi(k, s);
        assert!((v[4] - v[3] * 2.0).norm() < 1e-14 * v[4].norm());
        assert!((v[1] - v[0] * s).norm() < 1e-14 * v[1].norm());
    }

    #[test]
    fn a_components_are_powers() {
        let k = AiryKind::a(3).unwrap();
        let s = C64::new(1.1, -0.4);
        let v = phi(k, s);
        for j in 1..3 {
            assert!((v[j] - v[0] * s.powi(j as i32)).norm() < 1e-14 * v[j].norm());
        }
    }

    #[test]
    fn rotation_bound() {
        let k = AiryKind::d(3).unwrap();
        assert!(rotated_airy(k, 1, cr(1.0)).is_ok());
        assert!(rotated_airy(k, 2, cr(1.0)).is_err());
        assert!(rotated_airy(AiryKind::a(2).unwrap(), 2, cr(1.0)).is_ok());
    }

    proptest! {
        #[test]
        fn integrand_solves_the_s_equation(re in 0.2f64..2.0, im in -1.0f64..1.0, d in prop::bool::ANY, n in 3usize..6) {
            let kind = if d { AiryKind::d(n).unwrap() } else { AiryKind::a(n).unwrap() };
            prop_assert!(integrand_residual(kind, C64::new(re, im)).unwrap() < 1e-12);
        }
    }
}

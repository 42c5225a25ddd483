//! Dynkin and Cartan data for the simply-laced algebras.
//!
//! Node numbering (1-based, as drawn in the usual tables):
//!
//! * `A_n`: the chain 1-2-…-n.
//! * `D_n`: the chain 1-…-(n−2), with n−1 and n both attached to n−2.
//! * `E_6`: chain 1-2-3-5-6, node 4 attached to 3.
//! * `E_7`: chain 1-2-3-4-6-7, node 5 attached to 4.
//! * `E_8`: chain 1-2-3-4-5-7-8, node 6 attached to 5.
//!
//! Public functions take 1-based node numbers; vectors are 0-indexed.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cis, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    D,
    E,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraKind {
    pub family: Family,
    pub rank: usize,
}

impl AlgebraKind {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::D => rank >= 3,
            Family::E => (6..=8).contains(&rank),
        };
        if ok {
            Ok(AlgebraKind { family, rank })
        } else {
            Err(Error::Domain(format!("{family:?}{rank}")))
        }
    }

    pub fn a(n: usize) -> Self {
        Self::new(Family::A, n).expect("A_n needs n >= 1")
    }

    pub fn d(n: usize) -> Self {
        Self::new(Family::D, n).expect("D_n needs n >= 3")
    }

    pub fn e(n: usize) -> Self {
        Self::new(Family::E, n).expect("E_n needs n in 6..=8")
    }

    /// Dual Coxeter number.
    pub fn hvee(&self) -> usize {
        match self.family {
            Family::A => self.rank + 1,
            Family::D => 2 * self.rank - 2,
            Family::E => match self.rank {
                6 => 12,
                7 => 18,
                _ => 30,
            },
        }
    }

    /// Check a 1-based node number.
    pub fn check_node(&self, node: usize) -> Result<()> {
        if node == 0 || node > self.rank {
            Err(Error::Domain(format!("node {node} out of range for {self}")))
        } else {
            Ok(())
        }
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.rank;
        let chain = |nodes: &[usize]| -> Vec<(usize, usize)> { nodes.windows(2).map(|w| (w[0], w[1])).collect() };
        match self.family {
            Family::A => (1..n).map(|i| (i, i + 1)).collect(),
            Family::D => {
                let mut e: Vec<_> = (1..n - 2).map(|i| (i, i + 1)).collect();
                e.push((n - 2, n - 1));
                e.push((n - 2, n));
                e
            }
            Family::E => {
                let (mut e, branch) = match n {
                    6 => (chain(&[1, 2, 3, 5, 6]), (3, 4)),
                    7 => (chain(&[1, 2, 3, 4, 6, 7]), (4, 5)),
                    _ => (chain(&[1, 2, 3, 4, 5, 7, 8]), (5, 6)),
                };
                e.push(branch);
                e
            }
        }
    }
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, self.rank)
    }
}

impl FromStr for AlgebraKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let fam = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('D') => Family::D,
            Some('E') => Family::E,
            _ => return Err(Error::Domain(s.to_string())),
        };
        let rank: usize = chars
            .as_str()
            .trim_start_matches('_')
            .parse()
            .map_err(|_| Error::Domain(s.to_string()))?;
        AlgebraKind::new(fam, rank)
    }
}

#[derive(Clone, Debug)]
pub struct CartanData {
    pub kind: AlgebraKind,
    pub c: DMatrix<i32>,
    pub b: DMatrix<i32>,
    pub hvee: usize,
    /// Two-colouring, `parity[0] = 0`.
    pub parity: Vec<u8>,
    /// Perron–Frobenius vector of `b`, first entry 1.
    pub pf: Vec<f64>,
}

impl CartanData {
    pub fn rank(&self) -> usize {
        self.kind.rank
    }

    /// Neighbours (1-based) of a 1-based node.
    pub fn neighbours(&self, node: usize) -> Vec<usize> {
        (1..=self.rank()).filter(|&j| self.b[(node - 1, j - 1)] != 0).collect()
    }

    /// `C` as a float matrix.
    pub fn c_f64(&self) -> DMatrix<f64> {
        self.c.map(|v| v as f64)
    }

    /// `C⁻¹` as a float matrix.
    pub fn c_inv(&self) -> DMatrix<f64> {
        self.c_f64().try_inverse().expect("Cartan matrices are invertible")
    }
}

pub fn cartan_data(kind: AlgebraKind) -> Result<CartanData> {
    let kind = AlgebraKind::new(kind.family, kind.rank)?;
    let n = kind.rank;
    let mut b = DMatrix::<i32>::zeros(n, n);
    for (i, j) in kind.edges() {
        b[(i - 1, j - 1)] = 1;
        b[(j - 1, i - 1)] = 1;
    }
    let c = DMatrix::<i32>::identity(n, n) * 2 - &b;
    let parity = two_colouring(&b);
    let mut data = CartanData { kind, c, b, hvee: kind.hvee(), parity, pf: Vec::new() };
    data.pf = pf_vector(&data);
    Ok(data)
}

fn two_colouring(b: &DMatrix<i32>) -> Vec<u8> {
    let n = b.nrows();
    let mut col = vec![u8::MAX; n];
    col[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for j in 0..n {
            if b[(i, j)] != 0 && col[j] == u8::MAX {
                col[j] = 1 - col[i];
                queue.push_back(j);
            }
        }
    }
    col
}

/// Perron–Frobenius vector of the incidence matrix, normalised by its first
/// entry. Power iteration on `B + 2` (the shift removes the bipartite
/// partner eigenvalue) followed by one Rayleigh-quotient step.
pub fn pf_vector(data: &CartanData) -> Vec<f64> {
    let n = data.rank();
    let b = data.b.map(|v| v as f64);
    let shifted = &b + DMatrix::<f64>::identity(n, n) * 2.0;
    let mut v = nalgebra::DVector::<f64>::from_element(n, 1.0);
    for _ in 0..20_000 {
        let mut w = &shifted * &v;
        w /= w.norm();
        let diff = (&w - &v).amax();
        v = w;
        if diff < 1e-16 {
            break;
        }
    }
    let rho = v.dot(&(&b * &v)) / v.dot(&v);
    let perturbed = &b - DMatrix::<f64>::identity(n, n) * (rho + 1e-13 * rho.abs().max(1.0));
    if let Some(w) = perturbed.lu().solve(&v) {
        let scale = w.amax();
        if w.iter().all(|x| x.is_finite()) && scale > 0.0 {
            v = w / scale;
        }
    }
    let first = v[0];
    v.iter().map(|x| x / first).collect()
}

/// Closed forms of the Perron–Frobenius entries: the chain formulas for
/// `A_n` and `D_n`, and the E-series table with the `E_6` node-4 entry
/// stored as sin(π/4)/sin(π/6).
pub fn pf_closed_form(kind: AlgebraKind) -> Vec<f64> {
    let s = |a: f64, b: f64| (a * PI / b).sin();
    let n = kind.rank;
    match kind.family {
        Family::A => (1..=n).map(|i| s(i as f64, (n + 1) as f64) / s(1.0, (n + 1) as f64)).collect(),
        Family::D => {
            let h = (2 * n - 2) as f64;
            let mut v: Vec<f64> = (1..=n - 2).map(|i| s(i as f64, h) / s(1.0, h)).collect();
            let spin = 1.0 / (2.0 * s(1.0, h));
            v.push(spin);
            v.push(spin);
            v
        }
        Family::E => match n {
            6 => vec![
                1.0,
                s(1.0, 6.0) / s(1.0, 12.0),
                s(1.0, 4.0) / s(1.0, 12.0),
                s(1.0, 4.0) / s(1.0, 6.0),
                s(1.0, 6.0) / s(1.0, 12.0),
                1.0,
            ],
            7 => vec![
                1.0,
                s(1.0, 9.0) / s(1.0, 18.0),
                s(1.0, 6.0) / s(1.0, 18.0),
                s(2.0, 9.0) / s(1.0, 18.0),
                s(2.0, 9.0) / s(1.0, 9.0),
                s(1.0, 9.0) * s(2.0, 9.0) / (s(1.0, 6.0) * s(1.0, 18.0)),
                s(2.0, 9.0) / s(1.0, 6.0),
            ],
            _ => vec![
                1.0,
                s(2.0, 30.0) / s(1.0, 30.0),
                s(1.0, 10.0) / s(1.0, 30.0),
                s(2.0, 15.0) / s(1.0, 30.0),
                s(1.0, 6.0) / s(1.0, 30.0),
                s(1.0, 6.0) / s(1.0, 15.0),
                s(1.0, 6.0) * s(1.0, 15.0) / (s(1.0, 10.0) * s(1.0, 30.0)),
                s(1.0, 6.0) / s(1.0, 10.0),
            ],
        },
    }
}

/// The `E_6` node-4 entry as it appears in the commonly reproduced table,
/// sin(π/4)/sin(π/12); it does not satisfy the eigenvector relation.
pub fn e6_node4_printed() -> f64 {
    (PI / 4.0).sin() / (PI / 12.0).sin()
}

/// Roots of unity attached to `(h∨, M)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phases {
    /// `γ = exp(2πi/h∨)`.
    pub gamma: C64,
    /// `ω = exp(2πi/(h∨(M+1)))`.
    pub omega: C64,
    /// `Ω = ω^{h∨ M}`.
    pub big_omega: C64,
    hvee: f64,
    m: f64,
}

impl Phases {
    /// `γ^t` on the principal branch of `t`.
    pub fn gamma_pow(&self, t: f64) -> C64 {
        cis(2.0 * PI * t / self.hvee)
    }

    pub fn omega_pow(&self, t: f64) -> C64 {
        cis(2.0 * PI * t / (self.hvee * (self.m + 1.0)))
    }

    /// `Ω^t = exp(2πi M t/(M+1))`.
    pub fn big_omega_pow(&self, t: f64) -> C64 {
        cis(2.0 * PI * self.m * t / (self.m + 1.0))
    }

    /// Complex exponent version of `ω^t`.
    pub fn omega_cpow(&self, t: C64) -> C64 {
        (C64::new(0.0, 2.0 * PI / (self.hvee * (self.m + 1.0))) * t).exp()
    }
}

pub fn phases(data: &CartanData, m: f64) -> Result<Phases> {
    phases_h(data.hvee, m)
}

pub fn phases_h(hvee: usize, m: f64) -> Result<Phases> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::Domain(format!("M must be positive, got {m}")));
    }
    let h = hvee as f64;
    Ok(Phases {
        gamma: cis(2.0 * PI / h),
        omega: cis(2.0 * PI / (h * (m + 1.0))),
        big_omega: cis(2.0 * PI * m / (m + 1.0)),
        hvee: h,
        m,
    })
}

/// Every supported algebra up to rank 8.
pub fn all_kinds_up_to(rank: usize) -> Vec<AlgebraKind> {
    let mut out = Vec::new();
    for n in 1..=rank {
        out.push(AlgebraKind::a(n));
    }
    for n in 3..=rank {
        out.push(AlgebraKind::d(n));
    }
    for n in 6..=rank.min(8) {
        out.push(AlgebraKind::e(n));
    }
    out
}

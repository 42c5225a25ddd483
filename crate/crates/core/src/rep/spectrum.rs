use serde::Serialize;

use super::{lambda_matrix, MatrixRep};
use crate::error::Result;
use crate::linalg::{eigenvector, eigvals, CVec, C64};
use crate::tolerance;

#[derive(Clone, Debug)]
pub struct Maximal {
    pub lambda: C64,
    /// Unit norm, largest-modulus entry real positive.
    pub psi: CVec,
    /// `Re λ` minus the largest real part among the other eigenvalues.
    pub gap: f64,
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    /// Sorted by decreasing real part.
    pub eigenvalues: Vec<C64>,
    pub maximal: Option<Maximal>,
}

#[derive(Serialize)]
pub struct SpectrumSummary {
    pub dim: usize,
    pub lambda: Option<f64>,
    pub gap: Option<f64>,
}

impl SpectrumReport {
    pub fn summary(&self) -> SpectrumSummary {
        SpectrumSummary {
            dim: self.eigenvalues.len(),
            lambda: self.maximal.as_ref().map(|m| m.lambda.re),
            gap: self.maximal.as_ref().map(|m| m.gap),
        }
    }
}

/// Unit norm with the largest-modulus entry real and positive.
pub fn fix_phase(v: &CVec) -> CVec {
    let mut k = 0;
    for i in 1..v.len() {
        if v[i].norm() > v[k].norm() {
            k = i;
        }
    }
    let ph = v[k] / v[k].norm();
    let w = v / ph;
    let n = w.norm();
    let mut out = w / C64::new(n, 0.0);
    out[k] = C64::new(out[k].re, 0.0);
    out
}

/// Dense spectrum of `Λ` and its maximal eigenpair when one exists: real,
/// simple, and strictly largest in real part.
pub fn maximal_eigenpair(rep: &MatrixRep) -> Result<SpectrumReport> {
    let lam = lambda_matrix(rep);
    let mut vals = eigvals(&lam)?;
    vals.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap_or(std::cmp::Ordering::Equal));
    let top = vals[0];
    let gap = if vals.len() > 1 { top.re - vals[1].re } else { f64::INFINITY };
    let maximal = if gap > tolerance::MAXIMAL_GAP && top.im.abs() < tolerance::MAXIMAL_IMAG {
        let l = C64::new(top.re, 0.0);
        let psi = fix_phase(&eigenvector(&lam, l)?);
        Some(Maximal { lambda: l, psi, gap })
    } else {
        None
    };
    Ok(SpectrumReport { eigenvalues: vals, maximal })
}

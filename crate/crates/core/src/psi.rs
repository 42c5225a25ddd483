//! The Ψ-system `m_i(Ψ^(i)_{−1/2} ∧ Ψ^(i)_{1/2}) = ⊗_j Ψ^(j)^{⊗B_ij}`.
//!
//! The eigenvectors `ψ^(i)` are first put in the unit-norm, real-positive
//! phase of [`fix_phase`](crate::rep::fix_phase), then rescaled by `α_i` so
//! that `m_i(γ^{H/2}ψ^(i) ∧ γ^{−H/2}ψ^(i)) = ⊗_j ψ^(j)` holds exactly. With
//! `m_i(…) = c_i ⊗_j ψ^(j)` before rescaling, `log α = −C⁻¹ log c`.

use rayon::prelude::*;

use crate::cartan::{cartan_data, AlgebraKind, CartanData, Family};
use crate::error::{Error, Result};
use crate::linalg::{cr, kron_vec, CVec, C64};
use crate::ode::{Connection, ConnectionParams, SolutionTrace};
use crate::rep::{build_intertwiner, fundamental_rep, gamma_h_twist, maximal_eigenpair, Intertwiner, MatrixRep};

pub use crate::rep::fix_phase;

/// Coordinates of `u ∧ v` in the lexicographic basis used by `exterior_power`.
pub fn wedge_embed(u: &CVec, v: &CVec) -> Result<CVec> {
    if u.len() != v.len() {
        return Err(Error::Dimension(format!("wedge of vectors of length {} and {}", u.len(), v.len())));
    }
    Ok(crate::rep::wedge2(u, v))
}

/// Kronecker product in the order used by `tensor_product`; the empty
/// product is the scalar 1.
pub fn tensor_embed(vectors: &[CVec]) -> CVec {
    let mut out = CVec::from_element(1, cr(1.0));
    for v in vectors {
        out = kron_vec(&out, v);
    }
    out
}

/// Fundamental representations with consistently normalized eigenvectors
/// and the intertwiners `m_i`.
#[derive(Clone, Debug)]
pub struct FundamentalSystem {
    pub kind: AlgebraKind,
    pub data: CartanData,
    pub reps: Vec<MatrixRep>,
    pub lambda: Vec<C64>,
    pub psi: Vec<CVec>,
    pub intertwiners: Vec<Intertwiner>,
    /// `c_i` measured before rescaling.
    pub c: Vec<C64>,
    pub log_alpha: Vec<C64>,
    normalized: bool,
}

impl FundamentalSystem {
    pub fn new(kind: AlgebraKind) -> Result<Self> {
        if kind.family == Family::E {
            return Err(Error::Unsupported(format!("Psi-system for {kind}: E-series representations are not built")));
        }
        let data = cartan_data(kind)?;
        let reps: Vec<MatrixRep> = (1..=kind.rank).map(|i| fundamental_rep(kind, i)).collect::<Result<_>>()?;
        let mut lambda = Vec::new();
        let mut psi = Vec::new();
        for r in &reps {
            let mx = maximal_eigenpair(r)?.maximal.ok_or_else(|| Error::NoMaximalEigenvalue(r.label.clone()))?;
            lambda.push(mx.lambda);
            psi.push(mx.psi);
        }
        let intertwiners: Vec<Intertwiner> =
            (1..=kind.rank).into_par_iter().map(|i| build_intertwiner(kind, i)).collect::<Result<_>>()?;
        let n = kind.rank;
        let mut sys = FundamentalSystem {
            kind,
            data,
            reps,
            lambda,
            psi,
            intertwiners,
            c: vec![cr(1.0); n],
            log_alpha: vec![cr(0.0); n],
            normalized: false,
        };
        sys.normalize()?;
        Ok(sys)
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// `m_i(γ^{H/2}ψ^(i) ∧ γ^{−H/2}ψ^(i))` for the current `ψ`.
    pub fn leading_image(&self, node: usize) -> Result<CVec> {
        let r = &self.reps[node - 1];
        let p = &self.psi[node - 1];
        let a = gamma_h_twist(r, cr(0.5)) * p;
        let b = gamma_h_twist(r, cr(-0.5)) * p;
        Ok(&self.intertwiners[node - 1].matrix * wedge_embed(&a, &b)?)
    }

    pub fn leading_target(&self, node: usize) -> CVec {
        let vs: Vec<CVec> = self.intertwiners[node - 1].factors.iter().map(|j| self.psi[j - 1].clone()).collect();
        tensor_embed(&vs)
    }

    /// Rescale the `ψ^(i)`. A second call does nothing.
    pub fn normalize(&mut self) -> Result<()> {
        if self.normalized {
            return Ok(());
        }
        let n = self.kind.rank;
        let mut logc = nalgebra::DVector::<C64>::zeros(n);
        for i in 1..=n {
            let img = self.leading_image(i)?;
            let tgt = self.leading_target(i);
            let c = tgt.dotc(&img) / tgt.dotc(&tgt);
            if (&img - &tgt * c).norm() > 1e-9 * img.norm() {
                return Err(Error::Construction(format!("leading image of node {i} is not proportional to the target")));
            }
            self.c[i - 1] = c;
            logc[i - 1] = c.ln();
        }
        let cm = self.data.c_f64().map(cr);
        let la = cm.lu().solve(&(-logc)).ok_or_else(|| Error::Construction("singular Cartan matrix".into()))?;
        for i in 0..n {
            self.log_alpha[i] = la[i];
            self.psi[i] *= la[i].exp();
        }
        self.normalized = true;
        Ok(())
    }

    /// Max over nodes of `‖m_i(γ^{H/2}ψ ∧ γ^{−H/2}ψ) − ⊗ψ‖ / ‖⊗ψ‖`.
    pub fn normalization_residual(&self) -> Result<f64> {
        let mut r: f64 = 0.0;
        for i in 1..=self.kind.rank {
            let t = self.leading_target(i);
            r = r.max((self.leading_image(i)? - &t).norm() / t.norm());
        }
        Ok(r)
    }

    pub fn connection(&self, node: usize, params: &ConnectionParams) -> Result<Connection> {
        self.kind.check_node(node)?;
        Ok(Connection::new(&self.reps[node - 1], params)?.with_psi(self.psi[node - 1].clone()))
    }

    /// `Ψ^(node)_k` at the grid points.
    pub fn solution(&self, node: usize, params: &ConnectionParams, k: f64, grid: &[f64]) -> Result<SolutionTrace> {
        self.connection(node, params)?.rotated(k, grid)
    }
}

#[derive(Clone, Debug)]
pub struct PsiSystemReport {
    pub node: usize,
    pub x_grid: Vec<f64>,
    pub energy: C64,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub c: Vec<C64>,
    pub log_alpha: Vec<C64>,
    pub tol: f64,
    /// Expected ratio of the two sides; 1 unless `(M+1)/(h∨M)` is an integer.
    pub resonance_factor: C64,
    /// Residuals of `lhs − resonance_factor·rhs`.
    pub corrected: Vec<f64>,
    pub max_corrected: f64,
}

/// Ratio `m_i(Ψ_{−1/2} ∧ Ψ_{1/2}) / ⊗Ψ^(j)` forced by the asymptotics.
///
/// When `(M+1)/(h∨M) = s` is an integer the action carries `c_s(E) log x`,
/// and `S(ω^k x, Ω^k E) = γ^k S(x,E) + γ^k c_s(E) log ω^k`. The extra terms
/// of `Ψ_{±1/2}` combine to `exp(2π λ c_s(E) sin(π/h∨) / (h∨(M+1)))`.
pub fn resonance_factor(m: f64, hvee: usize, lambda: C64, energy: C64) -> C64 {
    let qe = crate::ode::q_expansion(m, hvee, energy);
    let r = (m + 1.0) / (hvee as f64 * m);
    if qe.s == 0 || (r - r.round()).abs() > 1e-12 {
        return cr(1.0);
    }
    let h = hvee as f64;
    let cs = qe.c[qe.s - 1];
    (lambda * cs * (2.0 * std::f64::consts::PI * (std::f64::consts::PI / h).sin() / (h * (m + 1.0)))).exp()
}

/// 16 log-spaced points on `[0.2, 2]`, largest first.
pub fn default_grid() -> Vec<f64> {
    let n = 16;
    (0..n).map(|k| 2.0 * 10f64.powf(-(k as f64) / (n as f64 - 1.0))).collect()
}

/// Both sides of the Ψ-system at node `i` on the grid (grid sorted
/// decreasingly).
pub fn psi_system_sides(sys: &FundamentalSystem, node: usize, params: &ConnectionParams, grid: &[f64]) -> Result<(Vec<CVec>, Vec<CVec>)> {
    sys.kind.check_node(node)?;
    let factors = sys.intertwiners[node - 1].factors.clone();
    let mut jobs: Vec<(usize, f64)> = vec![(node, -0.5), (node, 0.5)];
    jobs.extend(factors.iter().map(|&j| (j, 0.0)));
    let traces: Vec<SolutionTrace> = jobs.par_iter().map(|&(j, k)| sys.solution(j, params, k, grid)).collect::<Result<_>>()?;
    let m = &sys.intertwiners[node - 1].matrix;
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for t in 0..traces[0].samples.len() {
        lhs.push(m * wedge_embed(&traces[0].samples[t].1, &traces[1].samples[t].1)?);
        let vs: Vec<CVec> = traces[2..].iter().map(|tr| tr.samples[t].1.clone()).collect();
        rhs.push(tensor_embed(&vs));
    }
    Ok((lhs, rhs))
}

pub fn psi_system_residual_with(sys: &FundamentalSystem, node: usize, params: &ConnectionParams, grid: &[f64]) -> Result<PsiSystemReport> {
    let mut xs = grid.to_vec();
    xs.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let (lhs, rhs) = psi_system_sides(sys, node, params, &xs)?;
    let residuals: Vec<f64> = lhs.iter().zip(&rhs).map(|(l, r)| (l - r).norm() / r.norm().max(1e-300)).collect();
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    let f = resonance_factor(params.m, sys.kind.hvee(), sys.lambda[node - 1], params.energy);
    let corrected: Vec<f64> = lhs.iter().zip(&rhs).map(|(l, r)| (l - r * f).norm() / (r.norm() * f.norm()).max(1e-300)).collect();
    let max_corrected = corrected.iter().cloned().fold(0.0, f64::max);
    Ok(PsiSystemReport {
        node,
        x_grid: xs,
        energy: params.energy,
        residuals,
        max_residual,
        c: sys.c.clone(),
        log_alpha: sys.log_alpha.clone(),
        tol: params.tol,
        resonance_factor: f,
        corrected,
        max_corrected,
    })
}

pub fn psi_system_residual(kind: AlgebraKind, node: usize, params: &ConnectionParams, grid: &[f64]) -> Result<PsiSystemReport> {
    let sys = FundamentalSystem::new(kind)?;
    psi_system_residual_with(&sys, node, params, grid)
}

/// For `D_n`: relative difference between the left sides at the two spin
/// nodes, both of which equal `Ψ^(n−2)`.
pub fn spin_consistency(sys: &FundamentalSystem, params: &ConnectionParams, grid: &[f64]) -> Result<f64> {
    let n = sys.kind.rank;
    if sys.kind.family != Family::D {
        return Err(Error::Domain(format!("spin consistency needs a D algebra, got {}", sys.kind)));
    }
    let (a, _) = psi_system_sides(sys, n - 1, params, grid)?;
    let (b, _) = psi_system_sides(sys, n, params, grid)?;
    Ok(a.iter().zip(&b).map(|(u, v)| (u - v).norm() / v.norm().max(1e-300)).fold(0.0, f64::max))
}

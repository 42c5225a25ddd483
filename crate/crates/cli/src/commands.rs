use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use odeim_core::airy::{airy_vector, cross_validate, rotated_airy, AiryKind};
use odeim_core::cartan::{cartan_data, e6_node4_printed, pf_closed_form, pf_vector, AlgebraKind, Family};
use odeim_core::error::{Error, Result};
use odeim_core::ode::ConnectionParams;
use odeim_core::psi::{default_grid, psi_system_residual_with, spin_consistency, FundamentalSystem};
use odeim_core::rep::{fundamental_rep, maximal_eigenpair, twist_identity_residual};
use odeim_core::spectral::{find_zeros, winding_number, QPair, SpectralSystem, ZeroEllSystem};

use crate::output::{cx, cxs, num, Report};

const REP_TOL: f64 = 1e-12;
const TWIST_TOL: f64 = 1e-10;
const PSI_TOL: f64 = 1e-6;
const BETHE_TOL: f64 = 1e-4;
const AIRY_TOL: f64 = 1e-8;
const ELL_ATTEMPTS: usize = 10;

pub struct Conn {
    pub kind: AlgebraKind,
    pub m: f64,
    pub energy: C64,
    pub tol: f64,
}

pub struct Ell {
    pub values: Option<Vec<C64>>,
    pub random: bool,
    pub seed: u64,
    pub word: Vec<usize>,
}

pub fn masses(kind: AlgebraKind) -> Result<Report> {
    let data = cartan_data(kind)?;
    let pf = pf_vector(&data);
    let closed = pf_closed_form(kind);
    let dev: Vec<f64> = pf.iter().zip(&closed).map(|(a, b)| (a - b).abs()).collect();
    let max_dev = dev.iter().cloned().fold(0.0, f64::max);
    let mut body = json!({
        "algebra": kind.to_string(),
        "hvee": kind.hvee(),
        "pf": pf,
        "closed_form": closed,
        "deviation": dev,
        "max_deviation": max_dev,
    });
    if kind == AlgebraKind::e(6) {
        body["note"] = json!({
            "node": 4,
            "tabulated": e6_node4_printed(),
            "deviation_from_tabulated": (pf[3] - e6_node4_printed()).abs(),
        });
    }
    let rows = (0..pf.len()).map(|i| vec![(i + 1).to_string(), num(pf[i]), num(closed[i]), num(dev[i])]).collect();
    Ok(Report {
        command: "masses",
        body,
        header: ["node", "pf", "closed_form", "deviation"].map(String::from).to_vec(),
        rows,
        passed: max_dev < REP_TOL,
    })
}

pub fn repcheck(kind: AlgebraKind, node: Option<usize>) -> Result<Report> {
    let data = cartan_data(kind)?;
    let nodes: Vec<usize> = match node {
        Some(i) => {
            kind.check_node(i)?;
            vec![i]
        }
        None => (1..=kind.rank).collect(),
    };
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    let mut passed = true;
    for i in nodes {
        let rep = fundamental_rep(kind, i)?;
        let chev = rep.chevalley_residual(&data);
        let grad = rep.grading_residual();
        let twist = twist_identity_residual(&rep, 1.0);
        let spec = maximal_eigenpair(&rep)?;
        passed &= chev < REP_TOL && grad < REP_TOL && twist < TWIST_TOL && spec.maximal.is_some();
        let lambda = spec.maximal.as_ref().map(|m| m.lambda.re);
        entries.push(json!({
            "node": i,
            "label": rep.label,
            "dim": rep.dim,
            "chevalley_residual": chev,
            "grading_residual": grad,
            "twist_residual": twist,
            "lambda": lambda,
            "gap": spec.maximal.as_ref().map(|m| m.gap),
        }));
        rows.push(vec![i.to_string(), rep.dim.to_string(), num(chev), num(grad), num(twist), lambda.map(num).unwrap_or_default()]);
    }
    Ok(Report {
        command: "repcheck",
        body: json!({ "algebra": kind.to_string(), "representations": entries }),
        header: ["node", "dim", "chevalley", "grading", "twist", "lambda"].map(String::from).to_vec(),
        rows,
        passed,
    })
}

fn params(c: &Conn) -> ConnectionParams {
    ConnectionParams::new(c.kind, c.m, c.energy).with_tol(c.tol)
}

pub fn solve(c: &Conn, node: usize, grid: &[f64], k: f64, x_match: Option<f64>) -> Result<Report> {
    let sys = FundamentalSystem::new(c.kind)?;
    sys.kind.check_node(node)?;
    let mut p = params(c);
    if let Some(x) = x_match {
        p = p.with_x_match(x);
    }
    let trace = sys.solution(node, &p, k, grid)?;
    let dim = trace.samples.first().map_or(0, |s| s.1.len());
    let samples: Vec<Value> = trace.samples.iter().map(|(x, v)| json!({ "x": x.re, "psi": cxs(v.iter()) })).collect();
    let mut header = vec!["x".to_string()];
    for j in 1..=dim {
        header.push(format!("re{j}"));
        header.push(format!("im{j}"));
    }
    let rows = trace
        .samples
        .iter()
        .map(|(x, v)| {
            let mut r = vec![num(x.re)];
            for z in v.iter() {
                r.push(num(z.re));
                r.push(num(z.im));
            }
            r
        })
        .collect();
    Ok(Report {
        command: "solve",
        body: json!({
            "algebra": c.kind.to_string(),
            "node": node,
            "representation": trace.rep_label,
            "M": c.m,
            "E": cx(c.energy),
            "k": k,
            "x_match": trace.x_match,
            "tol": trace.tol,
            "samples": samples,
        }),
        header,
        rows,
        passed: true,
    })
}

pub fn psicheck(c: &Conn, node: Option<usize>) -> Result<Report> {
    let sys = FundamentalSystem::new(c.kind)?;
    let p = params(c);
    let nodes: Vec<usize> = match node {
        Some(i) => {
            c.kind.check_node(i)?;
            vec![i]
        }
        None => (1..=c.kind.rank).collect(),
    };
    let grid = default_grid();
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for i in nodes {
        let r = psi_system_residual_with(&sys, i, &p, &grid)?;
        worst = worst.max(r.max_corrected);
        for (x, (raw, cor)) in r.x_grid.iter().zip(r.residuals.iter().zip(&r.corrected)) {
            rows.push(vec![i.to_string(), num(*x), num(*raw), num(*cor)]);
        }
        entries.push(json!({
            "node": i,
            "x": r.x_grid,
            "residuals": r.residuals,
            "max_residual": r.max_residual,
            "resonance_factor": cx(r.resonance_factor),
            "corrected_residuals": r.corrected,
            "max_corrected_residual": r.max_corrected,
        }));
    }
    let mut body = json!({
        "algebra": c.kind.to_string(),
        "M": c.m,
        "E": cx(c.energy),
        "tol": c.tol,
        "c": cxs(sys.c.iter()),
        "log_alpha": cxs(sys.log_alpha.iter()),
        "nodes": entries,
        "max_residual": worst,
    });
    if c.kind.family == Family::D {
        let s = spin_consistency(&sys, &p, &grid)?;
        body["spin_consistency"] = json!(s);
        worst = worst.max(s);
    }
    Ok(Report {
        command: "psicheck",
        body,
        header: ["node", "x", "residual", "corrected"].map(String::from).to_vec(),
        rows,
        passed: worst < PSI_TOL,
    })
}

/// Either the Frobenius route for generic ℓ or the `x = 0` route for ℓ = 0.
enum QSource {
    Generic(Box<SpectralSystem>),
    Zero(Box<ZeroEllSystem>),
}

impl QSource {
    fn q_pair(&self, node: usize, e: C64) -> Result<QPair> {
        match self {
            QSource::Generic(s) => s.q_pair(node, e),
            QSource::Zero(s) => s.q_pair(node, e),
        }
    }

    fn bethe(&self, node: usize, e: C64) -> Result<C64> {
        match self {
            QSource::Generic(s) => s.bethe_residual(node, e),
            QSource::Zero(s) => s.bethe_residual(node, e),
        }
    }

    fn ell(&self, rank: usize) -> Vec<C64> {
        match self {
            QSource::Generic(s) => s.ell.clone(),
            QSource::Zero(_) => vec![C64::new(0.0, 0.0); rank],
        }
    }
}

fn q_source(c: &Conn, ell: &Ell) -> Result<QSource> {
    let rank = c.kind.rank;
    if ell.random {
        let mut rng = ChaCha8Rng::seed_from_u64(ell.seed);
        let mut last = Error::NonGeneric("no draw".into());
        for _ in 0..ELL_ATTEMPTS {
            let draw: Vec<C64> = (0..rank).map(|_| C64::from_polar(rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))).collect();
            match SpectralSystem::new(c.kind, c.m, draw, c.tol) {
                Ok(s) => return Ok(QSource::Generic(Box::new(s))),
                Err(e @ Error::NonGeneric(_)) => last = e,
                Err(e) => return Err(e),
            }
        }
        return Err(last);
    }
    match &ell.values {
        Some(v) if v.iter().any(|z| z.norm() != 0.0) => {
            if v.len() != rank {
                return Err(Error::Dimension(format!("{} ell coefficients for rank {rank}", v.len())));
            }
            Ok(QSource::Generic(Box::new(SpectralSystem::new(c.kind, c.m, v.clone(), c.tol)?)))
        }
        _ => Ok(QSource::Zero(Box::new(ZeroEllSystem::new(c.kind, c.m, ell.word.clone(), c.tol)?))),
    }
}

pub fn q_table(c: &Conn, ell: &Ell, node: usize, grid: &[f64]) -> Result<Report> {
    c.kind.check_node(node)?;
    let src = q_source(c, ell)?;
    let values: Vec<QPair> = grid.par_iter().map(|&e| src.q_pair(node, C64::new(e, 0.0))).collect::<Result<_>>()?;
    let samples: Vec<Value> = grid.iter().zip(&values).map(|(e, p)| json!({ "E": e, "Q": cx(p.q), "Qt": cx(p.qt) })).collect();
    let rows = grid.iter().zip(&values).map(|(e, p)| vec![num(*e), num(p.q.re), num(p.q.im), num(p.qt.re), num(p.qt.im)]).collect();
    Ok(Report {
        command: "q",
        body: json!({
            "algebra": c.kind.to_string(),
            "node": node,
            "M": c.m,
            "ell": cxs(src.ell(c.kind.rank).iter()),
            "word": ell.word,
            "samples": samples,
        }),
        header: ["E", "re_Q", "im_Q", "re_Qt", "im_Qt"].map(String::from).to_vec(),
        rows,
        passed: true,
    })
}

pub fn bethe(c: &Conn, ell: &Ell, node: usize, window: (f64, f64), max_count: usize, scan: usize, certify: bool) -> Result<Report> {
    c.kind.check_node(node)?;
    let src = q_source(c, ell)?;
    let q = |e: C64| Ok(src.q_pair(node, e)?.q);
    let found = find_zeros(q, window.0, window.1, scan, max_count)?;
    let residuals: Vec<C64> = found.zeros.par_iter().map(|e| src.bethe(node, *e)).collect::<Result<_>>()?;
    let worst = residuals.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let mut body = json!({
        "algebra": c.kind.to_string(),
        "node": node,
        "M": c.m,
        "ell": cxs(src.ell(c.kind.rank).iter()),
        "window": [window.0, window.1],
        "zeros": cxs(found.zeros.iter()),
        "residuals": cxs(residuals.iter()),
        "max_residual": worst,
        "unrefined": cxs(found.unrefined.iter()),
        "real_window_heuristic": true,
    });
    if certify && window.1 > window.0 {
        let h = 0.1 * (window.1 - window.0);
        let count = winding_number(q, window.0, window.1, -h, h, 32)?;
        body["certified_count"] = json!(count);
    }
    let rows = found
        .zeros
        .iter()
        .zip(&residuals)
        .map(|(z, r)| vec![num(z.re), num(z.im), num(r.re), num(r.im), num(r.norm())])
        .collect();
    Ok(Report {
        command: "bethe",
        body,
        header: ["re_E", "im_E", "re_residual", "im_residual", "abs_residual"].map(String::from).to_vec(),
        rows,
        passed: worst < BETHE_TOL && found.unrefined.is_empty(),
    })
}

pub fn airy(family: &str, n: usize, grid: &[f64], k: i32, check: bool) -> Result<Report> {
    let kind = match family {
        "A" | "a" => AiryKind::a(n)?,
        _ => AiryKind::d(n)?,
    };
    let values: Vec<Vec<C64>> = grid
        .par_iter()
        .map(|&x| {
            let v = if k == 0 { airy_vector(kind, C64::new(x, 0.0))?.0 } else { rotated_airy(kind, k, C64::new(x, 0.0))? };
            Ok(v.iter().cloned().collect())
        })
        .collect::<Result<_>>()?;
    let samples: Vec<Value> = grid.iter().zip(&values).map(|(x, v)| json!({ "x": x, "psi": cxs(v.iter()) })).collect();
    let mut header = vec!["x".to_string()];
    for j in 1..=kind.components() {
        header.push(format!("re{j}"));
        header.push(format!("im{j}"));
    }
    let rows = grid
        .iter()
        .zip(&values)
        .map(|(x, v)| {
            let mut r = vec![num(*x)];
            for z in v {
                r.push(num(z.re));
                r.push(num(z.im));
            }
            r
        })
        .collect();
    let mut body = json!({
        "family": format!("{:?}", kind.family),
        "n": n,
        "algebra": kind.algebra().to_string(),
        "k": k,
        "samples": samples,
    });
    let mut passed = true;
    if check {
        let cc = cross_validate(kind, k, grid, 1.0, 1e-12)?;
        passed = cc.max_rel < AIRY_TOL;
        body["check"] = json!({
            "x_ref": cc.x_ref,
            "constant": { "re": cc.constant.0, "im": cc.constant.1 },
            "relative": cc.rel,
            "max_relative": cc.max_rel,
        });
    }
    Ok(Report { command: "airy", body, header, rows, passed })
}

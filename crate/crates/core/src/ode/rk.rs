//! Dormand–Prince 5(4) for linear complex systems `y' = B(s) y`.

use crate::linalg::{vmax_abs, CMat, CVec, C64};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct Failure {
    pub s: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrate `y' = B(s) y` from `s0` to `s1`. Local error per step is
/// controlled relative to `‖y‖`: `‖y5 − y4‖ ≤ tol · max(‖y‖, ‖y_new‖)`.
pub(crate) fn integrate<F>(b: F, s0: f64, s1: f64, y0: &CVec, tol: f64, h_hint: Option<f64>) -> Result<(CVec, f64, Stats), Failure>
where
    F: Fn(f64) -> CMat,
{
    let span = s1 - s0;
    let mut stats = Stats::default();
    if span == 0.0 {
        return Ok((y0.clone(), h_hint.unwrap_or(0.0), stats));
    }
    let dir = span.signum();
    let mut s = s0;
    // The system is linear, so the state is kept near unit size and the
    // magnitude carried separately as a logarithm.
    let first = vmax_abs(y0);
    if first == 0.0 {
        return Ok((y0.clone(), h_hint.unwrap_or(span.abs()), stats));
    }
    let mut log_scale = first.ln();
    let mut y = y0.map(|z| z.unscale(first));
    let mut h = h_hint.map(|v| v.abs()).unwrap_or_else(|| {
        let nb = b(s0).norm().max(1e-300);
        (0.1 * tol.powf(0.2) / nb).min(span.abs())
    });
    h = h.max(span.abs() * 1e-12).min(span.abs());
    let mut k1 = &b(s) * &y;
    let hmin = span.abs() * 1e-13;
    loop {
        let remaining = (s1 - s) * dir;
        if remaining <= 0.0 {
            break;
        }
        let mut last = false;
        if h >= remaining {
            h = remaining;
            last = true;
        }
        let hs = h * dir;
        let mut k = [k1.clone(), k1.clone(), k1.clone(), k1.clone(), k1.clone(), k1.clone(), k1.clone()];
        for st in 1..7 {
            let mut yi = y.clone();
            for (j, kj) in k.iter().enumerate().take(st) {
                let a = A[st][j];
                if a != 0.0 {
                    yi += kj * C64::new(a * hs, 0.0);
                }
            }
            k[st] = &b(s + C[st] * hs) * &yi;
        }
        let mut y5 = y.clone();
        let mut err = CVec::zeros(y.len());
        for j in 0..7 {
            if B5[j] != 0.0 {
                y5 += &k[j] * C64::new(B5[j] * hs, 0.0);
            }
            let d = B5[j] - B4[j];
            if d != 0.0 {
                err += &k[j] * C64::new(d * hs, 0.0);
            }
        }
        let scale = y.norm().max(y5.norm());
        let e = err.norm() / (tol * scale);
        if e <= 1.0 {
            s = if last { s1 } else { s + hs };
            y = y5;
            k1 = k[6].clone();
            let size = vmax_abs(&y);
            if !(1e-50..=1e50).contains(&size) && size > 0.0 {
                y.apply(|z| *z = z.unscale(size));
                k1.apply(|z| *z = z.unscale(size));
                log_scale += size.ln();
            }
            stats.accepted += 1;
            let fac = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
            if last {
                return Ok((y.map(|z| z.scale(log_scale.exp())), h * fac, stats));
            }
            h *= fac;
        } else {
            stats.rejected += 1;
            let fac = if e.is_finite() { (0.9 * e.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h *= fac;
            if h < hmin || stats.rejected > 200_000 {
                return Err(Failure { s });
            }
        }
        if stats.accepted > 5_000_000 {
            return Err(Failure { s });
        }
    }
    Ok((y.map(|z| z.scale(log_scale.exp())), h, stats))
}

//! Three-stage Radau IIA for stiff linear systems `y' = K(t) y`, with
//! step-doubling error control. Used only in the far field, where the
//! normalized system has eigenvalues of size `x^{M+1}`.

use super::rk::Failure;
use crate::linalg::{CMat, CVec, C64};

fn coefficients() -> ([f64; 3], [[f64; 3]; 3]) {
    let s6 = 6f64.sqrt();
    let c = [(4.0 - s6) / 10.0, (4.0 + s6) / 10.0, 1.0];
    let a = [
        [(88.0 - 7.0 * s6) / 360.0, (296.0 - 169.0 * s6) / 1800.0, (-2.0 + 3.0 * s6) / 225.0],
        [(296.0 + 169.0 * s6) / 1800.0, (88.0 + 7.0 * s6) / 360.0, (-2.0 - 3.0 * s6) / 225.0],
        [(16.0 - s6) / 36.0, (16.0 + s6) / 36.0, 1.0 / 9.0],
    ];
    (c, a)
}

fn step<F: Fn(f64) -> CMat>(k: &F, t: f64, y: &CVec, h: f64) -> Option<CVec> {
    let (c, a) = coefficients();
    let d = y.len();
    let ms: Vec<CMat> = c.iter().map(|ci| k(t + ci * h)).collect();
    let mut big = CMat::identity(3 * d, 3 * d);
    for i in 0..3 {
        for j in 0..3 {
            let blk = &ms[j] * C64::new(h * a[i][j], 0.0);
            let mut view = big.view_mut((i * d, j * d), (d, d));
            view -= blk;
        }
    }
    let mut rhs = CVec::zeros(3 * d);
    for i in 0..3 {
        rhs.rows_mut(i * d, d).copy_from(y);
    }
    let sol = big.lu().solve(&rhs)?;
    Some(sol.rows(2 * d, d).into_owned())
}

/// Integrate from `t0` to `t1`; returns the endpoint and the number of
/// accepted steps.
pub(crate) fn integrate<F: Fn(f64) -> CMat>(k: F, t0: f64, t1: f64, y0: &CVec, tol: f64) -> Result<(CVec, usize), Failure> {
    let span = t1 - t0;
    if span == 0.0 {
        return Ok((y0.clone(), 0));
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0.clone();
    let mut h = span.abs() * 0.01;
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    while (t1 - t) * dir > 0.0 {
        let mut last = false;
        if h >= (t1 - t).abs() {
            h = (t1 - t).abs();
            last = true;
        }
        let hs = h * dir;
        let full = step(&k, t, &y, hs);
        let half = step(&k, t, &y, hs / 2.0).and_then(|m| step(&k, t + hs / 2.0, &m, hs / 2.0));
        let (y1, y2) = match (full, half) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Failure { s: t }),
        };
        let err = (&y1 - &y2).norm() / y2.norm().max(1e-300) / 31.0;
        if err <= tol {
            t = if last { t1 } else { t + hs };
            y = &y2 + (&y2 - &y1) / C64::new(31.0, 0.0);
            accepted += 1;
        } else {
            rejected += 1;
            if rejected > 100_000 || h < span.abs() * 1e-14 {
                return Err(Failure { s: t });
            }
        }
        let fac = if err > 0.0 { 0.9 * (tol / err).powf(1.0 / 6.0) } else { 4.0 };
        h *= fac.clamp(0.2, 4.0);
    }
    Ok((y, accepted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cr};

    #[test]
    fn stiff_decay_to_quasi_static() {
        // One fast decaying mode and one neutral mode.
        let k = |_t: f64| CMat::from_row_slice(2, 2, &[cr(-1e6), cr(0.0), cr(0.0), cr(0.0)]);
        let y0 = CVec::from_vec(vec![cr(0.0), cr(1.0)]);
        let (y, n) = integrate(k, 0.0, 1.0, &y0, 1e-12).unwrap();
        assert!(y[0].norm() < 1e-12);
        assert!((y[1] - cr(1.0)).norm() < 1e-12);
        assert!(n < 200);
    }

    #[test]
    fn oscillator() {
        let k = |_t: f64| CMat::from_element(1, 1, c(0.0, 3.0));
        let y0 = CVec::from_element(1, cr(1.0));
        let (y, _) = integrate(k, 0.0, 2.0, &y0, 1e-12).unwrap();
        assert!((y[0] - c(0.0, 6.0).exp()).norm() < 1e-9);
    }
}

//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Lanczos approximation of Γ on the real line.
pub fn gamma(x: f64) -> f64 {
    const P: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = P[0];
    for (i, p) in P.iter().enumerate().skip(1) {
        a += p / (x + i as f64);
    }
    let t = x + 7.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// Parabolic cylinder function `U(a, z)` and its derivative, from the
/// Taylor series of `w'' = (z²/4 + a) w` at the origin.
pub fn pcf_u(a: f64, z: C64) -> (C64, C64) {
    let u0 = PI.sqrt() / (2f64.powf(a / 2.0 + 0.25) * gamma(0.75 + a / 2.0));
    let u1 = -PI.sqrt() / (2f64.powf(a / 2.0 - 0.25) * gamma(0.25 + a / 2.0));
    let series = |b0: f64, b1: f64| {
        let mut b = vec![b0, b1];
        let mut w = C64::new(0.0, 0.0);
        let mut dw = C64::new(0.0, 0.0);
        let mut zn = C64::new(1.0, 0.0);
        for n in 0..400usize {
            if n >= 2 {
                let prev2 = if n >= 4 { b[n - 4] } else { 0.0 };
                let v = (a * b[n - 2] + prev2 / 4.0) / (n as f64 * (n as f64 - 1.0));
                b.push(v);
            }
            if n >= 1 {
                dw += zn / z * (b[n] * n as f64);
            }
            w += zn * b[n];
            zn *= z;
        }
        (w, dw)
    };
    let (we, dwe) = series(1.0, 0.0);
    let (wo, dwo) = series(0.0, 1.0);
    (we * u0 + wo * u1, dwe * u0 + dwo * u1)
}

/// `A₁`, `M = 1`, `ℓ = 0`: the components of the subdominant solution
/// normalized by `ψ = (1,1)/√2` are `Ψ₁ = 2^{−(1+E)/4} U(−E/2, √2 x)` and
/// `Ψ₂ = −Ψ₁'`.
pub fn a1_harmonic(e: f64, x: C64) -> [C64; 2] {
    let s2 = 2f64.sqrt();
    let norm = 2f64.powf(-(1.0 + e) / 4.0);
    let (u, du) = pcf_u(-e / 2.0, x * s2);
    [u * norm, -du * norm * s2]
}

pub fn rel(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
    num / den
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Regular solution of `ψ'' = (ℓ(ℓ+1)/x² + x^{2M} − E)ψ` by a Frobenius
/// start at small x and fixed-step RK4; returns `ψ(x_max)`.
pub fn shoot(ell: f64, two_m: usize, e: f64, x_max: f64) -> f64 {
    let x0: f64 = 0.05;
    let mut a = vec![1.0];
    for k in 1..16usize {
        let mut v = 0.0;
        if k >= 2 {
            v -= e * a[k - 2];
        }
        if k >= two_m + 2 {
            v += a[k - two_m - 2];
        }
        a.push(v / (k as f64 * (k as f64 + 2.0 * ell + 1.0)));
    }
    let (mut y, mut dy) = (0.0, 0.0);
    for (k, ak) in a.iter().enumerate() {
        let p = k as f64 + ell + 1.0;
        y += ak * x0.powf(p);
        dy += ak * p * x0.powf(p - 1.0);
    }
    let f = |x: f64, y: f64| (ell * (ell + 1.0) / (x * x) + x.powi(two_m as i32) - e) * y;
    let n = ((x_max - x0) / 1e-3).ceil() as usize;
    let h = (x_max - x0) / n as f64;
    let mut x = x0;
    for _ in 0..n {
        let (k1y, k1v) = (dy, f(x, y));
        let (k2y, k2v) = (dy + 0.5 * h * k1v, f(x + 0.5 * h, y + 0.5 * h * k1y));
        let (k3y, k3v) = (dy + 0.5 * h * k2v, f(x + 0.5 * h, y + 0.5 * h * k2y));
        let (k4y, k4v) = (dy + h * k3v, f(x + h, y + h * k3y));
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        dy += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        x += h;
        let s = y.abs().max(dy.abs());
        if s > 1e100 {
            y /= s;
            dy /= s;
        }
    }
    y
}

/// First `count` Dirichlet eigenvalues by scanning and bisection.
pub fn shooting_eigenvalues(ell: f64, two_m: usize, count: usize) -> Vec<f64> {
    let m = two_m as f64 / 2.0;
    let boundary = |e: f64| 1.5 * e.max(1.0).powf(1.0 / (2.0 * m)) + 4.0;
    let mut out = Vec::new();
    let mut e0 = 0.0;
    let x_top = boundary(80.0);
    let mut f0 = shoot(ell, two_m, e0, x_top);
    while out.len() < count {
        let e1 = e0 + 0.25;
        let f1 = shoot(ell, two_m, e1, x_top);
        if f0.signum() != f1.signum() {
            let (mut lo, mut hi, mut flo) = (e0, e1, f0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let fm = shoot(ell, two_m, mid, x_top);
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        e0 = e1;
        f0 = f1;
    }
    out
}

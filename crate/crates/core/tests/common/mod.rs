//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Adaptive Simpson quadrature with Richardson correction.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    // Each node is (abscissa, value); `whole` is Simpson's rule on [a, b].
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        lo: (f64, f64),
        mid: (f64, f64),
        hi: (f64, f64),
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let lm = 0.5 * (lo.0 + mid.0);
        let rm = 0.5 * (mid.0 + hi.0);
        let (lm, rm) = ((lm, f(lm)), (rm, f(rm)));
        let left = (mid.0 - lo.0) / 6.0 * (lo.1 + 4.0 * lm.1 + mid.1);
        let right = (hi.0 - mid.0) / 6.0 * (mid.1 + 4.0 * rm.1 + hi.1);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, lo, lm, mid, left, 0.5 * tol, depth - 1)
            + step(f, mid, rm, hi, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (lo, mid, hi) = ((a, f(a)), (m, f(m)), (b, f(b)));
    let whole = (b - a) / 6.0 * (lo.1 + 4.0 * mid.1 + hi.1);
    step(f, lo, mid, hi, whole, tol, 50)
}

pub fn elliptic_f_oracle(phi: f64, k: f64) -> f64 {
    simpson(
        &|t: f64| 1.0 / (1.0 - (k * t.sin()).powi(2)).sqrt(),
        0.0,
        phi,
        1e-15,
    )
}

pub fn elliptic_e_oracle(phi: f64, k: f64) -> f64 {
    simpson(
        &|t: f64| (1.0 - (k * t.sin()).powi(2)).sqrt(),
        0.0,
        phi,
        1e-15,
    )
}

/// Five-point central difference with one Richardson step (`h`, `h/2`).
pub fn richardson_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d =
        |h: f64| (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
    let (coarse, fine) = (d(h), d(0.5 * h));
    (16.0 * fine - coarse) / 15.0
}

/// Deterministic uniform numbers in `[0, 1)` (64-bit LCG, fixed seed).
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg(seed)
    }

    pub fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Signed difference `a − b` reduced into `[−period/2, period/2)`.
pub fn wrapped_diff(a: f64, b: f64, period: f64) -> f64 {
    (a - b + 0.5 * period).rem_euclid(period) - 0.5 * period
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let lx: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Angles of the regular `q`-gon starting at 0.
pub fn regular_polygon(q: usize) -> Vec<f64> {
    (0..q).map(|k| 2.0 * PI * k as f64 / q as f64).collect()
}

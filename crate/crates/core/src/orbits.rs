//! Maximal symmetric `1/q`-periodic orbits of the elliptic billiard.
//!
//! Two independent constructions:
//!
//! * [`orbit_from_caustic`] inverts the action coordinate on the caustic
//!   whose rotation number is exactly `1/q`;
//! * [`orbit_variational`] maximizes the perimeter of symmetric inscribed
//!   `q`-gons pinned at the marked point, by Newton's method started from the
//!   regular polygon.
//!
//! All orbits are pinned at the marked point `φ₀ = 0` and run
//! counterclockwise, so `φ_k ∈ [0, 2π)` increases with `k`.

use serde::{Deserialize, Serialize};

use crate::elliptic::{complete_k, jacobi_am};
use crate::error::{Error, Result};
use crate::geometry::EllipseParams;
use crate::lazutkin::lazutkin_x;
use crate::roots::bisect;
use crate::scalar::Real;

/// How the vertex angle is read off the inverted action coordinate
/// `u_k = K(k_λ)(1 − 4k/q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convention {
    /// `φ_k = am(u_k, k_λ)`.
    A,
    /// `φ_k = π/2 − am(u_k, k_λ)`, the inverse of the action coordinate.
    B,
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Convention::A => f.write_str("A"),
            Convention::B => f.write_str("B"),
        }
    }
}

/// A periodic orbit with its vertices in elliptic, Lazutkin and
/// reflection-angle coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CausticOrbit<T> {
    pub q: usize,
    pub ellipse: EllipseParams<T>,
    pub convention: Convention,
    /// Caustic parameter; for variational orbits it is recovered from the
    /// first chord through `λ = sin θ₀ · √Â(φ₀)`.
    pub lambda_q: T,
    pub phi: Vec<T>,
    /// Lazutkin coordinates in `[0, 1)`.
    pub x: Vec<T>,
    /// Angle between outgoing chord and boundary tangent at each vertex.
    pub theta: Vec<T>,
    /// Largest distance between a vertex and the exact billiard image of the
    /// two preceding vertices.
    pub closure_residual: T,
}

fn check_period(q: usize, op: &'static str) -> Result<()> {
    if q < 3 {
        Err(Error::domain(op, format!("period q = {q} below 3")))
    } else {
        Ok(())
    }
}

/// The caustic parameter `λ_q ∈ (0, b)` with rotation number `ω = 1/q`.
///
/// Bisection on the monotone map `λ ↦ ω_λ`, then one Newton step with a
/// finite-difference slope, kept only if it lowers the residual.
pub fn solve_lambda_q<T: Real>(q: usize, ellipse: &EllipseParams<T>) -> Result<T> {
    check_period(q, "solve_lambda_q")?;
    let target = T::one() / T::from_count(q);
    let omega = |lam: T| -> T {
        ellipse
            .caustic_params(lam)
            .map(|c| c.omega_lambda)
            .unwrap_or(T::nan())
    };
    let resid = |lam: T| omega(lam) - target;
    let eps = ellipse.b * T::lit(1e-12);
    let xtol = T::epsilon() * ellipse.b * T::lit(4.0);
    let mut lam = bisect("solve_lambda_q", resid, eps, ellipse.b - eps, xtol)?;
    let r0 = resid(lam);
    let h = lam * T::lit(1e-6);
    let slope = (omega(lam + h) - omega(lam - h)) / (h + h);
    if slope > T::zero() {
        let polished = lam - r0 / slope;
        if polished > T::zero() && polished < ellipse.b && resid(polished).abs() < r0.abs() {
            lam = polished;
        }
    }
    Ok(lam)
}

fn wrapped_next<T: Real>(phi: &[T], k: usize) -> T {
    let q = phi.len();
    if k + 1 < q {
        phi[k + 1]
    } else {
        phi[0] + T::PI() + T::PI()
    }
}

/// Reflection angles, Lazutkin coordinates and closure residual for a
/// vertex list.
fn finish_orbit<T: Real>(
    q: usize,
    ellipse: &EllipseParams<T>,
    convention: Convention,
    lambda_q: T,
    phi: Vec<T>,
) -> Result<CausticOrbit<T>> {
    let x = phi.iter().map(|&p| lazutkin_x(p, ellipse)).collect();
    let theta = (0..q)
        .map(|k| {
            ellipse
                .reflection_sin(phi[k], wrapped_next(&phi, k))
                .map(|s| s.asin())
        })
        .collect::<Result<Vec<T>>>()?;
    let closure_residual = closure_residual(&phi, ellipse);
    Ok(CausticOrbit {
        q,
        ellipse: *ellipse,
        convention,
        lambda_q,
        phi,
        x,
        theta,
        closure_residual,
    })
}

/// Max over vertices of `‖step(P_{k−1}, P_k) − P_{k+1}‖`.
pub fn closure_residual<T: Real>(phi: &[T], ellipse: &EllipseParams<T>) -> T {
    let q = phi.len();
    let pts: Vec<_> = phi.iter().map(|&p| ellipse.boundary_point(p)).collect();
    (0..q)
        .map(|k| {
            let prev = pts[(k + q - 1) % q];
            let next = ellipse.billiard_step(prev, pts[k]);
            next.distance(pts[(k + 1) % q])
        })
        .fold(T::zero(), |acc, d| if d.is_nan() { d } else { acc.max(d) })
}

/// Orbit built on the caustic with rotation number `1/q`.
pub fn orbit_from_caustic<T: Real>(
    q: usize,
    ellipse: &EllipseParams<T>,
    convention: Convention,
) -> Result<CausticOrbit<T>> {
    check_period(q, "orbit_from_caustic")?;
    let lambda_q = solve_lambda_q(q, ellipse)?;
    let k_lambda = ellipse.caustic_modulus(lambda_q)?;
    let kk = complete_k(k_lambda);
    let qf = T::from_count(q);
    let four = T::lit(4.0);
    let phi = (0..q)
        .map(|k| {
            if k == 0 {
                return match convention {
                    Convention::A => T::FRAC_PI_2(),
                    Convention::B => T::zero(),
                };
            }
            let u = kk * (T::one() - four * T::from_count(k) / qf);
            let am = jacobi_am(u, k_lambda);
            match convention {
                Convention::A => am,
                Convention::B => T::FRAC_PI_2() - am,
            }
        })
        .collect();
    finish_orbit(q, ellipse, convention, lambda_q, phi)
}

/// Partial derivatives of the chord length `L(a, b)`.
struct ChordDerivatives<T> {
    la: T,
    lb: T,
    laa: T,
    lab: T,
    lbb: T,
}

fn chord_derivatives<T: Real>(ellipse: &EllipseParams<T>, a: T, b: T) -> ChordDerivatives<T> {
    let delta = ellipse.boundary_point(a) - ellipse.boundary_point(b);
    let len = delta.norm();
    let ta = ellipse.tangent(a);
    let tb = ellipse.tangent(b);
    // γ″ = −γ for this parametrization.
    let aa = ellipse.boundary_point(a);
    let bb = ellipse.boundary_point(b);
    let la = delta.dot(ta) / len;
    let lb = -delta.dot(tb) / len;
    let laa = (ta.dot(ta) - delta.dot(aa)) / len - la * la / len;
    let lbb = (tb.dot(tb) + delta.dot(bb)) / len - lb * lb / len;
    let lab = -ta.dot(tb) / len - la * lb / len;
    ChordDerivatives {
        la,
        lb,
        laa,
        lab,
        lbb,
    }
}

/// Half the perimeter of the symmetric polygon with free vertices `v`,
/// with its gradient and tridiagonal Hessian `(diag, off)`.
fn reduced_objective<T: Real>(
    q: usize,
    ellipse: &EllipseParams<T>,
    v: &[T],
) -> (T, Vec<T>, Vec<T>, Vec<T>) {
    let m = v.len();
    let half = T::lit(0.5);
    let mut chain = Vec::with_capacity(m + 2);
    chain.push(T::zero());
    chain.extend_from_slice(v);
    let even = q.is_multiple_of(2);
    if even {
        chain.push(T::PI());
    }
    let mut value = T::zero();
    let mut grad = vec![T::zero(); m];
    let mut diag = vec![T::zero(); m];
    let mut off = vec![T::zero(); m.saturating_sub(1)];
    for i in 0..chain.len() - 1 {
        let (a, b) = (chain[i], chain[i + 1]);
        value = value + ellipse.chord_length(a, b);
        let d = chord_derivatives(ellipse, a, b);
        // Chain index i is free vertex i−1; index 0 and the even endpoint are pinned.
        if (1..=m).contains(&i) {
            grad[i - 1] = grad[i - 1] + d.la;
            diag[i - 1] = diag[i - 1] + d.laa;
        }
        if i < m {
            grad[i] = grad[i] + d.lb;
            diag[i] = diag[i] + d.lbb;
        }
        if i >= 1 && i < m {
            off[i - 1] = off[i - 1] + d.lab;
        }
    }
    if !even {
        // Central chord between v_m and its mirror 2π − v_m.
        let a = v[m - 1];
        let b = T::PI() + T::PI() - a;
        value = value + half * ellipse.chord_length(a, b);
        let d = chord_derivatives(ellipse, a, b);
        grad[m - 1] = grad[m - 1] + half * (d.la - d.lb);
        diag[m - 1] = diag[m - 1] + half * (d.laa - (d.lab + d.lab) + d.lbb);
    }
    (value, grad, diag, off)
}

/// `LDLᵀ` of a symmetric tridiagonal matrix; returns the pivots.
fn ldl_pivots<T: Real>(diag: &[T], off: &[T]) -> Vec<T> {
    let mut d = Vec::with_capacity(diag.len());
    for i in 0..diag.len() {
        let di = if i == 0 {
            diag[0]
        } else {
            diag[i] - off[i - 1] * off[i - 1] / d[i - 1]
        };
        d.push(di);
    }
    d
}

/// Solves `(tridiag) x = rhs` by the Thomas algorithm.
fn solve_tridiagonal<T: Real>(diag: &[T], off: &[T], rhs: &[T]) -> Vec<T> {
    let n = diag.len();
    let mut c = vec![T::zero(); n];
    let mut d = vec![T::zero(); n];
    let mut beta = diag[0];
    d[0] = rhs[0] / beta;
    for i in 1..n {
        c[i - 1] = off[i - 1] / beta;
        beta = diag[i] - off[i - 1] * c[i - 1];
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        d[i] = d[i] - c[i] * d[i + 1];
    }
    d
}

const MAX_NEWTON: usize = 200;

/// Maximal symmetric orbit by maximizing the polygon perimeter.
///
/// Free unknowns are `φ₁ … φ_m`, `m = ⌊(q−1)/2⌋`; the rest follow from
/// `φ_{q−k} = 2π − φ_k` (and `φ_{q/2} = π` for even `q`). Steps are damped
/// Newton steps on a Levenberg-shifted Hessian with backtracking on the
/// perimeter. The converged point must have a negative definite reduced
/// Hessian, otherwise [`Error::Saddle`] is returned.
pub fn orbit_variational<T: Real>(q: usize, ellipse: &EllipseParams<T>) -> Result<CausticOrbit<T>> {
    check_period(q, "orbit_variational")?;
    let m = (q - 1) / 2;
    let two_pi = T::PI() + T::PI();
    let qf = T::from_count(q);
    let mut v: Vec<T> = (1..=m).map(|j| two_pi * T::from_count(j) / qf).collect();
    let gtol = T::epsilon() * T::lit(32.0);
    let mut converged = false;
    let mut last_gnorm = T::infinity();
    for _ in 0..MAX_NEWTON {
        let (value, grad, diag, off) = reduced_objective(q, ellipse, &v);
        let gnorm = grad.iter().fold(T::zero(), |acc, g| acc.max(g.abs()));
        last_gnorm = gnorm;
        if gnorm <= gtol {
            converged = true;
            break;
        }
        let mut shift = T::zero();
        let mut shifted = diag.clone();
        let scale = diag.iter().fold(T::zero(), |acc, d| acc.max(d.abs()));
        loop {
            for (s, d) in shifted.iter_mut().zip(&diag) {
                *s = *d - shift;
            }
            if ldl_pivots(&shifted, &off).iter().all(|&p| p < T::zero()) {
                break;
            }
            shift = if shift == T::zero() {
                scale * T::lit(1e-3)
            } else {
                shift * T::lit(4.0)
            };
        }
        let neg: Vec<T> = grad.iter().map(|&g| -g).collect();
        let step = solve_tridiagonal(&shifted, &off, &neg);
        let mut t = T::one();
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<T> = v.iter().zip(&step).map(|(&a, &s)| a + t * s).collect();
            let ordered = trial.windows(2).all(|w| w[1] > w[0])
                && trial[0] > T::zero()
                && trial[m - 1] < T::PI();
            if ordered {
                let (tv, _, _, _) = reduced_objective(q, ellipse, &trial);
                // Near the optimum rounding swamps the change in value.
                let slack = T::epsilon() * T::lit(64.0) * value.abs();
                if tv >= value - slack {
                    v = trial;
                    accepted = true;
                    break;
                }
            }
            t = t * T::lit(0.5);
        }
        if !accepted {
            break;
        }
        let snorm = step.iter().fold(T::zero(), |acc, s| acc.max(s.abs())) * t;
        if snorm <= T::epsilon() * T::lit(4.0) {
            let (_, grad, _, _) = reduced_objective(q, ellipse, &v);
            last_gnorm = grad.iter().fold(T::zero(), |acc, g| acc.max(g.abs()));
            converged = last_gnorm <= gtol * T::lit(1e3);
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            op: "orbit_variational",
            iterations: MAX_NEWTON,
            residual: last_gnorm.as_f64(),
        });
    }
    let (_, _, diag, off) = reduced_objective(q, ellipse, &v);
    if let Some((index, &pivot)) = ldl_pivots(&diag, &off)
        .iter()
        .enumerate()
        .find(|(_, &p)| p >= T::zero())
    {
        return Err(Error::Saddle {
            q,
            index,
            pivot: pivot.as_f64(),
        });
    }
    let mut phi = vec![T::zero(); q];
    for (j, &a) in v.iter().enumerate() {
        phi[j + 1] = a;
        phi[q - 1 - j] = two_pi - a;
    }
    if q.is_multiple_of(2) {
        phi[q / 2] = T::PI();
    }
    let sin0 = ellipse.reflection_sin(phi[0], phi[1])?;
    let (s, c) = phi[0].sin_cos();
    let a_hat = s * s + ellipse.b * ellipse.b * c * c;
    let lambda_q = sin0 * a_hat.sqrt();
    finish_orbit(q, ellipse, Convention::B, lambda_q, phi)
}

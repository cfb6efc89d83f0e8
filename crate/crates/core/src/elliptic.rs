//! Elliptic integrals and Jacobi elliptic functions for real arguments.
//!
//! Conventions follow the modulus `k` (not the parameter `m = k²`):
//!
//! ```text
//! F(φ, k) = ∫₀^φ dτ / √(1 − k² sin²τ)        K(k) = F(π/2, k)
//! E(φ, k) = ∫₀^φ √(1 − k² sin²τ) dτ          E(k) = E(π/2, k)
//! am(u, k) = φ  ⇔  F(φ, k) = u
//! sn = sin am,  cn = cos am,  dn = ∂ᵤ am = √(1 − k² sn²)
//! ```
//!
//! Complete integrals use the arithmetic-geometric mean; incomplete
//! integrals use Carlson's symmetric forms `R_F` and `R_D` on the reduced
//! range `|φ| ≤ π/2`, extended to every real `φ` by
//! `F(φ + nπ) = F(φ) + 2nK` (same for `E`).

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Elliptic modulus `k ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Modulus<T>(T);

impl<T: Real> Modulus<T> {
    pub fn new(k: T) -> Result<Self> {
        if k.is_finite() && k >= T::zero() && k < T::one() {
            Ok(Modulus(k))
        } else {
            Err(Error::domain(
                "modulus",
                format!("k = {} outside [0, 1)", k.as_f64()),
            ))
        }
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }

    /// Complementary modulus `√(1 − k²)`.
    #[inline]
    pub fn complement(self) -> T {
        ((T::one() - self.0) * (T::one() + self.0)).sqrt()
    }
}

/// `(am, sn, cn, dn)` at `(u, k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTriple<T> {
    pub u: T,
    pub k: Modulus<T>,
    pub am: T,
    pub sn: T,
    pub cn: T,
    pub dn: T,
}

/// Carlson's symmetric integral of the first kind
/// `R_F(x, y, z) = ½ ∫₀^∞ dt / √((t+x)(t+y)(t+z))`.
///
/// Requires nonnegative arguments with at most one of them zero.
pub fn carlson_rf<T: Real>(x: T, y: T, z: T) -> T {
    let three = T::lit(3.0);
    let quarter = T::lit(0.25);
    let a0 = (x + y + z) / three;
    let mut q = (three * T::epsilon()).powf(T::lit(-1.0 / 6.0))
        * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs());
    let (x0, y0) = (x, y);
    let (mut x, mut y, mut z, mut a) = (x, y, z, a0);
    let mut scale = T::one();
    for _ in 0..200 {
        if q < a.abs() {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sy * sz + sz * sx;
        x = (x + lam) * quarter;
        y = (y + lam) * quarter;
        z = (z + lam) * quarter;
        a = (a + lam) * quarter;
        q = q * quarter;
        scale = scale * quarter;
    }
    let xx = (a0 - x0) * scale / a;
    let yy = (a0 - y0) * scale / a;
    let zz = -(xx + yy);
    let e2 = xx * yy - zz * zz;
    let e3 = xx * yy * zz;
    let series = T::one() - e2 / T::lit(10.0) + e3 / T::lit(14.0) + e2 * e2 / T::lit(24.0)
        - T::lit(3.0) * e2 * e3 / T::lit(44.0);
    series / a.sqrt()
}

/// Carlson's degenerate integral of the second kind
/// `R_D(x, y, z) = (3/2) ∫₀^∞ dt / ((t+z) √((t+x)(t+y)(t+z)))`.
pub fn carlson_rd<T: Real>(x: T, y: T, z: T) -> T {
    let three = T::lit(3.0);
    let quarter = T::lit(0.25);
    let a0 = (x + y + three * z) / T::lit(5.0);
    let mut q = (T::epsilon() / T::lit(4.0)).powf(T::lit(-1.0 / 6.0))
        * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs());
    let (x0, y0) = (x, y);
    let (mut x, mut y, mut z, mut a) = (x, y, z, a0);
    let mut scale = T::one();
    let mut sum = T::zero();
    for _ in 0..200 {
        if q < a.abs() {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sy * sz + sz * sx;
        sum = sum + scale / (sz * (z + lam));
        x = (x + lam) * quarter;
        y = (y + lam) * quarter;
        z = (z + lam) * quarter;
        a = (a + lam) * quarter;
        q = q * quarter;
        scale = scale * quarter;
    }
    let xx = (a0 - x0) * scale / a;
    let yy = (a0 - y0) * scale / a;
    let zz = -(xx + yy) / three;
    let xy = xx * yy;
    let z2 = zz * zz;
    let e2 = xy - T::lit(6.0) * z2;
    let e3 = (three * xy - T::lit(8.0) * z2) * zz;
    let e4 = three * (xy - z2) * z2;
    let e5 = xy * z2 * zz;
    let series =
        T::one() - T::lit(3.0 / 14.0) * e2 + e3 / T::lit(6.0) + T::lit(9.0 / 88.0) * e2 * e2
            - T::lit(3.0 / 22.0) * e4
            - T::lit(9.0 / 52.0) * e2 * e3
            + T::lit(3.0 / 26.0) * e5;
    scale * series / (a * a.sqrt()) + three * sum
}

/// Runs the AGM on `(1, k')`, returning `(agm, Σ 2^{n−1} c_n²)`.
fn agm_with_defect<T: Real>(k: Modulus<T>) -> (T, T) {
    let half = T::lit(0.5);
    let mut a = T::one();
    let mut b = k.complement();
    let mut c = k.value();
    let mut weight = half;
    let mut defect = weight * c * c;
    for _ in 0..64 {
        if (a - b).abs() <= T::epsilon() * a {
            break;
        }
        let an = (a + b) * half;
        c = (a - b) * half;
        b = (a * b).sqrt();
        a = an;
        weight = weight + weight;
        defect = defect + weight * c * c;
    }
    (a, defect)
}

/// Complete elliptic integral of the first kind `K(k)`.
pub fn complete_k<T: Real>(k: Modulus<T>) -> T {
    let (agm, _) = agm_with_defect(k);
    T::FRAC_PI_2() / agm
}

/// Complete elliptic integral of the second kind `E(k)`.
pub fn complete_e<T: Real>(k: Modulus<T>) -> T {
    let (agm, defect) = agm_with_defect(k);
    T::FRAC_PI_2() / agm * (T::one() - defect)
}

/// Splits `phi = n·π + r` with `r ∈ [−π/2, π/2]`.
fn reduce_angle<T: Real>(phi: T) -> (T, T) {
    let n = (phi / T::PI()).round();
    (n, phi - n * T::PI())
}

fn incomplete_f_reduced<T: Real>(phi: T, k: T) -> T {
    let (s, c) = phi.sin_cos();
    let ks = k * s;
    s * carlson_rf(c * c, (T::one() - ks) * (T::one() + ks), T::one())
}

fn incomplete_e_reduced<T: Real>(phi: T, k: T) -> T {
    let (s, c) = phi.sin_cos();
    let ks = k * s;
    let c2 = c * c;
    let delta2 = (T::one() - ks) * (T::one() + ks);
    s * carlson_rf(c2, delta2, T::one())
        - ks * ks * s / T::lit(3.0) * carlson_rd(c2, delta2, T::one())
}

/// Incomplete elliptic integral of the first kind `F(φ, k)` for any real `φ`.
pub fn incomplete_f<T: Real>(phi: T, k: Modulus<T>) -> T {
    let (n, r) = reduce_angle(phi);
    let base = incomplete_f_reduced(r, k.value());
    if n == T::zero() {
        base
    } else {
        base + (n + n) * complete_k(k)
    }
}

/// Incomplete elliptic integral of the second kind `E(φ, k)` for any real `φ`.
pub fn incomplete_e<T: Real>(phi: T, k: Modulus<T>) -> T {
    let (n, r) = reduce_angle(phi);
    let base = incomplete_e_reduced(r, k.value());
    if n == T::zero() {
        base
    } else {
        base + (n + n) * complete_e(k)
    }
}

/// Inverts `F(φ, k) = u` for `|u| ≤ K`, returning `φ ∈ [−π/2, π/2]`.
///
/// Newton steps inside a shrinking bracket; any step that would leave the
/// bracket is replaced by bisection.
fn am_reduced<T: Real>(u: T, k: Modulus<T>, big_k: T) -> T {
    let half_pi = T::FRAC_PI_2();
    if u >= big_k {
        return half_pi;
    }
    if u <= -big_k {
        return -half_pi;
    }
    let kv = k.value();
    let mut lo = -half_pi;
    let mut hi = half_pi;
    let mut phi = u * half_pi / big_k;
    let tol = T::lit(4.0) * T::epsilon();
    for _ in 0..100 {
        let resid = incomplete_f_reduced(phi, kv) - u;
        if resid == T::zero() {
            return phi;
        }
        if resid > T::zero() {
            hi = phi;
        } else {
            lo = phi;
        }
        let s = phi.sin();
        let dn = ((T::one() - kv * s) * (T::one() + kv * s)).sqrt();
        let mut next = phi - resid * dn;
        if !(next > lo && next < hi) {
            next = (lo + hi) * T::lit(0.5);
        }
        let step = (next - phi).abs();
        phi = next;
        if step <= tol * phi.abs().max(T::one()) {
            break;
        }
    }
    phi
}

/// Jacobi amplitude `am(u, k)` for any real `u`, using
/// `am(u + 2nK) = am(u) + nπ`.
pub fn jacobi_am<T: Real>(u: T, k: Modulus<T>) -> T {
    if k.value() == T::zero() {
        return u;
    }
    let big_k = complete_k(k);
    let n = (u / (big_k + big_k)).round();
    let r = u - n * (big_k + big_k);
    n * T::PI() + am_reduced(r, k, big_k)
}

/// `(am, sn, cn, dn)` at `(u, k)`; `dn` is the positive root.
pub fn jacobi_triple<T: Real>(u: T, k: Modulus<T>) -> JacobiTriple<T> {
    let am = jacobi_am(u, k);
    let (sn, cn) = am.sin_cos();
    let ks = k.value() * sn;
    let dn = ((T::one() - ks) * (T::one() + ks)).sqrt();
    JacobiTriple {
        u,
        k,
        am,
        sn,
        cn,
        dn,
    }
}

/// `dK/dk`.
///
/// Closed form `(E − (1−k²)K) / (k(1−k²))` away from zero; near zero the
/// numerator cancels to `O(k²)`, so the hypergeometric series is summed
/// term by term instead.
pub fn dk_dk<T: Real>(k: Modulus<T>) -> T {
    let kv = k.value();
    if kv < T::lit(1e-2) {
        // K = (π/2) Σ c_n k^{2n},  c_n = ((2n−1)!!/(2n)!!)²
        let k2 = kv * kv;
        let mut ratio = T::one();
        let mut power = kv;
        let mut sum = T::zero();
        for n in 1..40 {
            let nf = T::from_count(n);
            let f = (nf + nf - T::one()) / (nf + nf);
            ratio = ratio * f * f;
            let term = (nf + nf) * ratio * power;
            sum = sum + term;
            if term.abs() <= T::epsilon() * sum.abs() {
                break;
            }
            power = power * k2;
        }
        return T::FRAC_PI_2() * sum;
    }
    let kc2 = (T::one() - kv) * (T::one() + kv);
    (complete_e(k) - kc2 * complete_k(k)) / (kv * kc2)
}

/// Partial derivative of `am(u, k)` with respect to the modulus at fixed `u`.
///
/// Differentiating `F(am(u,k), k) = u` gives
///
/// ```text
/// ∂am/∂k = −[(E(am, k) − (1−k²)u)·dn − k²·sn·cn] / (k(1−k²))
/// ```
///
/// valid for every real `u` because `E(am, k)` is evaluated on the
/// unreduced amplitude. For `k < 1e−4` the leading term of the small-modulus
/// expansion `am = u − (k²/4)(u − sin u cos u) + O(k⁴)` is used instead.
pub fn d2_am<T: Real>(u: T, k: Modulus<T>) -> T {
    let kv = k.value();
    if kv < T::lit(1e-4) {
        let (s, c) = u.sin_cos();
        return -kv * T::lit(0.5) * (u - s * c);
    }
    let tr = jacobi_triple(u, k);
    let kc2 = (T::one() - kv) * (T::one() + kv);
    let e_am = incomplete_e(tr.am, k);
    -((e_am - kc2 * u) * tr.dn - kv * kv * tr.sn * tr.cn) / (kv * kc2)
}

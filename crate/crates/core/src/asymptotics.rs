//! Closed-form second-order asymptotics of maximal symmetric `1/q` orbits.
//!
//! With `ξ(t) = K(e)(1 − 4t)` and `K′ = dK/dk` the vertices of the orbit
//! satisfy, in Lazutkin coordinates,
//!
//! ```text
//! x_q^k = k/q + α(k/q)/q² + O(q⁻⁴)
//! θ_q^k = μ(x_q^k)/q · (1 + β(k/q)/q² + O(q⁻⁴))
//! ```
//!
//! [`alpha`] and [`beta`] evaluate the closed forms for these coefficients.
//! [`beta_caustic`] is a second closed form for the angle coefficient,
//! obtained from the exact caustic identity `sin θ = λ/√Â(φ)`; the
//! verification harness compares both against computed orbits.

use crate::elliptic::{complete_k, d2_am, dk_dk, jacobi_triple, JacobiTriple};
use crate::geometry::EllipseParams;
use crate::lazutkin::{chart_argument, lazutkin_weight, phi_of_x};
use crate::scalar::Real;

/// Quantities entering the small-chord expansion of `sin θ` at the
/// elliptic angle of a vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelperQuantities<T> {
    /// `Â = sin²φ + b² cos²φ`
    pub a_hat: T,
    /// `B̂ = sin φ cos φ`
    pub b_hat: T,
    /// `D̂ = cos²φ + b² sin²φ`
    pub d_hat: T,
    pub m1: T,
    pub m2: T,
    pub m3: T,
    pub n2: T,
    pub n3: T,
    /// `Ê₁ = M₃ − N₃ − N₂M₁² + N₂M₂ − M₂² + M₁²M₂`
    pub e1_hat: T,
}

impl<T: Real> HelperQuantities<T> {
    fn from_trig(sin_phi: T, cos_phi: T, ellipse: &EllipseParams<T>) -> Self {
        let b2 = ellipse.b * ellipse.b;
        let e2 = ellipse.e * ellipse.e;
        let (s2, c2) = (sin_phi * sin_phi, cos_phi * cos_phi);
        let a_hat = s2 + b2 * c2;
        let b_hat = sin_phi * cos_phi;
        let d_hat = c2 + b2 * s2;
        let third = T::one() / T::lit(3.0);
        let r = b_hat / a_hat;
        let m1 = r * e2;
        let m2 = d_hat / (T::lit(4.0) * a_hat) - third;
        let m3 = T::lit(2.0 / 45.0) - d_hat / (T::lit(24.0) * a_hat);
        let n2 = r * r * e2 * e2 / T::lit(4.0) - third;
        let n3 = T::lit(2.0 / 45.0) - r * r * e2 * e2 / T::lit(24.0);
        let m1sq = m1 * m1;
        let e1_hat = m3 - n3 - n2 * m1sq + n2 * m2 - m2 * m2 + m1sq * m2;
        HelperQuantities {
            a_hat,
            b_hat,
            d_hat,
            m1,
            m2,
            m3,
            n2,
            n3,
            e1_hat,
        }
    }

    /// `M₂ − N₂`, which equals `b²/(4Â²)`.
    pub fn m2_minus_n2(&self) -> T {
        self.m2 - self.n2
    }
}

fn triple_at<T: Real>(t: T, ellipse: &EllipseParams<T>) -> JacobiTriple<T> {
    jacobi_triple(chart_argument(t, ellipse), ellipse.modulus())
}

/// Helper quantities at Lazutkin position `t`, in Jacobi variables:
/// `sin φ = cn(ξ)`, `cos φ = sn(ξ)`.
pub fn helper_quantities<T: Real>(t: T, ellipse: &EllipseParams<T>) -> HelperQuantities<T> {
    let tr = triple_at(t, ellipse);
    HelperQuantities::from_trig(tr.cn, tr.sn, ellipse)
}

/// Helper quantities at `t` through the inverse chart `φ(t)` and plain
/// trigonometry.
pub fn helper_quantities_trig<T: Real>(t: T, ellipse: &EllipseParams<T>) -> HelperQuantities<T> {
    let (s, c) = phi_of_x(t, ellipse).sin_cos();
    HelperQuantities::from_trig(s, c, ellipse)
}

/// The expanded `sn/cn/dn` expression used inside [`beta`] for `Ê₁(t)`.
///
/// Its final product `e⁴ sn²cn²/(cn²+b²sn²) · [(sn²+b²cn²)/(4sn²cn²) − 1/3]`
/// is evaluated as `e⁴/(cn²+b²sn²) · [(sn²+b²cn²)/4 − sn²cn²/3]`, which has
/// no removable singularity at the vertices.
pub fn e1_hat_closed<T: Real>(t: T, ellipse: &EllipseParams<T>) -> T {
    let tr = triple_at(t, ellipse);
    e1_hat_from_triple(&tr, ellipse)
}

fn e1_hat_from_triple<T: Real>(tr: &JacobiTriple<T>, ellipse: &EllipseParams<T>) -> T {
    let b2 = ellipse.b * ellipse.b;
    let e4 = ellipse.e.powi(4);
    let (s2, c2) = (tr.sn * tr.sn, tr.cn * tr.cn);
    let den = c2 + b2 * s2;
    let num = s2 + b2 * c2;
    let third = T::one() / T::lit(3.0);
    let four = T::lit(4.0);
    let p = e4 * s2 * c2 / (den * den);
    let r = num / (four * den);
    p / T::lit(24.0)
        - num / (T::lit(24.0) * den)
        - (p - third) * (p - r + third)
        - (r - third) * (r - third)
        + e4 / den * (num / four - s2 * c2 * third)
}

/// Series `ω_λ ≈ λ/(2K√(1−e²)) · [1 + λ²(−eK′/(2K) + (1+e²)/(6(1−e²)))]`.
pub fn omega_series<T: Real>(lambda: T, ellipse: &EllipseParams<T>) -> T {
    let k = ellipse.modulus();
    let kk = complete_k(k);
    let dk = dk_dk(k);
    let (e, b) = (ellipse.e, ellipse.b);
    let two = T::lit(2.0);
    let coeff = -e * dk / (two * kk) + (T::one() + e * e) / (T::lit(6.0) * b * b);
    lambda / (two * kk * b) * (T::one() + lambda * lambda * coeff)
}

/// Series `λ_q ≈ (2K√(1−e²)/q) · (1 + (2K√(1−e²))²/q² · (eK′/(2K) − (1+e²)/(6(1−e²))))`.
pub fn lambda_q_series<T: Real>(q: usize, ellipse: &EllipseParams<T>) -> T {
    let k = ellipse.modulus();
    let kk = complete_k(k);
    let dk = dk_dk(k);
    let (e, b) = (ellipse.e, ellipse.b);
    let two = T::lit(2.0);
    let lead = two * kk * b;
    let qf = T::from_count(q);
    let coeff = e * dk / (two * kk) - (T::one() + e * e) / (T::lit(6.0) * b * b);
    lead / qf * (T::one() + lead * lead / (qf * qf) * coeff)
}

/// Position coefficient
/// `α(t) = −eK(1−e²)/(2√(1−e²sn²ξ)) · [(1−4t)K′ dn ξ + ∂₂am(ξ, e)]`.
///
/// 1-periodic and odd about `t = 0`; evaluated for any real `t`.
pub fn alpha<T: Real>(t: T, ellipse: &EllipseParams<T>) -> T {
    let k = ellipse.modulus();
    let kk = complete_k(k);
    let dk = dk_dk(k);
    let e = ellipse.e;
    let w = T::one() - T::lit(4.0) * t;
    let xi = kk * w;
    let tr = jacobi_triple(xi, k);
    let root = (T::one() - e * e * tr.sn * tr.sn).sqrt();
    let prefactor = -e * kk * ellipse.b * ellipse.b / (T::lit(2.0) * root);
    prefactor * (w * dk * tr.dn + d2_am(xi, k))
}

/// `dα/dt` by five-point central differences at steps `h` and `h/2`,
/// combined by Richardson extrapolation.
pub fn alpha_prime<T: Real>(t: T, ellipse: &EllipseParams<T>) -> T {
    alpha_prime_with_step(t, T::lit(1e-4), ellipse)
}

pub fn alpha_prime_with_step<T: Real>(t: T, h: T, ellipse: &EllipseParams<T>) -> T {
    let five_point = |h: T| {
        let f = |s: T| alpha(t + s, ellipse);
        (f(-h - h) - T::lit(8.0) * f(-h) + T::lit(8.0) * f(h) - f(h + h)) / (T::lit(12.0) * h)
    };
    let coarse = five_point(h);
    let fine = five_point(h * T::lit(0.5));
    (T::lit(16.0) * fine - coarse) / T::lit(15.0)
}

/// Angle coefficient in its expanded Jacobi form:
///
/// ```text
/// β(t) = α′(t) − (8K²e²/3)(cn² − sn²) + 16K²e⁴ sn²cn²/dn²
///        + 16K/(1−e²) · Ê₁(t) · dn⁵,        all at ξ = K(1−4t)
/// ```
///
/// with `Ê₁` from [`e1_hat_closed`].
pub fn beta<T: Real>(t: T, ellipse: &EllipseParams<T>) -> T {
    beta_with_alpha_prime(t, alpha_prime(t, ellipse), ellipse)
}

fn beta_with_alpha_prime<T: Real>(t: T, alpha_p: T, ellipse: &EllipseParams<T>) -> T {
    let kk = complete_k(ellipse.modulus());
    let tr = triple_at(t, ellipse);
    let e2 = ellipse.e * ellipse.e;
    let (s2, c2, dn) = (tr.sn * tr.sn, tr.cn * tr.cn, tr.dn);
    let e1 = e1_hat_from_triple(&tr, ellipse);
    let sixteen = T::lit(16.0);
    alpha_p - T::lit(8.0) * kk * kk * e2 / T::lit(3.0) * (c2 - s2)
        + sixteen * kk * kk * e2 * e2 * s2 * c2 / (dn * dn)
        + sixteen * kk / (T::one() - e2) * e1 * dn.powi(5)
}

/// Angle coefficient from the caustic identity.
///
/// Along a trajectory tangent to `C_λ`, `sin θ = λ/√Â(φ)` exactly, and the
/// same `√Â` is `dn(K(1−4x))`, so `qθ/μ(x) = (qλ/(2Kb))·(1 + λ²/(6Â) + O(λ⁴))`.
/// Substituting the series for `λ_q` gives
///
/// ```text
/// β(t) = (2Kb)² · [eK′/(2K) − (1+e²)/(6b²) + 1/(6 dn²(ξ))]
/// ```
pub fn beta_caustic<T: Real>(t: T, ellipse: &EllipseParams<T>) -> T {
    let k = ellipse.modulus();
    let kk = complete_k(k);
    let dk = dk_dk(k);
    let (e, b) = (ellipse.e, ellipse.b);
    let tr = triple_at(t, ellipse);
    let six = T::lit(6.0);
    let lead = T::lit(2.0) * kk * b;
    lead * lead
        * (e * dk / (T::lit(2.0) * kk) - (T::one() + e * e) / (six * b * b)
            + T::one() / (six * tr.dn * tr.dn))
}

/// All closed-form quantities at one Lazutkin position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticSample<T> {
    pub t: T,
    pub xi: T,
    pub alpha: T,
    pub alpha_prime: T,
    pub beta: T,
    pub e1_hat: T,
    pub mu: T,
}

pub fn sample<T: Real>(t: T, ellipse: &EllipseParams<T>) -> AsymptoticSample<T> {
    let alpha_p = alpha_prime(t, ellipse);
    AsymptoticSample {
        t,
        xi: chart_argument(t, ellipse),
        alpha: alpha(t, ellipse),
        alpha_prime: alpha_p,
        beta: beta_with_alpha_prime(t, alpha_p, ellipse),
        e1_hat: e1_hat_closed(t, ellipse),
        mu: lazutkin_weight(t, ellipse),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{complete_k, dk_dk};

    fn ell(e: f64) -> EllipseParams<f64> {
        EllipseParams::new(e).unwrap()
    }

    #[test]
    fn alpha_vanishes_at_vertices() {
        for e in [0.2, 0.5, 0.8] {
            let el = ell(e);
            for t in [0.0, 0.25, 0.5, 0.75] {
                assert!(alpha(t, &el).abs() < 1e-10, "e={e} t={t}");
            }
        }
    }

    #[test]
    fn alpha_periodic_and_odd() {
        let el = ell(0.6);
        for i in 0..32 {
            let t = i as f64 / 32.0 + 0.013;
            assert!((alpha(t, &el) - alpha(t + 1.0, &el)).abs() < 1e-12);
            assert!((alpha(t, &el) + alpha(-t, &el)).abs() < 1e-12);
        }
    }

    #[test]
    fn alpha_small_eccentricity() {
        let el = ell(1e-4);
        for i in 0..64 {
            assert!(alpha(i as f64 / 64.0, &el).abs() < 1e-3);
        }
    }

    #[test]
    fn alpha_prime_even_and_integrates_to_zero() {
        let el = ell(0.5);
        let n = 256;
        let mut sum = 0.0;
        for i in 0..n {
            let t = i as f64 / n as f64;
            let d = alpha_prime(t, &el);
            sum += d / n as f64;
            assert!((d - alpha_prime(1.0 - t, &el)).abs() < 1e-8);
        }
        assert!(sum.abs() < 1e-7);
    }

    #[test]
    fn central_difference_converges_at_second_order() {
        let el = ell(0.5);
        let t = 0.17;
        let exact = alpha_prime(t, &el);
        let err = |h: f64| ((alpha(t + h, &el) - alpha(t - h, &el)) / (2.0 * h) - exact).abs();
        let ratio = err(1e-2) / err(5e-3);
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
        let halved = alpha_prime_with_step(t, 5e-5, &el);
        assert!((halved - exact).abs() < 1e-8);
    }

    #[test]
    fn helper_identities() {
        for e in [0.2, 0.5, 0.8] {
            let el = ell(e);
            for i in 0..50 {
                let t = i as f64 / 50.0;
                let h = helper_quantities(t, &el);
                assert!((h.a_hat + h.d_hat - 1.0 - el.b * el.b).abs() < 1e-14);
                let expected = (1.0 - e * e) / (4.0 * h.a_hat * h.a_hat);
                assert!((h.m2_minus_n2() - expected).abs() < 1e-13);
                assert!((h.m2_minus_n2().sqrt() * 2.0 * h.a_hat - el.b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn helper_routes_agree() {
        let el = ell(0.5);
        for i in 0..64 {
            let t = i as f64 / 64.0 + 0.003;
            let a = helper_quantities(t, &el);
            let b = helper_quantities_trig(t, &el);
            assert!((a.e1_hat - b.e1_hat).abs() < 1e-12);
            assert!((a.m1 - b.m1).abs() < 1e-12);
            assert!((a.a_hat - b.a_hat).abs() < 1e-13);
        }
    }

    #[test]
    fn e1_forms_coincide_only_in_circle_limit() {
        let circle = ell(1e-6);
        for t in [0.1, 0.3, 0.6] {
            let defining = helper_quantities(t, &circle).e1_hat;
            assert!((defining - e1_hat_closed(t, &circle)).abs() < 1e-10);
            assert!((defining + 1.0 / 48.0).abs() < 1e-10);
        }
        let el = ell(0.5);
        let gap = (helper_quantities(0.1, &el).e1_hat - e1_hat_closed(0.1, &el)).abs();
        assert!(gap > 1e-3, "forms unexpectedly agree: gap {gap}");
    }

    #[test]
    fn e1_closed_finite_at_vertices() {
        let el = ell(0.5);
        for t in [0.0, 0.25, 0.5, 0.75] {
            assert!(e1_hat_closed(t, &el).is_finite());
        }
    }

    #[test]
    fn beta_forms_even() {
        let el = ell(0.5);
        for i in 1..32 {
            let t = i as f64 / 32.0;
            assert!((beta(t, &el) - beta(1.0 - t, &el)).abs() < 1e-8);
            assert!((beta_caustic(t, &el) - beta_caustic(1.0 - t, &el)).abs() < 1e-12);
        }
    }

    #[test]
    fn beta_caustic_vertex_values() {
        let el = ell(0.5);
        let kk = complete_k(el.modulus());
        let dk = dk_dk(el.modulus());
        let b2 = el.b * el.b;
        let at_marked = 2.0 * kk * b2 * 0.5 * dk - 2.0 * kk * kk * 0.25 / 3.0;
        assert!((beta_caustic(0.0, &el) - at_marked).abs() < 1e-12);
        let at_minor = 2.0 * kk * b2 * 0.5 * dk - 4.0 * kk * kk * 0.25 / 3.0;
        assert!((beta_caustic(0.25, &el) - at_minor).abs() < 1e-12);
        assert!(beta_caustic(0.3, &ell(1e-4)).abs() < 1e-6);
    }

    #[test]
    fn omega_series_leading_coefficient() {
        let el = ell(0.5);
        let kk = complete_k(el.modulus());
        let lam = 1e-8;
        let lead = 1.0 / (2.0 * kk * el.b);
        assert!((omega_series(lam, &el) / lam - lead).abs() < 1e-10);
    }

    #[test]
    fn sample_collects_fields() {
        let el = ell(0.5);
        let s = sample(0.25, &el);
        assert!(s.alpha.abs() < 1e-12);
        assert_eq!(s.xi, 0.0);
        assert!((s.mu - lazutkin_weight(0.25, &el)).abs() < 1e-15);
        assert_eq!(s.beta, beta(0.25, &el));
    }
}

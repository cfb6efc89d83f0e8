//! The billiard table `x² + y²/b² = 1`, its confocal caustics and the
//! reflection angle of a chord.
//!
//! Boundary points are parametrized by the elliptic angle
//! `γ(φ) = (cos φ, b sin φ)`, so `φ = 0` is the major-axis vertex `(1, 0)`
//! (the marked point of every symmetric orbit) and the boundary is traversed
//! counterclockwise. In this chart the Lazutkin coordinate is
//! `1/4 − F(π/2 − φ, e)/(4K(e))` and the action coordinate on trajectories
//! tangent to `C_λ` is `1/4 − F(π/2 − φ, k_λ)/(4K(k_λ))`.

use crate::elliptic::{complete_k, incomplete_f, Modulus};
use crate::error::{Error, Result};
use crate::roots::bisect;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> std::ops::Sub for Point2<T> {
    type Output = Self;

    fn sub(self, other: Self) -> Self {
        Point2::new(self.x - other.x, self.y - other.y)
    }
}

impl<T: Real> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Point2 { x, y }
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Self) -> T {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }
}

/// Eccentricity and semi-minor axis of the table (semi-major axis is 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseParams<T> {
    pub e: T,
    pub b: T,
}

impl<T: Real> EllipseParams<T> {
    pub fn new(e: T) -> Result<Self> {
        if !(e.is_finite() && e > T::zero() && e < T::one()) {
            return Err(Error::domain(
                "ellipse",
                format!("eccentricity {} outside (0, 1)", e.as_f64()),
            ));
        }
        let b = ((T::one() - e) * (T::one() + e)).sqrt();
        Ok(EllipseParams { e, b })
    }

    /// The eccentricity as an elliptic modulus.
    pub fn modulus(&self) -> Modulus<T> {
        Modulus::new(self.e).expect("eccentricity validated in (0, 1)")
    }

    /// `γ(φ) = (cos φ, b sin φ)`.
    pub fn boundary_point(&self, phi: T) -> Point2<T> {
        let (s, c) = phi.sin_cos();
        Point2::new(c, self.b * s)
    }

    /// `γ′(φ)`.
    pub fn tangent(&self, phi: T) -> Point2<T> {
        let (s, c) = phi.sin_cos();
        Point2::new(-s, self.b * c)
    }

    /// Elliptic angle of a boundary point.
    pub fn angle_of(&self, p: Point2<T>) -> T {
        (p.y / self.b).atan2(p.x)
    }

    /// Billiard generating function `L(φ, φ′) = ‖γ(φ) − γ(φ′)‖`.
    pub fn chord_length(&self, phi: T, phi2: T) -> T {
        self.boundary_point(phi).distance(self.boundary_point(phi2))
    }

    /// `sin θ` at `γ(φ_cur)` for the chord to `γ(φ_next)`, where `θ` is the
    /// angle between the chord and the boundary tangent.
    ///
    /// Equal to `√(1 − (∂_φ L)² / |γ′|²)`; the Lagrange identity turns the
    /// difference under the root into a squared cross product, so small
    /// angles lose no digits.
    pub fn reflection_sin(&self, phi_cur: T, phi_next: T) -> Result<T> {
        let chord = self.boundary_point(phi_next) - self.boundary_point(phi_cur);
        let len = chord.norm();
        if len <= T::epsilon() {
            return Err(Error::CoincidentPoints {
                phi: phi_cur.as_f64(),
            });
        }
        let tangent = self.tangent(phi_cur);
        Ok((chord.cross(tangent).abs() / (len * tangent.norm())).min(T::one()))
    }

    /// `sin θ` evaluated term by term from the generating-function
    /// derivative, without the cross-product rewrite.
    pub fn reflection_sin_expanded(&self, phi_cur: T, phi_next: T) -> Result<T> {
        let (s, c) = phi_cur.sin_cos();
        let (s2, c2) = phi_next.sin_cos();
        let b2 = self.b * self.b;
        let dc = c2 - c;
        let ds = s2 - s;
        let chord2 = dc * dc + b2 * ds * ds;
        if chord2.sqrt() <= T::epsilon() {
            return Err(Error::CoincidentPoints {
                phi: phi_cur.as_f64(),
            });
        }
        let num = dc * s - b2 * ds * c;
        let den = (s * s + b2 * c * c) * chord2;
        Ok((T::one() - num * num / den).max(T::zero()).sqrt())
    }

    /// Parameters of the confocal caustic
    /// `x²/(1−λ²) + y²/(b²−λ²) = 1`, `λ ∈ (0, b)`.
    pub fn caustic_params(&self, lambda: T) -> Result<CausticParam<T>> {
        if !(lambda > T::zero() && lambda < self.b) {
            return Err(Error::domain(
                "caustic_params",
                format!(
                    "lambda = {} outside (0, {})",
                    lambda.as_f64(),
                    self.b.as_f64()
                ),
            ));
        }
        let k_lambda = self.caustic_modulus(lambda)?;
        let delta_lambda = incomplete_f((lambda / self.b).asin(), k_lambda);
        let omega_lambda = delta_lambda / (T::lit(2.0) * complete_k(k_lambda));
        Ok(CausticParam {
            lambda,
            k_lambda,
            delta_lambda,
            omega_lambda,
        })
    }

    /// `k_λ = e / √(1 − λ²)`.
    pub fn caustic_modulus(&self, lambda: T) -> Result<Modulus<T>> {
        Modulus::new(self.e / ((T::one() - lambda) * (T::one() + lambda)).sqrt())
    }

    /// Action coordinate `S_λ(φ) = 1/4 − F(π/2 − φ, k_λ) / (4K(k_λ))`.
    ///
    /// Defined for every real `φ`; increases by exactly 1 per turn.
    pub fn action_coordinate(&self, phi: T, lambda: T) -> Result<T> {
        if !(lambda >= T::zero() && lambda < self.b) {
            return Err(Error::domain(
                "action_coordinate",
                format!(
                    "lambda = {} outside [0, {})",
                    lambda.as_f64(),
                    self.b.as_f64()
                ),
            ));
        }
        let k = self.caustic_modulus(lambda)?;
        let four = T::lit(4.0);
        Ok(T::lit(0.25) - incomplete_f(T::FRAC_PI_2() - phi, k) / (four * complete_k(k)))
    }

    /// Signed distance between the line through `p`, `p2` and the parallel
    /// support line of the caustic `C_λ`; zero iff the line is tangent.
    pub fn caustic_tangency_gap(&self, p: Point2<T>, p2: Point2<T>, lambda: T) -> T {
        let dir = p2 - p;
        let len = dir.norm();
        let n = Point2::new(-dir.y / len, dir.x / len);
        let offset = n.dot(p).abs();
        let a2 = (T::one() - lambda) * (T::one() + lambda);
        let b2 = self.b * self.b - lambda * lambda;
        offset - (a2 * n.x * n.x + b2 * n.y * n.y).sqrt()
    }

    /// One bounce of the billiard map, computed with vectors: reflect the
    /// incoming direction about the normal at `cur` and intersect the ray
    /// with the ellipse.
    pub fn billiard_step(&self, prev: Point2<T>, cur: Point2<T>) -> Point2<T> {
        let b2 = self.b * self.b;
        let d = cur - prev;
        let d = Point2::new(d.x / d.norm(), d.y / d.norm());
        let n = Point2::new(cur.x, cur.y / b2);
        let n = Point2::new(n.x / n.norm(), n.y / n.norm());
        let two = T::lit(2.0);
        let dn = d.dot(n);
        let r = Point2::new(d.x - two * dn * n.x, d.y - two * dn * n.y);
        // (cur + s r) on the ellipse: qa s² + qb s + qc = 0, with qc ≈ 0.
        let qa = r.x * r.x + r.y * r.y / b2;
        let qb = two * (cur.x * r.x + cur.y * r.y / b2);
        let qc = cur.x * cur.x + cur.y * cur.y / b2 - T::one();
        let disc = (qb * qb - T::lit(4.0) * qa * qc).max(T::zero()).sqrt();
        let s1 = if qb >= T::zero() {
            (-qb - disc) / (two * qa)
        } else {
            (-qb + disc) / (two * qa)
        };
        let s2 = if s1 != T::zero() {
            qc / (qa * s1)
        } else {
            T::zero()
        };
        let s = if s1.abs() >= s2.abs() { s1 } else { s2 };
        Point2::new(cur.x + s * r.x, cur.y + s * r.y)
    }

    /// Counterclockwise trajectory tangent to `C_λ` starting at `γ(φ₀)`.
    ///
    /// The first chord is found by bisecting the tangency gap over the
    /// endpoint angle; every later vertex comes from [`Self::billiard_step`].
    /// Returned angles are unwrapped, so they increase monotonically.
    pub fn tangent_trajectory(&self, phi0: T, lambda: T, bounces: usize) -> Result<Vec<T>> {
        if !(lambda > T::zero() && lambda < self.b) {
            return Err(Error::domain(
                "tangent_trajectory",
                format!(
                    "lambda = {} outside (0, {})",
                    lambda.as_f64(),
                    self.b.as_f64()
                ),
            ));
        }
        let p0 = self.boundary_point(phi0);
        let gap = |phi1: T| self.caustic_tangency_gap(p0, self.boundary_point(phi1), lambda);
        let phi1 = bisect(
            "tangent_trajectory",
            gap,
            phi0 + T::lit(1e-6),
            phi0 + T::PI(),
            T::epsilon() * T::lit(8.0),
        )?;
        let two_pi = T::PI() + T::PI();
        let mut angles = vec![phi0, phi1];
        let mut prev = p0;
        let mut cur = self.boundary_point(phi1);
        while angles.len() < bounces + 1 {
            let next = self.billiard_step(prev, cur);
            let last = *angles.last().expect("nonempty");
            let mut phi = self.angle_of(next);
            while phi <= last {
                phi = phi + two_pi;
            }
            while phi > last + two_pi {
                phi = phi - two_pi;
            }
            angles.push(phi);
            prev = cur;
            cur = next;
        }
        Ok(angles)
    }
}

/// A confocal caustic and the rotation number of trajectories tangent to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CausticParam<T> {
    pub lambda: T,
    pub k_lambda: Modulus<T>,
    pub delta_lambda: T,
    pub omega_lambda: T,
}

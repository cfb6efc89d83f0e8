//! Lazutkin parametrization of the elliptic table.
//!
//! Two routes are provided. The closed form
//! `x(φ) = 1/4 − F(π/2 − φ, e)/(4K(e))` and weight
//! `μ(x) = 2K(e)√(1−e²)/dn(K(e)(1−4x), e)` are specific to the ellipse;
//! [`LazutkinChart`] integrates the curvature density `ρ^{−2/3} ds` along
//! the boundary and works from the curve alone. Both are pinned so that the
//! marked point `φ = 0` sits at `x = 0` and orientation is counterclockwise.

use crate::elliptic::{complete_k, incomplete_f, jacobi_am, jacobi_triple};
use crate::error::Result;
use crate::geometry::{EllipseParams, Point2};
use crate::quadrature::integrate;
use crate::scalar::Real;

/// Reduces `x` into `[0, 1)`.
pub fn wrap_unit<T: Real>(x: T) -> T {
    let r = x - x.floor();
    if r >= T::one() {
        T::zero()
    } else {
        r
    }
}

/// Closed-form Lazutkin coordinate of `γ(φ)`, in `[0, 1)`.
pub fn lazutkin_x<T: Real>(phi: T, ellipse: &EllipseParams<T>) -> T {
    wrap_unit(lazutkin_x_unwrapped(phi, ellipse))
}

/// Closed-form Lazutkin coordinate without the reduction mod 1.
pub fn lazutkin_x_unwrapped<T: Real>(phi: T, ellipse: &EllipseParams<T>) -> T {
    let k = ellipse.modulus();
    T::lit(0.25) - incomplete_f(T::FRAC_PI_2() - phi, k) / (T::lit(4.0) * complete_k(k))
}

/// Argument `ξ = K(e)(1 − 4x)` at which the Jacobi functions are evaluated.
pub fn chart_argument<T: Real>(x: T, ellipse: &EllipseParams<T>) -> T {
    complete_k(ellipse.modulus()) * (T::one() - T::lit(4.0) * x)
}

/// Inverse chart: the elliptic angle `φ = π/2 − am(K(1−4x), e)`.
/// Maps `[0, 1)` onto `[0, 2π)`.
pub fn phi_of_x<T: Real>(x: T, ellipse: &EllipseParams<T>) -> T {
    T::FRAC_PI_2() - jacobi_am(chart_argument(x, ellipse), ellipse.modulus())
}

/// Lazutkin weight `μ(x) = 2K(e)√(1−e²) / dn(K(e)(1−4x), e)`.
pub fn lazutkin_weight<T: Real>(x: T, ellipse: &EllipseParams<T>) -> T {
    let k = ellipse.modulus();
    let kk = complete_k(k);
    let tr = jacobi_triple(kk * (T::one() - T::lit(4.0) * x), k);
    (kk + kk) * ellipse.b / tr.dn
}

/// Radius of curvature `|γ′|³ / |γ′ × γ″|` at `γ(φ)`.
pub fn curvature_radius<T: Real>(phi: T, ellipse: &EllipseParams<T>) -> T {
    let (s, c) = phi.sin_cos();
    let d1 = ellipse.tangent(phi);
    let d2 = Point2::new(-c, -ellipse.b * s);
    let speed = d1.norm();
    speed * speed * speed / d1.cross(d2).abs()
}

/// `ρ^{−2/3} |γ′|`: Lazutkin density per unit elliptic angle.
fn density<T: Real>(phi: T, ellipse: &EllipseParams<T>) -> T {
    curvature_radius(phi, ellipse).powf(T::lit(-2.0 / 3.0)) * ellipse.tangent(phi).norm()
}

const PANELS: usize = 64;

/// Quadrature route: `x(s) = C_Π ∫₀^s ρ^{−2/3} ds′` tabulated on a uniform
/// grid in the elliptic angle.
#[derive(Debug, Clone)]
pub struct LazutkinChart<T> {
    pub ellipse: EllipseParams<T>,
    /// `C_Π = [∮ ρ^{−2/3} ds]^{−1}`.
    pub c_pi: T,
    /// Node angles `2πj/N`, `j = 0..=N`.
    pub phi_nodes: Vec<T>,
    /// Arc length from the marked point to each node.
    pub arc_nodes: Vec<T>,
    /// Lazutkin coordinate at each node; strictly increasing from 0 to 1.
    pub x_nodes: Vec<T>,
    tol: T,
}

impl<T: Real> LazutkinChart<T> {
    pub fn new(ellipse: EllipseParams<T>) -> Result<Self> {
        let tol = T::lit(1e-13).max(T::epsilon() * T::lit(16.0));
        let two_pi = T::PI() + T::PI();
        let step = two_pi / T::from_count(PANELS);
        let phi_nodes: Vec<T> = (0..=PANELS).map(|j| step * T::from_count(j)).collect();
        let mut mass = vec![T::zero()];
        let mut arc = vec![T::zero()];
        for w in phi_nodes.windows(2) {
            let dm = integrate(|p| density(p, &ellipse), w[0], w[1], tol)?;
            let ds = integrate(|p| ellipse.tangent(p).norm(), w[0], w[1], tol)?;
            mass.push(*mass.last().expect("nonempty") + dm);
            arc.push(*arc.last().expect("nonempty") + ds);
        }
        let total = mass[PANELS];
        let c_pi = T::one() / total;
        let x_nodes = mass.iter().map(|&m| m * c_pi).collect();
        Ok(LazutkinChart {
            ellipse,
            c_pi,
            phi_nodes,
            arc_nodes: arc,
            x_nodes,
            tol,
        })
    }

    /// Perimeter of the table.
    pub fn perimeter(&self) -> T {
        self.arc_nodes[PANELS]
    }

    /// Lazutkin coordinate of `γ(φ)` by quadrature, in `[0, 1)`.
    pub fn x_quadrature(&self, phi: T) -> Result<T> {
        let two_pi = T::PI() + T::PI();
        let turns = (phi / two_pi).floor();
        let reduced = phi - turns * two_pi;
        let step = two_pi / T::from_count(PANELS);
        let j = (reduced / step)
            .floor()
            .to_usize()
            .unwrap_or(0)
            .min(PANELS - 1);
        let partial = integrate(
            |p| density(p, &self.ellipse),
            self.phi_nodes[j],
            reduced,
            self.tol,
        )?;
        Ok(wrap_unit(self.x_nodes[j] + partial * self.c_pi))
    }

    /// Weight `1 / (2 C_Π ρ^{1/3})` at `γ(φ)`.
    pub fn weight_at_phi(&self, phi: T) -> T {
        T::one() / ((self.c_pi + self.c_pi) * curvature_radius(phi, &self.ellipse).cbrt())
    }
}

/// Lazutkin coordinate by quadrature, building a fresh chart.
pub fn lazutkin_x_quadrature<T: Real>(phi: T, ellipse: &EllipseParams<T>) -> Result<T> {
    LazutkinChart::new(*ellipse)?.x_quadrature(phi)
}

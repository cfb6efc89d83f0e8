mod common;

use common::{simpson, wrapped_diff, Lcg};
use lazutkin_ellipse::lazutkin::{
    curvature_radius, lazutkin_weight, lazutkin_x, phi_of_x, LazutkinChart,
};
use lazutkin_ellipse::Ellipse;
use std::f64::consts::PI;

#[test]
fn closed_form_matches_quadrature_at_random_angles() {
    let mut rng = Lcg::new(20240917);
    for e in [0.2, 0.5, 0.8] {
        let el = Ellipse::new(e).unwrap();
        let chart = LazutkinChart::new(el).unwrap();
        for _ in 0..50 {
            let phi = 2.0 * PI * rng.next_f64();
            let closed = lazutkin_x(phi, &el);
            let quad = chart.x_quadrature(phi).unwrap();
            assert!(
                wrapped_diff(closed, quad, 1.0).abs() < 1e-9,
                "e = {e}, phi = {phi}"
            );
        }
    }
}

#[test]
fn weight_matches_curvature_form() {
    let mut rng = Lcg::new(7);
    for e in [0.2, 0.5, 0.8] {
        let el = Ellipse::new(e).unwrap();
        let chart = LazutkinChart::new(el).unwrap();
        for _ in 0..50 {
            let phi = 2.0 * PI * rng.next_f64();
            let mu = lazutkin_weight(lazutkin_x(phi, &el), &el);
            assert!((mu - chart.weight_at_phi(phi)).abs() < 1e-9);
        }
    }
}

#[test]
fn normalization_constant_from_plain_quadrature() {
    // C_Π from an independent Simpson integral of ρ^{−2/3} ds.
    for e in [0.3, 0.9] {
        let el = Ellipse::new(e).unwrap();
        let density = |p: f64| {
            let (s, c) = p.sin_cos();
            let speed = (s * s + el.b * el.b * c * c).sqrt();
            curvature_radius(p, &el).powf(-2.0 / 3.0) * speed
        };
        let total = simpson(&density, 0.0, 2.0 * PI, 1e-14);
        let chart = LazutkinChart::new(el).unwrap();
        assert!((chart.c_pi * total - 1.0).abs() < 1e-11);
    }
}

#[test]
fn inverse_chart_is_increasing() {
    let el = Ellipse::new(0.8).unwrap();
    let mut prev = -1.0;
    for i in 0..200 {
        let phi = phi_of_x(i as f64 / 200.0, &el);
        assert!(phi > prev);
        prev = phi;
    }
}

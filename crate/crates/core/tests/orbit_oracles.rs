mod common;

use common::{regular_polygon, wrapped_diff};
use lazutkin_ellipse::orbits::{orbit_from_caustic, orbit_variational};
use lazutkin_ellipse::{Convention, Ellipse};
use std::f64::consts::PI;

#[test]
fn caustic_and_variational_orbits_agree() {
    for e in [0.2, 0.5, 0.8] {
        let el = Ellipse::new(e).unwrap();
        for q in [5, 9, 16, 33] {
            let caustic = orbit_from_caustic(q, &el, Convention::B).unwrap();
            let var = orbit_variational(q, &el).unwrap();
            for k in 0..q {
                let d = (caustic.phi[k] - var.phi[k]).abs();
                assert!(d < 1e-9, "e = {e}, q = {q}, k = {k}: {d}");
            }
            assert!(caustic.closure_residual <= 1e-10);
            assert!(var.closure_residual <= 1e-10);
            assert!((caustic.lambda_q - var.lambda_q).abs() < 1e-8);
        }
    }
}

#[test]
fn action_advances_by_rotation_number() {
    for e in [0.2, 0.5, 0.8] {
        let el = Ellipse::new(e).unwrap();
        let lam = 0.41 * el.b;
        let omega = el.caustic_params(lam).unwrap().omega_lambda;
        let traj = el.tangent_trajectory(0.9, lam, 50).unwrap();
        assert_eq!(traj.len(), 51);
        let s0 = el.action_coordinate(traj[0], lam).unwrap();
        for (n, &phi) in traj.iter().enumerate() {
            let s = el.action_coordinate(phi, lam).unwrap();
            assert!(
                (s - s0 - n as f64 * omega).abs() < 1e-10,
                "e = {e}, bounce {n}"
            );
        }
    }
}

#[test]
fn near_circle_orbits_are_regular_polygons() {
    let el = Ellipse::new(1e-4).unwrap();
    for q in [5, 16, 64] {
        let orbit = orbit_from_caustic(q, &el, Convention::B).unwrap();
        for (phi, reg) in orbit.phi.iter().zip(regular_polygon(q)) {
            assert!(wrapped_diff(*phi, reg, 2.0 * PI).abs() < 1e-6);
        }
    }
}

#[test]
fn literal_amplitude_reading_is_not_periodic() {
    let el = Ellipse::new(0.5).unwrap();
    let orbit = orbit_from_caustic(16, &el, Convention::A).unwrap();
    assert!(orbit.closure_residual > 1e-3);
}

//! Lazutkin coordinates, periodic orbits and second-order asymptotics for
//! billiards in the ellipse `x² + y²/b² = 1`, `b = √(1 − e²)`.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the verification harness and
//! the command line use.

pub mod asymptotics;
pub mod cli;
pub mod elliptic;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod lazutkin;
pub mod orbits;
pub mod quadrature;
pub mod roots;
pub mod scalar;

pub use error::{Error, Result};
pub use orbits::Convention;
pub use scalar::Real;

pub type Ellipse = geometry::EllipseParams<f64>;
pub type Point = geometry::Point2<f64>;
pub type Orbit = orbits::CausticOrbit<f64>;
pub type Helpers = asymptotics::HelperQuantities<f64>;
pub type Sample = asymptotics::AsymptoticSample<f64>;
pub type Chart = lazutkin::LazutkinChart<f64>;
pub type Caustic = geometry::CausticParam<f64>;

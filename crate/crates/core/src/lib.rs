//! Douglas-Rachford iteration for a line paired with an ellipse or a p-sphere.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`.

pub mod basins;
pub mod divergence;
pub mod dr;
pub mod geometry;
pub mod linalg;
pub mod params;
mod region;
pub mod report;
mod scalar;
pub mod stability;
mod tolerance;

pub use region::Region;
pub use scalar::Real;
pub use tolerance::Tolerances;

pub type Point = geometry::Point2<f64>;
pub type Line = geometry::Line<f64>;
pub type Ellipse = geometry::Ellipse<f64>;
pub type PSphere = geometry::PSphere<f64>;
pub type Set = geometry::ConstraintSet<f64>;
pub type Orbit = dr::Orbit<f64>;
pub type Matrix = linalg::Matrix2<f64>;
pub type Viewport = Region<f64>;

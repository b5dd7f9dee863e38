//! Constraint sets in the plane and their nearest-point projections.
//!
//! Three kinds of set are supported: lines, the axis-aligned ellipses
//! `E_b = {x^2 + (y/b)^2 = 1}` and the p-spheres `S_p = {|x|^p + |y|^p = 1}`.
//! Projection onto the curved sets is set-valued in general; callers get every
//! global minimizer found and a deterministic selection among them (the
//! lexicographically largest `(x, y)`).

mod ellipse;
mod line;
mod point;
pub mod poly;
mod psphere;
mod select;
mod set;

pub use ellipse::Ellipse;
pub use line::Line;
pub use point::Point2;
pub use psphere::PSphere;
pub use set::{feasible_points, gap_witness, reflect, set_distance, ConstraintSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum GeometryError {
    #[error("non-finite input point")]
    NonFiniteInput,
    #[error("projection onto the unit circle is undefined at its centre")]
    CenterOfCircle,
    #[error("line normal is zero")]
    DegenerateLine,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("operation needs at least one line and one curve")]
    UnsupportedPair,
}

/// Every global minimizer found for a projection, plus the selected one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionResult<T> {
    pub point: Point2<T>,
    /// Sorted with the selected point first.
    pub candidates: Vec<Point2<T>>,
    pub multivalued: bool,
}

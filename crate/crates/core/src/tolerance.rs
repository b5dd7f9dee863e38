//! Numerical thresholds used by the projection solvers.

use serde::{Deserialize, Serialize};

use crate::Real;

/// Every threshold the geometry solvers consult, in one place.
///
/// The `Default` values are tuned for `f64`. For `f32` each value is raised
/// to a small multiple of machine epsilon so the invariants stay attainable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances<T> {
    /// Maximum `|phi(q) - 1|` for a point to count as lying on a curve.
    pub membership: T,
    /// Candidates whose distance is within this of the best are ties.
    pub tie: T,
    /// Candidates closer than this are the same point.
    pub dedup: T,
    /// Relative discriminant below which a line is treated as tangent.
    pub tangency: T,
    /// Curve samples used by the p-sphere multistart (split over both halves).
    pub psphere_samples: usize,
    /// Maximum number of times the sample count is doubled.
    pub psphere_max_doublings: u32,
    /// Two distinct local minima closer than this in distance trigger resampling.
    pub ambiguity: T,
    /// Samples used when bracketing line/p-sphere intersections and set gaps.
    pub scan_samples: usize,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            membership: T::tol(1e-10, 64.0),
            tie: T::tol(1e-9, 256.0),
            dedup: T::tol(1e-9, 256.0),
            tangency: T::tol(1e-12, 64.0),
            psphere_samples: 4096,
            psphere_max_doublings: 4,
            ambiguity: T::tol(1e-10, 64.0),
            scan_samples: 4096,
        }
    }
}

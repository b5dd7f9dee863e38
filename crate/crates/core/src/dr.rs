//! The Douglas-Rachford operator `T_{A,B} = (I + R_B R_A) / 2` and orbits.
//!
//! Throughout the crate `A` is the set reflected in first.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ConstraintSet, GeometryError, Line, Point2};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[error("projection failed at iterate {index}: {source}")]
pub struct DrError {
    pub index: usize,
    pub source: GeometryError,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrConfig<T> {
    pub max_iter: usize,
    /// Declares convergence once a step is at most this long.
    pub convergence_tol: T,
    /// Declares divergence once an iterate is at least this far from the origin.
    pub divergence_bailout: T,
    /// Iterates stored one by one before storage thins out.
    pub full_storage: usize,
    /// Keep every `thin_stride`-th iterate beyond `full_storage`.
    pub thin_stride: usize,
}

impl<T: Real> Default for DrConfig<T> {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            convergence_tol: T::tol(1e-10, 64.0),
            divergence_bailout: T::c(1e6),
            full_storage: 100_000,
            thin_stride: 10,
        }
    }
}

impl<T: Real> DrConfig<T> {
    pub fn with_max_iter(max_iter: usize) -> Self {
        Self {
            max_iter,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), &'static str> {
        if self.max_iter == 0 {
            return Err("max_iter must be at least 1");
        }
        if !(self.convergence_tol > T::zero() && self.divergence_bailout > T::zero()) {
            return Err("tolerances must be positive");
        }
        if self.thin_stride == 0 {
            return Err("thin_stride must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIter,
    Diverged,
}

/// A trajectory `x_0, x_1, ...` with the length of the step into each point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit<T> {
    pub points: Vec<Point2<T>>,
    /// `step_norms[i]` is the length of the step that produced `points[i + 1]`.
    pub step_norms: Vec<T>,
    pub terminated: Termination,
    /// Number of operator applications performed.
    pub iterations: usize,
    /// `1` unless storage was thinned past `full_storage` points.
    pub stride: usize,
}

impl<T: Real> Orbit<T> {
    pub fn last(&self) -> Point2<T> {
        *self.points.last().expect("orbit is never empty")
    }
}

/// One application of `T_{A,B}`.
#[inline]
pub fn dr_step<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    x: Point2<T>,
) -> Result<Point2<T>, GeometryError> {
    let pa = a.nearest(x)?;
    let ra = pa.scale(T::two()) - x;
    let pb = b.nearest(ra)?;
    let rb = pb.scale(T::two()) - ra;
    Ok((x + rb).scale(T::half()))
}

/// `x + P_B(R_A x) - P_A x`, algebraically equal to [`dr_step`].
pub fn dr_step_via_displacement<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    x: Point2<T>,
) -> Result<Point2<T>, GeometryError> {
    Ok(x + step_displacement(a, b, x)?)
}

/// `P_B(R_A x) - P_A x`, an element of `B - A`.
pub fn step_displacement<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    x: Point2<T>,
) -> Result<Point2<T>, GeometryError> {
    let pa = a.nearest(x)?;
    let pb = b.nearest(pa.scale(T::two()) - x)?;
    Ok(pb - pa)
}

/// Every image of `x` under the set-valued operator, one per choice of
/// nearest points.
pub fn dr_step_all<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    x: Point2<T>,
) -> Result<Vec<Point2<T>>, GeometryError> {
    let mut out = Vec::new();
    for pa in a.project(x)?.candidates {
        let ra = pa.scale(T::two()) - x;
        for pb in b.project(ra)?.candidates {
            out.push(x + pb - pa);
        }
    }
    Ok(out)
}

/// `T^n(x)`.
pub fn dr_power<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    mut x: Point2<T>,
    n: usize,
) -> Result<Point2<T>, GeometryError> {
    for _ in 0..n {
        x = dr_step(a, b, x)?;
    }
    Ok(x)
}

pub fn dr_iterate<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    x0: Point2<T>,
    cfg: &DrConfig<T>,
) -> Result<Orbit<T>, DrError> {
    let mut points = vec![x0];
    let mut step_norms = Vec::new();
    let mut stride = 1;
    let mut x = x0;
    let mut terminated = Termination::MaxIter;
    let mut iterations = 0;
    for k in 0..cfg.max_iter {
        let next = dr_step(a, b, x).map_err(|source| DrError { index: k, source })?;
        let step = next.dist(x);
        x = next;
        iterations = k + 1;
        let done = if step <= cfg.convergence_tol {
            Some(Termination::Converged)
        } else if x.norm() >= cfg.divergence_bailout {
            Some(Termination::Diverged)
        } else {
            None
        };
        if points.len() >= cfg.full_storage {
            stride = cfg.thin_stride;
        }
        if stride == 1 || iterations % stride == 0 || done.is_some() || iterations == cfg.max_iter {
            points.push(x);
            step_norms.push(step);
        }
        if let Some(t) = done {
            terminated = t;
            break;
        }
    }
    Ok(Orbit {
        points,
        step_norms,
        terminated,
        iterations,
        stride,
    })
}

/// Runs up to `iters` steps keeping only the last `keep` iterates (oldest
/// first). Stops early on convergence or divergence like [`dr_iterate`].
pub fn dr_tail<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    x0: Point2<T>,
    iters: usize,
    keep: usize,
    cfg: &DrConfig<T>,
) -> Result<(Vec<Point2<T>>, Termination, usize), DrError> {
    let keep = keep.max(1);
    let mut ring = std::collections::VecDeque::with_capacity(keep + 1);
    ring.push_back(x0);
    let mut x = x0;
    for k in 0..iters {
        let next = dr_step(a, b, x).map_err(|source| DrError { index: k, source })?;
        let step = next.dist(x);
        x = next;
        ring.push_back(x);
        if ring.len() > keep {
            ring.pop_front();
        }
        if step <= cfg.convergence_tol {
            return Ok((ring.into(), Termination::Converged, k + 1));
        }
        if x.norm() >= cfg.divergence_bailout {
            return Ok((ring.into(), Termination::Diverged, k + 1));
        }
    }
    Ok((ring.into(), Termination::MaxIter, iters))
}

/// `T_{L2,L1} = 2 P_1 P_2 - P_1 - P_2 + I` for two lines through the origin,
/// reflecting first in `l2`.
pub fn dr_step_two_lines<T: Real>(l1: &Line<T>, l2: &Line<T>, x: Point2<T>) -> Point2<T> {
    let p2 = l2.project(x);
    let p12 = l1.project(p2);
    p12.scale(T::two()) - l1.project(x) - p2 + x
}

/// The twisted operator `V = P_M P_N + P_{N^perp} P_{M^perp}`.
pub fn twisted_dr_step<T: Real>(m: &Line<T>, n: &Line<T>, x: Point2<T>) -> Point2<T> {
    let m = m.through_origin();
    let n = n.through_origin();
    m.project(n.project(x)) + n.perpendicular().project(m.perpendicular().project(x))
}

/// `P_A(x_k)` for `k = 0..=n`.
pub fn shadow_sequence<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    x0: Point2<T>,
    n: usize,
) -> Result<Vec<Point2<T>>, DrError> {
    let mut out = Vec::with_capacity(n + 1);
    let mut x = x0;
    for k in 0..=n {
        let err = |source| DrError { index: k, source };
        let pa = a.nearest(x).map_err(err)?;
        out.push(pa);
        if k < n {
            let pb = b.nearest(pa.scale(T::two()) - x).map_err(err)?;
            x = x + pb - pa;
        }
    }
    Ok(out)
}

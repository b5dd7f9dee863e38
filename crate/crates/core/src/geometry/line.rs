use serde::{Deserialize, Serialize};

use super::{GeometryError, Point2};
use crate::Real;

/// The line `{(x, y) : alpha*x + beta*y = gamma}` with a unit normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
}

impl<T: Real> Line<T> {
    /// `y = m*x + c`, stored with normal `(m, -1) / sqrt(1 + m^2)`.
    pub fn from_slope_intercept(m: T, c: T) -> Self {
        let s = (T::one() + m * m).sqrt();
        Self {
            alpha: m / s,
            beta: -T::one() / s,
            gamma: -c / s,
        }
    }

    /// `a*x + b*y = c` for any nonzero normal `(a, b)`; covers vertical lines.
    pub fn from_normal(a: T, b: T, c: T) -> Result<Self, GeometryError> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(GeometryError::NonFiniteInput);
        }
        let s = a.hypot(b);
        if s == T::zero() {
            return Err(GeometryError::DegenerateLine);
        }
        Ok(Self {
            alpha: a / s,
            beta: b / s,
            gamma: c / s,
        })
    }

    /// Line through `p` whose normal is parallel to `normal`.
    pub fn through(p: Point2<T>, normal: Point2<T>) -> Result<Self, GeometryError> {
        Self::from_normal(normal.x, normal.y, normal.dot(p))
    }

    pub fn x_axis() -> Self {
        Self::from_slope_intercept(T::zero(), T::zero())
    }

    pub fn y_axis() -> Self {
        Self {
            alpha: T::one(),
            beta: T::zero(),
            gamma: T::zero(),
        }
    }

    #[inline]
    pub fn normal(&self) -> Point2<T> {
        Point2::new(self.alpha, self.beta)
    }

    /// Unit direction vector, the normal turned a quarter turn clockwise.
    #[inline]
    pub fn direction(&self) -> Point2<T> {
        Point2::new(-self.beta, self.alpha)
    }

    /// Foot of the perpendicular from the origin.
    #[inline]
    pub fn anchor(&self) -> Point2<T> {
        self.normal().scale(self.gamma)
    }

    /// Signed distance `alpha*x + beta*y - gamma`.
    #[inline]
    pub fn residual(&self, q: Point2<T>) -> T {
        self.alpha * q.x + self.beta * q.y - self.gamma
    }

    #[inline]
    pub fn passes_through_origin(&self) -> bool {
        self.gamma == T::zero()
    }

    #[inline]
    pub fn project(&self, q: Point2<T>) -> Point2<T> {
        q - self.normal().scale(self.residual(q))
    }

    #[inline]
    pub fn reflect(&self, q: Point2<T>) -> Point2<T> {
        q - self.normal().scale(T::two() * self.residual(q))
    }

    /// The parallel line through the origin, i.e. `L - p` for any `p` on `L`.
    pub fn through_origin(&self) -> Self {
        Self {
            gamma: T::zero(),
            ..*self
        }
    }

    /// The orthogonal complement of `through_origin()`.
    pub fn perpendicular(&self) -> Self {
        Self {
            alpha: -self.beta,
            beta: self.alpha,
            gamma: T::zero(),
        }
    }

    pub fn translate(&self, by: Point2<T>) -> Self {
        Self {
            gamma: self.gamma + self.normal().dot(by),
            ..*self
        }
    }

    /// Intersection of two lines when it is a single point.
    pub fn intersect(&self, other: &Self) -> Option<Point2<T>> {
        let det = self.alpha * other.beta - self.beta * other.alpha;
        if det.abs() <= T::epsilon() {
            return None;
        }
        let x = (self.gamma * other.beta - self.beta * other.gamma) / det;
        let y = (self.alpha * other.gamma - self.gamma * other.alpha) / det;
        Some(Point2::new(x, y))
    }

    /// Point at signed arc length `s` from the anchor.
    #[inline]
    pub fn at(&self, s: T) -> Point2<T> {
        self.anchor() + self.direction().scale(s)
    }
}

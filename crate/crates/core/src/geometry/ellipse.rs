//! Nearest points on the axis-aligned ellipse `x^2 + (y/b)^2 = 1`.
//!
//! The stationarity conditions of `|z - q|^2` on the ellipse give the
//! candidate `z = (qx / (1 + s), b^2 qy / (b^2 + s))` where `s` (twice the
//! Lagrange multiplier) solves
//!
//! ```text
//! (1 + s)^2 (b^2 + s)^2 - qx^2 (b^2 + s)^2 - b^2 qy^2 (1 + s)^2 = 0.
//! ```
//!
//! Off the axes only the root with `s > -min(1, b^2)` matters; it is found
//! from the secular form of this quartic and then snapped onto the curve with
//! a Newton refinement in the eccentric anomaly, which keeps the membership
//! residual at rounding level. All real roots are enumerated only as a
//! fallback. Queries on an axis use the closed-form `s = -1`, `s = -b^2`
//! branches.

use serde::{Deserialize, Serialize};

use super::{poly, select, GeometryError, Point2, ProjectionResult};
use crate::{Real, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ellipse<T> {
    /// Semi-axis along `y`; the semi-axis along `x` is 1.
    pub b: T,
}

impl<T: Real> Ellipse<T> {
    pub fn new(b: T) -> Result<Self, GeometryError> {
        if !b.is_finite() || b <= T::zero() {
            return Err(GeometryError::InvalidParameter("ellipse semi-axis b must be finite and > 0"));
        }
        Ok(Self { b })
    }

    /// `phi_b(x, y) = x^2 + (y / b)^2`.
    #[inline]
    pub fn phi(&self, q: Point2<T>) -> T {
        let yb = q.y / self.b;
        q.x * q.x + yb * yb
    }

    #[inline]
    pub fn residual(&self, q: Point2<T>) -> T {
        self.phi(q) - T::one()
    }

    #[inline]
    pub fn point_at(&self, t: T) -> Point2<T> {
        Point2::new(t.cos(), self.b * t.sin())
    }

    /// Half the gradient of `phi_b`, `(x, y / b^2)`; normal to the curve.
    #[inline]
    pub fn normal_at(&self, q: Point2<T>) -> Point2<T> {
        Point2::new(q.x, q.y / (self.b * self.b))
    }

    /// The four axis vertices `(+-1, 0)` and `(0, +-b)`.
    pub fn vertices(&self) -> [Point2<T>; 4] {
        let (o, z) = (T::one(), T::zero());
        [
            Point2::new(o, z),
            Point2::new(z, self.b),
            Point2::new(-o, z),
            Point2::new(z, -self.b),
        ]
    }

    pub fn project(&self, q: Point2<T>) -> Result<ProjectionResult<T>, GeometryError> {
        self.project_with(q, &Tolerances::default())
    }

    pub fn project_with(
        &self,
        q: Point2<T>,
        tol: &Tolerances<T>,
    ) -> Result<ProjectionResult<T>, GeometryError> {
        if !q.is_finite() {
            return Err(GeometryError::NonFiniteInput);
        }
        let a = q.abs();
        let candidates = self.quadrant_candidates(a);
        Ok(select::finish(q, a, candidates, tol))
    }

    /// Stationary points of the distance from `a` (with `a.x, a.y >= 0`).
    fn quadrant_candidates(&self, a: Point2<T>) -> Vec<Point2<T>> {
        let (zero, one) = (T::zero(), T::one());
        let b = self.b;
        let b2 = b * b;
        let mut raw: Vec<Point2<T>> = Vec::with_capacity(8);

        if b == one {
            let r = a.norm();
            if r == zero {
                raw.extend_from_slice(&[Point2::new(one, zero), Point2::new(zero, one)]);
            } else {
                raw.push(a.scale(one / r));
            }
            return raw;
        }

        // The vertices are stationary whenever a coordinate of `a` vanishes
        // and make good polish seeds otherwise.
        raw.extend_from_slice(&[Point2::new(one, zero), Point2::new(zero, b)]);

        if a.x == zero && a.y == zero {
            return raw;
        }
        if a.x == zero {
            // s = -1 branch: u is free, v fixed by the second condition.
            let v = b2 * a.y / (b2 - one);
            if v.abs() <= b {
                let yb = v / b;
                raw.push(Point2::new((one - yb * yb).max(zero).sqrt(), v));
            }
            return raw;
        }
        if a.y == zero {
            // s = -b^2 branch.
            let u = a.x / (one - b2);
            if u.abs() <= one {
                raw.push(Point2::new(u, b * (one - u * u).max(zero).sqrt()));
            }
            return raw;
        }

        // Off the axes the nearest point is unique and lies in the same
        // quadrant: z = (a.x / (1 + s), b^2 a.y / (b^2 + s)) with s the root
        // of the secular equation on s > -min(1, b^2).
        raw.clear();
        if let Some((d1, d2)) = self.secular_root(a) {
            let z = Point2::new(a.x / d1, b2 * a.y / d2);
            if z.is_finite() {
                raw.push(self.polish(a, z));
                return raw;
            }
        }
        // Fallback: every stationary point from the quartic in s.
        raw.extend_from_slice(&[Point2::new(one, zero), Point2::new(zero, b)]);
        let p1 = [one, one]; // 1 + s
        let pb = [b2, one]; // b^2 + s
        let p1sq = poly::mul(&p1, &p1);
        let pbsq = poly::mul(&pb, &pb);
        let quartic = poly::add(
            &poly::mul(&p1sq, &pbsq),
            &poly::add(
                &poly::scale(&pbsq, -(a.x * a.x)),
                &poly::scale(&p1sq, -(b2 * a.y * a.y)),
            ),
        );
        for s in poly::real_roots(&quartic) {
            let d1 = one + s;
            let d2 = b2 + s;
            if d1 == zero || d2 == zero {
                continue;
            }
            let z = Point2::new(a.x / d1, b2 * a.y / d2);
            if z.is_finite() {
                raw.push(self.polish(a, z));
            }
        }
        raw
    }

    /// Root `s` of `(a.x / (1 + s))^2 + (b a.y / (b^2 + s))^2 = 1` with
    /// `s > -min(1, b^2)`, for `a.x, a.y > 0`, returned as `(1 + s, b^2 + s)`.
    ///
    /// Solved in `u = s + min(1, b^2) > 0` so the pole sits at `u = 0`
    /// exactly. The function is convex and decreasing in `u`, so Newton
    /// steps from the left of the root stay there; bisection guards the rest.
    fn secular_root(&self, a: Point2<T>) -> Option<(T, T)> {
        let one = T::one();
        let b2 = self.b * self.b;
        let (o1, o2) = if b2 > one { (T::zero(), b2 - one) } else { (one - b2, T::zero()) };
        let (p, r) = (a.x, self.b * a.y);
        let f = |u: T| {
            let (d1, d2) = (u + o1, u + o2);
            let (g1, g2) = (p / d1, r / d2);
            (g1 * g1 + g2 * g2 - one, -T::two() * (g1 * g1 / d1 + g2 * g2 / d2))
        };
        let mut lo = T::zero();
        let mut hi = p.hypot(r);
        let (fh, dh) = f(hi);
        if !(fh <= T::zero()) {
            return None;
        }
        if fh == T::zero() {
            return Some((hi + o1, hi + o2));
        }
        let mut u = hi - fh / dh;
        for _ in 0..200 {
            if !(u > lo && u < hi) {
                u = lo + (hi - lo) * T::half();
            }
            let (fu, du) = f(u);
            if fu == T::zero() {
                return Some((u + o1, u + o2));
            }
            if fu > T::zero() {
                lo = u;
            } else {
                hi = u;
            }
            let next = u - fu / du;
            if !next.is_finite() || (next - u).abs() <= T::epsilon() * u {
                let u = next.max(lo).min(hi);
                return Some((u + o1, u + o2));
            }
            u = next;
            if hi - lo <= T::epsilon() * hi {
                let u = u.max(lo).min(hi);
                return Some((u + o1, u + o2));
            }
        }
        Some((u + o1, u + o2))
    }

    /// Newton refinement of a stationary point in the eccentric anomaly `t`,
    /// returning a point of the form `(cos t, b sin t)`.
    fn polish(&self, a: Point2<T>, z: Point2<T>) -> Point2<T> {
        let b = self.b;
        let k = b * b - T::one();
        let mut t = (z.y / b).atan2(z.x);
        let grad = |t: T| {
            let (s, c) = t.sin_cos();
            k * s * c + a.x * s - b * a.y * c
        };
        let mut g = grad(t);
        for _ in 0..12 {
            let (s, c) = t.sin_cos();
            let dg = k * (c * c - s * s) + a.x * c + b * a.y * s;
            if dg == T::zero() || !dg.is_finite() {
                break;
            }
            let step = g / dg;
            if step.abs() > T::c(0.25) {
                break;
            }
            let next = t - step;
            let gn = grad(next);
            if gn.abs() >= g.abs() {
                if gn.abs() == g.abs() {
                    t = next;
                }
                break;
            }
            t = next;
            g = gn;
        }
        self.point_at(t)
    }
}

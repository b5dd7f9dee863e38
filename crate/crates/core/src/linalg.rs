//! Real 2x2 matrices.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

use crate::geometry::Point2;
use crate::Real;

/// Row-major `[[m00, m01], [m10, m11]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Matrix2<T> {
    pub m: [[T; 2]; 2],
}

impl<T: Real> Matrix2<T> {
    pub fn new(m00: T, m01: T, m10: T, m11: T) -> Self {
        Self {
            m: [[m00, m01], [m10, m11]],
        }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn from_columns(c0: Point2<T>, c1: Point2<T>) -> Self {
        Self::new(c0.x, c1.x, c0.y, c1.y)
    }

    /// `u v^T`.
    pub fn outer(u: Point2<T>, v: Point2<T>) -> Self {
        Self::new(u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y)
    }

    pub fn scale(&self, s: T) -> Self {
        let [[a, b], [c, d]] = self.m;
        Self::new(a * s, b * s, c * s, d * s)
    }

    pub fn transpose(&self) -> Self {
        let [[a, b], [c, d]] = self.m;
        Self::new(a, c, b, d)
    }

    pub fn trace(&self) -> T {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> T {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn apply(&self, v: Point2<T>) -> Point2<T> {
        Point2::new(
            self.m[0][0] * v.x + self.m[0][1] * v.y,
            self.m[1][0] * v.x + self.m[1][1] * v.y,
        )
    }

    /// Solves `self * x = rhs`; `None` when the matrix is numerically singular.
    pub fn solve(&self, rhs: Point2<T>) -> Option<Point2<T>> {
        let det = self.det();
        let scale = self.norm_inf();
        if !(det.abs() > T::epsilon() * scale * scale) {
            return None;
        }
        let [[a, b], [c, d]] = self.m;
        Some(Point2::new(
            (d * rhs.x - b * rhs.y) / det,
            (a * rhs.y - c * rhs.x) / det,
        ))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        let [[a, b], [c, d]] = self.m;
        (a.abs() + b.abs()).max(c.abs() + d.abs())
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.m
            .iter()
            .flatten()
            .fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }

    /// Both eigenvalues, the one with larger real part first (for a real
    /// pair) or the one with positive imaginary part first.
    pub fn eigenvalues(&self) -> [Complex<T>; 2] {
        let half_tr = self.trace() * T::half();
        let disc = half_tr * half_tr - self.det();
        if disc >= T::zero() {
            let s = disc.sqrt();
            // Avoid cancellation in the smaller root.
            let big = if half_tr >= T::zero() { half_tr + s } else { half_tr - s };
            let small = if big == T::zero() { T::zero() } else { self.det() / big };
            let (hi, lo) = if big >= small { (big, small) } else { (small, big) };
            [Complex::new(hi, T::zero()), Complex::new(lo, T::zero())]
        } else {
            let s = (-disc).sqrt();
            [Complex::new(half_tr, s), Complex::new(half_tr, -s)]
        }
    }

    pub fn spectral_radius(&self) -> T {
        let [a, b] = self.eigenvalues();
        a.norm().max(b.norm())
    }
}

impl<T: Real> Add for Matrix2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let [[a, b], [c, d]] = self.m;
        let [[e, f], [g, h]] = o.m;
        Self::new(a + e, b + f, c + g, d + h)
    }
}

impl<T: Real> Sub for Matrix2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let [[a, b], [c, d]] = self.m;
        let [[e, f], [g, h]] = o.m;
        Self::new(a - e, b - f, c - g, d - h)
    }
}

impl<T: Real> Mul for Matrix2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let [[a, b], [c, d]] = self.m;
        let [[e, f], [g, h]] = o.m;
        Self::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    }
}

use serde::{Deserialize, Serialize};

use crate::geometry::Point2;
use crate::Real;

/// Axis-aligned viewport `[xmin, xmax] x [ymin, ymax]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region<T> {
    pub xmin: T,
    pub xmax: T,
    pub ymin: T,
    pub ymax: T,
}

impl<T: Real> Region<T> {
    pub fn new(xmin: T, xmax: T, ymin: T, ymax: T) -> Result<Self, &'static str> {
        let r = Self { xmin, xmax, ymin, ymax };
        r.validate().map(|_| r)
    }

    /// `[-h, h]^2`.
    pub fn square(h: T) -> Result<Self, &'static str> {
        Self::new(-h, h, -h, h)
    }

    pub fn validate(&self) -> Result<(), &'static str> {
        let all = [self.xmin, self.xmax, self.ymin, self.ymax];
        if !all.iter().all(|v| v.is_finite()) {
            return Err("region bounds must be finite");
        }
        if !(self.xmin < self.xmax && self.ymin < self.ymax) {
            return Err("region needs xmin < xmax and ymin < ymax");
        }
        Ok(())
    }

    pub fn width(&self) -> T {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> T {
        self.ymax - self.ymin
    }

    pub fn center(&self) -> Point2<T> {
        Point2::new(
            (self.xmin + self.xmax) * T::half(),
            (self.ymin + self.ymax) * T::half(),
        )
    }

    pub fn contains(&self, p: Point2<T>) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    /// Same centre, each side multiplied by `k`.
    pub fn scaled(&self, k: T) -> Self {
        let c = self.center();
        let hw = self.width() * T::half() * k;
        let hh = self.height() * T::half() * k;
        Self {
            xmin: c.x - hw,
            xmax: c.x + hw,
            ymin: c.y - hh,
            ymax: c.y + hh,
        }
    }

    /// Midpoint of cell `(i, j)` of an `nx` by `ny` grid, `j = 0` at the top.
    ///
    /// Offsets are measured from the centre so that cells mirrored through
    /// the centre get exactly negated offsets.
    pub fn cell_midpoint(&self, i: usize, j: usize, nx: usize, ny: usize) -> Point2<T> {
        let c = self.center();
        let dx = self.width() / T::c(nx as f64);
        let dy = self.height() / T::c(ny as f64);
        let ox = T::c(i as f64 + 0.5 - nx as f64 / 2.0);
        let oy = T::c(j as f64 + 0.5 - ny as f64 / 2.0);
        Point2::new(c.x + ox * dx, c.y - oy * dy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoints_are_symmetric() {
        let r = Region::square(3.0f64).unwrap();
        for (i, j) in [(0, 0), (5, 17), (63, 2)] {
            let p = r.cell_midpoint(i, j, 64, 64);
            let q = r.cell_midpoint(63 - i, 63 - j, 64, 64);
            assert_eq!(p, -q);
        }
        assert_eq!(r.cell_midpoint(0, 0, 1, 1), Point2::new(0.0, 0.0));
        assert_eq!(r.cell_midpoint(0, 0, 2, 2), Point2::new(-1.5, 1.5));
    }

    #[test]
    fn rejects_degenerate() {
        assert!(Region::new(1.0, 1.0, 0.0, 1.0f64).is_err());
        assert!(Region::new(0.0, f64::NAN, 0.0, 1.0).is_err());
    }
}

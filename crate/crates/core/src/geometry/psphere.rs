//! Nearest points on the p-sphere `|x|^p + |y|^p = 1`.
//!
//! After reducing the query to the closed first quadrant, the quarter arc
//! from `(1, 0)` to `(0, 1)` is split at the diagonal point `(d, d)`,
//! `d = 2^(-1/p)`. The half nearer `(1, 0)` is parametrized by the coordinate
//! along which it runs without blowing up the derivative: `y` when `p >= 1`
//! (so the point is `(h(y), y)`), `x` when `p < 1` (the point is `(x, h(x))`),
//! with `h(w) = (1 - w^p)^(1/p)`. The other half is handled by swapping the
//! query. Local minima of the sampled squared distance are polished by a
//! bracketed Newton iteration on the tangency condition, and the vertices are
//! always added as candidates because the Lagrange system is singular there
//! for `p <= 1`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{select, GeometryError, Point2, ProjectionResult};
use crate::{Real, Tolerances};

#[derive(Clone)]
pub struct PSphere<T> {
    p: T,
    arc: Arc<HalfArc<T>>,
}

impl<T: Real> PSphere<T> {
    pub fn new(p: T) -> Result<Self, GeometryError> {
        Self::with_samples(p, Tolerances::<T>::default().psphere_samples)
    }

    /// `samples` is the total count over the quarter arc.
    pub fn with_samples(p: T, samples: usize) -> Result<Self, GeometryError> {
        if !p.is_finite() || p <= T::zero() {
            return Err(GeometryError::InvalidParameter("p-sphere exponent must be finite and > 0"));
        }
        Ok(Self {
            p,
            arc: Arc::new(HalfArc::new(p, (samples / 2).max(8))),
        })
    }

    #[inline]
    pub fn p(&self) -> T {
        self.p
    }

    /// `theta_p(x, y) = |x|^p + |y|^p`.
    #[inline]
    pub fn theta(&self, q: Point2<T>) -> T {
        q.x.abs().powf(self.p) + q.y.abs().powf(self.p)
    }

    #[inline]
    pub fn residual(&self, q: Point2<T>) -> T {
        self.theta(q) - T::one()
    }

    /// Gradient of `theta_p`; infinite or undefined at the vertices when `p <= 1`.
    pub fn gradient(&self, q: Point2<T>) -> Point2<T> {
        let g = |v: T| {
            if v == T::zero() {
                if self.p > T::one() {
                    T::zero()
                } else {
                    T::nan()
                }
            } else {
                self.p * v.abs().powf(self.p - T::one()) * v.signum()
            }
        };
        Point2::new(g(q.x), g(q.y))
    }

    /// Coordinate of the diagonal point `(d, d)`.
    pub fn diagonal(&self) -> T {
        self.arc.d
    }

    pub fn vertices(&self) -> [Point2<T>; 4] {
        let (o, z) = (T::one(), T::zero());
        [
            Point2::new(o, z),
            Point2::new(z, o),
            Point2::new(-o, z),
            Point2::new(z, -o),
        ]
    }

    /// Point at parameter `t` of the closed curve, `t` in `[0, 2*pi)`:
    /// `(sgn cos t |cos t|^(2/p), sgn sin t |sin t|^(2/p))`.
    pub fn point_at(&self, t: T) -> Point2<T> {
        let e = T::two() / self.p;
        let (s, c) = t.sin_cos();
        Point2::new(c.signum() * c.abs().powf(e), s.signum() * s.abs().powf(e))
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
        let (zero, one) = (T::zero(), T::one());
        if self.p == T::two() {
            let r = q.norm();
            if r == zero {
                return Err(GeometryError::CenterOfCircle);
            }
            return Ok(select::from_candidates(vec![q.scale(one / r)]));
        }
        let a = q.abs();
        if self.p == one {
            return Ok(select::finish(q, a, vec![diamond_foot(a)], tol));
        }

        let mut arc = Arc::clone(&self.arc);
        let mut prev: Option<Vec<(T, Point2<T>)>> = None;
        let mut doublings = 0;
        loop {
            let ranked = self.ranked_minima(&arc, a, tol);
            let ambiguous = ranked.len() > 1 && ranked[1].0 - ranked[0].0 <= tol.ambiguity;
            let agrees = prev.as_ref().is_some_and(|p| {
                p.len() == ranked.len()
                    && p.iter()
                        .zip(&ranked)
                        .take(2)
                        .all(|(x, y)| x.1.dist(y.1) <= tol.dedup)
            });
            if !ambiguous || agrees || doublings >= tol.psphere_max_doublings {
                let pts = ranked.into_iter().map(|(_, z)| z).collect();
                return Ok(select::finish(q, a, pts, tol));
            }
            doublings += 1;
            arc = Arc::new(HalfArc::new(self.p, arc.n * 2));
            prev = Some(ranked);
        }
    }

    /// Distinct stationary candidates for `a` sorted by distance.
    fn ranked_minima(&self, arc: &HalfArc<T>, a: Point2<T>, tol: &Tolerances<T>) -> Vec<(T, Point2<T>)> {
        let d = arc.d;
        let mut pts = arc.minima(a);
        pts.extend(arc.minima(a.swap()).into_iter().map(Point2::swap));
        pts.extend_from_slice(&[
            Point2::new(T::one(), T::zero()),
            Point2::new(T::zero(), T::one()),
            Point2::new(d, d),
        ]);
        let mut ranked: Vec<(T, Point2<T>)> = Vec::with_capacity(pts.len());
        for z in pts {
            if !ranked.iter().any(|(_, r)| r.dist(z) <= tol.dedup) {
                ranked.push((z.dist(a), z));
            }
        }
        ranked.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
        ranked
    }
}

impl<T: PartialEq> PartialEq for PSphere<T> {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl<T: fmt::Debug> fmt::Debug for PSphere<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PSphere").field("p", &self.p).finish()
    }
}

#[derive(Serialize, Deserialize)]
struct PSphereRepr<T> {
    p: T,
}

impl<T: Real + Serialize> Serialize for PSphere<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PSphereRepr { p: self.p }.serialize(s)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for PSphere<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = PSphereRepr::<T>::deserialize(d)?;
        PSphere::new(r.p).map_err(serde::de::Error::custom)
    }
}

/// Foot of the perpendicular onto the segment `x + y = 1`, `x, y >= 0`.
fn diamond_foot<T: Real>(a: Point2<T>) -> Point2<T> {
    let (zero, one) = (T::zero(), T::one());
    let diff = a.x - a.y;
    if diff >= one {
        Point2::new(one, zero)
    } else if diff <= -one {
        Point2::new(zero, one)
    } else {
        Point2::new(T::half() * (one + diff), T::half() * (one - diff))
    }
}

/// Samples of the half arc from `(1, 0)` to the diagonal point.
struct HalfArc<T> {
    p: T,
    d: T,
    /// Parametrize by the large coordinate (`p < 1`) instead of the small one.
    by_large: bool,
    n: usize,
    w: Vec<T>,
    pts: Vec<Point2<T>>,
}

impl<T: Real> HalfArc<T> {
    fn new(p: T, n: usize) -> Self {
        let one = T::one();
        let d = T::two().powf(-one / p);
        let by_large = p < one;
        let (lo, hi) = if by_large { (d, one) } else { (T::zero(), d) };
        let nt = T::from_usize(n).unwrap();
        let mut w: Vec<T> = (0..=n)
            .map(|i| lo + (hi - lo) * T::from_usize(i).unwrap() / nt)
            .collect();
        // Ordered from the vertex (1, 0) towards the diagonal.
        if by_large {
            w.reverse();
        }
        w[0] = if by_large { one } else { T::zero() };
        w[n] = d;
        let mut arc = Self {
            p,
            d,
            by_large,
            n,
            w: Vec::new(),
            pts: Vec::new(),
        };
        arc.pts = w.iter().map(|&wi| arc.point(wi)).collect();
        arc.w = w;
        arc
    }

    #[inline]
    fn h(&self, w: T) -> T {
        (T::one() - w.powf(self.p)).max(T::zero()).powf(T::one() / self.p)
    }

    #[inline]
    fn point(&self, w: T) -> Point2<T> {
        let h = self.h(w);
        if self.by_large {
            Point2::new(w, h)
        } else {
            Point2::new(h, w)
        }
    }

    /// `(h', h'')` at `w`.
    fn dh(&self, w: T) -> (T, T) {
        let one = T::one();
        let p = self.p;
        let s = (one - w.powf(p)).max(T::zero());
        let d1 = -w.powf(p - one) * s.powf(one / p - one);
        let d2 = (one - p) * w.powf(p - T::two()) * s.powf(one / p - T::two());
        (d1, d2)
    }

    /// Half the derivative of the squared distance along the parameter, and
    /// its derivative.
    fn grad(&self, a: Point2<T>, w: T) -> (T, T) {
        let h = self.h(w);
        let (d1, d2) = self.dh(w);
        let one = T::one();
        if self.by_large {
            let g = (w - a.x) + (h - a.y) * d1;
            let dg = one + d1 * d1 + (h - a.y) * d2;
            (g, dg)
        } else {
            let g = (h - a.x) * d1 + (w - a.y);
            let dg = d1 * d1 + (h - a.x) * d2 + one;
            (g, dg)
        }
    }

    /// Polished local minima of the distance from `a` over this half.
    fn minima(&self, a: Point2<T>) -> Vec<Point2<T>> {
        let dist: Vec<T> = self.pts.iter().map(|z| z.dist_sq(a)).collect();
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..=n {
            let left = if i > 0 { dist[i - 1] } else { T::infinity() };
            let right = if i < n { dist[i + 1] } else { T::infinity() };
            if dist[i] > left || dist[i] > right {
                continue;
            }
            // Flat runs yield one representative.
            if i > 0 && dist[i] == left {
                continue;
            }
            let lo = self.w[i.saturating_sub(1)];
            let hi = self.w[(i + 1).min(n)];
            out.push(self.polish(a, lo, hi, self.w[i]));
        }
        out
    }

    /// Minimizes the distance over the parameter interval spanned by `lo`
    /// and `hi` (unordered), starting from the best sample `w0`.
    fn polish(&self, a: Point2<T>, lo: T, hi: T, w0: T) -> Point2<T> {
        let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let f = |w: T| self.point(w).dist_sq(a);
        let (glo, _) = self.grad(a, lo);
        let (ghi, _) = self.grad(a, hi);
        if glo.is_finite() && ghi.is_finite() && glo < T::zero() && ghi > T::zero() {
            let mut w = w0;
            for _ in 0..100 {
                let (g, dg) = self.grad(a, w);
                if g == T::zero() || !g.is_finite() {
                    break;
                }
                if g < T::zero() {
                    lo = w;
                } else {
                    hi = w;
                }
                let newton = w - g / dg;
                let next = if dg > T::zero() && dg.is_finite() && newton > lo && newton < hi {
                    newton
                } else {
                    T::half() * (lo + hi)
                };
                if next == w || next <= lo || next >= hi {
                    break;
                }
                w = next;
            }
            return self.point(w);
        }
        // No clean bracket: stay with the best of the endpoints and a golden
        // section refinement.
        let mut best = w0;
        let mut fbest = f(w0);
        let ratio = T::c(0.618_033_988_749_894_8);
        let (mut x0, mut x3) = (lo, hi);
        let mut x1 = x3 - ratio * (x3 - x0);
        let mut x2 = x0 + ratio * (x3 - x0);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..80 {
            if f1 < f2 {
                x3 = x2;
                x2 = x1;
                f2 = f1;
                x1 = x3 - ratio * (x3 - x0);
                f1 = f(x1);
            } else {
                x0 = x1;
                x1 = x2;
                f1 = f2;
                x2 = x0 + ratio * (x3 - x0);
                f2 = f(x2);
            }
        }
        for (w, fw) in [(x1, f1), (x2, f2), (lo, f(lo)), (hi, f(hi))] {
            if fw < fbest {
                best = w;
                fbest = fw;
            }
        }
        self.point(best)
    }
}

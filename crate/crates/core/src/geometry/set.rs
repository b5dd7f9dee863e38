use serde::{Deserialize, Serialize};

use super::{Ellipse, GeometryError, Line, PSphere, Point2, ProjectionResult};
use crate::{Real, Tolerances};

/// One of the two sets of a feasibility problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    rename_all = "lowercase",
    bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>")
)]
pub enum ConstraintSet<T> {
    Line(Line<T>),
    Ellipse(Ellipse<T>),
    PSphere(PSphere<T>),
}

impl<T: Real> From<Line<T>> for ConstraintSet<T> {
    fn from(l: Line<T>) -> Self {
        Self::Line(l)
    }
}

impl<T: Real> From<Ellipse<T>> for ConstraintSet<T> {
    fn from(e: Ellipse<T>) -> Self {
        Self::Ellipse(e)
    }
}

impl<T: Real> From<PSphere<T>> for ConstraintSet<T> {
    fn from(s: PSphere<T>) -> Self {
        Self::PSphere(s)
    }
}

impl<T: Real> ConstraintSet<T> {
    pub fn project(&self, q: Point2<T>) -> Result<ProjectionResult<T>, GeometryError> {
        self.project_with(q, &Tolerances::default())
    }

    pub fn project_with(
        &self,
        q: Point2<T>,
        tol: &Tolerances<T>,
    ) -> Result<ProjectionResult<T>, GeometryError> {
        match self {
            Self::Line(l) => {
                if !q.is_finite() {
                    return Err(GeometryError::NonFiniteInput);
                }
                let point = l.project(q);
                Ok(ProjectionResult {
                    point,
                    candidates: vec![point],
                    multivalued: false,
                })
            }
            Self::Ellipse(e) => e.project_with(q, tol),
            Self::PSphere(s) => s.project_with(q, tol),
        }
    }

    /// The selected nearest point.
    #[inline]
    pub fn nearest(&self, q: Point2<T>) -> Result<Point2<T>, GeometryError> {
        match self {
            Self::Line(l) if q.is_finite() => Ok(l.project(q)),
            _ => self.project(q).map(|r| r.point),
        }
    }

    /// Membership residual: signed distance for a line, `phi - 1` otherwise.
    pub fn residual(&self, q: Point2<T>) -> T {
        match self {
            Self::Line(l) => l.residual(q),
            Self::Ellipse(e) => e.residual(q),
            Self::PSphere(s) => s.residual(q),
        }
    }

    pub fn contains(&self, q: Point2<T>, tol: T) -> bool {
        self.residual(q).abs() <= tol
    }

    #[inline]
    pub fn as_line(&self) -> Option<&Line<T>> {
        match self {
            Self::Line(l) => Some(l),
            _ => None,
        }
    }

    #[inline]
    pub fn is_line(&self) -> bool {
        matches!(self, Self::Line(_))
    }

    /// Half-widths of the axis-aligned bounding box of a curve.
    pub fn extent(&self) -> Option<Point2<T>> {
        match self {
            Self::Line(_) => None,
            Self::Ellipse(e) => Some(Point2::new(T::one(), e.b)),
            Self::PSphere(_) => Some(Point2::new(T::one(), T::one())),
        }
    }

    /// Closed-curve parametrization over `[0, 2*pi)`; `None` for lines.
    pub fn curve_point(&self, t: T) -> Option<Point2<T>> {
        match self {
            Self::Line(_) => None,
            Self::Ellipse(e) => Some(e.point_at(t)),
            Self::PSphere(s) => Some(s.point_at(t)),
        }
    }

    /// Points that sampling may step over: vertices, and diagonals for p-spheres.
    fn special_points(&self) -> Vec<Point2<T>> {
        match self {
            Self::Line(_) => Vec::new(),
            Self::Ellipse(e) => e.vertices().to_vec(),
            Self::PSphere(s) => {
                let d = s.diagonal();
                let mut v = s.vertices().to_vec();
                v.extend_from_slice(&[
                    Point2::new(d, d),
                    Point2::new(-d, d),
                    Point2::new(-d, -d),
                    Point2::new(d, -d),
                ]);
                v
            }
        }
    }
}

/// `R_C(q) = 2 P_C(q) - q` with the selected projection.
pub fn reflect<T: Real>(c: &ConstraintSet<T>, q: Point2<T>) -> Result<Point2<T>, GeometryError> {
    let p = c.nearest(q)?;
    Ok(p.scale(T::two()) - q)
}

/// Points of `C` on the line `L` (empty when infeasible).
pub fn feasible_points<T: Real>(
    c: &ConstraintSet<T>,
    line: &Line<T>,
) -> Result<Vec<Point2<T>>, GeometryError> {
    let tol = Tolerances::<T>::default();
    match c {
        ConstraintSet::Line(_) => Err(GeometryError::UnsupportedPair),
        ConstraintSet::Ellipse(e) => Ok(ellipse_line(e.b, line, &tol)),
        ConstraintSet::PSphere(s) if s.p() == T::two() => Ok(ellipse_line(T::one(), line, &tol)),
        ConstraintSet::PSphere(s) => Ok(psphere_line(s, line, &tol)),
    }
}

/// Exact intersection of `x^2 + (y/b)^2 = 1` with the line.
fn ellipse_line<T: Real>(b: T, line: &Line<T>, tol: &Tolerances<T>) -> Vec<Point2<T>> {
    let p0 = line.anchor();
    let d = line.direction();
    let ib2 = T::one() / (b * b);
    let qa = d.x * d.x + d.y * d.y * ib2;
    let qb = T::two() * (p0.x * d.x + p0.y * d.y * ib2);
    let qc = p0.x * p0.x + p0.y * p0.y * ib2 - T::one();
    let disc = qb * qb - T::c(4.0) * qa * qc;
    let scale = qb * qb + (T::c(4.0) * qa * qc).abs() + T::epsilon();
    if disc.abs() <= tol.tangency * scale {
        return vec![line.at(-qb / (T::two() * qa))];
    }
    if disc < T::zero() {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let sgn = if qb < T::zero() { -T::one() } else { T::one() };
    let q = -T::half() * (qb + sgn * sq);
    let (s1, s2) = (q / qa, qc / q);
    let mut pts = vec![line.at(s1), line.at(s2)];
    pts.sort_by(|a, b| a.lex_cmp(b));
    pts
}

/// Sign-change bracketing of `theta_p - 1` along the clipped line.
fn psphere_line<T: Real>(s: &PSphere<T>, line: &Line<T>, tol: &Tolerances<T>) -> Vec<Point2<T>> {
    let Some((lo, hi)) = clip_to_box(line, T::c(1.01)) else {
        return Vec::new();
    };
    let g = |t: T| s.residual(line.at(t));
    let n = tol.scan_samples;
    let nt = T::from_usize(n).unwrap();
    let mut out: Vec<Point2<T>> = Vec::new();
    let mut t0 = lo;
    let mut g0 = g(t0);
    for i in 1..=n {
        let t1 = lo + (hi - lo) * T::from_usize(i).unwrap() / nt;
        let g1 = g(t1);
        let root = if g0 == T::zero() {
            Some(t0)
        } else if g0.signum() != g1.signum() && g1 != T::zero() {
            Some(bisect(&g, t0, t1, g0))
        } else {
            None
        };
        if let Some(r) = root {
            super::select::push_dedup(&mut out, line.at(r), tol.dedup);
        }
        t0 = t1;
        g0 = g1;
    }
    if g0 == T::zero() {
        super::select::push_dedup(&mut out, line.at(t0), tol.dedup);
    }
    out.sort_by(|a, b| a.lex_cmp(b));
    out
}

fn bisect<T: Real>(g: &impl Fn(T) -> T, mut a: T, mut b: T, ga: T) -> T {
    let neg = ga < T::zero();
    for _ in 0..200 {
        let m = T::half() * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == T::zero() {
            return m;
        }
        if (gm < T::zero()) == neg {
            a = m;
        } else {
            b = m;
        }
    }
    T::half() * (a + b)
}

/// Parameter range of the line inside `[-r, r]^2`.
fn clip_to_box<T: Real>(line: &Line<T>, r: T) -> Option<(T, T)> {
    let p0 = line.anchor();
    let d = line.direction();
    let mut lo = -T::infinity();
    let mut hi = T::infinity();
    for (p, v) in [(p0.x, d.x), (p0.y, d.y)] {
        if v == T::zero() {
            if p.abs() > r {
                return None;
            }
            continue;
        }
        let (a, b) = ((-r - p) / v, (r - p) / v);
        lo = lo.max(a.min(b));
        hi = hi.min(a.max(b));
    }
    (lo < hi).then_some((lo, hi))
}

/// `d(A, B)`; at least one of the sets must be a line.
pub fn set_distance<T: Real>(a: &ConstraintSet<T>, b: &ConstraintSet<T>) -> Result<T, GeometryError> {
    match (a, b) {
        (ConstraintSet::Line(l1), ConstraintSet::Line(l2)) => {
            if l1.intersect(l2).is_some() {
                return Ok(T::zero());
            }
            let s = l1.normal().dot(l2.normal()).signum();
            Ok((l1.gamma - s * l2.gamma).abs())
        }
        _ => gap_witness(a, b).map(|(d, _)| d),
    }
}

/// The gap between a curve and a line together with the curve point that
/// attains it (a feasible point when the gap is zero).
pub fn gap_witness<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
) -> Result<(T, Point2<T>), GeometryError> {
    let (curve, line) = match (a, b) {
        (c, ConstraintSet::Line(l)) if !c.is_line() => (c, l),
        (ConstraintSet::Line(l), c) if !c.is_line() => (c, l),
        _ => return Err(GeometryError::UnsupportedPair),
    };
    if let Some(&f) = feasible_points(curve, line)?.first() {
        return Ok((T::zero(), f));
    }
    let n = Tolerances::<T>::default().scan_samples;
    let dt = T::TAU() / T::from_usize(n).unwrap();
    let h = |t: T| line.residual(curve.curve_point(t).unwrap()).abs();

    let mut best_t = T::zero();
    let mut best = h(best_t);
    for i in 1..n {
        let t = dt * T::from_usize(i).unwrap();
        let v = h(t);
        if v < best {
            best = v;
            best_t = t;
        }
    }
    // Golden-section refinement around the best sample.
    let ratio = T::c(0.618_033_988_749_894_8);
    let (mut x0, mut x3) = (best_t - dt, best_t + dt);
    let mut x1 = x3 - ratio * (x3 - x0);
    let mut x2 = x0 + ratio * (x3 - x0);
    let (mut f1, mut f2) = (h(x1), h(x2));
    for _ in 0..100 {
        if f1 < f2 {
            x3 = x2;
            x2 = x1;
            f2 = f1;
            x1 = x3 - ratio * (x3 - x0);
            f1 = h(x1);
        } else {
            x0 = x1;
            x1 = x2;
            f1 = f2;
            x2 = x0 + ratio * (x3 - x0);
            f2 = h(x2);
        }
    }
    let mut witness = curve.curve_point(best_t).unwrap();
    for (t, v) in [(x1, f1), (x2, f2)] {
        if v < best {
            best = v;
            witness = curve.curve_point(t).unwrap();
        }
    }
    for z in curve.special_points() {
        let v = line.residual(z).abs();
        if v < best {
            best = v;
            witness = z;
        }
    }
    Ok((best, witness))
}

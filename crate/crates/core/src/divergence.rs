//! Disjoint pairs: separating functionals, the linear growth of DR iterates,
//! the displacement of the orbit and the limit of its shadow on `A`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dr::{dr_step, step_displacement, DrError};
use crate::geometry::{set_distance, ConstraintSet, GeometryError, Line, Point2};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
pub enum DivergenceError {
    #[error("the sets intersect or touch, so no separating hyperplane exists")]
    NotSeparable,
    #[error("need exactly one line and one curved set")]
    Unsupported,
    #[error("shadow limit is only certified for convex bodies (p >= 1)")]
    NotConvex,
    #[error("shadow sequence has not settled: last move {last_move:e}")]
    NonConvergedShadow { last_move: f64 },
    #[error("need at least {min} steps")]
    TooFewSteps { min: usize },
    #[error(transparent)]
    Iteration(#[from] DrError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The affine functional `f(x) = <normal, x> - offset`, negative on `A` and
/// positive on `B`, and the gap `d(A, B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationCertificate<T> {
    pub normal: Point2<T>,
    pub offset: T,
    pub gap: T,
}

impl<T: Real> SeparationCertificate<T> {
    pub fn eval(&self, x: Point2<T>) -> T {
        self.normal.dot(x) - self.offset
    }
}

/// `max <n, a>` over `a` in the curved set, for a unit vector `n`.
fn support<T: Real>(c: &ConstraintSet<T>, n: Point2<T>) -> Option<T> {
    match c {
        ConstraintSet::Line(_) => None,
        ConstraintSet::Ellipse(e) => Some(n.x.hypot(e.b * n.y)),
        ConstraintSet::PSphere(s) => {
            let p = s.p();
            if p <= T::one() {
                // The convex hull is the unit diamond.
                Some(n.x.abs().max(n.y.abs()))
            } else {
                let q = p / (p - T::one());
                Some((n.x.abs().powf(q) + n.y.abs().powf(q)).powf(q.recip()))
            }
        }
    }
}

fn split<'a, T: Real>(
    a: &'a ConstraintSet<T>,
    b: &'a ConstraintSet<T>,
) -> Result<(&'a ConstraintSet<T>, Line<T>, bool), DivergenceError> {
    match (a.as_line(), b.as_line()) {
        (None, Some(l)) => Ok((a, *l, false)),
        (Some(l), None) => Ok((b, *l, true)),
        _ => Err(DivergenceError::Unsupported),
    }
}

/// Hyperplane parallel to the line, halfway across the gap.
pub fn separating_functional<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
) -> Result<SeparationCertificate<T>, DivergenceError> {
    let (curve, line, line_first) = split(a, b)?;
    let n = line.normal();
    let hi = support(curve, n).ok_or(DivergenceError::Unsupported)?;
    let lo = -support(curve, -n).ok_or(DivergenceError::Unsupported)?;
    let (normal, level, gap) = if line.gamma > hi {
        (n, line.gamma, line.gamma - hi)
    } else if line.gamma < lo {
        (-n, -line.gamma, lo - line.gamma)
    } else {
        return Err(DivergenceError::NotSeparable);
    };
    let offset = level - gap * T::half();
    // Oriented positive towards the line; flip when the line is `A`.
    Ok(if line_first {
        SeparationCertificate {
            normal: -normal,
            offset: -offset,
            gap,
        }
    } else {
        SeparationCertificate { normal, offset, gap }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport<T> {
    pub steps: usize,
    pub certificate: SeparationCertificate<T>,
    /// `min_k f(x_{k+1}) - f(x_k)`.
    pub min_functional_increment: T,
    pub gap: T,
    pub monotone: bool,
    /// Tail average of the steps, see [`estimate_minimal_displacement`].
    pub displacement_estimate: Point2<T>,
    /// Largest `|x_{k+1} - x_k - (P_B(R_A x_k) - P_A x_k)| / (1 + |x_k|)`.
    pub max_step_identity_error: T,
    pub final_point: Point2<T>,
}

/// Slack allowed below the gap when judging monotone growth.
pub const INCREMENT_SLACK: f64 = 1e-9;

fn tail_average<T: Real>(pts: &[Point2<T>]) -> Point2<T> {
    let n = pts.len() - 1;
    let tail = (n / 10).max(1);
    (pts[n] - pts[n - tail]).scale(T::c(tail as f64).recip())
}

/// Runs `n` DR steps and checks that the separating functional grows by at
/// least the gap per step.
pub fn verify_linear_divergence<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    x0: Point2<T>,
    n: usize,
) -> Result<DivergenceReport<T>, DivergenceError> {
    if n == 0 {
        return Err(DivergenceError::TooFewSteps { min: 1 });
    }
    let cert = separating_functional(a, b)?;
    let mut pts = Vec::with_capacity(n + 1);
    pts.push(x0);
    let mut x = x0;
    let mut min_inc = T::infinity();
    let mut max_err = T::zero();
    for k in 0..n {
        let err = |source| DrError { index: k, source };
        let next = dr_step(a, b, x).map_err(err)?;
        let d = step_displacement(a, b, x).map_err(err)?;
        let step = next - x;
        max_err = max_err.max(step.dist(d) / (T::one() + x.norm()));
        min_inc = min_inc.min(cert.normal.dot(step));
        x = next;
        pts.push(x);
    }
    Ok(DivergenceReport {
        steps: n,
        certificate: cert,
        min_functional_increment: min_inc,
        gap: cert.gap,
        monotone: min_inc >= cert.gap - T::c(INCREMENT_SLACK),
        displacement_estimate: tail_average(&pts),
        max_step_identity_error: max_err,
        final_point: x,
    })
}

/// Average of `x_{k+1} - x_k` over the last `n / 10` of `n` steps.
///
/// For a disjoint line/curve pair this tends to the gap vector pointing from
/// `A` to `B`; the minimal displacement vector `v'` of the theory is its
/// negative, so in this crate the shadow limit lies on `A` and on `B` shifted
/// back by the estimate.
pub fn estimate_minimal_displacement<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    x0: Point2<T>,
    n: usize,
) -> Result<Point2<T>, DivergenceError> {
    if n < 100 {
        return Err(DivergenceError::TooFewSteps { min: 100 });
    }
    let mut pts = Vec::with_capacity(n + 1);
    let mut x = x0;
    pts.push(x);
    for k in 0..n {
        x = dr_step(a, b, x).map_err(|source| DrError { index: k, source })?;
        pts.push(x);
    }
    Ok(tail_average(&pts))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowReport<T> {
    /// `P_A(x_n)`.
    pub shadow: Point2<T>,
    /// Tail-average step; equals `-v'`.
    pub displacement: Point2<T>,
    /// Membership residual of the shadow on `A`.
    pub residual_a: T,
    /// Distance from `shadow + displacement` to `B`.
    pub translate_residual: T,
    /// `|P_A(x_n) - P_A(x_{n-1})|`.
    pub last_move: T,
}

/// Shadow-convergence tolerance on the last move.
pub const SHADOW_TOL: f64 = 1e-6;

/// Limit of the shadow sequence `P_A(x_k)` for a disjoint pair of convex
/// boundaries.
pub fn shadow_limit<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    x0: Point2<T>,
    n: usize,
) -> Result<ShadowReport<T>, DivergenceError> {
    if n < 100 {
        return Err(DivergenceError::TooFewSteps { min: 100 });
    }
    let (curve, _, _) = split(a, b)?;
    if let ConstraintSet::PSphere(s) = curve {
        if s.p() < T::one() {
            return Err(DivergenceError::NotConvex);
        }
    }
    separating_functional(a, b)?;

    let mut pts = Vec::with_capacity(n + 1);
    let mut x = x0;
    pts.push(x);
    let mut prev_shadow = a.nearest(x)?;
    let mut shadow = prev_shadow;
    for k in 0..n {
        let err = |source| DrError { index: k, source };
        let pa = a.nearest(x).map_err(err)?;
        let pb = b.nearest(pa.scale(T::two()) - x).map_err(err)?;
        x = x + pb - pa;
        pts.push(x);
        prev_shadow = shadow;
        shadow = a.nearest(x).map_err(|source| DrError { index: k + 1, source })?;
    }
    let last_move = shadow.dist(prev_shadow);
    if !(last_move <= T::c(SHADOW_TOL)) {
        return Err(DivergenceError::NonConvergedShadow {
            last_move: last_move.to_f64_lossy(),
        });
    }
    let d = tail_average(&pts);
    let shifted = shadow + d;
    let translate_residual = shifted.dist(b.nearest(shifted)?);
    Ok(ShadowReport {
        shadow,
        displacement: d,
        residual_a: a.residual(shadow).abs(),
        translate_residual,
        last_move,
    })
}

/// `d(A, B)` as reported by [`set_distance`], for cross-checking certificates.
pub fn gap<T: Real>(a: &ConstraintSet<T>, b: &ConstraintSet<T>) -> Result<T, DivergenceError> {
    Ok(set_distance(a, b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Ellipse, PSphere};

    fn circle() -> ConstraintSet<f64> {
        PSphere::new(2.0).unwrap().into()
    }

    fn line(m: f64, c: f64) -> ConstraintSet<f64> {
        Line::from_slope_intercept(m, c).into()
    }

    #[test]
    fn circle_and_horizontal_line() {
        let c = separating_functional(&circle(), &line(0.0, 2.0)).unwrap();
        assert!(c.normal.dist(Point2::new(0.0, 1.0)) < 1e-15);
        assert!((c.offset - 1.5).abs() < 1e-15);
        assert!((c.gap - 1.0).abs() < 1e-15);
        let flipped = separating_functional(&line(0.0, 2.0), &circle()).unwrap();
        assert_eq!(flipped.normal, -c.normal);
        assert!(flipped.eval(Point2::new(0.0, 1.0)) > 0.0);
    }

    #[test]
    fn line_below_the_set() {
        let c = separating_functional(&circle(), &line(0.0, -3.0)).unwrap();
        assert!(c.normal.dist(Point2::new(0.0, -1.0)) < 1e-15);
        assert!((c.gap - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ellipse_gap_matches_set_distance() {
        let e: ConstraintSet<f64> = Ellipse::new(2.0).unwrap().into();
        let b = line(1.0, 10.0);
        let c = separating_functional(&e, &b).unwrap();
        let s = 0.5f64.sqrt();
        assert!(c.normal.dist(Point2::new(-s, s)) < 1e-15);
        assert!((c.gap - (10.0 - 5f64.sqrt()) * s).abs() < 1e-14);
        assert!((c.gap - gap(&e, &b).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn nonconvex_gap_uses_hull() {
        let s: ConstraintSet<f64> = PSphere::new(0.5).unwrap().into();
        let c = separating_functional(&s, &line(1.0, 3.0)).unwrap();
        assert!((c.gap - 2f64.sqrt()).abs() < 1e-14);
        let s: ConstraintSet<f64> = PSphere::new(4.0).unwrap().into();
        let b = line(-0.5, 2.5);
        let c = separating_functional(&s, &b).unwrap();
        assert!((c.gap - gap(&s, &b).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn feasible_pair_not_separable() {
        let e: ConstraintSet<f64> = Ellipse::new(2.0).unwrap().into();
        assert_eq!(
            separating_functional(&e, &line(2.0, 0.0)),
            Err(DivergenceError::NotSeparable)
        );
        assert_eq!(
            separating_functional(&circle(), &line(0.0, 1.0)),
            Err(DivergenceError::NotSeparable)
        );
        assert_eq!(
            separating_functional(&circle(), &circle()),
            Err(DivergenceError::Unsupported)
        );
    }

    #[test]
    fn divergence_report_for_circle() {
        let r = verify_linear_divergence(&circle(), &line(0.0, 2.0), Point2::new(0.5, 0.0), 1000).unwrap();
        assert!(r.monotone);
        assert!(r.min_functional_increment >= 1.0 - 1e-9);
        assert!(r.max_step_identity_error < 1e-13);
        assert!(r.displacement_estimate.dist(Point2::new(0.0, 1.0)) < 1e-9);
    }

    #[test]
    fn shadow_for_circle() {
        let r = shadow_limit(&circle(), &line(0.0, 2.0), Point2::new(3.0, 0.0), 2000).unwrap();
        assert!(r.shadow.dist(Point2::new(0.0, 1.0)) < 1e-6);
        assert!(r.translate_residual < 1e-6);
        assert!(r.residual_a < 1e-12);
    }

    #[test]
    fn shadow_refused_for_nonconvex_or_feasible() {
        let s: ConstraintSet<f64> = PSphere::new(0.5).unwrap().into();
        assert_eq!(
            shadow_limit(&s, &line(1.0, 3.0), Point2::new(0.3, 0.0), 200),
            Err(DivergenceError::NotConvex)
        );
        assert_eq!(
            shadow_limit(&circle(), &line(0.0, 0.5), Point2::new(0.3, 0.0), 200),
            Err(DivergenceError::NotSeparable)
        );
        assert!(matches!(
            estimate_minimal_displacement(&circle(), &line(0.0, 2.0), Point2::new(0.3, 0.0), 10),
            Err(DivergenceError::TooFewSteps { min: 100 })
        ));
    }

    #[test]
    fn displacement_vanishes_for_feasible_pair() {
        let e: ConstraintSet<f64> = Ellipse::new(2.0).unwrap().into();
        let v = estimate_minimal_displacement(&e, &line(2.0, 0.0), Point2::new(0.9, 1.1), 500).unwrap();
        assert!(v.norm() < 1e-9);
    }
}

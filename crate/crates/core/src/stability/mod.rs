//! Linearization of the DR operator: Jacobians, the closed-form two-line
//! theory, tangent-line certificates at feasible points and periodic points.

mod periodic;

pub use periodic::{
    find_periodic_point, find_periodic_point_with, periodic_scan, periodic_scan_with, Classification,
    NewtonOptions, PeriodicPoint, ScanOptions,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ConstraintSet, Ellipse, GeometryError, Line, Point2};
use crate::linalg::Matrix2;
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
pub enum StabilityError {
    #[error("map evaluation failed: {0}")]
    EvaluationFailure(GeometryError),
    #[error("line normal is zero")]
    DegenerateLine,
    #[error("gradient vanishes or is undefined at the point")]
    SingularGradient,
    #[error("point is not on the set (residual {residual:e})")]
    OffSet { residual: f64 },
    #[error("tangent lines need a curved set")]
    NotACurve,
    #[error("Newton iteration did not find a periodic point")]
    NotFound,
    #[error("root has smaller period {period}")]
    NonMinimalPeriod { period: usize },
    #[error("period must be at least 1")]
    InvalidPeriod,
}

impl From<GeometryError> for StabilityError {
    fn from(e: GeometryError) -> Self {
        Self::EvaluationFailure(e)
    }
}

/// Default relative finite-difference step.
pub const FD_STEP: f64 = 1e-6;

/// Central-difference Jacobian with step `h * (1 + |x|)`.
pub fn numeric_jacobian<T, F>(mut f: F, x: Point2<T>, h: T) -> Result<Matrix2<T>, StabilityError>
where
    T: Real,
    F: FnMut(Point2<T>) -> Result<Point2<T>, GeometryError>,
{
    let h = h * (T::one() + x.norm());
    let ex = Point2::new(h, T::zero());
    let ey = Point2::new(T::zero(), h);
    let two_h = h + h;
    let cx = (f(x + ex)? - f(x - ex)?).scale(two_h.recip());
    let cy = (f(x + ey)? - f(x - ey)?).scale(two_h.recip());
    let j = Matrix2::from_columns(cx, cy);
    if j.is_finite() {
        Ok(j)
    } else {
        Err(StabilityError::EvaluationFailure(GeometryError::NonFiniteInput))
    }
}

fn unit_normal<T: Real>(l: &Line<T>) -> Result<Point2<T>, StabilityError> {
    let n = l.normal();
    let s = n.norm();
    if !(s > T::zero()) || !s.is_finite() {
        return Err(StabilityError::DegenerateLine);
    }
    Ok(n.scale(s.recip()))
}

/// Matrix of the projection onto the direction of `l`; the offset of `l` is
/// ignored, which gives the projection onto the parallel line through 0.
pub fn two_line_projection_matrix<T: Real>(l: &Line<T>) -> Matrix2<T> {
    let (a, b) = (l.alpha, l.beta);
    let s = (a * a + b * b).recip();
    Matrix2::new(b * b, -a * b, -a * b, a * a).scale(s)
}

fn psi_omega_delta<T: Real>(l1: &Line<T>, l2: &Line<T>) -> Result<(T, T, T), StabilityError> {
    unit_normal(l1)?;
    unit_normal(l2)?;
    let (a, b) = (l1.alpha, l1.beta);
    let (ca, cb) = (l2.alpha, l2.beta);
    let psi = a * ca + b * cb;
    let omega = a * cb - b * ca;
    let delta = (a * a + b * b) * (ca * ca + cb * cb);
    Ok((psi, omega, delta))
}

/// `(psi / Delta) [[psi, omega], [-omega, psi]]`.
///
/// This is the linear DR operator that reflects in `l2` first and then in
/// `l1`, i.e. [`crate::dr::dr_step_two_lines`]`(l1, l2, .)`.
pub fn two_line_dr_matrix<T: Real>(l1: &Line<T>, l2: &Line<T>) -> Result<Matrix2<T>, StabilityError> {
    let (psi, omega, delta) = psi_omega_delta(l1, l2)?;
    Ok(Matrix2::new(psi, omega, -omega, psi).scale(psi / delta))
}

/// `psi^2 / Delta`, the squared cosine of the angle between the lines and the
/// squared modulus of both eigenvalues of [`two_line_dr_matrix`].
pub fn eigen_modulus_sq<T: Real>(l1: &Line<T>, l2: &Line<T>) -> Result<T, StabilityError> {
    let (psi, _, delta) = psi_omega_delta(l1, l2)?;
    Ok((psi * psi / delta).min(T::one()))
}

/// Membership tolerance for `tangent_line_at`.
pub const ON_SET_TOL: f64 = 1e-8;

fn check_on<T: Real>(c: &ConstraintSet<T>, f: Point2<T>) -> Result<(), StabilityError> {
    let r = c.residual(f);
    if !(r.abs() <= T::tol(ON_SET_TOL, 16.0)) {
        return Err(StabilityError::OffSet {
            residual: r.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Tangent line to a curved set at the point `f` on it.
pub fn tangent_line_at<T: Real>(c: &ConstraintSet<T>, f: Point2<T>) -> Result<Line<T>, StabilityError> {
    check_on(c, f)?;
    let g = match c {
        ConstraintSet::Line(_) => return Err(StabilityError::NotACurve),
        ConstraintSet::Ellipse(e) => e.normal_at(f),
        ConstraintSet::PSphere(s) => s.gradient(f),
    };
    if !g.is_finite() || g.norm() == T::zero() {
        return Err(StabilityError::SingularGradient);
    }
    Line::through(f, g).map_err(|_| StabilityError::SingularGradient)
}

/// Derivative of the projection onto `E` at a point `f` of `E`, which is the
/// projection onto the tangent direction at `f`.
pub fn tangent_projection_matrix<T: Real>(e: &Ellipse<T>, f: Point2<T>) -> Result<Matrix2<T>, StabilityError> {
    check_on(&ConstraintSet::Ellipse(*e), f)?;
    let b2 = e.b * e.b;
    let b4 = b2 * b2;
    let (x0, y0) = (f.x, f.y);
    let s = b4 / (b4 * x0 * x0 + y0 * y0);
    Ok(Matrix2::new(y0 * y0 / b4, -x0 * y0 / b2, -x0 * y0 / b2, x0 * x0).scale(s))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCertificate<T> {
    pub feasible_point: Point2<T>,
    pub tangent_line: Line<T>,
    pub eigen_modulus_sq: T,
    pub locally_convergent: bool,
    /// Set when the tangent and the line coincide (modulus 1).
    pub tangential: bool,
}

/// Strict threshold on `eigen_modulus_sq` for a certificate.
pub const CERTIFICATE_THRESHOLD: f64 = 1.0 - 1e-9;

/// Linear stability of DR at a feasible point `f` of `c` and `l`.
pub fn local_convergence_certificate<T: Real>(
    c: &ConstraintSet<T>,
    l: &Line<T>,
    f: Point2<T>,
) -> Result<ConvergenceCertificate<T>, StabilityError> {
    let r = l.residual(f);
    if !(r.abs() <= T::tol(ON_SET_TOL, 16.0)) {
        return Err(StabilityError::OffSet {
            residual: r.to_f64_lossy(),
        });
    }
    let h = tangent_line_at(c, f)?;
    let mu = eigen_modulus_sq(&h.through_origin(), &l.through_origin())?;
    let threshold = T::c(CERTIFICATE_THRESHOLD);
    Ok(ConvergenceCertificate {
        feasible_point: f,
        tangent_line: h,
        eigen_modulus_sq: mu,
        locally_convergent: mu < threshold,
        tangential: mu >= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dr::{dr_step, dr_step_two_lines};
    use crate::geometry::PSphere;

    fn close(a: Matrix2<f64>, b: Matrix2<f64>, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn jacobian_of_identity() {
        let j = numeric_jacobian(Ok, Point2::new(0.3, 7.0), FD_STEP).unwrap();
        assert!(close(j, Matrix2::identity(), 1e-9));
    }

    #[test]
    fn projection_matrices() {
        let px = two_line_projection_matrix(&Line::<f64>::x_axis());
        assert_eq!(px, Matrix2::new(1.0, 0.0, 0.0, 0.0));
        let py = two_line_projection_matrix(&Line::<f64>::y_axis());
        assert_eq!(py, Matrix2::new(0.0, 0.0, 0.0, 1.0));
        let d = two_line_projection_matrix(&Line::from_slope_intercept(1.0, 0.0));
        assert!(close(d, Matrix2::new(0.5, 0.5, 0.5, 0.5), 1e-15));
        assert!(close(d * d, d, 1e-15));
    }

    #[test]
    fn two_line_matrix_examples() {
        let x = Line::<f64>::x_axis();
        let diag = Line::from_slope_intercept(1.0, 0.0);
        let m = two_line_dr_matrix(&x, &diag).unwrap();
        assert!(close(m, Matrix2::new(0.5, 0.5, -0.5, 0.5), 1e-15));
        assert!(close(two_line_dr_matrix(&diag, &diag).unwrap(), Matrix2::identity(), 1e-15));
        assert!(two_line_dr_matrix(&x, &Line::y_axis()).unwrap().max_abs() < 1e-15);
        assert!((eigen_modulus_sq(&x, &diag).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(eigen_modulus_sq(&x, &Line::y_axis()).unwrap(), 0.0);

        let j = numeric_jacobian(|p| Ok(dr_step_two_lines(&x, &diag, p)), Point2::new(0.4, -1.0), FD_STEP).unwrap();
        assert!(close(j, m, 1e-6));
        let (a, b) = (ConstraintSet::Line(diag), ConstraintSet::Line(x));
        let j = numeric_jacobian(|p| dr_step(&a, &b, p), Point2::new(0.4, -1.0), FD_STEP).unwrap();
        assert!(close(j, m, 1e-6));
    }

    #[test]
    fn degenerate_line_rejected() {
        let bad = Line { alpha: 0.0, beta: 0.0, gamma: 0.0 };
        assert_eq!(
            eigen_modulus_sq(&bad, &Line::x_axis()),
            Err(StabilityError::DegenerateLine)
        );
    }

    #[test]
    fn tangent_lines_on_e2() {
        let e: ConstraintSet<f64> = Ellipse::new(2.0).unwrap().into();
        let t = tangent_line_at(&e, Point2::new(1.0, 0.0)).unwrap();
        assert_eq!((t.alpha, t.beta, t.gamma), (1.0, 0.0, 1.0));
        let t = tangent_line_at(&e, Point2::new(0.0, 2.0)).unwrap();
        assert_eq!((t.alpha, t.beta, t.gamma), (0.0, 1.0, 2.0));
        let r = 0.5f64.sqrt();
        let t = tangent_line_at(&e, Point2::new(r, 2.0 * r)).unwrap();
        let want = Point2::new(r, r / 2.0);
        assert!(t.normal().dist(want.scale(1.0 / want.norm())) < 1e-15);
        assert!(matches!(
            tangent_line_at(&e, Point2::new(1.0, 1.0)),
            Err(StabilityError::OffSet { .. })
        ));
    }

    #[test]
    fn cusp_has_no_tangent() {
        let s: ConstraintSet<f64> = PSphere::new(0.5).unwrap().into();
        assert_eq!(
            tangent_line_at(&s, Point2::new(1.0, 0.0)),
            Err(StabilityError::SingularGradient)
        );
        let s: ConstraintSet<f64> = PSphere::new(3.0).unwrap().into();
        let t = tangent_line_at(&s, Point2::new(0.0, -1.0)).unwrap();
        assert!(t.normal().dist(Point2::new(0.0, -1.0)) < 1e-15);
    }

    #[test]
    fn tangent_projection_matrix_matches_projection_derivative() {
        let e = Ellipse::new(2.0f64).unwrap();
        let set = ConstraintSet::Ellipse(e);
        let r = 0.5f64.sqrt();
        for f in [Point2::new(1.0, 0.0), Point2::new(0.0, 2.0), Point2::new(r, 2.0 * r)] {
            let m = tangent_projection_matrix(&e, f).unwrap();
            let j = numeric_jacobian(|p| set.nearest(p), f, FD_STEP).unwrap();
            assert!(close(m, j, 1e-5), "{f:?}: {m:?} vs {j:?}");
            assert!(close(m * m, m, 1e-14));
        }
        assert!(close(
            tangent_projection_matrix(&e, Point2::new(1.0, 0.0)).unwrap(),
            Matrix2::new(0.0, 0.0, 0.0, 1.0),
            1e-15
        ));
    }

    #[test]
    fn certificates() {
        let e: ConstraintSet<f64> = Ellipse::new(2.0).unwrap().into();
        let r = 0.5f64.sqrt();
        let l2 = Line::from_slope_intercept(2.0, 0.0);
        for f in [Point2::new(r, 2.0 * r), Point2::new(-r, -2.0 * r)] {
            let c = local_convergence_certificate(&e, &l2, f).unwrap();
            assert!((c.eigen_modulus_sq - 0.36).abs() < 1e-12);
            assert!(c.locally_convergent && !c.tangential);
        }
        let top = Line::from_slope_intercept(0.0, 2.0);
        let c = local_convergence_certificate(&e, &top, Point2::new(0.0, 2.0)).unwrap();
        assert_eq!(c.eigen_modulus_sq, 1.0);
        assert!(!c.locally_convergent && c.tangential);
    }
}

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{numeric_jacobian, StabilityError, FD_STEP};
use crate::dr::{dr_power, dr_tail, DrConfig, Termination};
use crate::geometry::{ConstraintSet, Point2};
use crate::linalg::Matrix2;
use crate::{Real, Region};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Attractive,
    Repelling,
    Neutral,
}

impl Classification {
    /// Attractive below `1 - band`, repelling above `1 + band`.
    pub fn from_radius<T: Real>(rho: T, band: T) -> Self {
        if rho < T::one() - band {
            Self::Attractive
        } else if rho > T::one() + band {
            Self::Repelling
        } else {
            Self::Neutral
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicPoint<T> {
    pub point: Point2<T>,
    pub period: usize,
    /// Eigenvalues of the Jacobian of `T^m` at `point`.
    pub multipliers: [Complex<T>; 2],
    pub classification: Classification,
    /// `|T^m(point) - point|`.
    pub residual: T,
    /// `point, T(point), ..., T^{m-1}(point)`.
    pub orbit: Vec<Point2<T>>,
}

impl<T: Real> PeriodicPoint<T> {
    pub fn spectral_radius(&self) -> T {
        self.multipliers[0].norm().max(self.multipliers[1].norm())
    }

    /// Smallest distance from `q` to a member of the orbit.
    pub fn orbit_distance(&self, q: Point2<T>) -> T {
        self.orbit
            .iter()
            .map(|p| p.dist(q))
            .fold(T::infinity(), T::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions<T> {
    pub max_steps: usize,
    /// Converged once `|T^m(x) - x|` is at most this.
    pub tol: T,
    /// Roots outside the search region scaled by this factor are discarded.
    pub escape_factor: T,
    /// `|T^k(x) - x|` at or below this for some `k < m` means a smaller period.
    pub minimality: T,
    pub neutral_band: T,
    pub fd_step: T,
}

impl<T: Real> Default for NewtonOptions<T> {
    fn default() -> Self {
        Self {
            max_steps: 50,
            tol: T::tol(1e-11, 64.0),
            escape_factor: T::c(3.0),
            minimality: T::c(1e-6),
            neutral_band: T::c(1e-6),
            fd_step: T::c(FD_STEP),
        }
    }
}

pub fn find_periodic_point<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    seed: Point2<T>,
    m: usize,
    region: &Region<T>,
) -> Result<PeriodicPoint<T>, StabilityError> {
    find_periodic_point_with(a, b, seed, m, region, &NewtonOptions::default())
}

/// Damped Newton on `G(x) = T^m(x) - x` started at `seed`.
pub fn find_periodic_point_with<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    seed: Point2<T>,
    m: usize,
    region: &Region<T>,
    opts: &NewtonOptions<T>,
) -> Result<PeriodicPoint<T>, StabilityError> {
    if m == 0 {
        return Err(StabilityError::InvalidPeriod);
    }
    let bounds = region.scaled(opts.escape_factor);
    let tm = |x: Point2<T>| dr_power(a, b, x, m);
    let g = |x: Point2<T>| tm(x).map(|y| y - x);

    let mut x = seed;
    let mut gx = g(x)?;
    let mut steps = 0;
    while gx.norm() > opts.tol {
        if steps == opts.max_steps {
            return Err(StabilityError::NotFound);
        }
        steps += 1;
        let j = numeric_jacobian(tm, x, opts.fd_step)? - Matrix2::identity();
        let delta = j.solve(-gx).ok_or(StabilityError::NotFound)?;
        let g0 = gx.norm();
        let mut s = T::one();
        let mut accepted = None;
        for _ in 0..30 {
            let xn = x + delta.scale(s);
            if let Ok(gn) = g(xn) {
                if gn.norm() < g0 {
                    accepted = Some((xn, gn));
                    break;
                }
            }
            s = s * T::half();
        }
        let (xn, gn) = accepted.ok_or(StabilityError::NotFound)?;
        if !bounds.contains(xn) {
            return Err(StabilityError::NotFound);
        }
        x = xn;
        gx = gn;
    }

    let mut orbit = Vec::with_capacity(m);
    let mut y = x;
    for k in 0..m {
        if k > 0 && y.dist(x) <= opts.minimality {
            return Err(StabilityError::NonMinimalPeriod { period: k });
        }
        orbit.push(y);
        y = dr_power(a, b, y, 1)?;
    }
    let jac = numeric_jacobian(tm, x, opts.fd_step)?;
    let multipliers = jac.eigenvalues();
    let rho = multipliers[0].norm().max(multipliers[1].norm());
    Ok(PeriodicPoint {
        point: x,
        period: m,
        multipliers,
        classification: Classification::from_radius(rho, opts.neutral_band),
        residual: y.dist(x),
        orbit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions<T> {
    /// Newton seeds form a `grid` by `grid` lattice of cell midpoints.
    pub grid: usize,
    /// Additional seeds: the end points of DR orbits started on this lattice.
    pub orbit_seed_grid: usize,
    pub orbit_seed_iters: usize,
    /// Smallest period searched.
    pub min_period: usize,
    pub dedup_tol: T,
    pub newton: NewtonOptions<T>,
}

impl<T: Real> Default for ScanOptions<T> {
    fn default() -> Self {
        Self {
            grid: 32,
            orbit_seed_grid: 16,
            orbit_seed_iters: 1000,
            min_period: 1,
            dedup_tol: T::c(1e-6),
            newton: NewtonOptions::default(),
        }
    }
}

pub fn periodic_scan<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    region: &Region<T>,
    max_period: usize,
) -> Vec<PeriodicPoint<T>> {
    periodic_scan_with(a, b, region, max_period, &ScanOptions::default())
}

/// Seeds Newton at every period up to `max_period` and merges the roots, one
/// entry per orbit. Runs on the current rayon pool; the result does not
/// depend on its size.
pub fn periodic_scan_with<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    region: &Region<T>,
    max_period: usize,
    opts: &ScanOptions<T>,
) -> Vec<PeriodicPoint<T>> {
    let n = opts.grid;
    let mut seeds: Vec<Point2<T>> = (0..n * n)
        .map(|k| region.cell_midpoint(k % n, k / n, n, n))
        .collect();

    let k = opts.orbit_seed_grid;
    let cfg = DrConfig::default();
    let tails: Vec<Option<Point2<T>>> = (0..k * k)
        .into_par_iter()
        .map(|idx| {
            let x0 = region.cell_midpoint(idx % k, idx / k, k, k);
            match dr_tail(a, b, x0, opts.orbit_seed_iters, 1, &cfg) {
                Ok((tail, Termination::MaxIter, _)) => tail.last().copied(),
                _ => None,
            }
        })
        .collect();
    seeds.extend(tails.into_iter().flatten());

    let jobs: Vec<(usize, Point2<T>)> = (opts.min_period.max(1)..=max_period)
        .flat_map(|m| seeds.iter().map(move |&s| (m, s)))
        .collect();
    let found: Vec<Option<PeriodicPoint<T>>> = jobs
        .par_iter()
        .map(|&(m, s)| find_periodic_point_with(a, b, s, m, region, &opts.newton).ok())
        .collect();

    let mut out: Vec<PeriodicPoint<T>> = Vec::new();
    for p in found.into_iter().flatten() {
        let dup = out
            .iter()
            .any(|q| q.period == p.period && q.orbit_distance(p.point) <= opts.dedup_tol);
        if !dup {
            out.push(p);
        }
    }
    out.sort_by(|p, q| p.period.cmp(&q.period).then(q.point.lex_cmp(&p.point)));
    out
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AttractorKind, AttractorTable, BasinError, BasinGrid};
use crate::dr::dr_step;
use crate::geometry::{ConstraintSet, Point2};
use crate::{Real, Region};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderOptions<T> {
    pub iters: usize,
    pub match_tol: T,
    /// Worker threads; `0` uses the rayon default.
    pub threads: usize,
    /// An orbit that returns to within this of an iterate `k <= max period`
    /// steps back is treated as having closed its cycle; iteration stops.
    pub cycle_tol: T,
    pub divergence_bailout: T,
}

impl<T: Real> Default for RenderOptions<T> {
    fn default() -> Self {
        Self {
            iters: 1000,
            match_tol: T::c(1e-3),
            threads: 0,
            cycle_tol: T::tol(1e-12, 64.0),
            divergence_bailout: T::c(1e6),
        }
    }
}

pub fn render_basins<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    table: &AttractorTable<T>,
    region: &Region<T>,
    width: usize,
    height: usize,
    iters: usize,
    match_tol: T,
) -> Result<BasinGrid<T>, BasinError> {
    let opts = RenderOptions {
        iters,
        match_tol,
        ..RenderOptions::default()
    };
    render_basins_with(a, b, table, region, width, height, &opts)
}

pub fn render_basins_with<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    table: &AttractorTable<T>,
    region: &Region<T>,
    width: usize,
    height: usize,
    opts: &RenderOptions<T>,
) -> Result<BasinGrid<T>, BasinError> {
    region.validate().map_err(BasinError::InvalidParameters)?;
    if width == 0 || height == 0 {
        return Err(BasinError::InvalidParameters("resolution must be positive"));
    }
    if opts.iters == 0 {
        return Err(BasinError::InvalidParameters("iters must be at least 1"));
    }
    if !(opts.match_tol > T::zero()) {
        return Err(BasinError::InvalidParameters("match_tol must be positive"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|_| BasinError::InvalidParameters("could not start worker threads"))?;
    let rows: Vec<Vec<u16>> = pool.install(|| {
        (0..height)
            .into_par_iter()
            .map(|j| {
                (0..width)
                    .map(|i| {
                        let x0 = region.cell_midpoint(i, j, width, height);
                        classify_start(a, b, table, x0, opts)
                    })
                    .collect()
            })
            .collect()
    });
    Ok(BasinGrid {
        width,
        height,
        region: *region,
        labels: rows.concat(),
        iterations_used: opts.iters,
    })
}

/// Label of the attractor reached from `x0`, or `0`.
///
/// A period-`m` entry is compared with the iterate `x_{km}` for the largest
/// `km <= iters`, so each point of a cycle gets its own domain; feasible
/// points are compared with `x_iters`.
pub fn classify_start<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    table: &AttractorTable<T>,
    x0: Point2<T>,
    opts: &RenderOptions<T>,
) -> u16 {
    let keep = table.max_period().max(1);
    let n = opts.iters;
    // ring[k % len] holds x_k for the last `keep + 1` iterates.
    let len = keep + 1;
    let mut ring = vec![x0; len];
    let mut x = x0;
    let mut last = 0;
    let mut cycle = 0;
    for k in 1..=n {
        x = match dr_step(a, b, x) {
            Ok(y) if y.is_finite() => y,
            _ => return 0,
        };
        if x.norm() >= opts.divergence_bailout {
            return 0;
        }
        ring[k % len] = x;
        last = k;
        if let Some(c) = (1..=keep.min(k)).find(|&c| ring[(k - c) % len].dist(x) <= opts.cycle_tol) {
            cycle = c;
            break;
        }
    }
    // Iterate with index `j <= n`, continuing a closed cycle periodically.
    let at = |j: usize| -> Point2<T> {
        let j = if j > last {
            let first = last + 1 - cycle;
            first + (j - first) % cycle
        } else {
            j
        };
        ring[j % len]
    };
    let mut best = (T::infinity(), 0u16);
    for e in &table.entries {
        let m = match e.kind {
            AttractorKind::Feasible => 1,
            AttractorKind::Periodic { period } => period,
        };
        let d = at(n - n % m).dist(e.point);
        if d <= opts.match_tol && d < best.0 {
            best = (d, e.label);
        }
    }
    best.1
}

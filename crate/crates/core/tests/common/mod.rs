//! Independent reference computations used by the integration tests.
#![allow(dead_code)]

use std::f64::consts::TAU;

use drconic::geometry::{ConstraintSet, Point2};

/// A closed curve as a map from `[0, 2 pi)`.
pub fn curve_fn(set: &ConstraintSet<f64>) -> Box<dyn Fn(f64) -> Point2<f64> + Sync> {
    match set {
        ConstraintSet::Ellipse(e) => {
            let b = e.b;
            Box::new(move |t: f64| Point2::new(t.cos(), b * t.sin()))
        }
        ConstraintSet::PSphere(s) => {
            let k = 2.0 / s.p();
            Box::new(move |t: f64| {
                let (sn, cs) = t.sin_cos();
                Point2::new(cs.signum() * cs.abs().powf(k), sn.signum() * sn.abs().powf(k))
            })
        }
        ConstraintSet::Line(_) => panic!("curves only"),
    }
}

/// Dense samples of a curve, reused across queries.
pub struct Sampled {
    pub f: Box<dyn Fn(f64) -> Point2<f64> + Sync>,
    pub ts: Vec<f64>,
    pub pts: Vec<Point2<f64>>,
}

impl Sampled {
    pub fn new(set: &ConstraintSet<f64>, n: usize) -> Self {
        let f = curve_fn(set);
        let ts: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let pts = ts.iter().map(|&t| f(t)).collect();
        Self { f, ts, pts }
    }

    /// Minimum distance from `q`: the best sampled local minima refined by
    /// golden-section search on the neighbouring parameter interval.
    pub fn min_dist(&self, q: Point2<f64>) -> f64 {
        let n = self.pts.len();
        let d: Vec<f64> = self.pts.iter().map(|p| p.dist_sq(q)).collect();
        let mut minima: Vec<usize> = (0..n)
            .filter(|&i| d[i] <= d[(i + n - 1) % n] && d[i] <= d[(i + 1) % n])
            .collect();
        minima.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
        minima.truncate(8);
        let h = TAU / n as f64;
        minima
            .into_iter()
            .map(|i| golden(|t| (self.f)(t).dist(q), self.ts[i] - h, self.ts[i] + h))
            .fold(d.iter().copied().fold(f64::INFINITY, f64::min).sqrt(), f64::min)
    }
}

pub fn golden(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd).min(f(a)).min(f(b))
}

use serde::{Deserialize, Serialize};

use super::BasinError;
use crate::geometry::{feasible_points, ConstraintSet, Point2};
use crate::stability::{periodic_scan_with, Classification, ScanOptions};
use crate::{Real, Region};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AttractorKind {
    Feasible,
    Periodic { period: usize },
}

impl AttractorKind {
    pub fn period(&self) -> usize {
        match self {
            Self::Feasible => 1,
            Self::Periodic { period } => *period,
        }
    }
}

/// One point of the legend. Each member of a periodic orbit is its own entry
/// so that the domains of the individual points of a cycle stay apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttractorEntry<T> {
    pub label: u16,
    pub point: Point2<T>,
    #[serde(flatten)]
    pub kind: AttractorKind,
    /// The full cycle starting at `point`.
    pub orbit: Vec<Point2<T>>,
    /// Stability of the cycle; absent for feasible points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AttractorTable<T> {
    pub entries: Vec<AttractorEntry<T>>,
}

impl<T: Real> AttractorTable<T> {
    pub fn max_period(&self) -> usize {
        self.entries.iter().map(|e| e.kind.period()).max().unwrap_or(1)
    }

    pub fn max_label(&self) -> u16 {
        self.entries.iter().map(|e| e.label).max().unwrap_or(0)
    }

    pub fn entry(&self, label: u16) -> Option<&AttractorEntry<T>> {
        self.entries.iter().find(|e| e.label == label)
    }

    pub fn periods(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self
            .entries
            .iter()
            .filter(|e| matches!(e.kind, AttractorKind::Periodic { .. }))
            .map(|e| e.kind.period())
            .collect();
        p.sort_unstable();
        p.dedup();
        p
    }

    /// Builds a table from raw entries: drops points within `1e-6` of an
    /// earlier one, sorts and assigns labels from 1.
    pub fn from_entries(mut entries: Vec<AttractorEntry<T>>) -> Self {
        let sep = T::c(1e-6);
        let mut kept: Vec<AttractorEntry<T>> = Vec::with_capacity(entries.len());
        for e in entries.drain(..) {
            if kept.iter().all(|k| k.point.dist(e.point) > sep) {
                kept.push(e);
            }
        }
        kept.sort_by(|a, b| {
            a.kind
                .period()
                .cmp(&b.kind.period())
                .then(a.point.lex_cmp(&b.point))
        });
        for (i, e) in kept.iter_mut().enumerate() {
            e.label = (i + 1) as u16;
        }
        Self { entries: kept }
    }
}

pub fn build_attractor_table<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    region: &Region<T>,
    max_period: usize,
) -> Result<AttractorTable<T>, BasinError> {
    build_attractor_table_with(a, b, region, max_period, &ScanOptions::default())
}

/// Feasible points of the pair plus the members of every periodic orbit of
/// period `2..=max_period` found inside `region`.
pub fn build_attractor_table_with<T: Real>(
    a: &ConstraintSet<T>,
    b: &ConstraintSet<T>,
    region: &Region<T>,
    max_period: usize,
    opts: &ScanOptions<T>,
) -> Result<AttractorTable<T>, BasinError> {
    let (curve, line) = match (a.as_line(), b.as_line()) {
        (None, Some(l)) => (a, l),
        (Some(l), None) => (b, l),
        _ => return Err(BasinError::Unsupported),
    };
    let mut entries = Vec::new();
    for f in feasible_points(curve, line).map_err(|_| BasinError::Unsupported)? {
        if region.contains(f) {
            entries.push(AttractorEntry {
                label: 0,
                point: f,
                kind: AttractorKind::Feasible,
                orbit: vec![f],
                classification: None,
            });
        }
    }
    if max_period >= 2 {
        let opts = ScanOptions {
            min_period: 2,
            ..*opts
        };
        for p in periodic_scan_with(a, b, region, max_period, &opts) {
            let m = p.period;
            for k in 0..m {
                let point = p.orbit[k];
                if !region.contains(point) {
                    continue;
                }
                let mut orbit = p.orbit[k..].to_vec();
                orbit.extend_from_slice(&p.orbit[..k]);
                entries.push(AttractorEntry {
                    label: 0,
                    point,
                    kind: AttractorKind::Periodic { period: m },
                    orbit,
                    classification: Some(p.classification),
                });
            }
        }
    }
    if entries.is_empty() {
        return Err(BasinError::EmptyTable);
    }
    Ok(AttractorTable::from_entries(entries))
}

//! Versioned JSON documents produced by the command line and the service.
//!
//! Every document carries `"schema": 1`. Sets and lines are echoed in their
//! text form (see [`crate::params`]).

use serde::Serialize;

use crate::basins::{
    build_attractor_table_with, default_palette, encode_ppm, render_basins_with, AttractorEntry, AttractorTable,
    BasinDump, BasinError, BasinGrid, RenderOptions, Rgb,
};
use crate::divergence::{self, DivergenceError, SeparationCertificate, ShadowReport};
use crate::dr::{dr_iterate, DrConfig, Termination};
use crate::geometry::{feasible_points, set_distance, ConstraintSet, Line, Point2};
use crate::params::{format_region, LineSpec, SetSpec};
use crate::stability::{local_convergence_certificate, periodic_scan_with, ConvergenceCertificate, PeriodicPoint, ScanOptions};
use crate::Region;

pub const SCHEMA: u32 = 1;

/// Largest orbit length served or written in one document.
pub const MAX_ORBIT_ITERS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// Bad input; exit status 2, HTTP 400.
    Validation,
    /// Valid input the mathematics rejects; exit status 1, HTTP 422.
    Domain,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportError {
    pub kind: ErrorKind,
    pub reason: String,
    /// `d(A, B)` when the pair is disjoint.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
}

impl ReportError {
    pub fn validation(reason: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Validation, reason: reason.into(), gap: None }
    }

    pub fn domain(reason: impl ToString) -> Self {
        Self { kind: ErrorKind::Domain, reason: reason.to_string(), gap: None }
    }
}

impl std::fmt::Display for ReportError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.reason)?;
        if let Some(g) = self.gap {
            write!(f, " (gap {g})")?;
        }
        Ok(())
    }
}

impl std::error::Error for ReportError {}

/// A validated set and line.
#[derive(Debug, Clone)]
pub struct Pair {
    pub set_spec: SetSpec,
    pub line_spec: LineSpec,
    pub set: ConstraintSet<f64>,
    pub line: Line<f64>,
}

impl Pair {
    pub fn new(set_spec: SetSpec, line_spec: LineSpec) -> Result<Self, ReportError> {
        let set = set_spec.build().map_err(|e| ReportError::validation(e.to_string()))?;
        let line = line_spec.build().map_err(|e| ReportError::validation(e.to_string()))?;
        Ok(Self { set_spec, line_spec, set, line })
    }

    pub fn line_set(&self) -> ConstraintSet<f64> {
        self.line.into()
    }

    pub fn gap(&self) -> Option<f64> {
        set_distance(&self.set, &self.line_set()).ok().filter(|g| *g > 0.0)
    }
}

fn finite_point(p: Point2<f64>, what: &str) -> Result<(), ReportError> {
    if p.is_finite() {
        Ok(())
    } else {
        Err(ReportError::validation(format!("{what} must be finite")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionReport {
    pub schema: u32,
    pub set: String,
    pub query: Point2<f64>,
    pub point: Point2<f64>,
    pub distance: f64,
    pub candidates: Vec<Point2<f64>>,
    pub multivalued: bool,
}

pub fn projection(set_spec: SetSpec, q: Point2<f64>) -> Result<ProjectionReport, ReportError> {
    finite_point(q, "query")?;
    let set = set_spec.build().map_err(|e| ReportError::validation(e.to_string()))?;
    let r = set.project(q).map_err(ReportError::domain)?;
    Ok(ProjectionReport {
        schema: SCHEMA,
        set: set_spec.to_string(),
        query: q,
        point: r.point,
        distance: r.point.dist(q),
        candidates: r.candidates,
        multivalued: r.multivalued,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitReport {
    pub schema: u32,
    pub set: String,
    pub line: String,
    pub start: Point2<f64>,
    pub iterations: usize,
    pub terminated: Termination,
    /// Every `stride`-th iterate is listed past the first 100000.
    pub stride: usize,
    pub points: Vec<Point2<f64>>,
    pub step_norms: Vec<f64>,
    /// Certificate at the feasible point closest to the last iterate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ConvergenceCertificate<f64>>,
    /// Separating functional and its values along the orbit, for disjoint pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation: Option<SeparationCertificate<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub functional: Option<Vec<f64>>,
}

pub fn orbit(pair: &Pair, start: Point2<f64>, iters: usize) -> Result<OrbitReport, ReportError> {
    finite_point(start, "start")?;
    if iters == 0 || iters > MAX_ORBIT_ITERS {
        return Err(ReportError::validation(format!("iters must be in 1..={MAX_ORBIT_ITERS}")));
    }
    let b = pair.line_set();
    let o = dr_iterate(&pair.set, &b, start, &DrConfig::with_max_iter(iters)).map_err(ReportError::domain)?;
    let last = o.last();
    let certificate = feasible_points(&pair.set, &pair.line)
        .unwrap_or_default()
        .into_iter()
        .min_by(|f, g| f.dist(last).total_cmp(&g.dist(last)))
        .and_then(|f| local_convergence_certificate(&pair.set, &pair.line, f).ok());
    let separation = divergence::separating_functional(&pair.set, &b).ok();
    let functional = separation.map(|c| o.points.iter().map(|&p| c.eval(p)).collect());
    Ok(OrbitReport {
        schema: SCHEMA,
        set: pair.set_spec.to_string(),
        line: pair.line_spec.to_string(),
        start,
        iterations: o.iterations,
        terminated: o.terminated,
        stride: o.stride,
        points: o.points,
        step_norms: o.step_norms,
        certificate,
        separation,
        functional,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibleStability {
    pub feasible_point: Point2<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ConvergenceCertificate<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub schema: u32,
    pub set: String,
    pub line: String,
    pub points: Vec<FeasibleStability>,
}

pub fn stability(pair: &Pair) -> Result<StabilityReport, ReportError> {
    let fs = feasible_points(&pair.set, &pair.line).map_err(ReportError::domain)?;
    if fs.is_empty() {
        return Err(ReportError { gap: pair.gap(), ..ReportError::domain("the set and the line do not meet") });
    }
    let points = fs
        .into_iter()
        .map(|f| match local_convergence_certificate(&pair.set, &pair.line, f) {
            Ok(c) => FeasibleStability { feasible_point: f, certificate: Some(c), error: None },
            Err(e) => FeasibleStability { feasible_point: f, certificate: None, error: Some(e.to_string()) },
        })
        .collect();
    Ok(StabilityReport {
        schema: SCHEMA,
        set: pair.set_spec.to_string(),
        line: pair.line_spec.to_string(),
        points,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub schema: u32,
    pub set: String,
    pub line: String,
    pub region: String,
    pub max_period: usize,
    pub grid: usize,
    pub points: Vec<PeriodicPoint<f64>>,
}

pub fn scan(pair: &Pair, region: &Region<f64>, max_period: usize, grid: usize) -> Result<ScanReport, ReportError> {
    if max_period == 0 || max_period > 64 {
        return Err(ReportError::validation("max_period must be in 1..=64"));
    }
    if grid == 0 || grid > 512 {
        return Err(ReportError::validation("grid must be in 1..=512"));
    }
    let opts = ScanOptions { grid, ..ScanOptions::default() };
    Ok(ScanReport {
        schema: SCHEMA,
        set: pair.set_spec.to_string(),
        line: pair.line_spec.to_string(),
        region: format_region(region),
        max_period,
        grid,
        points: periodic_scan_with(&pair.set, &pair.line_set(), region, max_period, &opts),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceDocument {
    pub schema: u32,
    pub set: String,
    pub line: String,
    pub start: Point2<f64>,
    pub report: divergence::DivergenceReport<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shadow: Option<ShadowReport<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shadow_error: Option<String>,
}

pub fn diverge(pair: &Pair, start: Point2<f64>, steps: usize) -> Result<DivergenceDocument, ReportError> {
    finite_point(start, "start")?;
    if !(100..=MAX_ORBIT_ITERS).contains(&steps) {
        return Err(ReportError::validation(format!("steps must be in 100..={MAX_ORBIT_ITERS}")));
    }
    let b = pair.line_set();
    let report = divergence::verify_linear_divergence(&pair.set, &b, start, steps).map_err(ReportError::domain)?;
    let (shadow, shadow_error) = match divergence::shadow_limit(&pair.set, &b, start, steps) {
        Ok(s) => (Some(s), None),
        Err(e @ (DivergenceError::NotConvex | DivergenceError::NonConvergedShadow { .. })) => (None, Some(e.to_string())),
        Err(e) => return Err(ReportError::domain(e)),
    };
    Ok(DivergenceDocument {
        schema: SCHEMA,
        set: pair.set_spec.to_string(),
        line: pair.line_spec.to_string(),
        start,
        report,
        shadow,
        shadow_error,
    })
}

/// Parameters of a basin render.
#[derive(Debug, Clone, Copy)]
pub struct BasinRequest {
    pub region: Region<f64>,
    pub width: usize,
    pub height: usize,
    pub iters: usize,
    pub match_tol: f64,
    pub max_period: usize,
    pub threads: usize,
}

impl BasinRequest {
    pub fn validate(&self, max_pixels: usize) -> Result<(), ReportError> {
        self.region.validate().map_err(ReportError::validation)?;
        if self.width == 0 || self.height == 0 {
            return Err(ReportError::validation("resolution must be positive"));
        }
        if self.width.saturating_mul(self.height) > max_pixels {
            return Err(ReportError::validation(format!("resolution exceeds {max_pixels} pixels")));
        }
        if self.iters == 0 || self.iters > MAX_ORBIT_ITERS {
            return Err(ReportError::validation(format!("iters must be in 1..={MAX_ORBIT_ITERS}")));
        }
        if !(self.match_tol.is_finite() && self.match_tol > 0.0) {
            return Err(ReportError::validation("match_tol must be positive"));
        }
        if self.max_period == 0 || self.max_period > 16 {
            return Err(ReportError::validation("max_period must be in 1..=16"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LegendEntry {
    pub label: u16,
    pub color: String,
}

/// The label-grid file plus the colours used for each label.
#[derive(Debug, Clone, Serialize)]
pub struct BasinDocument {
    pub set: String,
    pub line: String,
    #[serde(flatten)]
    pub dump: BasinDump<f64>,
    pub legend: Vec<LegendEntry>,
}

pub struct Basins {
    pub table: AttractorTable<f64>,
    pub grid: BasinGrid<f64>,
    pub palette: Vec<Rgb>,
}

impl Basins {
    pub fn document(&self, pair: &Pair, match_tol: f64) -> BasinDocument {
        BasinDocument {
            set: pair.set_spec.to_string(),
            line: pair.line_spec.to_string(),
            dump: BasinDump::new(&self.grid, &self.table, match_tol),
            legend: legend(&self.table, &self.palette),
        }
    }

    pub fn ppm(&self) -> Vec<u8> {
        encode_ppm(&self.grid, &self.palette).expect("default palette covers every label")
    }
}

fn legend(table: &AttractorTable<f64>, palette: &[Rgb]) -> Vec<LegendEntry> {
    table
        .entries
        .iter()
        .map(|e| {
            let [r, g, b] = palette[e.label as usize];
            LegendEntry { label: e.label, color: format!("#{r:02x}{g:02x}{b:02x}") }
        })
        .collect()
}

fn table_error(pair: &Pair, e: BasinError) -> ReportError {
    match e {
        BasinError::EmptyTable => ReportError { gap: pair.gap(), ..ReportError::domain(e) },
        BasinError::InvalidParameters(m) => ReportError::validation(m),
        e => ReportError::domain(e),
    }
}

pub fn attractors(pair: &Pair, region: &Region<f64>, max_period: usize) -> Result<AttractorTable<f64>, ReportError> {
    build_attractor_table_with(&pair.set, &pair.line_set(), region, max_period, &ScanOptions::default())
        .map_err(|e| table_error(pair, e))
}

#[derive(Debug, Clone, Serialize)]
pub struct AttractorDocument {
    pub schema: u32,
    pub set: String,
    pub line: String,
    pub region: Region<f64>,
    pub attractors: Vec<AttractorEntry<f64>>,
    pub legend: Vec<LegendEntry>,
}

pub fn attractor_document(pair: &Pair, region: &Region<f64>, max_period: usize) -> Result<AttractorDocument, ReportError> {
    let table = attractors(pair, region, max_period)?;
    let palette = default_palette(table.max_label() as usize);
    Ok(AttractorDocument {
        schema: SCHEMA,
        set: pair.set_spec.to_string(),
        line: pair.line_spec.to_string(),
        region: *region,
        legend: legend(&table, &palette),
        attractors: table.entries,
    })
}

pub fn basins(pair: &Pair, req: &BasinRequest, max_pixels: usize) -> Result<Basins, ReportError> {
    req.validate(max_pixels)?;
    let table = attractors(pair, &req.region, req.max_period)?;
    let opts = RenderOptions {
        iters: req.iters,
        match_tol: req.match_tol,
        threads: req.threads,
        ..RenderOptions::default()
    };
    let grid = render_basins_with(&pair.set, &pair.line_set(), &table, &req.region, req.width, req.height, &opts)
        .map_err(|e| table_error(pair, e))?;
    let palette = default_palette(table.max_label() as usize);
    Ok(Basins { table, grid, palette })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e2_l2() -> Pair {
        Pair::new("ellipse:b=2".parse().unwrap(), "slope=2".parse().unwrap()).unwrap()
    }

    #[test]
    fn stability_document() {
        let r = stability(&e2_l2()).unwrap();
        assert_eq!(r.points.len(), 2);
        for p in &r.points {
            assert!((p.certificate.unwrap().eigen_modulus_sq - 0.36).abs() < 1e-12);
        }
        let far = Pair::new(SetSpec::Circle, "slope=0,intercept=2".parse().unwrap()).unwrap();
        let e = stability(&far).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Domain);
        assert!((e.gap.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orbit_document_limits() {
        let p = e2_l2();
        assert_eq!(orbit(&p, Point2::new(0.5, 0.5), 0).unwrap_err().kind, ErrorKind::Validation);
        let o = orbit(&p, Point2::new(0.5, 0.5), 300).unwrap();
        assert_eq!(o.terminated, Termination::Converged);
        assert!(o.certificate.is_some() && o.functional.is_none());
    }

    #[test]
    fn empty_table_reports_gap() {
        let far = Pair::new(SetSpec::Circle, "slope=0,intercept=3".parse().unwrap()).unwrap();
        let req = BasinRequest {
            region: Region::square(2.0).unwrap(),
            width: 4,
            height: 4,
            iters: 10,
            match_tol: 1e-3,
            max_period: 2,
            threads: 1,
        };
        let e = basins(&far, &req, 1 << 20).err().unwrap();
        assert_eq!(e.kind, ErrorKind::Domain);
        assert!((e.gap.unwrap() - 2.0).abs() < 1e-12);
    }
}

//! Basins of attraction: which attractor the DR orbit of each pixel
//! midpoint ends up at.

mod image;
mod render;
mod table;

pub use image::{default_palette, encode_ppm, BasinDump, Rgb, DUMP_SCHEMA};
pub use render::{classify_start, render_basins, render_basins_with, RenderOptions};
pub use table::{build_attractor_table, build_attractor_table_with, AttractorEntry, AttractorKind, AttractorTable};

pub use crate::Region;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum BasinError {
    #[error("no feasible or periodic points found in the region")]
    EmptyTable,
    #[error("need one line and one curved set")]
    Unsupported,
    #[error("palette has {have} colours but labels go up to {need}")]
    PaletteTooSmall { need: usize, have: usize },
    #[error("invalid render parameters: {0}")]
    InvalidParameters(&'static str),
}

/// Row-major labels, row 0 at the top (`ymax`); `0` means unclassified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinGrid<T> {
    pub width: usize,
    pub height: usize,
    pub region: Region<T>,
    pub labels: Vec<u16>,
    pub iterations_used: usize,
}

impl<T> BasinGrid<T> {
    pub fn label(&self, i: usize, j: usize) -> u16 {
        self.labels[j * self.width + i]
    }

    /// `counts[k]` is the number of pixels with label `k`.
    pub fn histogram(&self) -> Vec<usize> {
        let max = self.labels.iter().copied().max().unwrap_or(0) as usize;
        let mut counts = vec![0; max + 1];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }
}

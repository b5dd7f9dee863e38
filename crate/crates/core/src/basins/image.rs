use serde::{Deserialize, Serialize};

use super::{AttractorTable, BasinError, BasinGrid};
use crate::{Real, Region};

pub type Rgb = [u8; 3];

/// Binary PPM, top row first. `palette[0]` colours unclassified pixels.
pub fn encode_ppm<T>(grid: &BasinGrid<T>, palette: &[Rgb]) -> Result<Vec<u8>, BasinError> {
    let need = grid.labels.iter().copied().max().unwrap_or(0) as usize;
    if palette.len() <= need {
        return Err(BasinError::PaletteTooSmall {
            need,
            have: palette.len(),
        });
    }
    let header = format!("P6\n{} {}\n255\n", grid.width, grid.height);
    let mut out = Vec::with_capacity(header.len() + 3 * grid.labels.len());
    out.extend_from_slice(header.as_bytes());
    for &l in &grid.labels {
        out.extend_from_slice(&palette[l as usize]);
    }
    Ok(out)
}

const BASE: [Rgb; 12] = [
    [230, 25, 75],
    [60, 180, 75],
    [0, 130, 200],
    [255, 225, 25],
    [245, 130, 48],
    [145, 30, 180],
    [70, 240, 240],
    [240, 50, 230],
    [210, 245, 60],
    [250, 190, 212],
    [0, 128, 128],
    [170, 110, 40],
];

/// Black followed by `n` colours; the fixed base list repeats beyond twelve
/// labels with darker shades.
pub fn default_palette(n: usize) -> Vec<Rgb> {
    let mut out = Vec::with_capacity(n + 1);
    out.push([0, 0, 0]);
    for k in 0..n {
        let [r, g, b] = BASE[k % BASE.len()];
        let shade = (k / BASE.len()) as u32 % 4;
        let f = |c: u8| ((c as u32 * (4 - shade)) / 4) as u8;
        out.push([f(r), f(g), f(b)]);
    }
    out
}

pub const DUMP_SCHEMA: u32 = 1;

/// The label-grid file: grid, legend and render parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinDump<T> {
    pub schema: u32,
    pub width: usize,
    pub height: usize,
    pub region: Region<T>,
    pub iterations: usize,
    pub match_tol: T,
    pub attractors: Vec<super::AttractorEntry<T>>,
    pub labels: Vec<u16>,
}

impl<T: Real> BasinDump<T> {
    pub fn new(grid: &BasinGrid<T>, table: &AttractorTable<T>, match_tol: T) -> Self {
        Self {
            schema: DUMP_SCHEMA,
            width: grid.width,
            height: grid.height,
            region: grid.region,
            iterations: grid.iterations_used,
            match_tol,
            attractors: table.entries.clone(),
            labels: grid.labels.clone(),
        }
    }
}

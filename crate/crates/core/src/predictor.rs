//! Gaze selection from a surprise map.
//!
//! Two stochastic acceptors run per frame. The first keeps the surprise map
//! with probability `p_c` and otherwise swaps in a centre-bias map. The
//! second scans the chosen map in row-major order starting from the previous
//! gaze cell; every cell whose distance-scaled energy strictly beats the
//! current choice is taken with an acceptance probability, which yields
//! fixations when nothing clearly better appears and saccades otherwise.

use rand::Rng;

use crate::energy::EnergyParams;
use crate::error::{Error, Result};
use crate::lattice::{Cell, GridGeometry};
use crate::temporal::SurpriseMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcceptMode {
    /// Acceptance proportional to the effective-energy gain.
    Proportional,
    /// Constant acceptance probability `p_fixed`.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictorParams {
    /// Probability of trusting the surprise map over the centre bias.
    pub p_c: f64,
    pub p_mode: AcceptMode,
    pub p_fixed: f64,
    /// Std-dev of the centre-bias bump in cells; `None` means `n / 6`.
    pub center_sigma: Option<f64>,
    pub seed: u64,
}

impl Default for PredictorParams {
    fn default() -> Self {
        PredictorParams {
            p_c: 0.95,
            p_mode: AcceptMode::Proportional,
            p_fixed: 0.5,
            center_sigma: None,
            seed: 42,
        }
    }
}

impl PredictorParams {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_c", self.p_c), ("p_fixed", self.p_fixed)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} must be in [0, 1], got {p}")));
            }
        }
        if let Some(s) = self.center_sigma {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Config(format!("center_sigma must be > 0, got {s}")));
            }
        }
        Ok(())
    }
}

/// Gaussian bump with peak 1 at the grid centre.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterBiasConfig {
    pub geometry: GridGeometry,
    pub values: Vec<f64>,
}

impl CenterBiasConfig {
    pub fn new(geometry: GridGeometry, sigma: Option<f64>) -> Self {
        let sigma = sigma.unwrap_or(geometry.n as f64 / 6.0);
        let c = (geometry.n as f64 - 1.0) / 2.0;
        let values = geometry
            .cells()
            .map(|cell| {
                let dr = cell.row as f64 - c;
                let dc = cell.col as f64 - c;
                (-(dr * dr + dc * dc) / (2.0 * sigma * sigma)).exp()
            })
            .collect();
        CenterBiasConfig { geometry, values }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GazeMode {
    Fixation,
    Saccade,
    CenterBias,
}

impl GazeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            GazeMode::Fixation => "fixation",
            GazeMode::Saccade => "saccade",
            GazeMode::CenterBias => "center-bias",
        }
    }
}

impl std::fmt::Display for GazeMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GazePrediction {
    pub frame_index: u64,
    pub cell: Cell,
    /// Pixel coordinates of the cell centre.
    pub point: (u32, u32),
    pub mode: GazeMode,
    /// Distance-scaled energy of the chosen cell.
    pub energy: f64,
}

/// Divisor applied to a candidate's energy: `1 + |Δ| / (n·√2)`, in `[1, 2)`.
pub fn distance_scale(candidate: Cell, previous: Cell, geometry: &GridGeometry) -> f64 {
    let dr = candidate.row as f64 - previous.row as f64;
    let dc = candidate.col as f64 - previous.col as f64;
    1.0 + dr.hypot(dc) / (geometry.n as f64 * std::f64::consts::SQRT_2)
}

/// Centre of `cell` in pixels, halves rounded up.
pub fn cell_center(cell: Cell, geometry: &GridGeometry) -> (u32, u32) {
    let (x, y) = geometry.offset(cell);
    let cx = x as f64 + 0.5 * geometry.cell_width as f64;
    let cy = y as f64 + 0.5 * geometry.cell_height as f64;
    ((cx + 0.5).floor() as u32, (cy + 0.5).floor() as u32)
}

pub fn predict_gaze<R: Rng + ?Sized>(
    surprise: &SurpriseMap,
    prev: Option<&GazePrediction>,
    params: &PredictorParams,
    energy: &EnergyParams,
    center_bias: &CenterBiasConfig,
    rng: &mut R,
) -> Result<GazePrediction> {
    let geometry = &surprise.geometry;
    if center_bias.geometry != *geometry {
        return Err(Error::Pipeline("centre-bias map and surprise map grids differ".into()));
    }
    let use_surprise = rng.gen::<f64>() < params.p_c;
    let values = if use_surprise {
        &surprise.values
    } else {
        &center_bias.values
    };

    let start = match prev {
        Some(p) if p.cell.row < geometry.n && p.cell.col < geometry.n => p.cell,
        Some(_) => return Err(Error::Pipeline("previous gaze cell lies outside the grid".into())),
        None => geometry.center_cell(),
    };
    let gap_scale = 2.0 * energy.max_bond_energy();

    let mut chosen = start;
    let mut chosen_energy = values[geometry.index(start)];
    for (i, cell) in geometry.cells().enumerate() {
        let effective = values[i] / distance_scale(cell, start, geometry);
        if effective > chosen_energy {
            let p = match params.p_mode {
                AcceptMode::Proportional => ((effective - chosen_energy) / gap_scale).clamp(0.0, 1.0),
                AcceptMode::Fixed => params.p_fixed,
            };
            if rng.gen::<f64>() < p {
                chosen = cell;
                chosen_energy = effective;
            }
        }
    }

    let mode = if !use_surprise {
        GazeMode::CenterBias
    } else if chosen == start {
        GazeMode::Fixation
    } else {
        GazeMode::Saccade
    };
    Ok(GazePrediction {
        frame_index: surprise.frame_index,
        cell: chosen,
        point: cell_center(chosen, geometry),
        mode,
        energy: chosen_energy,
    })
}

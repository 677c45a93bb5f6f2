//! History of past feature configurations and the decaying weighted
//! aggregation of temporal bonds into a per-cell surprise map.

use std::collections::VecDeque;

use crate::energy::{bond_energy, EnergyParams};
use crate::error::{Error, Result};
use crate::lattice::{Cell, Configuration, GridGeometry};

/// How the raw weight of lag `i` (1-based) is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecayForm {
    /// `a * (1 - b)^(i - 1)`
    #[default]
    OneMinusB,
    /// `a * b^(i - 1)`
    B,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayWeights {
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub form: DecayForm,
    raw: Vec<f64>,
    /// Normalised weights for lags `1..=k`.
    pub weights: Vec<f64>,
}

impl DecayWeights {
    pub fn new(k: usize, a: f64, b: f64, form: DecayForm) -> Result<Self> {
        if k == 0 {
            return Err(Error::Config("decay window k must be >= 1".into()));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Config(format!("decay initial value a must be > 0, got {a}")));
        }
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::Config(format!("decay factor b must be in (0, 1), got {b}")));
        }
        let ratio = match form {
            DecayForm::OneMinusB => 1.0 - b,
            DecayForm::B => b,
        };
        let raw: Vec<f64> = (0..k).map(|i| a * ratio.powi(i as i32)).collect();
        let weights = normalise(&raw);
        Ok(DecayWeights {
            k,
            a,
            b,
            form,
            raw,
            weights,
        })
    }

    /// Weights renormalised over the first `m` lags, as used while the
    /// history is still filling up.
    pub fn truncated(&self, m: usize) -> Vec<f64> {
        normalise(&self.raw[..m.min(self.k)])
    }
}

fn normalise(raw: &[f64]) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

pub fn decay_weights(k: usize, a: f64, b: f64) -> Result<DecayWeights> {
    DecayWeights::new(k, a, b, DecayForm::OneMinusB)
}

/// The last `k` feature configurations, oldest first.
#[derive(Debug, Clone)]
pub struct HistoryBuffer {
    capacity: usize,
    entries: VecDeque<Configuration>,
}

impl HistoryBuffer {
    pub fn new(capacity: usize) -> Self {
        HistoryBuffer {
            capacity: capacity.max(1),
            entries: VecDeque::with_capacity(capacity.max(1)),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Configuration `lag` frames back (`lag >= 1`).
    pub fn lag(&self, lag: usize) -> Option<&Configuration> {
        self.entries.len().checked_sub(lag).and_then(|i| self.entries.get(i))
    }

    pub fn last_index(&self) -> Option<u64> {
        self.entries.back().map(|c| c.frame_index)
    }

    pub fn push(&mut self, config: Configuration) -> Result<()> {
        if let Some(last) = self.last_index() {
            if config.frame_index != last + 1 {
                return Err(Error::Pipeline(format!(
                    "history expects frame {}, got {}",
                    last + 1,
                    config.frame_index
                )));
            }
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(config);
        Ok(())
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }
}

/// Pushes `config`, evicting the oldest entry when full.
pub fn push_history(mut buffer: HistoryBuffer, config: Configuration) -> Result<HistoryBuffer> {
    buffer.push(config)?;
    Ok(buffer)
}

/// Per-cell aggregated temporal surprise for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SurpriseMap {
    pub geometry: GridGeometry,
    /// Row-major, `n * n` entries.
    pub values: Vec<f64>,
    pub frame_index: u64,
}

impl SurpriseMap {
    pub fn zeros(geometry: GridGeometry, frame_index: u64) -> Self {
        SurpriseMap {
            geometry,
            values: vec![0.0; geometry.cell_count()],
            frame_index,
        }
    }

    pub fn get(&self, cell: Cell) -> f64 {
        self.values[self.geometry.index(cell)]
    }

    /// Copies the surprise values into the generator energies of `config`.
    pub fn apply_to(&self, config: &mut Configuration) {
        for (g, &v) in config.generators.iter_mut().zip(&self.values) {
            g.energy = v;
        }
    }
}

/// Aggregates same-cell temporal bonds between `current` and each of the
/// past `min(k, |history|)` configurations, weighted by lag.
///
/// With an empty history every cell is zero.
pub fn temporal_aggregate(
    current: &Configuration,
    history: &HistoryBuffer,
    weights: &DecayWeights,
    params: &EnergyParams,
) -> Result<SurpriseMap> {
    let mut map = SurpriseMap::zeros(current.geometry, current.frame_index);
    let m = history.len().min(weights.k);
    if m == 0 {
        return Ok(map);
    }
    let w = if m == weights.k {
        weights.weights.clone()
    } else {
        weights.truncated(m)
    };
    for (lag, &wi) in (1..=m).zip(&w) {
        let past = history.lag(lag).expect("lag within history length");
        if past.geometry != current.geometry {
            return Err(Error::Pipeline(format!(
                "geometry of frame {} differs from frame {}",
                past.frame_index, current.frame_index
            )));
        }
        for ((acc, now), then) in map
            .values
            .iter_mut()
            .zip(&current.generators)
            .zip(&past.generators)
        {
            *acc += wi * bond_energy(&now.features, &then.features, params)?;
        }
    }
    Ok(map)
}

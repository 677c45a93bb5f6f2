//! Event segmentation by error gating on the global configuration energy.
//!
//! Energies are tracked with Welford's running mean/variance since the last
//! boundary. A frame opens a new event when its energy exceeds
//! `mean + lambda * std` of the current event.

use crate::error::{Error, Result};

/// Energies within this relative distance of the running mean never
/// trigger; it only absorbs floating-point noise on flat streams.
const RELATIVE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GatingParams {
    pub lambda: f64,
    pub min_event_len: u64,
    /// Frames before gating activates; `None` means the temporal window `k`.
    pub warmup: Option<u64>,
}

impl Default for GatingParams {
    fn default() -> Self {
        GatingParams {
            lambda: 2.5,
            min_event_len: 15,
            warmup: None,
        }
    }
}

impl GatingParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be > 0, got {}", self.lambda)));
        }
        if self.min_event_len < 1 {
            return Err(Error::Config("min_event_len must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance (`n - 1` denominator); 0 below two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventBoundary {
    pub frame_index: u64,
    pub energy: f64,
    /// Standard score of the triggering energy; infinite when the event had
    /// zero spread.
    pub z: f64,
}

/// Streaming boundary detector for one video.
#[derive(Debug, Clone)]
pub struct Segmenter {
    params: GatingParams,
    warmup: u64,
    stats: RunningStats,
    last_boundary: Option<u64>,
    next_frame: Option<u64>,
}

impl Segmenter {
    /// `default_warmup` is used when `params.warmup` is unset.
    pub fn new(params: GatingParams, default_warmup: u64) -> Self {
        Segmenter {
            params,
            warmup: params.warmup.unwrap_or(default_warmup),
            stats: RunningStats::new(),
            last_boundary: None,
            next_frame: None,
        }
    }

    pub fn stats(&self) -> &RunningStats {
        &self.stats
    }

    pub fn observe(&mut self, energy: f64, frame: u64) -> Result<Option<EventBoundary>> {
        if let Some(expected) = self.next_frame {
            if frame < expected {
                return Err(Error::Pipeline(format!(
                    "segmenter saw frame {frame} after frame {}",
                    expected - 1
                )));
            }
        }
        self.next_frame = Some(frame + 1);
        let boundary = observe(&mut self.stats, energy, frame, &self.params, self.warmup, self.last_boundary);
        if boundary.is_some() {
            self.last_boundary = Some(frame);
        }
        Ok(boundary)
    }
}

/// One gating step. Emits a boundary (and empties `stats`) or folds
/// `energy` into `stats`.
pub fn observe(
    stats: &mut RunningStats,
    energy: f64,
    frame: u64,
    params: &GatingParams,
    warmup: u64,
    last_boundary: Option<u64>,
) -> Option<EventBoundary> {
    let refractory_over = last_boundary.is_none_or(|b| frame - b >= params.min_event_len);
    if frame >= warmup && refractory_over && stats.count() >= 2 {
        let mean = stats.mean();
        let std = stats.std_dev();
        let excess = energy - mean;
        if excess > params.lambda * std && excess > RELATIVE_SLACK * mean.abs() {
            let z = if std > 0.0 { excess / std } else { f64::INFINITY };
            stats.reset();
            return Some(EventBoundary {
                frame_index: frame,
                energy,
                z,
            });
        }
    }
    stats.push(energy);
    None
}

/// Runs a fresh segmenter over a whole energy stream (frame `i` = index `i`).
pub fn segment_energies(energies: &[f64], params: GatingParams, warmup: u64) -> Vec<EventBoundary> {
    let mut seg = Segmenter::new(params, warmup);
    energies
        .iter()
        .enumerate()
        .filter_map(|(i, &e)| seg.observe(e, i as u64).expect("frames in order"))
        .collect()
}

//! Bond-energy math.
//!
//! A bond between two generators scores how *dissimilar* their features
//! are: `w_s * tanh(min(alpha, phi_a + phi_m))`, where `phi_a` is the cosine
//! distance and `phi_m` a correlation-based dissimilarity. High energy means
//! high surprise everywhere in this crate.

use crate::error::{Error, Result};
use crate::temporal::SurpriseMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionMode {
    /// `(1 - r) / 2` with `r` the Pearson correlation.
    PearsonDissimilarity,
    /// Population covariance of the two vectors.
    RawCovariance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParams {
    pub w_s: f64,
    pub alpha: f64,
    pub motion_mode: MotionMode,
}

impl Default for EnergyParams {
    fn default() -> Self {
        EnergyParams {
            w_s: 1.0,
            alpha: 1.0,
            motion_mode: MotionMode::PearsonDissimilarity,
        }
    }
}

impl EnergyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.w_s > 0.0 && self.w_s.is_finite()) {
            return Err(Error::Config(format!("w_s must be > 0, got {}", self.w_s)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be > 0, got {}", self.alpha)));
        }
        Ok(())
    }

    /// Largest energy a single bond can carry.
    pub fn max_bond_energy(&self) -> f64 {
        self.w_s * self.alpha.tanh()
    }
}

fn check_dims(u: &[f64], v: &[f64], min_len: usize) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::Dimension {
            left: u.len(),
            right: v.len(),
        });
    }
    if u.len() < min_len {
        return Err(Error::Dimension {
            left: u.len(),
            right: min_len,
        });
    }
    Ok(())
}

/// Cosine distance `1 - cos(u, v)`, in `[0, 2]`.
///
/// Two zero vectors are at distance 0; a zero vector and a non-zero one at 1.
pub fn phi_appearance(u: &[f64], v: &[f64]) -> Result<f64> {
    check_dims(u, v, 1)?;
    if u == v {
        return Ok(0.0);
    }
    let (mut dot, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    Ok(match (uu == 0.0, vv == 0.0) {
        (true, true) => 0.0,
        (true, false) | (false, true) => 1.0,
        _ => (1.0 - dot / (uu * vv).sqrt()).clamp(0.0, 2.0),
    })
}

fn is_constant(u: &[f64]) -> bool {
    u.iter().all(|&x| x == u[0])
}

fn mean(u: &[f64]) -> f64 {
    u.iter().sum::<f64>() / u.len() as f64
}

pub fn phi_motion(u: &[f64], v: &[f64], mode: MotionMode) -> Result<f64> {
    check_dims(u, v, 2)?;
    match mode {
        MotionMode::PearsonDissimilarity => {
            if is_constant(u) || is_constant(v) || u == v {
                return Ok(0.0);
            }
            let (mu, mv) = (mean(u), mean(v));
            let (mut cov, mut su, mut sv) = (0.0, 0.0, 0.0);
            for (a, b) in u.iter().zip(v) {
                let (da, db) = (a - mu, b - mv);
                cov += da * db;
                su += da * da;
                sv += db * db;
            }
            let r = (cov / (su * sv).sqrt()).clamp(-1.0, 1.0);
            Ok((1.0 - r) / 2.0)
        }
        MotionMode::RawCovariance => {
            let (mu, mv) = (mean(u), mean(v));
            let cov: f64 = u.iter().zip(v).map(|(a, b)| (a - mu) * (b - mv)).sum();
            Ok(cov / u.len() as f64)
        }
    }
}

/// `min(alpha, phi_a + phi_m)`, floored at zero (raw covariance can be
/// negative).
pub fn phi_combined(u: &[f64], v: &[f64], params: &EnergyParams) -> Result<f64> {
    let phi = phi_appearance(u, v)? + phi_motion(u, v, params.motion_mode)?;
    Ok(phi.min(params.alpha).max(0.0))
}

pub fn bond_energy(u: &[f64], v: &[f64], params: &EnergyParams) -> Result<f64> {
    Ok(params.w_s * phi_combined(u, v, params)?.tanh())
}

/// Global surprise of a frame: the sum of every cell's aggregated temporal
/// bond energy.
pub fn configuration_energy(surprise: &SurpriseMap) -> f64 {
    surprise.values.iter().sum()
}

//! Run configuration and its flat `key = value` file form.

use std::fmt::Write as _;

use crate::energy::{EnergyParams, MotionMode};
use crate::error::{Error, Result};
use crate::features::{FeatureMode, FeatureScheme};
use crate::predictor::{AcceptMode, PredictorParams};
use crate::segmenter::GatingParams;
use crate::temporal::{DecayForm, DecayWeights};

pub const SEED_ENV: &str = "SURPRISE_SEED";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Grid side `n`.
    pub grid: usize,
    pub fps: f64,
    /// Temporal window; `None` means `round(fps)`.
    pub k: Option<usize>,
    pub features: FeatureScheme,
    pub energy: EnergyParams,
    pub decay_a: f64,
    pub decay_b: f64,
    pub decay_form: DecayForm,
    /// Carries the RNG seed of the run.
    pub predictor: PredictorParams,
    pub gating: GatingParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid: 16,
            fps: 30.0,
            k: None,
            features: FeatureScheme::default(),
            energy: EnergyParams::default(),
            decay_a: 1.0,
            decay_b: 0.95,
            decay_form: DecayForm::OneMinusB,
            predictor: PredictorParams::default(),
            gating: GatingParams::default(),
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected a boolean, got {value:?}"))),
    }
}

impl RunConfig {
    pub fn window(&self) -> usize {
        self.k.unwrap_or_else(|| (self.fps.round() as usize).max(1))
    }

    pub fn seed(&self) -> u64 {
        self.predictor.seed
    }

    pub fn decay_weights(&self) -> Result<DecayWeights> {
        DecayWeights::new(self.window(), self.decay_a, self.decay_b, self.decay_form)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid < 2 {
            return Err(Error::Config(format!("grid must be >= 2, got {}", self.grid)));
        }
        if !(self.fps > 0.0 && self.fps.is_finite()) {
            return Err(Error::Config(format!("fps must be > 0, got {}", self.fps)));
        }
        if self.k == Some(0) {
            return Err(Error::Config("k must be >= 1".into()));
        }
        self.features.validate()?;
        self.energy.validate()?;
        self.decay_weights()?;
        self.predictor.validate()?;
        self.gating.validate()
    }

    /// Sets one field by its config-file key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "grid" => self.grid = parse(key, value)?,
            "fps" => self.fps = parse(key, value)?,
            "k" => self.k = Some(parse(key, value)?),
            "feature_mode" => {
                self.features.mode = match value {
                    "mean-rgb" => FeatureMode::MeanRgb,
                    "subblock" => match self.features.mode {
                        FeatureMode::Subblock(s) => FeatureMode::Subblock(s),
                        FeatureMode::MeanRgb => FeatureMode::Subblock(crate::features::DEFAULT_SUBBLOCK),
                    },
                    _ => return Err(Error::Config(format!("feature_mode: unknown {value:?}"))),
                }
            }
            "subblock" => self.features.mode = FeatureMode::Subblock(parse(key, value)?),
            "include_flow" => self.features.include_flow = parse_bool(key, value)?,
            "max_displacement" => self.features.max_displacement = parse(key, value)?,
            "w_s" => self.energy.w_s = parse(key, value)?,
            "alpha" => self.energy.alpha = parse(key, value)?,
            "motion_mode" => {
                self.energy.motion_mode = match value {
                    "pearson-dissimilarity" => MotionMode::PearsonDissimilarity,
                    "raw-covariance" => MotionMode::RawCovariance,
                    _ => return Err(Error::Config(format!("motion_mode: unknown {value:?}"))),
                }
            }
            "decay_a" => self.decay_a = parse(key, value)?,
            "decay_b" => self.decay_b = parse(key, value)?,
            "decay_form" => {
                self.decay_form = match value {
                    "one-minus-b" => DecayForm::OneMinusB,
                    "b" => DecayForm::B,
                    _ => return Err(Error::Config(format!("decay_form: unknown {value:?}"))),
                }
            }
            "p_c" => self.predictor.p_c = parse(key, value)?,
            "p_mode" => {
                self.predictor.p_mode = match value {
                    "proportional" => AcceptMode::Proportional,
                    "fixed" => AcceptMode::Fixed,
                    _ => return Err(Error::Config(format!("p_mode: unknown {value:?}"))),
                }
            }
            "p_fixed" => self.predictor.p_fixed = parse(key, value)?,
            "center_sigma" => self.predictor.center_sigma = Some(parse(key, value)?),
            "seed" => self.predictor.seed = parse(key, value)?,
            "lambda" => self.gating.lambda = parse(key, value)?,
            "min_event_len" => self.gating.min_event_len = parse(key, value)?,
            "warmup" => self.gating.warmup = Some(parse(key, value)?),
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Applies a `key = value` document on top of `self`. Blank lines and
    /// `#` comments are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("config line {}: expected key = value", i + 1)))?;
            self.set(key, value)
                .map_err(|e| Error::Config(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        c.apply_text(text)?;
        Ok(c)
    }

    /// Renders every field in the file format accepted by [`apply_text`].
    ///
    /// [`apply_text`]: RunConfig::apply_text
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("grid", self.grid.to_string());
        kv("fps", self.fps.to_string());
        if let Some(k) = self.k {
            kv("k", k.to_string());
        }
        match self.features.mode {
            FeatureMode::MeanRgb => kv("feature_mode", "mean-rgb".into()),
            FeatureMode::Subblock(s) => {
                kv("feature_mode", "subblock".into());
                kv("subblock", s.to_string());
            }
        }
        kv("include_flow", self.features.include_flow.to_string());
        kv("max_displacement", self.features.max_displacement.to_string());
        kv("w_s", self.energy.w_s.to_string());
        kv("alpha", self.energy.alpha.to_string());
        kv(
            "motion_mode",
            match self.energy.motion_mode {
                MotionMode::PearsonDissimilarity => "pearson-dissimilarity",
                MotionMode::RawCovariance => "raw-covariance",
            }
            .into(),
        );
        kv("decay_a", self.decay_a.to_string());
        kv("decay_b", self.decay_b.to_string());
        kv(
            "decay_form",
            match self.decay_form {
                DecayForm::OneMinusB => "one-minus-b",
                DecayForm::B => "b",
            }
            .into(),
        );
        kv("p_c", self.predictor.p_c.to_string());
        kv(
            "p_mode",
            match self.predictor.p_mode {
                AcceptMode::Proportional => "proportional",
                AcceptMode::Fixed => "fixed",
            }
            .into(),
        );
        kv("p_fixed", self.predictor.p_fixed.to_string());
        if let Some(s) = self.predictor.center_sigma {
            kv("center_sigma", s.to_string());
        }
        kv("seed", self.predictor.seed.to_string());
        kv("lambda", self.gating.lambda.to_string());
        kv("min_event_len", self.gating.min_event_len.to_string());
        if let Some(w) = self.gating.warmup {
            kv("warmup", w.to_string());
        }
        out
    }
}

//! Training-free gaze prediction and event segmentation for egocentric
//! video.
//!
//! Each frame is tiled into an `n x n` lattice of generators carrying
//! appearance features. Temporal bonds between a cell and its own past,
//! weighted by an exponentially decaying window, give a per-cell surprise
//! energy. Gaze follows the most surprising cell through two stochastic
//! acceptors (centre bias, then saccade/fixation), and the summed energy of
//! the lattice drives an error-gated event segmenter.
//!
//! ```
//! use egosurprise::{synth, Pipeline, RunConfig};
//!
//! let video = synth::moving_square(160, 120, 20, 7);
//! let mut pipeline = Pipeline::new(RunConfig { grid: 8, ..RunConfig::default() }).unwrap();
//! for frame in &video.frames {
//!     let out = pipeline.process_frame(frame).unwrap();
//!     assert!(out.energy >= 0.0);
//! }
//! ```

pub mod config;
pub mod energy;
pub mod error;
pub mod evalkit;
pub mod features;
pub mod formats;
pub mod lattice;
pub mod pipeline;
pub mod predictor;
pub mod segmenter;
pub mod source;
pub mod synth;
pub mod temporal;

pub use config::RunConfig;
pub use energy::{bond_energy, configuration_energy, EnergyParams, MotionMode};
pub use error::{Error, Result};
pub use features::{feature_config, FeatureMode, FeatureScheme, Frame};
pub use lattice::{build_geometry, Cell, Configuration, Generator, GridGeometry};
pub use pipeline::{process_stream, FrameOutputs, FrameSink, Pipeline, RunSummary};
pub use predictor::{predict_gaze, GazeMode, GazePrediction, PredictorParams};
pub use segmenter::{EventBoundary, GatingParams, Segmenter};
pub use temporal::{decay_weights, temporal_aggregate, DecayWeights, HistoryBuffer, SurpriseMap};

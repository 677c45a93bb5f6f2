//! Scoring: angular gaze error and Hungarian-aligned segmentation accuracy.

mod aae;
mod hungarian;
mod kmeans;
mod segmentation;

pub use aae::{aae, CameraModel, GazeRecord};
pub use hungarian::{assignment_cost, hungarian};
pub use kmeans::{kmeans, kmeans_detailed, KMeansOptions, KMeansResult};
pub use segmentation::{segmentation_accuracy, segments_from_boundaries, SegmentLabeling, VideoRange};

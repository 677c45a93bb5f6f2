//! Shared fixtures for the criterion benches.

use egosurprise::{synth, Frame, RunConfig};

pub const WIDTH: usize = 640;
pub const HEIGHT: usize = 480;

/// The reference workload: VGA frames of the moving-square scene.
pub fn vga_frames(count: usize) -> Vec<Frame> {
    synth::moving_square(WIDTH, HEIGHT, count, 42).frames
}

/// 16x16 grid, 30-frame window, 4x4 sub-block features.
pub fn reference_config() -> RunConfig {
    RunConfig {
        grid: 16,
        fps: 30.0,
        ..RunConfig::default()
    }
}

//! Deterministic synthetic videos with known ground truth, used by the
//! tests, the acceptance suite and the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::features::Frame;

pub const SQUARE_SIZE: usize = 40;
pub const SQUARE_SPEED: usize = 4;

pub fn constant_frames(width: usize, height: usize, count: usize, rgb: [u8; 3]) -> Vec<Frame> {
    (0..count)
        .map(|i| Frame::new(width, height, rgb.repeat(width * height), i as u64).expect("sized buffer"))
        .collect()
}

/// Static blocky colour texture: block colours drawn from `range` plus a
/// per-pixel grain below `grain`.
fn block_texture(
    width: usize,
    height: usize,
    block: usize,
    range: std::ops::Range<u8>,
    grain: u8,
    rng: &mut ChaCha8Rng,
) -> Vec<u8> {
    let bw = width.div_ceil(block);
    let bh = height.div_ceil(block);
    let palette: Vec<[u8; 3]> = (0..bw * bh)
        .map(|_| {
            [
                rng.gen_range(range.clone()),
                rng.gen_range(range.clone()),
                rng.gen_range(range.clone()),
            ]
        })
        .collect();
    let mut px = Vec::with_capacity(width * height * 3);
    for y in 0..height {
        for x in 0..width {
            let c = palette[(y / block) * bw + x / block];
            let grain = rng.gen_range(0..grain);
            px.extend(c.iter().map(|&v| v + grain));
        }
    }
    px
}

pub struct MovingSquare {
    pub frames: Vec<Frame>,
    /// Pixel centre of the square in each frame.
    pub centers: Vec<(f64, f64)>,
}

/// A white `SQUARE_SIZE` square sliding horizontally at `SQUARE_SPEED`
/// px/frame over a dark static texture, bouncing off the side margins.
pub fn moving_square(width: usize, height: usize, count: usize, seed: u64) -> MovingSquare {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let background = block_texture(width, height, 8, 0..60, 8, &mut rng);
    let size = SQUARE_SIZE.min(width / 2).min(height / 2).max(1);
    let margin = size / 2;
    let travel = width.saturating_sub(size + 2 * margin).max(1);
    let top = (height * 5 / 12).min(height - size);
    let mut frames = Vec::with_capacity(count);
    let mut centers = Vec::with_capacity(count);
    for i in 0..count {
        // triangle wave over [0, travel]
        let phase = (i * SQUARE_SPEED) % (2 * travel);
        let left = margin + if phase <= travel { phase } else { 2 * travel - phase };
        let mut px = background.clone();
        for y in top..top + size {
            let row = (y * width + left) * 3;
            px[row..row + size * 3].fill(255);
        }
        frames.push(Frame::new(width, height, px, i as u64).expect("sized buffer"));
        centers.push((left as f64 + size as f64 / 2.0, top as f64 + size as f64 / 2.0));
    }
    MovingSquare { frames, centers }
}

/// Parameters of one dynamic-texture regime: a short loop of noise
/// overlays drawn once and replayed.
#[derive(Debug, Clone, Copy)]
pub struct NoiseRegime {
    pub amplitude: u8,
    /// Side of the square noise grains, in pixels.
    pub grain: usize,
    /// Number of distinct overlays in the loop.
    pub period: usize,
}

pub const CALM: NoiseRegime = NoiseRegime {
    amplitude: 20,
    grain: 4,
    period: 4,
};

pub const BUSY: NoiseRegime = NoiseRegime {
    amplitude: 90,
    grain: 16,
    period: 4,
};

fn overlays(width: usize, height: usize, regime: NoiseRegime, rng: &mut ChaCha8Rng) -> Vec<Vec<i16>> {
    let gw = width.div_ceil(regime.grain);
    let gh = height.div_ceil(regime.grain);
    let amp = regime.amplitude as i16;
    (0..regime.period)
        .map(|_| {
            let grains: Vec<i16> = (0..gw * gh).map(|_| rng.gen_range(-amp..=amp)).collect();
            (0..width * height)
                .map(|i| grains[(i / width / regime.grain) * gw + (i % width) / regime.grain])
                .collect()
        })
        .collect()
}

/// Static texture under a looping noise overlay. Frames before `switch_at`
/// use `first`, frames from `switch_at` on use `second`; `None` keeps
/// `first` throughout.
pub fn texture_regimes(
    width: usize,
    height: usize,
    count: usize,
    switch_at: Option<usize>,
    first: NoiseRegime,
    second: NoiseRegime,
    seed: u64,
) -> Vec<Frame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = block_texture(width, height, 8, 30..150, 12, &mut rng);
    let a = overlays(width, height, first, &mut rng);
    let b = overlays(width, height, second, &mut rng);
    (0..count)
        .map(|i| {
            let overlay = match switch_at {
                Some(s) if i >= s => &b[(i - s) % b.len()],
                _ => &a[i % a.len()],
            };
            let px = base
                .iter()
                .enumerate()
                .map(|(j, &v)| (v as i16 + overlay[j / 3]).clamp(0, 255) as u8)
                .collect();
            Frame::new(width, height, px, i as u64).expect("sized buffer")
        })
        .collect()
}

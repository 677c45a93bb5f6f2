//! Per-cell feature extraction: turns a decoded frame into the feature
//! configuration of that frame.

use crate::error::{Error, Result};
use crate::lattice::{Configuration, GridGeometry};

pub const DEFAULT_SUBBLOCK: usize = 4;
pub const DEFAULT_MAX_DISPLACEMENT: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMode {
    /// Mean RGB of the whole cell (3 values).
    MeanRgb,
    /// Mean RGB of each block of an `s x s` partition of the cell (3·s² values).
    Subblock(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureScheme {
    pub mode: FeatureMode,
    /// Append the cell's mean optical flow `(dx, dy)`.
    pub include_flow: bool,
    /// Flow magnitude (px/frame) mapped to the ends of the `[0, 1]` range.
    pub max_displacement: f64,
}

impl Default for FeatureScheme {
    fn default() -> Self {
        FeatureScheme {
            mode: FeatureMode::Subblock(DEFAULT_SUBBLOCK),
            include_flow: false,
            max_displacement: DEFAULT_MAX_DISPLACEMENT,
        }
    }
}

impl FeatureScheme {
    pub fn validate(&self) -> Result<()> {
        if let FeatureMode::Subblock(0) = self.mode {
            return Err(Error::Config("subblock size must be >= 1".into()));
        }
        if self.include_flow && (self.max_displacement.is_nan() || self.max_displacement <= 0.0) {
            return Err(Error::Config("max_displacement must be > 0".into()));
        }
        Ok(())
    }

    fn blocks_per_side(&self) -> usize {
        match self.mode {
            FeatureMode::MeanRgb => 1,
            FeatureMode::Subblock(s) => s,
        }
    }

    pub fn dim(&self) -> usize {
        let s = self.blocks_per_side();
        3 * s * s + if self.include_flow { 2 } else { 0 }
    }
}

/// A decoded RGB24 frame, optionally carrying a dense flow field.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    /// Row-major RGB24.
    pub pixels: Vec<u8>,
    pub index: u64,
    /// Row-major `(dx, dy)` per pixel.
    pub flow: Option<Vec<[f32; 2]>>,
}

impl Frame {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>, index: u64) -> Result<Self> {
        if pixels.len() != width * height * 3 {
            return Err(Error::InvalidFrame(format!(
                "expected {} bytes for {width}x{height} RGB24, got {}",
                width * height * 3,
                pixels.len()
            )));
        }
        Ok(Frame {
            width,
            height,
            pixels,
            index,
            flow: None,
        })
    }

    pub fn with_flow(mut self, flow: Vec<[f32; 2]>) -> Result<Self> {
        if flow.len() != self.width * self.height {
            return Err(Error::InvalidFrame(format!(
                "flow field has {} vectors, frame has {} pixels",
                flow.len(),
                self.width * self.height
            )));
        }
        self.flow = Some(flow);
        Ok(self)
    }
}

/// Maps each pixel coordinate along one axis to its global block index
/// (`cell * s + sub`), where block `j` of a cell `len` pixels long covers
/// local offsets `[j*len/s, (j+1)*len/s)`.
fn axis_bins(extent: usize, n: usize, s: usize, len_of: impl Fn(usize) -> usize) -> Vec<usize> {
    let mut bins = Vec::with_capacity(extent);
    for cell in 0..n {
        let len = len_of(cell);
        for j in 0..s {
            let run = (j + 1) * len / s - j * len / s;
            bins.extend(std::iter::repeat_n(cell * s + j, run));
        }
    }
    debug_assert_eq!(bins.len(), extent);
    bins
}

/// Extracts the feature configuration of `frame` on `geometry`.
///
/// All generator energies start at zero; the lattice's spatial bonds are
/// attached at their default energy.
pub fn feature_config(
    frame: &Frame,
    geometry: &GridGeometry,
    scheme: &FeatureScheme,
) -> Result<Configuration> {
    if frame.width != geometry.frame_width || frame.height != geometry.frame_height {
        return Err(Error::InvalidFrame(format!(
            "frame {} is {}x{}, grid expects {}x{}",
            frame.index, frame.width, frame.height, geometry.frame_width, geometry.frame_height
        )));
    }
    if frame.pixels.len() != frame.width * frame.height * 3 {
        return Err(Error::InvalidFrame(format!(
            "frame {} pixel buffer has {} bytes",
            frame.index,
            frame.pixels.len()
        )));
    }
    let flow = match (scheme.include_flow, &frame.flow) {
        (true, None) => return Err(Error::MissingFlow { frame: frame.index }),
        (true, Some(f)) => Some(f.as_slice()),
        (false, _) => None,
    };

    let n = geometry.n;
    let s = scheme.blocks_per_side();
    let side = n * s;
    let col_bins = axis_bins(frame.width, n, s, |c| geometry.width_of_col(c));
    let row_bins = axis_bins(frame.height, n, s, |r| geometry.height_of_row(r));

    let mut sums = vec![0u32; side * side * 3];
    let mut counts = vec![0u32; side * side];
    for (y, row) in frame.pixels.chunks_exact(frame.width * 3).enumerate() {
        let base = row_bins[y] * side;
        for (x, px) in row.chunks_exact(3).enumerate() {
            let bin = base + col_bins[x];
            let acc = &mut sums[bin * 3..bin * 3 + 3];
            acc[0] += px[0] as u32;
            acc[1] += px[1] as u32;
            acc[2] += px[2] as u32;
            counts[bin] += 1;
        }
    }

    let mut flow_sums = vec![[0f64; 2]; if flow.is_some() { n * n } else { 0 }];
    if let Some(flow) = flow {
        for (y, row) in flow.chunks_exact(frame.width).enumerate() {
            let cell_row = row_bins[y] / s;
            for (x, v) in row.iter().enumerate() {
                let acc = &mut flow_sums[cell_row * n + col_bins[x] / s];
                acc[0] += v[0] as f64;
                acc[1] += v[1] as f64;
            }
        }
    }

    let dim = scheme.dim();
    let mut features = Vec::with_capacity(n * n);
    for cell in geometry.cells() {
        let mut f = Vec::with_capacity(dim);
        let (x0, y0, w, h) = geometry.cell_rect(cell);
        for i in 0..s {
            for j in 0..s {
                let bin = (cell.row * s + i) * side + cell.col * s + j;
                if counts[bin] > 0 {
                    let denom = 255.0 * counts[bin] as f64;
                    f.extend(sums[bin * 3..bin * 3 + 3].iter().map(|&v| v as f64 / denom));
                } else {
                    // block thinner than one pixel: sample the pixel it starts on
                    let px = x0 + (j * w / s).min(w - 1);
                    let py = y0 + (i * h / s).min(h - 1);
                    let off = (py * frame.width + px) * 3;
                    f.extend(frame.pixels[off..off + 3].iter().map(|&v| v as f64 / 255.0));
                }
            }
        }
        if flow.is_some() {
            let area = (w * h) as f64;
            let acc = flow_sums[geometry.index(cell)];
            for component in acc {
                let scaled = (component / area / scheme.max_displacement).clamp(-1.0, 1.0);
                f.push((scaled + 1.0) / 2.0);
            }
        }
        features.push(f);
    }
    Configuration::from_features(*geometry, frame.index, features)
}

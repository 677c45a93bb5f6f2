//! The per-frame streaming loop: features, temporal surprise, gaze
//! selection, configuration energy and event gating.

use std::hint::black_box;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::energy::configuration_energy;
use crate::error::{Error, Result};
use crate::features::{feature_config, Frame};
use crate::formats;
use crate::lattice::GridGeometry;
use crate::predictor::{predict_gaze, CenterBiasConfig, GazePrediction};
use crate::segmenter::{EventBoundary, Segmenter};
use crate::temporal::{temporal_aggregate, DecayWeights, HistoryBuffer, SurpriseMap};

#[derive(Debug, Clone, PartialEq)]
pub struct FrameOutputs {
    pub prediction: GazePrediction,
    pub energy: f64,
    pub boundary: Option<EventBoundary>,
    pub surprise: SurpriseMap,
}

/// Grid-dependent state, created from the first frame's size.
#[derive(Debug, Clone)]
struct Lattice {
    geometry: GridGeometry,
    center_bias: CenterBiasConfig,
}

/// Streaming state for one video.
#[derive(Debug, Clone)]
pub struct Pipeline {
    config: RunConfig,
    weights: DecayWeights,
    lattice: Option<Lattice>,
    history: HistoryBuffer,
    segmenter: Segmenter,
    prev: Option<GazePrediction>,
    rng: ChaCha8Rng,
    next_frame: u64,
}

impl Pipeline {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let weights = config.decay_weights()?;
        let k = config.window();
        Ok(Pipeline {
            weights,
            lattice: None,
            history: HistoryBuffer::new(k),
            segmenter: Segmenter::new(config.gating, k as u64),
            prev: None,
            rng: ChaCha8Rng::seed_from_u64(config.seed()),
            next_frame: 0,
            config,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn geometry(&self) -> Option<&GridGeometry> {
        self.lattice.as_ref().map(|l| &l.geometry)
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    /// Frames must arrive with indices `0, 1, 2, ...` and a constant size.
    pub fn process_frame(&mut self, frame: &Frame) -> Result<FrameOutputs> {
        self.step(frame).map_err(|e| e.at_frame(frame.index))
    }

    fn step(&mut self, frame: &Frame) -> Result<FrameOutputs> {
        if frame.index != self.next_frame {
            return Err(Error::Pipeline(format!(
                "expected frame {}, got {}",
                self.next_frame, frame.index
            )));
        }
        if self.lattice.is_none() {
            let geometry = GridGeometry::new(frame.width, frame.height, self.config.grid)?;
            let center_bias = CenterBiasConfig::new(geometry, self.config.predictor.center_sigma);
            self.lattice = Some(Lattice {
                geometry,
                center_bias,
            });
        }
        let lattice = self.lattice.as_ref().expect("initialised above");

        let mut current = feature_config(frame, &lattice.geometry, &self.config.features)?;
        let surprise = temporal_aggregate(&current, &self.history, &self.weights, &self.config.energy)?;
        surprise.apply_to(&mut current);
        let prediction = predict_gaze(
            &surprise,
            self.prev.as_ref(),
            &self.config.predictor,
            &self.config.energy,
            &lattice.center_bias,
            &mut self.rng,
        )?;
        let energy = configuration_energy(&surprise);
        let boundary = self.segmenter.observe(energy, frame.index)?;
        self.history.push(current)?;
        self.prev = Some(prediction);
        self.next_frame += 1;
        Ok(FrameOutputs {
            prediction,
            energy,
            boundary,
            surprise,
        })
    }
}

/// Receives every frame's outputs in order.
pub trait FrameSink {
    fn frame(&mut self, out: &FrameOutputs) -> Result<()>;

    fn finish(&mut self) -> Result<()> {
        Ok(())
    }
}

impl FrameSink for Vec<FrameOutputs> {
    fn frame(&mut self, out: &FrameOutputs) -> Result<()> {
        self.push(out.clone());
        Ok(())
    }
}

/// `frame,x,y,mode,energy` rows.
pub struct GazeCsvSink<W: Write> {
    out: W,
    started: bool,
}

impl<W: Write> GazeCsvSink<W> {
    pub fn new(out: W) -> Self {
        GazeCsvSink { out, started: false }
    }

    fn header(&mut self) -> io::Result<()> {
        if !self.started {
            self.started = true;
            writeln!(self.out, "{}", formats::GAZE_CSV_HEADER)?;
        }
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> FrameSink for GazeCsvSink<W> {
    fn frame(&mut self, out: &FrameOutputs) -> Result<()> {
        self.header()?;
        writeln!(self.out, "{}", formats::gaze_row(&out.prediction))?;
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        self.header()?;
        self.out.flush()?;
        Ok(())
    }
}

/// `frame,energy` rows.
pub struct EnergyCsvSink<W: Write> {
    out: W,
    started: bool,
}

impl<W: Write> EnergyCsvSink<W> {
    pub fn new(out: W) -> Self {
        EnergyCsvSink { out, started: false }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> FrameSink for EnergyCsvSink<W> {
    fn frame(&mut self, out: &FrameOutputs) -> Result<()> {
        if !self.started {
            self.started = true;
            writeln!(self.out, "frame,energy")?;
        }
        writeln!(self.out, "{}", formats::energy_row(out.prediction.frame_index, out.energy))?;
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        if !self.started {
            self.started = true;
            writeln!(self.out, "frame,energy")?;
        }
        self.out.flush()?;
        Ok(())
    }
}

/// Collects boundaries and writes the events JSON on `finish`.
pub struct EventsJsonSink<W: Write> {
    out: W,
    boundaries: Vec<EventBoundary>,
}

impl<W: Write> EventsJsonSink<W> {
    pub fn new(out: W) -> Self {
        EventsJsonSink {
            out,
            boundaries: Vec::new(),
        }
    }

    pub fn boundaries(&self) -> &[EventBoundary] {
        &self.boundaries
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> FrameSink for EventsJsonSink<W> {
    fn frame(&mut self, out: &FrameOutputs) -> Result<()> {
        self.boundaries.extend(out.boundary);
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        self.out.write_all(formats::events_json(&self.boundaries).as_bytes())?;
        self.out.flush()?;
        Ok(())
    }
}

/// Writes `<dir>/<frame:06>.pgm` per frame.
pub struct HeatmapDirSink {
    dir: PathBuf,
    energy: crate::energy::EnergyParams,
}

impl HeatmapDirSink {
    pub fn new(dir: impl Into<PathBuf>, energy: crate::energy::EnergyParams) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(HeatmapDirSink { dir, energy })
    }
}

impl FrameSink for HeatmapDirSink {
    fn frame(&mut self, out: &FrameOutputs) -> Result<()> {
        let path = self.dir.join(format!("{:06}.pgm", out.prediction.frame_index));
        std::fs::write(path, formats::encode_heatmap(&out.surprise, &self.energy))?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub frames: u64,
    pub boundaries: u64,
    pub elapsed: Duration,
    /// Frames per second over the whole run, decode included.
    pub fps: f64,
}

/// Drives a fresh pipeline over `source`, routing outputs to `sinks`.
pub fn process_stream<I>(config: &RunConfig, source: I, sinks: &mut [&mut dyn FrameSink]) -> Result<RunSummary>
where
    I: IntoIterator<Item = Result<Frame>>,
{
    let start = Instant::now();
    let mut pipeline = Pipeline::new(config.clone())?;
    let (mut frames, mut boundaries) = (0u64, 0u64);
    for frame in source {
        let frame = frame.map_err(|e| e.at_frame(frames))?;
        let out = pipeline.process_frame(&frame)?;
        for sink in sinks.iter_mut() {
            sink.frame(&out).map_err(|e| e.at_frame(frame.index))?;
        }
        frames += 1;
        boundaries += out.boundary.is_some() as u64;
    }
    for sink in sinks.iter_mut() {
        sink.finish()?;
    }
    let elapsed = start.elapsed();
    let fps = if elapsed.is_zero() {
        0.0
    } else {
        frames as f64 / elapsed.as_secs_f64()
    };
    Ok(RunSummary {
        frames,
        boundaries,
        elapsed,
        fps,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    /// Frames per second of each repeat, in run order.
    pub fps: Vec<f64>,
}

impl BenchReport {
    fn sorted(&self) -> Vec<f64> {
        let mut v = self.fps.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min(&self) -> f64 {
        self.sorted()[0]
    }

    pub fn max(&self) -> f64 {
        *self.sorted().last().expect("at least one repeat")
    }

    pub fn median(&self) -> f64 {
        let v = self.sorted();
        let m = v.len() / 2;
        if v.len() % 2 == 1 {
            v[m]
        } else {
            (v[m - 1] + v[m]) / 2.0
        }
    }
}

/// Times `repeat` full single-threaded passes over pre-decoded `frames`.
/// Every output is computed and then dropped.
pub fn benchmark(config: &RunConfig, frames: &[Frame], repeat: usize) -> Result<BenchReport> {
    if frames.is_empty() {
        return Err(Error::Pipeline("no frames to benchmark".into()));
    }
    if repeat == 0 {
        return Err(Error::Config("repeat must be >= 1".into()));
    }
    let mut fps = Vec::with_capacity(repeat);
    for _ in 0..repeat {
        let mut pipeline = Pipeline::new(config.clone())?;
        let start = Instant::now();
        for frame in frames {
            black_box(pipeline.process_frame(frame)?);
        }
        fps.push(frames.len() as f64 / start.elapsed().as_secs_f64());
    }
    Ok(BenchReport { fps })
}

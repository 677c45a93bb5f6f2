use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use egosurprise::config::SEED_ENV;
use egosurprise::evalkit::{aae, segmentation_accuracy, CameraModel};
use egosurprise::pipeline::{benchmark, EnergyCsvSink, EventsJsonSink, GazeCsvSink, HeatmapDirSink};
use egosurprise::source::{open_source, write_ppm_dir};
use egosurprise::{formats, process_stream, synth, Error, Frame, FrameSink, Result, RunConfig};

#[derive(Parser)]
#[command(name = "egosurprise", version, about = "Surprise-driven gaze prediction and event segmentation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predict one gaze point per frame.
    Predict {
        #[command(flatten)]
        run: RunArgs,
        /// Write a PGM surprise heatmap per frame into this directory.
        #[arg(long)]
        heatmaps: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Detect event boundaries from the configuration energy.
    Segment {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long = "min-len")]
        min_len: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the per-frame energy trace.
        #[arg(long)]
        energies: Option<PathBuf>,
    },
    /// Score predictions against ground truth.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Time full pipeline passes over pre-decoded frames.
    Bench {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 5)]
        repeat: usize,
    },
    /// Generate a synthetic test clip.
    Synth {
        #[arg(value_enum)]
        kind: SynthKind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = SynthFormat::Ppm)]
        format: SynthFormat,
        #[arg(long, default_value_t = 300)]
        count: usize,
        #[arg(long, default_value_t = 640)]
        width: usize,
        #[arg(long, default_value_t = 480)]
        height: usize,
        #[arg(long, default_value_t = 30.0)]
        fps: f64,
        /// First frame of the second regime (`regimes` only).
        #[arg(long = "switch-at")]
        switch_at: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Ground-truth gaze CSV for the square's centre (`square` only).
        #[arg(long)]
        gaze: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Average angular error in degrees.
    Aae {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        width: f64,
        #[arg(long)]
        height: f64,
        /// Horizontal field of view in degrees.
        #[arg(long, default_value_t = 60.0)]
        fov: f64,
    },
    /// Hungarian-matched frame accuracy of a segmentation.
    Seg {
        #[arg(long)]
        boundaries: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long = "per-video")]
        per_video: Option<PathBuf>,
        /// Seed of the k-means initialisation.
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    Square,
    Regimes,
    Constant,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthFormat {
    Ppm,
    Raw,
}

#[derive(Args)]
struct RunArgs {
    /// Directory of PPM frames, a RAWVIDEO file, or `-` for stdin.
    #[arg(long)]
    frames: String,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    fps: Option<f64>,
    /// Temporal window; defaults to round(fps).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Flat `key = value` run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a single config key, e.g. `--set decay_form=b`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Read `<frame>.flo32` optical flow next to each PPM.
    #[arg(long)]
    flow: bool,
}

impl RunArgs {
    /// Builds the run configuration. Precedence, lowest first: defaults,
    /// the seed environment variable, the stream's own fps, the config
    /// file, `--set`, dedicated flags.
    fn config(&self, stream_fps: Option<f64>) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if self.seed.is_none() {
            if let Ok(seed) = std::env::var(SEED_ENV) {
                cfg.set("seed", &seed)
                    .map_err(|e| Error::Config(format!("{SEED_ENV}: {e}")))?;
            }
        }
        if let Some(fps) = stream_fps {
            cfg.fps = fps;
        }
        if self.flow {
            cfg.features.include_flow = true;
        }
        if let Some(path) = &self.config {
            cfg.apply_text(&fs::read_to_string(path).map_err(|e| io_context(path, e))?)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        }
        for kv in &self.set {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            cfg.set(key, value)?;
        }
        if let Some(grid) = self.grid {
            cfg.grid = grid;
        }
        if let Some(fps) = self.fps {
            cfg.fps = fps;
        }
        if self.k.is_some() {
            cfg.k = self.k;
        }
        if let Some(seed) = self.seed {
            cfg.predictor.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn io_context(path: &Path, e: io::Error) -> Error {
    Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(path).map_err(|e| io_context(path, e))?))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_context(path, e))
}

fn cmd_predict(run: &RunArgs, heatmaps: Option<&Path>, out: &Path) -> Result<()> {
    let source = open_source(&run.frames, run.flow)?;
    let cfg = run.config(source.fps)?;
    let mut gaze = GazeCsvSink::new(create(out)?);
    let mut heat = heatmaps.map(|d| HeatmapDirSink::new(d, cfg.energy)).transpose()?;
    let mut sinks: Vec<&mut dyn FrameSink> = vec![&mut gaze];
    if let Some(h) = heat.as_mut() {
        sinks.push(h);
    }
    let summary = process_stream(&cfg, source.frames, &mut sinks)?;
    eprintln!("frames={} fps={:.1}", summary.frames, summary.fps);
    Ok(())
}

fn cmd_segment(run: &RunArgs, lambda: Option<f64>, min_len: Option<u64>, out: &Path, energies: Option<&Path>) -> Result<()> {
    let source = open_source(&run.frames, run.flow)?;
    let mut cfg = run.config(source.fps)?;
    if let Some(l) = lambda {
        cfg.gating.lambda = l;
    }
    if let Some(m) = min_len {
        cfg.gating.min_event_len = m;
    }
    cfg.validate()?;
    let mut events = EventsJsonSink::new(create(out)?);
    let mut trace = energies.map(create).transpose()?.map(EnergyCsvSink::new);
    let mut sinks: Vec<&mut dyn FrameSink> = vec![&mut events];
    if let Some(t) = trace.as_mut() {
        sinks.push(t);
    }
    let summary = process_stream(&cfg, source.frames, &mut sinks)?;
    eprintln!(
        "frames={} boundaries={} fps={:.1}",
        summary.frames, summary.boundaries, summary.fps
    );
    Ok(())
}

fn cmd_bench(run: &RunArgs, repeat: usize) -> Result<()> {
    let source = open_source(&run.frames, run.flow)?;
    let cfg = run.config(source.fps)?;
    let frames: Vec<Frame> = source.frames.collect::<Result<_>>()?;
    if frames.is_empty() {
        return Err(Error::Decode(format!("{}: no frames", run.frames)));
    }
    let report = benchmark(&cfg, &frames, repeat)?;
    for (i, fps) in report.fps.iter().enumerate() {
        eprintln!("repeat {}: {:.2} fps", i + 1, fps);
    }
    println!(
        "fps_min={:.2} fps_median={:.2} fps_max={:.2}",
        report.min(),
        report.median(),
        report.max()
    );
    Ok(())
}

fn cmd_eval(cmd: &EvalCommand) -> Result<()> {
    match cmd {
        EvalCommand::Aae {
            pred,
            gt,
            width,
            height,
            fov,
        } => {
            let cam = CameraModel::new(*width, *height, *fov)?;
            let p = formats::parse_gaze_csv(&pred.display().to_string(), &read_text(pred)?)?;
            let g = formats::parse_gaze_csv(&gt.display().to_string(), &read_text(gt)?)?;
            println!("aae_degrees={:.4}", aae(&p, &g, &cam)?);
        }
        EvalCommand::Seg {
            boundaries,
            features,
            gt,
            k,
            per_video,
            seed,
        } => {
            let events = formats::parse_events(&read_text(boundaries)?)
                .map_err(|e| Error::Config(format!("{}: {e}", boundaries.display())))?;
            let frames: Vec<u64> = events.iter().map(|e| e.frame).collect();
            let matrix = formats::read_feature_matrix(features).map_err(|e| match e {
                Error::Io(io) => io_context(features, io),
                e => e,
            })?;
            let labels = formats::parse_labels_csv(&gt.display().to_string(), &read_text(gt)?)?;
            let (feats, truth) = formats::align_frames(matrix, &labels)?;
            let videos = per_video
                .as_ref()
                .map(|m| formats::parse_manifest(&m.display().to_string(), &read_text(m)?))
                .transpose()?;
            let acc = segmentation_accuracy(&frames, &feats, &truth, *k, *seed, videos.as_deref())?;
            println!("seg_accuracy={acc:.4}");
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_synth(
    kind: SynthKind,
    out: &Path,
    format: SynthFormat,
    count: usize,
    (width, height, fps): (usize, usize, f64),
    switch_at: Option<usize>,
    seed: u64,
    gaze: Option<&Path>,
) -> Result<()> {
    let frames = match kind {
        SynthKind::Square => {
            let video = synth::moving_square(width, height, count, seed);
            if let Some(path) = gaze {
                let mut w = create(path)?;
                writeln!(w, "frame,x,y,valid")?;
                for (i, (x, y)) in video.centers.iter().enumerate() {
                    writeln!(w, "{i},{x},{y},1")?;
                }
                w.flush()?;
            }
            video.frames
        }
        SynthKind::Regimes => synth::texture_regimes(width, height, count, switch_at, synth::CALM, synth::BUSY, seed),
        SynthKind::Constant => synth::constant_frames(width, height, count, [128, 128, 128]),
    };
    match format {
        SynthFormat::Ppm => write_ppm_dir(out, &frames)?,
        SynthFormat::Raw => {
            let mut w = create(out)?;
            formats::write_rawvideo_header(&mut w, width, height, fps)?;
            for f in &frames {
                w.write_all(&f.pixels)?;
            }
            w.flush()?;
        }
    }
    eprintln!("wrote {} frames to {}", frames.len(), out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Predict { run, heatmaps, out } => cmd_predict(run, heatmaps.as_deref(), out),
        Command::Segment {
            run,
            lambda,
            min_len,
            out,
            energies,
        } => cmd_segment(run, *lambda, *min_len, out, energies.as_deref()),
        Command::Eval(cmd) => cmd_eval(cmd),
        Command::Bench { run, repeat } => cmd_bench(run, *repeat),
        Command::Synth {
            kind,
            out,
            format,
            count,
            width,
            height,
            fps,
            switch_at,
            seed,
            gaze,
        } => cmd_synth(
            *kind,
            out,
            *format,
            *count,
            (*width, *height, *fps),
            *switch_at,
            *seed,
            gaze.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("egosurprise: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}

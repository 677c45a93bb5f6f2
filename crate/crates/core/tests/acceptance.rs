//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use egosurprise::energy::{phi_appearance, phi_combined, phi_motion};
use egosurprise::evalkit::{aae, assignment_cost, hungarian, CameraModel, GazeRecord};
use egosurprise::pipeline::{benchmark, EventsJsonSink, GazeCsvSink};
use egosurprise::predictor::{cell_center, AcceptMode, CenterBiasConfig};
use egosurprise::temporal::DecayForm;
use egosurprise::{
    bond_energy, build_geometry, predict_gaze, process_stream, synth, Cell, DecayWeights, EnergyParams, Frame,
    FrameOutputs, FrameSink, GazeMode, GazePrediction, MotionMode, Pipeline, PredictorParams, RunConfig, SurpriseMap,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn run_all(f: &mut dyn FnMut(&'static str, Duration, fn() -> Outcome)) {
    f("1 energy oracle", Duration::from_secs(1), energy_oracle);
    f("2 decay weights", Duration::from_secs(1), decay_weights);
    f("3 zero surprise", Duration::from_secs(2), zero_surprise);
    f("4 moving target", Duration::from_secs(10), moving_target);
    f("5 segmentation oracle", Duration::from_secs(10), segmentation_oracle);
    f("6 hungarian brute force", Duration::from_secs(5), hungarian_brute_force);
    f("7 aae analytic inverse", Duration::from_secs(1), aae_inverse);
    f("8 determinism and causality", Duration::from_secs(10), determinism);
    f("9 throughput", Duration::from_secs(30), throughput);
    f("10 saccade acceptance", Duration::from_secs(10), saccade_acceptance);
}

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    run_all(&mut |name, budget, check| {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            return;
        }
        let start = Instant::now();
        let o = check();
        let took = start.elapsed();
        let pass = o.pass && took < budget;
        failed += !pass as usize;
        println!(
            "{} {name}: {} ({:.2}s, budget {}s)",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    });
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

// ---------------------------------------------------------------------------
// 1

#[allow(clippy::needless_range_loop)]
mod oracle {
    pub fn norm(u: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..u.len() {
            s += u[i] * u[i];
        }
        s.sqrt()
    }

    pub fn phi_a(u: &[f64], v: &[f64]) -> f64 {
        let (nu, nv) = (norm(u), norm(v));
        if nu == 0.0 && nv == 0.0 {
            return 0.0;
        }
        if nu == 0.0 || nv == 0.0 {
            return 1.0;
        }
        let mut dot = 0.0;
        for i in 0..u.len() {
            dot += u[i] * v[i];
        }
        1.0 - dot / nu / nv
    }

    fn centred(u: &[f64]) -> Vec<f64> {
        let mut m = 0.0;
        for x in u {
            m += x;
        }
        m /= u.len() as f64;
        u.iter().map(|x| x - m).collect()
    }

    fn constant(u: &[f64]) -> bool {
        u.windows(2).all(|w| w[0] == w[1])
    }

    pub fn phi_m_pearson(u: &[f64], v: &[f64]) -> f64 {
        if constant(u) || constant(v) {
            return 0.0;
        }
        let (cu, cv) = (centred(u), centred(v));
        let mut dot = 0.0;
        for i in 0..u.len() {
            dot += cu[i] * cv[i];
        }
        let r = dot / (norm(&cu) * norm(&cv));
        (1.0 - r) / 2.0
    }

    pub fn phi_m_raw(u: &[f64], v: &[f64]) -> f64 {
        let (cu, cv) = (centred(u), centred(v));
        let mut s = 0.0;
        for i in 0..u.len() {
            s += cu[i] * cv[i];
        }
        s / u.len() as f64
    }

    pub fn phi(u: &[f64], v: &[f64], raw: bool, alpha: f64) -> f64 {
        let m = if raw { phi_m_raw(u, v) } else { phi_m_pearson(u, v) };
        let p = phi_a(u, v) + m;
        let p = if p > alpha { alpha } else { p };
        if p < 0.0 {
            0.0
        } else {
            p
        }
    }

    pub fn bond(u: &[f64], v: &[f64], raw: bool, w_s: f64, alpha: f64) -> f64 {
        w_s * phi(u, v, raw, alpha).tanh()
    }
}

fn random_pair(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let dim = rng.gen_range(2..=64);
    let scale = [1e-3, 1.0, 255.0][rng.gen_range(0..3)];
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..dim).map(|_| rng.gen::<f64>() * scale).collect() };
    let u = draw(rng);
    let v = match rng.gen_range(0..10) {
        0 => u.clone(),
        1 => vec![0.0; dim],
        2 => vec![rng.gen::<f64>() * scale; dim],
        3 => u.iter().map(|x| x * 3.0).collect(),
        _ => draw(rng),
    };
    let u = if rng.gen_range(0..20) == 0 { vec![0.0; dim] } else { u };
    (u, v)
}

fn energy_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut bound_violations = 0;
    for _ in 0..1000 {
        let (u, v) = random_pair(&mut rng);
        let params = EnergyParams {
            w_s: rng.gen_range(0.1..3.0),
            alpha: rng.gen_range(0.05..2.0),
            motion_mode: if rng.gen_bool(0.2) {
                MotionMode::RawCovariance
            } else {
                MotionMode::PearsonDissimilarity
            },
        };
        let raw = params.motion_mode == MotionMode::RawCovariance;
        let diffs = [
            phi_appearance(&u, &v).unwrap() - oracle::phi_a(&u, &v),
            phi_motion(&u, &v, MotionMode::PearsonDissimilarity).unwrap() - oracle::phi_m_pearson(&u, &v),
            phi_motion(&u, &v, MotionMode::RawCovariance).unwrap() - oracle::phi_m_raw(&u, &v),
            phi_combined(&u, &v, &params).unwrap() - oracle::phi(&u, &v, raw, params.alpha),
            bond_energy(&u, &v, &params).unwrap() - oracle::bond(&u, &v, raw, params.w_s, params.alpha),
        ];
        worst = diffs.iter().fold(worst, |w, d| w.max(d.abs()));
        let b = bond_energy(&u, &v, &params).unwrap();
        if !(0.0..=params.w_s * params.alpha.tanh()).contains(&b) {
            bound_violations += 1;
        }
    }
    outcome(
        worst <= 1e-12 && bound_violations == 0,
        format!("max |diff| {worst:.2e}, bound violations {bound_violations}"),
    )
}

// ---------------------------------------------------------------------------
// 2

fn decay_weights() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst, mut worst_sum, mut increasing) = (0.0f64, 0.0f64, 0);
    for _ in 0..100 {
        let k = rng.gen_range(1..=90);
        let a = rng.gen_range(0.01..10.0);
        let b = rng.gen_range(0.0..0.999);
        let w = DecayWeights::new(k, a, b, DecayForm::OneMinusB).unwrap().weights;
        let hand: Vec<f64> = (1..=k).map(|i| a * (1.0 - b).powi(i as i32 - 1)).collect();
        let total: f64 = hand.iter().sum();
        for (x, h) in w.iter().zip(&hand) {
            worst = worst.max((x - h / total).abs());
        }
        worst_sum = worst_sum.max((w.iter().sum::<f64>() - 1.0).abs());
        increasing += w.windows(2).filter(|p| p[1] > p[0]).count();
        if w.len() != k {
            return outcome(false, format!("k={k} gave {} weights", w.len()));
        }
    }
    outcome(
        worst < 1e-12 && worst_sum <= 1e-9 && increasing == 0,
        format!("max |w - hand| {worst:.2e}, max |sum - 1| {worst_sum:.2e}, increases {increasing}"),
    )
}

// ---------------------------------------------------------------------------
// 3

fn run_frames(config: &RunConfig, frames: &[Frame]) -> Vec<FrameOutputs> {
    let mut p = Pipeline::new(config.clone()).unwrap();
    frames.iter().map(|f| p.process_frame(f).unwrap()).collect()
}

fn zero_surprise() -> Outcome {
    let frames = synth::constant_frames(640, 480, 100, [90, 140, 200]);
    let config = RunConfig::default();
    let outs = run_frames(&config, &frames);
    let g = build_geometry(640, 480, config.grid).unwrap();
    let centre = cell_center(g.center_cell(), &g);
    let off_centre = outs.iter().filter(|o| o.prediction.point != centre).count();
    let nonzero = outs.iter().filter(|o| o.energy != 0.0).count();
    let boundaries = outs.iter().filter(|o| o.boundary.is_some()).count();
    outcome(
        outs.len() == 100 && off_centre == 0 && nonzero == 0 && boundaries == 0,
        format!("off-centre {off_centre}, non-zero energies {nonzero}, boundaries {boundaries}, centre {centre:?}"),
    )
}

// ---------------------------------------------------------------------------
// 4

fn moving_target() -> Outcome {
    let video = synth::moving_square(640, 480, 300, 42);
    let config = RunConfig::default();
    let outs = run_frames(&config, &video.frames);
    let g = build_geometry(640, 480, config.grid).unwrap();
    let cam = CameraModel::new(640.0, 480.0, 60.0).unwrap();
    let (mut near, mut total) = (0, 0);
    let (mut pred, mut truth) = (Vec::new(), Vec::new());
    for (o, &(x, y)) in outs.iter().zip(&video.centers).skip(30) {
        let target = g.cell_at(x as usize, y as usize);
        let c = o.prediction.cell;
        let cheb = c.row.abs_diff(target.row).max(c.col.abs_diff(target.col));
        near += (cheb <= 2) as usize;
        total += 1;
        let frame_index = o.prediction.frame_index;
        let (px, py) = o.prediction.point;
        pred.push(GazeRecord {
            frame_index,
            x: px as f64,
            y: py as f64,
            valid: true,
        });
        truth.push(GazeRecord {
            frame_index,
            x,
            y,
            valid: true,
        });
    }
    let frac = near as f64 / total as f64;
    let err = aae(&pred, &truth, &cam).unwrap();
    outcome(
        frac >= 0.8 && err < 5.0,
        format!("within 2 cells {:.1}% of {total} frames, AAE {err:.3} deg", frac * 100.0),
    )
}

// ---------------------------------------------------------------------------
// 5

fn segmentation_oracle() -> Outcome {
    let config = RunConfig::default();
    let boundaries = |switch_at| -> Vec<u64> {
        let frames = synth::texture_regimes(640, 480, 200, switch_at, synth::CALM, synth::BUSY, 5);
        run_frames(&config, &frames)
            .iter()
            .filter_map(|o| o.boundary.map(|b| b.frame_index))
            .collect()
    };
    let switched = boundaries(Some(100));
    let steady = boundaries(None);
    let pass = switched.len() == 1 && (95..=105).contains(&switched[0]) && steady.is_empty();
    outcome(pass, format!("with switch {switched:?}, without switch {steady:?}"))
}

// ---------------------------------------------------------------------------
// 6

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn hungarian_brute_force() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let perms: Vec<Vec<Vec<usize>>> = (0..=6).map(permutations).collect();
    let mut mismatches = 0;
    for t in 0..500 {
        let k = 1 + t % 6;
        let range = [3, 10, 1000][rng.gen_range(0..3)];
        let cost: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..k).map(|_| rng.gen_range(-range..=range) as f64).collect())
            .collect();
        let assignment = hungarian(&cost).unwrap();
        let mut seen = vec![false; k];
        let is_perm = assignment.len() == k && assignment.iter().all(|&c| c < k && !std::mem::replace(&mut seen[c], true));
        let best = perms[k]
            .iter()
            .map(|p| assignment_cost(&cost, p))
            .fold(f64::INFINITY, f64::min);
        if !is_perm || assignment_cost(&cost, &assignment) != best {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{mismatches} of 500 differ from the exhaustive minimum"))
}

// ---------------------------------------------------------------------------
// 7

/// Pixel whose viewing ray is `deg` away from the ray through `(x, y)`,
/// rotated about an axis perpendicular to that ray.
fn offset_pixel(x: f64, y: f64, deg: f64, heading: f64, w: f64, h: f64, f: f64) -> (f64, f64) {
    let r = [x - w / 2.0, y - h / 2.0, f];
    let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    let r = [r[0] / n, r[1] / n, r[2] / n];
    // orthonormal basis perpendicular to r
    let helper = if r[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let cross = |a: [f64; 3], b: [f64; 3]| [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let e1 = cross(r, helper);
    let m = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    let e1 = [e1[0] / m, e1[1] / m, e1[2] / m];
    let e2 = cross(r, e1);
    let (s, c) = deg.to_radians().sin_cos();
    let (hs, hc) = heading.sin_cos();
    let q: Vec<f64> = (0..3).map(|i| c * r[i] + s * (hc * e1[i] + hs * e2[i])).collect();
    (w / 2.0 + f * q[0] / q[2], h / 2.0 + f * q[1] / q[2])
}

fn aae_inverse() -> Outcome {
    let (w, h) = (640.0, 480.0);
    let cam = CameraModel::new(w, h, 60.0).unwrap();
    let f = (w / 2.0) / 30f64.to_radians().tan();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut report = Vec::new();
    for deg in [5.0, 10.0, 20.0] {
        let (mut pred, mut truth) = (Vec::new(), Vec::new());
        for i in 0..200u64 {
            let (x, y) = (rng.gen_range(0.0..w), rng.gen_range(0.0..h));
            let heading = rng.gen_range(0.0..std::f64::consts::TAU);
            let (px, py) = offset_pixel(x, y, deg, heading, w, h, f);
            truth.push(GazeRecord { frame_index: i, x, y, valid: true });
            pred.push(GazeRecord { frame_index: i, x: px, y: py, valid: true });
        }
        let got = aae(&pred, &truth, &cam).unwrap();
        worst = worst.max((got - deg).abs());
        report.push(format!("{deg}->{got:.6}"));
    }
    outcome(worst <= 1e-3, format!("{} (max err {worst:.2e})", report.join(", ")))
}

// ---------------------------------------------------------------------------
// 8

fn run_to_bytes(config: &RunConfig, frames: &[Frame]) -> (Vec<u8>, Vec<u8>) {
    let mut gaze = GazeCsvSink::new(Vec::new());
    let mut events = EventsJsonSink::new(Vec::new());
    {
        let mut sinks: [&mut dyn FrameSink; 2] = [&mut gaze, &mut events];
        process_stream(config, frames.iter().cloned().map(Ok), &mut sinks).unwrap();
    }
    (gaze.into_inner(), events.into_inner())
}

fn determinism() -> Outcome {
    let video = synth::moving_square(640, 480, 300, 8);
    let config = RunConfig {
        gating: egosurprise::GatingParams {
            lambda: 1.0,
            ..Default::default()
        },
        ..RunConfig::default()
    };
    let (gaze_a, events_a) = run_to_bytes(&config, &video.frames);
    let (gaze_b, events_b) = run_to_bytes(&config, &video.frames);
    let (gaze_p, _) = run_to_bytes(&config, &video.frames[..150]);
    let full_rows: Vec<&[u8]> = gaze_a.split(|&b| b == b'\n').collect();
    let prefix_rows: Vec<&[u8]> = gaze_p.split(|&b| b == b'\n').filter(|r| !r.is_empty()).collect();
    let identical = gaze_a == gaze_b && events_a == events_b;
    let prefix = prefix_rows.len() == 151 && full_rows[..151] == prefix_rows[..];
    let n_events = String::from_utf8_lossy(&events_a).matches("\"frame\"").count();
    outcome(
        identical && prefix,
        format!("repeat identical {identical}, 150-frame prefix identical {prefix}, {n_events} events"),
    )
}

// ---------------------------------------------------------------------------
// 9

fn throughput() -> Outcome {
    let frames = synth::moving_square(640, 480, 300, 9).frames;
    let config = RunConfig {
        k: Some(30),
        ..RunConfig::default()
    };
    let report = benchmark(&config, &frames, 3).unwrap();
    outcome(
        report.median() >= 30.0,
        format!(
            "median {:.1} fps (min {:.1}, max {:.1})",
            report.median(),
            report.min(),
            report.max()
        ),
    )
}

// ---------------------------------------------------------------------------
// 10

fn acceptance_rate(mode: AcceptMode) -> (f64, f64) {
    let g = build_geometry(640, 480, 16).unwrap();
    let energy = EnergyParams::default();
    let spike = Cell::new(2, 3);
    let mut map = SurpriseMap::zeros(g, 0);
    map.values[g.index(spike)] = energy.max_bond_energy();
    let params = PredictorParams {
        p_c: 1.0,
        p_mode: mode,
        p_fixed: 0.5,
        ..Default::default()
    };
    let cb = CenterBiasConfig::new(g, None);
    let prev = GazePrediction {
        frame_index: 0,
        cell: g.center_cell(),
        point: cell_center(g.center_cell(), &g),
        mode: GazeMode::Fixation,
        energy: 0.0,
    };
    let dr = spike.row as f64 - prev.cell.row as f64;
    let dc = spike.col as f64 - prev.cell.col as f64;
    let d = 1.0 + dr.hypot(dc) / (16.0 * 2f64.sqrt());
    let expected = match mode {
        AcceptMode::Proportional => (energy.max_bond_energy() / d) / (2.0 * energy.max_bond_energy()),
        AcceptMode::Fixed => 0.5,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let trials = 10_000;
    let mut accepted = 0;
    for t in 0..trials {
        map.frame_index = t;
        let p = predict_gaze(&map, Some(&prev), &params, &energy, &cb, &mut rng).unwrap();
        accepted += (p.cell == spike) as usize;
    }
    (accepted as f64 / trials as f64, expected)
}

fn saccade_acceptance() -> Outcome {
    let (prop, prop_expected) = acceptance_rate(AcceptMode::Proportional);
    let (fixed, fixed_expected) = acceptance_rate(AcceptMode::Fixed);
    outcome(
        (prop - prop_expected).abs() <= 0.02 && (fixed - fixed_expected).abs() <= 0.01,
        format!("proportional {prop:.4} vs {prop_expected:.4}, fixed {fixed:.4} vs {fixed_expected:.4}"),
    )
}

//! On-disk formats: PPM frames, RAWVIDEO streams, flow sidecars, PGM
//! heatmaps, the CSV/JSON outputs and the evaluation inputs.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;

use serde::Deserialize;

use crate::energy::EnergyParams;
use crate::error::{Error, Result};
use crate::evalkit::{GazeRecord, VideoRange};
use crate::features::Frame;
use crate::predictor::GazePrediction;
use crate::segmenter::EventBoundary;
use crate::temporal::SurpriseMap;

pub const FEAT32_MAGIC: &[u8; 6] = b"FEAT32";
pub const RAWVIDEO_MAGIC: &str = "RAWVIDEO";

// ---------------------------------------------------------------------------
// PPM / PGM

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Decode(format!("PPM header: bad {what}")))
    }
}

/// Decodes a binary (P6) PPM with `maxval <= 255`.
pub fn decode_ppm(bytes: &[u8], index: u64) -> Result<Frame> {
    if bytes.len() < 2 || &bytes[..2] != b"P6" {
        return Err(Error::Decode("not a binary PPM (missing P6 magic)".into()));
    }
    let mut cur = HeaderCursor { bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if !(1..=255).contains(&maxval) {
        return Err(Error::Decode(format!("PPM maxval {maxval} is not 8-bit")));
    }
    if width == 0 || height == 0 {
        return Err(Error::Decode("PPM has zero size".into()));
    }
    if !bytes.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::Decode("PPM header not terminated by whitespace".into()));
    }
    let data = &bytes[cur.pos + 1..];
    let need = width * height * 3;
    if data.len() < need {
        return Err(Error::Decode(format!(
            "PPM truncated: need {need} pixel bytes, have {}",
            data.len()
        )));
    }
    let mut pixels = data[..need].to_vec();
    if maxval != 255 {
        for p in &mut pixels {
            *p = ((*p as usize * 255 + maxval / 2) / maxval).min(255) as u8;
        }
    }
    Frame::new(width, height, pixels, index)
}

pub fn encode_ppm(frame: &Frame) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", frame.width, frame.height).into_bytes();
    out.extend_from_slice(&frame.pixels);
    out
}

/// 8-bit PGM of a surprise map, upscaled nearest-neighbour to frame size.
/// Grey level is `round(255 * v / (w_s * tanh(alpha)))`.
pub fn encode_heatmap(map: &SurpriseMap, energy: &EnergyParams) -> Vec<u8> {
    let g = &map.geometry;
    let scale = 255.0 / energy.max_bond_energy();
    let levels: Vec<u8> = map
        .values
        .iter()
        .map(|v| (v * scale).round().clamp(0.0, 255.0) as u8)
        .collect();
    let mut out = format!("P5\n{} {}\n255\n", g.frame_width, g.frame_height).into_bytes();
    out.reserve(g.frame_width * g.frame_height);
    let cols: Vec<usize> = (0..g.frame_width).map(|x| g.cell_at(x, 0).col).collect();
    for y in 0..g.frame_height {
        let row = g.cell_at(0, y).row * g.n;
        out.extend(cols.iter().map(|&c| levels[row + c]));
    }
    out
}

// ---------------------------------------------------------------------------
// RAWVIDEO stream

/// Reads `RAWVIDEO <w> <h> <fps>\n` followed by RGB24 frames until EOF.
pub struct RawVideoReader<R> {
    inner: R,
    pub width: usize,
    pub height: usize,
    pub fps: f64,
    next_index: u64,
}

impl<R: BufRead> RawVideoReader<R> {
    pub fn new(mut inner: R) -> Result<Self> {
        let mut line = String::new();
        inner.read_line(&mut line)?;
        let parts: Vec<&str> = line.trim_end_matches('\n').split(' ').collect();
        let parse = || -> Option<(usize, usize, f64)> {
            if parts.len() != 4 || parts[0] != RAWVIDEO_MAGIC {
                return None;
            }
            Some((parts[1].parse().ok()?, parts[2].parse().ok()?, parts[3].parse().ok()?))
        };
        let (width, height, fps) = parse()
            .filter(|&(w, h, f)| w > 0 && h > 0 && f > 0.0)
            .ok_or_else(|| Error::Decode(format!("bad RAWVIDEO header {:?}", line.trim_end())))?;
        Ok(RawVideoReader {
            inner,
            width,
            height,
            fps,
            next_index: 0,
        })
    }

    fn read_frame(&mut self) -> Result<Option<Frame>> {
        let mut pixels = vec![0u8; self.width * self.height * 3];
        let mut filled = 0;
        while filled < pixels.len() {
            match self.inner.read(&mut pixels[filled..]) {
                Ok(0) => break,
                Ok(n) => filled += n,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
        if filled == 0 {
            return Ok(None);
        }
        if filled < pixels.len() {
            return Err(Error::Decode(format!(
                "RAWVIDEO frame {} truncated: {filled} of {} bytes",
                self.next_index,
                pixels.len()
            )));
        }
        let frame = Frame::new(self.width, self.height, pixels, self.next_index)?;
        self.next_index += 1;
        Ok(Some(frame))
    }
}

impl<R: BufRead> Iterator for RawVideoReader<R> {
    type Item = Result<Frame>;

    fn next(&mut self) -> Option<Self::Item> {
        self.read_frame().transpose()
    }
}

pub fn write_rawvideo_header(out: &mut impl Write, width: usize, height: usize, fps: f64) -> io::Result<()> {
    writeln!(out, "{RAWVIDEO_MAGIC} {width} {height} {fps}")
}

// ---------------------------------------------------------------------------
// Flow sidecars (`.flo32`)

pub fn decode_flow(bytes: &[u8]) -> Result<(usize, usize, Vec<[f32; 2]>)> {
    if bytes.len() < 8 {
        return Err(Error::Decode("flow file shorter than its header".into()));
    }
    let width = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
    let height = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let body = &bytes[8..];
    if body.len() != width * height * 8 {
        return Err(Error::Decode(format!(
            "flow file for {width}x{height} needs {} bytes after the header, has {}",
            width * height * 8,
            body.len()
        )));
    }
    let flow = body
        .chunks_exact(8)
        .map(|c| {
            [
                f32::from_le_bytes(c[0..4].try_into().unwrap()),
                f32::from_le_bytes(c[4..8].try_into().unwrap()),
            ]
        })
        .collect();
    Ok((width, height, flow))
}

pub fn encode_flow(width: usize, height: usize, flow: &[[f32; 2]]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + flow.len() * 8);
    out.extend_from_slice(&(width as u32).to_le_bytes());
    out.extend_from_slice(&(height as u32).to_le_bytes());
    for v in flow {
        out.extend_from_slice(&v[0].to_le_bytes());
        out.extend_from_slice(&v[1].to_le_bytes());
    }
    out
}

// ---------------------------------------------------------------------------
// Outputs

pub const GAZE_CSV_HEADER: &str = "frame,x,y,mode,energy";

pub fn gaze_row(p: &GazePrediction) -> String {
    format!(
        "{},{},{},{},{:.6}",
        p.frame_index, p.point.0, p.point.1, p.mode, p.energy
    )
}

pub fn energy_row(frame: u64, energy: f64) -> String {
    format!("{frame},{energy:.6}")
}

/// Boundary list as a JSON array of `{frame, energy, z}` objects. A `z`
/// that is not finite (zero spread before the jump) is written as `null`.
pub fn events_json(boundaries: &[EventBoundary]) -> String {
    if boundaries.is_empty() {
        return "[]\n".to_string();
    }
    let mut out = String::from("[\n");
    for (i, b) in boundaries.iter().enumerate() {
        let z = if b.z.is_finite() {
            format!("{:.6}", b.z)
        } else {
            "null".to_string()
        };
        let sep = if i + 1 < boundaries.len() { "," } else { "" };
        let _ = writeln!(
            out,
            "  {{\"frame\": {}, \"energy\": {:.6}, \"z\": {z}}}{sep}",
            b.frame_index, b.energy
        );
    }
    out.push_str("]\n");
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct EventRecord {
    pub frame: u64,
    pub energy: f64,
    pub z: Option<f64>,
}

pub fn parse_events(text: &str) -> Result<Vec<EventRecord>> {
    serde_json::from_str(text).map_err(|e| Error::Schema {
        path: "events".into(),
        line: e.line(),
        msg: e.to_string(),
    })
}

// ---------------------------------------------------------------------------
// Evaluation inputs

fn schema(path: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Schema {
        path: path.to_string(),
        line,
        msg: msg.into(),
    }
}

/// Non-empty lines with their 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn field<T: std::str::FromStr>(path: &str, line: usize, cols: &[&str], i: usize, name: &str) -> Result<T> {
    let raw = cols
        .get(i)
        .ok_or_else(|| schema(path, line, format!("missing column {name}")))?;
    raw.trim()
        .parse()
        .map_err(|_| schema(path, line, format!("cannot parse {name} from {raw:?}")))
}

/// Parses a gaze table. Requires `frame`, `x` and `y` columns; `valid`
/// (0/1) is optional and defaults to 1, so prediction output can be scored
/// directly.
pub fn parse_gaze_csv(path: &str, text: &str) -> Result<Vec<GazeRecord>> {
    let mut rows = lines(text);
    let (hl, header) = rows.next().ok_or_else(|| schema(path, 1, "empty file"))?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    let col = |n: &str| names.iter().position(|&c| c == n);
    let (Some(fi), Some(xi), Some(yi)) = (col("frame"), col("x"), col("y")) else {
        return Err(schema(path, hl, "header must contain frame,x,y"));
    };
    let vi = col("valid");
    let mut out = Vec::new();
    for (ln, row) in rows {
        let cols: Vec<&str> = row.split(',').collect();
        if cols.len() != names.len() {
            return Err(schema(path, ln, format!("expected {} columns, got {}", names.len(), cols.len())));
        }
        let valid = match vi {
            Some(i) => match cols[i].trim() {
                "1" => true,
                "0" => false,
                other => return Err(schema(path, ln, format!("valid must be 0 or 1, got {other:?}"))),
            },
            None => true,
        };
        out.push(GazeRecord {
            frame_index: field(path, ln, &cols, fi, "frame")?,
            x: field(path, ln, &cols, xi, "x")?,
            y: field(path, ln, &cols, yi, "y")?,
            valid,
        });
    }
    Ok(out)
}

/// Per-frame feature rows, `(frame, values)`.
pub type FeatureMatrix = Vec<(u64, Vec<f64>)>;

pub fn parse_feature_csv(path: &str, text: &str) -> Result<FeatureMatrix> {
    let mut rows = lines(text);
    let (hl, header) = rows.next().ok_or_else(|| schema(path, 1, "empty file"))?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    let well_formed = names.len() >= 2
        && names[0] == "frame"
        && names[1..].iter().enumerate().all(|(i, n)| *n == format!("f{i}"));
    if !well_formed {
        return Err(schema(path, hl, "header must be frame,f0,f1,..."));
    }
    rows.map(|(ln, row)| {
        let cols: Vec<&str> = row.split(',').collect();
        if cols.len() != names.len() {
            return Err(schema(path, ln, format!("expected {} columns, got {}", names.len(), cols.len())));
        }
        let frame = field(path, ln, &cols, 0, "frame")?;
        let values = (1..cols.len())
            .map(|i| field(path, ln, &cols, i, &format!("f{}", i - 1)))
            .collect::<Result<_>>()?;
        Ok((frame, values))
    })
    .collect()
}

/// Raw `FEAT32` matrix; rows are frames `0..rows`.
pub fn decode_feat32(bytes: &[u8]) -> Result<FeatureMatrix> {
    if bytes.len() < 14 || &bytes[..6] != FEAT32_MAGIC {
        return Err(Error::Decode("missing FEAT32 header".into()));
    }
    let rows = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
    let dims = u32::from_le_bytes(bytes[10..14].try_into().unwrap()) as usize;
    let body = &bytes[14..];
    if body.len() != rows * dims * 4 {
        return Err(Error::Decode(format!(
            "FEAT32 {rows}x{dims} needs {} data bytes, has {}",
            rows * dims * 4,
            body.len()
        )));
    }
    let values: Vec<f64> = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    if dims == 0 {
        return Ok((0..rows as u64).map(|r| (r, Vec::new())).collect());
    }
    Ok(values
        .chunks_exact(dims)
        .enumerate()
        .map(|(r, row)| (r as u64, row.to_vec()))
        .collect())
}

pub fn encode_feat32(rows: &[Vec<f32>]) -> Vec<u8> {
    let dims = rows.first().map_or(0, Vec::len);
    let mut out = FEAT32_MAGIC.to_vec();
    out.extend_from_slice(&(rows.len() as u32).to_le_bytes());
    out.extend_from_slice(&(dims as u32).to_le_bytes());
    for v in rows.iter().flatten() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Loads a feature matrix, choosing the codec by the `FEAT32` magic.
pub fn read_feature_matrix(path: &Path) -> Result<FeatureMatrix> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(FEAT32_MAGIC) {
        decode_feat32(&bytes)
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| Error::Decode(format!("{} is neither FEAT32 nor text", path.display())))?;
        parse_feature_csv(&path.display().to_string(), &text)
    }
}

pub fn parse_labels_csv(path: &str, text: &str) -> Result<Vec<(u64, usize)>> {
    let mut rows = lines(text);
    let (hl, header) = rows.next().ok_or_else(|| schema(path, 1, "empty file"))?;
    if header.replace(' ', "") != "frame,label" {
        return Err(schema(path, hl, "header must be frame,label"));
    }
    rows.map(|(ln, row)| {
        let cols: Vec<&str> = row.split(',').collect();
        if cols.len() != 2 {
            return Err(schema(path, ln, format!("expected 2 columns, got {}", cols.len())));
        }
        Ok((field(path, ln, &cols, 0, "frame")?, field(path, ln, &cols, 1, "label")?))
    })
    .collect()
}

/// Lines up per-frame features with per-frame labels. Both tables must
/// cover frames `0..n` exactly once each.
pub fn align_frames(features: FeatureMatrix, labels: &[(u64, usize)]) -> Result<(Vec<Vec<f64>>, Vec<usize>)> {
    fn dense<T: Clone>(what: &str, rows: Vec<(u64, T)>) -> Result<Vec<T>> {
        let n = rows.len();
        let mut slots: Vec<Option<T>> = vec![None; n];
        for (frame, v) in rows {
            let slot = slots
                .get_mut(frame as usize)
                .ok_or_else(|| Error::Config(format!("{what}: frame {frame} out of range 0..{n}")))?;
            if slot.replace(v).is_some() {
                return Err(Error::Config(format!("{what}: frame {frame} appears twice")));
            }
        }
        Ok(slots.into_iter().map(|s| s.expect("every slot filled")).collect())
    }
    let features = dense("features", features)?;
    let labels = dense("labels", labels.to_vec())?;
    if features.len() != labels.len() {
        return Err(Error::Config(format!(
            "{} feature rows but {} labels",
            features.len(),
            labels.len()
        )));
    }
    if let Some(d) = features.first().map(Vec::len) {
        if let Some(bad) = features.iter().position(|f| f.len() != d) {
            return Err(Error::Config(format!("feature row {bad} has {} values, expected {d}", features[bad].len())));
        }
    }
    Ok((features, labels))
}

/// `video_id,start_frame,end_frame` lines; a header line with exactly those
/// names is skipped.
pub fn parse_manifest(path: &str, text: &str) -> Result<Vec<VideoRange>> {
    lines(text)
        .filter(|(_, l)| l.replace(' ', "") != "video_id,start_frame,end_frame")
        .map(|(ln, row)| {
            let cols: Vec<&str> = row.split(',').collect();
            if cols.len() != 3 {
                return Err(schema(path, ln, format!("expected 3 columns, got {}", cols.len())));
            }
            let range = VideoRange {
                id: cols[0].trim().to_string(),
                start: field(path, ln, &cols, 1, "start_frame")?,
                end: field(path, ln, &cols, 2, "end_frame")?,
            };
            if range.end < range.start {
                return Err(schema(path, ln, "end_frame precedes start_frame"));
            }
            Ok(range)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_geometry;
    use crate::predictor::GazeMode;
    use crate::lattice::Cell;
    use proptest::prelude::*;

    #[test]
    fn ppm_with_comments() {
        let mut bytes = b"P6\n# made by hand\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3, 4, 5, 6]);
        let f = decode_ppm(&bytes, 9).unwrap();
        assert_eq!((f.width, f.height, f.index), (2, 1, 9));
        assert_eq!(f.pixels, vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn ppm_errors() {
        assert!(decode_ppm(b"P3\n1 1\n255\n", 0).is_err());
        assert!(decode_ppm(b"P6\n2 2\n255\n\x00", 0).is_err());
        assert!(decode_ppm(b"P6\n1 1\n65535\n\x00\x00\x00\x00\x00\x00", 0).is_err());
    }

    #[test]
    fn ppm_low_maxval_rescaled() {
        let f = decode_ppm(b"P6 1 1 15\n\x0f\x00\x07", 0).unwrap();
        assert_eq!(f.pixels, vec![255, 0, 119]);
    }

    #[test]
    fn rawvideo_stream() {
        let mut data = Vec::new();
        write_rawvideo_header(&mut data, 2, 1, 30.0).unwrap();
        data.extend_from_slice(&[0; 12]);
        let reader = RawVideoReader::new(&data[..]).unwrap();
        assert_eq!(reader.fps, 30.0);
        let frames: Vec<Frame> = reader.collect::<Result<_>>().unwrap();
        assert_eq!(frames.len(), 2);
        assert_eq!(frames[1].index, 1);

        data.push(7);
        let frames: Vec<Result<Frame>> = RawVideoReader::new(&data[..]).unwrap().collect();
        assert!(frames[2].is_err());
        assert!(RawVideoReader::new(&b"RAWVIDEO 2 x 30\n"[..]).is_err());
    }

    #[test]
    fn heatmap_levels() {
        let g = build_geometry(5, 4, 2).unwrap();
        let e = EnergyParams::default();
        let map = SurpriseMap {
            geometry: g,
            values: vec![0.0, e.max_bond_energy(), e.max_bond_energy() * 0.4, 0.1],
            frame_index: 0,
        };
        let pgm = encode_heatmap(&map, &e);
        let header = b"P5\n5 4\n255\n";
        assert_eq!(&pgm[..header.len()], header);
        let px = &pgm[header.len()..];
        assert_eq!(px.len(), 20);
        // cell (0,1) covers columns 2..5 of rows 0..2
        assert_eq!(&px[..5], &[0, 0, 255, 255, 255]);
        assert_eq!(px[15], 102);
        assert_eq!(px[19], (0.1 * 255.0 / 1f64.tanh()).round() as u8);
    }

    #[test]
    fn gaze_rows() {
        let p = GazePrediction {
            frame_index: 3,
            cell: Cell::new(0, 0),
            point: (20, 15),
            mode: GazeMode::CenterBias,
            energy: 0.25,
        };
        assert_eq!(gaze_row(&p), "3,20,15,center-bias,0.250000");
    }

    #[test]
    fn events_round_trip() {
        assert_eq!(events_json(&[]), "[]\n");
        let b = [
            EventBoundary { frame_index: 100, energy: 12.5, z: 3.25 },
            EventBoundary { frame_index: 140, energy: 1.0, z: f64::INFINITY },
        ];
        let text = events_json(&b);
        assert_eq!(
            text,
            "[\n  {\"frame\": 100, \"energy\": 12.500000, \"z\": 3.250000},\n  {\"frame\": 140, \"energy\": 1.000000, \"z\": null}\n]\n"
        );
        let back = parse_events(&text).unwrap();
        assert_eq!(back[0], EventRecord { frame: 100, energy: 12.5, z: Some(3.25) });
        assert_eq!(back[1].z, None);
    }

    #[test]
    fn gaze_csv_variants() {
        let truth = parse_gaze_csv("gt", "frame,x,y,valid\n0,1.5,2,1\n1,0,0,0\n").unwrap();
        assert_eq!(truth.len(), 2);
        assert!(!truth[1].valid);
        let pred = parse_gaze_csv("p", "frame,x,y,mode,energy\n0,20,15,fixation,0.000000\n").unwrap();
        assert!(pred[0].valid);
        let err = parse_gaze_csv("gt", "frame,x,y,valid\n0,1,2,1\n1,zz,2,1\n").unwrap_err();
        assert!(matches!(err, Error::Schema { line: 3, .. }), "{err}");
        assert!(matches!(parse_gaze_csv("gt", "a,b\n"), Err(Error::Schema { line: 1, .. })));
    }

    #[test]
    fn feature_tables() {
        let m = parse_feature_csv("f", "frame,f0,f1\n0,1,2\n1,3,4.5\n").unwrap();
        assert_eq!(m[1], (1, vec![3.0, 4.5]));
        assert!(matches!(parse_feature_csv("f", "frame,f0,f2\n"), Err(Error::Schema { line: 1, .. })));
        assert!(matches!(parse_feature_csv("f", "frame,f0\n0,1\n1\n"), Err(Error::Schema { line: 3, .. })));
        let bin = encode_feat32(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]);
        let m = decode_feat32(&bin).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m[2], (2, vec![5.0, 6.0]));
        assert!(decode_feat32(&bin[..bin.len() - 1]).is_err());
    }

    #[test]
    fn labels_and_manifest() {
        let l = parse_labels_csv("l", "frame,label\n0,2\n1,0\n").unwrap();
        assert_eq!(l, vec![(0, 2), (1, 0)]);
        assert!(matches!(parse_labels_csv("l", "frame,label\n0,-1\n"), Err(Error::Schema { line: 2, .. })));
        let m = parse_manifest("m", "video_id,start_frame,end_frame\nv1,0,99\nv2,100,149\n").unwrap();
        assert_eq!(m[1], VideoRange { id: "v2".into(), start: 100, end: 149 });
        assert!(parse_manifest("m", "v1,10,5\n").is_err());
    }

    proptest! {
        #[test]
        fn ppm_round_trip(w in 1usize..16, h in 1usize..16, seed: u8) {
            let px: Vec<u8> = (0..w * h * 3).map(|i| (i as u8).wrapping_mul(31).wrapping_add(seed)).collect();
            let f = Frame::new(w, h, px, 4).unwrap();
            prop_assert_eq!(decode_ppm(&encode_ppm(&f), 4).unwrap(), f);
        }

        #[test]
        fn flow_round_trip(w in 1usize..8, h in 1usize..8, dx in -50f32..50.0) {
            let flow: Vec<[f32; 2]> = (0..w * h).map(|i| [dx + i as f32, -dx]).collect();
            let (w2, h2, back) = decode_flow(&encode_flow(w, h, &flow)).unwrap();
            prop_assert_eq!((w2, h2), (w, h));
            prop_assert_eq!(back, flow);
        }
    }

    #[test]
    fn align_checks_coverage() {
        let feats = vec![(1, vec![2.0]), (0, vec![1.0])];
        let (f, l) = align_frames(feats.clone(), &[(0, 3), (1, 4)]).unwrap();
        assert_eq!(f, vec![vec![1.0], vec![2.0]]);
        assert_eq!(l, vec![3, 4]);
        assert!(align_frames(feats.clone(), &[(0, 3)]).is_err());
        assert!(align_frames(feats.clone(), &[(0, 3), (0, 4)]).is_err());
        assert!(align_frames(vec![(0, vec![1.0]), (2, vec![1.0])], &[(0, 1), (1, 1)]).is_err());
    }
}

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Pinhole camera used to turn pixel positions into viewing rays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraModel {
    pub width: f64,
    pub height: f64,
    pub hfov_degrees: f64,
}

impl CameraModel {
    pub fn new(width: f64, height: f64, hfov_degrees: f64) -> Result<Self> {
        if !(hfov_degrees > 0.0 && hfov_degrees < 180.0) {
            return Err(Error::Config(format!("field of view must be in (0, 180), got {hfov_degrees}")));
        }
        if !(width > 0.0 && height > 0.0) {
            return Err(Error::Config(format!("camera size must be positive, got {width}x{height}")));
        }
        Ok(CameraModel {
            width,
            height,
            hfov_degrees,
        })
    }

    pub fn focal_px(&self) -> f64 {
        (self.width / 2.0) / (self.hfov_degrees.to_radians() / 2.0).tan()
    }

    pub fn ray(&self, x: f64, y: f64) -> [f64; 3] {
        [x - self.width / 2.0, y - self.height / 2.0, self.focal_px()]
    }

    /// Angle in degrees between the rays through two pixels.
    pub fn angle_between(&self, a: (f64, f64), b: (f64, f64)) -> f64 {
        let u = self.ray(a.0, a.1);
        let v = self.ray(b.0, b.1);
        let cross = [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ];
        let cross_norm = cross.iter().map(|c| c * c).sum::<f64>().sqrt();
        let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
        cross_norm.atan2(dot).to_degrees()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GazeRecord {
    pub frame_index: u64,
    pub x: f64,
    pub y: f64,
    pub valid: bool,
}

/// Average angular error in degrees over frames present in both lists where
/// both records are valid.
pub fn aae(pred: &[GazeRecord], truth: &[GazeRecord], cam: &CameraModel) -> Result<f64> {
    let truth: HashMap<u64, &GazeRecord> = truth.iter().map(|r| (r.frame_index, r)).collect();
    let (mut total, mut count) = (0.0, 0usize);
    for p in pred.iter().filter(|p| p.valid) {
        if let Some(t) = truth.get(&p.frame_index).filter(|t| t.valid) {
            total += cam.angle_between((p.x, p.y), (t.x, t.y));
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::EmptyEvaluation);
    }
    Ok(total / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(frame_index: u64, x: f64, y: f64) -> GazeRecord {
        GazeRecord {
            frame_index,
            x,
            y,
            valid: true,
        }
    }

    #[test]
    fn identical_is_zero() {
        let cam = CameraModel::new(640.0, 480.0, 60.0).unwrap();
        let recs = [rec(0, 10.0, 400.0), rec(1, 320.0, 240.0)];
        assert_eq!(aae(&recs, &recs, &cam).unwrap(), 0.0);
    }

    #[test]
    fn ten_degrees_from_center() {
        let cam = CameraModel::new(640.0, 480.0, 60.0).unwrap();
        let f = cam.focal_px();
        assert!((f - 320.0 / 30f64.to_radians().tan()).abs() < 1e-9);
        let truth = [rec(0, 320.0, 240.0)];
        let pred = [rec(0, 320.0 + f * 10f64.to_radians().tan(), 240.0)];
        assert!((aae(&pred, &truth, &cam).unwrap() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_frames_skipped() {
        let cam = CameraModel::new(640.0, 480.0, 60.0).unwrap();
        let f = cam.focal_px();
        let truth = [
            rec(0, 320.0, 240.0),
            GazeRecord { valid: false, ..rec(1, 0.0, 0.0) },
        ];
        let pred = [rec(0, 320.0, 240.0 + f * 5f64.to_radians().tan()), rec(1, 600.0, 400.0)];
        assert!((aae(&pred, &truth, &cam).unwrap() - 5.0).abs() < 1e-9);
        assert!(matches!(aae(&pred[1..], &truth, &cam), Err(Error::EmptyEvaluation)));
    }

    #[test]
    fn symmetric() {
        let cam = CameraModel::new(1280.0, 720.0, 90.0).unwrap();
        let a = [rec(0, 10.0, 20.0), rec(1, 900.0, 700.0)];
        let b = [rec(0, 640.0, 100.0), rec(1, 3.0, 360.0)];
        assert!((aae(&a, &b, &cam).unwrap() - aae(&b, &a, &cam).unwrap()).abs() < 1e-12);
        assert!(aae(&a, &b, &cam).unwrap() > 0.0);
    }

    #[test]
    fn bad_fov() {
        assert!(CameraModel::new(640.0, 480.0, 180.0).is_err());
        assert!(CameraModel::new(640.0, 480.0, 0.0).is_err());
    }
}

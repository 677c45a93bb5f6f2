use std::ops::Range;

use super::{hungarian, kmeans};
use crate::error::{Error, Result};

/// Per-frame integer labels drawn from `[0, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentLabeling {
    pub labels: Vec<usize>,
    pub k: usize,
}

impl SegmentLabeling {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::Config(format!("label {bad} is out of range for k = {k}")));
        }
        Ok(SegmentLabeling { labels, k })
    }

    /// Frames that agree after the best one-to-one relabelling of `self`
    /// onto `truth`.
    pub fn matched_frames(&self, truth: &SegmentLabeling) -> Result<usize> {
        if self.labels.len() != truth.labels.len() {
            return Err(Error::Dimension {
                left: self.labels.len(),
                right: truth.labels.len(),
            });
        }
        let k = self.k.max(truth.k);
        let mut confusion = vec![vec![0usize; k]; k];
        for (&p, &t) in self.labels.iter().zip(&truth.labels) {
            confusion[p][t] += 1;
        }
        let cost: Vec<Vec<f64>> = confusion
            .iter()
            .map(|row| row.iter().map(|&c| -(c as f64)).collect())
            .collect();
        let assignment = hungarian(&cost)?;
        Ok(assignment.iter().enumerate().map(|(p, &t)| confusion[p][t]).sum())
    }
}

/// One video's frame span inside a concatenated evaluation set; both ends
/// inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoRange {
    pub id: String,
    pub start: u64,
    pub end: u64,
}

/// Splits `0..len` at the given boundary frames. Boundaries at 0 or past
/// the end are ignored.
pub fn segments_from_boundaries(boundaries: &[u64], len: usize) -> Vec<Range<usize>> {
    let mut cuts: Vec<usize> = boundaries
        .iter()
        .map(|&b| b as usize)
        .filter(|&b| b > 0 && b < len)
        .collect();
    cuts.sort_unstable();
    cuts.dedup();
    let mut segments = Vec::with_capacity(cuts.len() + 1);
    let mut start = 0;
    for cut in cuts.into_iter().chain(std::iter::once(len)) {
        if start < cut {
            segments.push(start..cut);
        }
        start = cut;
    }
    segments
}

fn single_video(
    boundaries: &[u64],
    features: &[Vec<f64>],
    truth: &[usize],
    k: usize,
    seed: u64,
) -> Result<f64> {
    if features.len() != truth.len() {
        return Err(Error::Dimension {
            left: features.len(),
            right: truth.len(),
        });
    }
    if features.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    let truth = SegmentLabeling::new(truth.to_vec(), k)?;
    let segments = segments_from_boundaries(boundaries, features.len());
    let dim = features[0].len();
    let means: Vec<Vec<f64>> = segments
        .iter()
        .map(|seg| {
            let mut m = vec![0.0; dim];
            for f in &features[seg.clone()] {
                if f.len() != dim {
                    return Err(Error::Dimension {
                        left: f.len(),
                        right: dim,
                    });
                }
                m.iter_mut().zip(f).for_each(|(a, x)| *a += x);
            }
            m.iter_mut().for_each(|a| *a /= seg.len() as f64);
            Ok(m)
        })
        .collect::<Result<_>>()?;
    // fewer segments than classes: every segment gets its own cluster
    let clusters = kmeans(&means, k.min(means.len()), seed)?;
    let mut labels = vec![0; features.len()];
    for (seg, &c) in segments.iter().zip(&clusters) {
        labels[seg.clone()].iter_mut().for_each(|l| *l = c);
    }
    let predicted = SegmentLabeling::new(labels, k)?;
    Ok(predicted.matched_frames(&truth)? as f64 / features.len() as f64)
}

/// Frame accuracy of the segmentation induced by `boundaries`.
///
/// Each predicted segment is summarised by its mean feature vector, the
/// summaries are clustered into `k` groups and the clusters are matched to
/// truth classes with the Hungarian method. With `videos`, every range is
/// scored on its own and the per-video accuracies are averaged.
pub fn segmentation_accuracy(
    boundaries: &[u64],
    features: &[Vec<f64>],
    truth: &[usize],
    k: usize,
    seed: u64,
    videos: Option<&[VideoRange]>,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::Config("k must be >= 1".into()));
    }
    let Some(videos) = videos else {
        return single_video(boundaries, features, truth, k, seed);
    };
    if videos.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    let mut total = 0.0;
    for v in videos {
        let (start, end) = (v.start as usize, v.end as usize);
        if start > end || end >= features.len() || end >= truth.len() {
            return Err(Error::Config(format!(
                "video {} spans frames {}..={} outside the {} available",
                v.id,
                v.start,
                v.end,
                features.len().min(truth.len())
            )));
        }
        let local: Vec<u64> = boundaries
            .iter()
            .filter(|&&b| b > v.start && b <= v.end)
            .map(|&b| b - v.start)
            .collect();
        total += single_video(&local, &features[start..=end], &truth[start..=end], k, seed)?;
    }
    Ok(total / videos.len() as f64)
}

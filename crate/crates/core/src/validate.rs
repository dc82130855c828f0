//! Prediction-volume validation of a prospectivity model.

use crate::error::{Error, Result};
use crate::interpolate::ContinuousModel;
use crate::model_space::VolumeMask;

pub const DEFAULT_PV_THRESHOLDS: usize = 200;

/// Rescales active values linearly onto `[0, 1]`.
pub fn linear_fuzzify(model: &ContinuousModel) -> Result<ContinuousModel> {
    let (lo, hi) = model
        .min_max()
        .ok_or_else(|| Error::InsufficientData("model has no active voxels".into()))?;
    if lo >= hi {
        return Err(Error::DegenerateInput("constant model cannot be rescaled".into()));
    }
    let values = model.values().iter().map(|v| ((v - lo) / (hi - lo)).clamp(0.0, 1.0)).collect();
    ContinuousModel::new(model.mask().clone(), values, "fuzzy")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intersection {
    pub threshold: f64,
    /// Prediction rate at the crossing.
    pub prediction: f64,
    /// Occupied volume fraction at the crossing.
    pub volume: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PVCurves {
    /// Ascending thresholds on `[0, 1]`.
    pub thresholds: Vec<f64>,
    /// Fraction of training voxels at or above each threshold.
    pub prediction: Vec<f64>,
    /// Fraction of modeled voxels at or above each threshold.
    pub volume: Vec<f64>,
    pub intersection: Intersection,
}

/// Fraction of `sorted` at or above `t`.
fn share_at_least(sorted: &[f64], t: f64) -> f64 {
    (sorted.len() - sorted.partition_point(|&v| v < t)) as f64 / sorted.len() as f64
}

/// Prediction-rate and occupied-volume curves of a `[0, 1]` prospectivity
/// model over the voxels of `space` it covers, and the threshold where the
/// prediction rate meets the complement of the occupied volume.
///
/// The crossing is located along the sampled curves closed by the point
/// `(t = 1, P = 0, V = 0)`, interpolating linearly between the bracketing
/// samples.
pub fn pv_curves(
    prospectivity: &ContinuousModel,
    training: &VolumeMask,
    space: &VolumeMask,
    n_thresholds: usize,
) -> Result<PVCurves> {
    if n_thresholds < 2 {
        return Err(Error::Config("at least two thresholds are required".into()));
    }
    let region = prospectivity.mask().and(space)?;
    let training = training.and(&region)?;
    if training.is_empty() {
        return Err(Error::DegenerateTraining("no training voxel carries a prospectivity value".into()));
    }
    let mut all: Vec<f64> = region.iter_active().map(|v| prospectivity.values()[v]).collect();
    if all.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::Config("prospectivity values must lie in [0, 1]".into()));
    }
    let mut known: Vec<f64> = training.iter_active().map(|v| prospectivity.values()[v]).collect();
    all.sort_by(f64::total_cmp);
    known.sort_by(f64::total_cmp);
    let last = (n_thresholds - 1) as f64;
    let thresholds: Vec<f64> = (0..n_thresholds).map(|i| i as f64 / last).collect();
    let prediction: Vec<f64> = thresholds.iter().map(|&t| share_at_least(&known, t)).collect();
    let volume: Vec<f64> = thresholds.iter().map(|&t| share_at_least(&all, t)).collect();
    let intersection = locate_intersection(&thresholds, &prediction, &volume)?;
    Ok(PVCurves { thresholds, prediction, volume, intersection })
}

fn locate_intersection(t: &[f64], p: &[f64], v: &[f64]) -> Result<Intersection> {
    let point = |i: usize| if i < t.len() { (t[i], p[i], v[i]) } else { (1.0, 0.0, 0.0) };
    let gap = |(_, p, v): (f64, f64, f64)| p + v - 1.0;
    let first = point(0);
    if gap(first) == 0.0 {
        return Ok(Intersection { threshold: first.0, prediction: first.1, volume: first.2 });
    }
    for i in 1..=t.len() {
        let (a, b) = (point(i - 1), point(i));
        let (ga, gb) = (gap(a), gap(b));
        if gb == 0.0 {
            return Ok(Intersection { threshold: b.0, prediction: b.1, volume: b.2 });
        }
        if ga.signum() != gb.signum() {
            let f = ga / (ga - gb);
            return Ok(Intersection {
                threshold: a.0 + f * (b.0 - a.0),
                prediction: a.1 + f * (b.1 - a.1),
                volume: a.2 + f * (b.2 - a.2),
            });
        }
    }
    Err(Error::NoIntersection)
}

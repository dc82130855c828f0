//! Concentration-volume fractal analysis: cumulative volume above each value
//! in log-log space, a piecewise-linear fit, and classification by the fitted
//! breakpoints.

use crate::error::{Error, Result};
use crate::interpolate::{CategoricalModel, ContinuousModel};
use crate::model_space::VolumeMask;

/// Curves built on more distinct values than this are resampled on
/// logarithmically spaced thresholds.
pub const MAX_CURVE_POINTS: usize = 512;

/// Shortest segment the fit will place.
pub const MIN_SEGMENT_POINTS: usize = 3;

/// Cumulative volume curve, ascending in value with non-increasing volume.
#[derive(Debug, Clone, PartialEq)]
pub struct CVCurve {
    values: Vec<f64>,
    volumes: Vec<f64>,
    /// Active voxels with a non-positive value, left off the curve.
    dropped: usize,
}

impl CVCurve {
    /// Curve from explicit points, e.g. synthetic data. Values must be
    /// positive and strictly ascending, volumes positive and non-increasing.
    pub fn from_points(values: Vec<f64>, volumes: Vec<f64>) -> Result<Self> {
        if values.len() != volumes.len() || values.is_empty() {
            return Err(Error::Config("curve needs matching, non-empty value and volume lists".into()));
        }
        if values.iter().chain(&volumes).any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::Config("curve values and volumes must be positive and finite".into()));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) || volumes.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Config("curve must ascend in value with non-increasing volume".into()));
        }
        Ok(Self { values, volumes, dropped: 0 })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Voxel count at or above each value.
    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dropped(&self) -> usize {
        self.dropped
    }

    /// Cumulative volume at `t`: the volume of the first curve point at or
    /// above `t`.
    pub fn volume_at(&self, t: f64) -> f64 {
        let i = self.values.partition_point(|&v| v < t);
        self.volumes.get(i).copied().unwrap_or(0.0)
    }

    fn log_points(&self) -> (Vec<f64>, Vec<f64>) {
        (self.values.iter().map(|v| v.ln()).collect(), self.volumes.iter().map(|v| v.ln()).collect())
    }
}

/// C-V curve of `model` over the active voxels of `mask` (and of the model).
pub fn cv_curve(model: &ContinuousModel, mask: &VolumeMask) -> Result<CVCurve> {
    let region = model.mask().and(mask)?;
    let mut positive = Vec::with_capacity(region.count());
    let mut dropped = 0;
    for v in region.iter_active() {
        let x = model.values()[v];
        if x > 0.0 {
            positive.push(x);
        } else {
            dropped += 1;
        }
    }
    if positive.is_empty() {
        return Err(Error::InsufficientData("no positive values for a concentration-volume curve".into()));
    }
    positive.sort_by(f64::total_cmp);
    let n = positive.len();
    let mut distinct = positive.clone();
    distinct.dedup();
    let thresholds = if distinct.len() <= MAX_CURVE_POINTS {
        distinct
    } else {
        let (lo, hi) = (positive[0], positive[n - 1]);
        let ratio = (hi / lo).ln();
        let last = MAX_CURVE_POINTS - 1;
        let mut t: Vec<f64> = (0..MAX_CURVE_POINTS).map(|i| lo * (ratio * i as f64 / last as f64).exp()).collect();
        t[0] = lo;
        t[last] = hi;
        t.dedup();
        t
    };
    let volumes = thresholds.iter().map(|&t| (n - positive.partition_point(|&v| v < t)) as f64).collect();
    Ok(CVCurve { values: thresholds, volumes, dropped })
}

/// One straight segment of a fit in (ln value, ln volume).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    /// First and last curve point covered, inclusive.
    pub first: usize,
    pub last: usize,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentedFit {
    /// Value at the first point of every segment after the first.
    pub breakpoints: Vec<f64>,
    pub segments: Vec<Segment>,
    pub residual: f64,
}

impl SegmentedFit {
    /// Curve index where each breakpoint segment starts.
    pub fn breakpoint_indices(&self) -> Vec<usize> {
        self.segments[1..].iter().map(|s| s.first).collect()
    }
}

/// Least-squares line through `x, y`; returns slope, intercept, residual.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let residual = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    (slope, intercept, residual)
}

struct Prefix {
    n: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
    xx: Vec<f64>,
    xy: Vec<f64>,
    yy: Vec<f64>,
}

impl Prefix {
    fn new(x: &[f64], y: &[f64]) -> Self {
        // shift to the means so the running sums stay well conditioned
        let mx = x.iter().sum::<f64>() / x.len() as f64;
        let my = y.iter().sum::<f64>() / y.len() as f64;
        let mut p = Prefix { n: vec![0.0], x: vec![0.0], y: vec![0.0], xx: vec![0.0], xy: vec![0.0], yy: vec![0.0] };
        for (i, (a, b)) in x.iter().zip(y).enumerate() {
            let (a, b) = (a - mx, b - my);
            p.n.push(i as f64 + 1.0);
            p.x.push(p.x[i] + a);
            p.y.push(p.y[i] + b);
            p.xx.push(p.xx[i] + a * a);
            p.xy.push(p.xy[i] + a * b);
            p.yy.push(p.yy[i] + b * b);
        }
        p
    }

    /// Residual of the best line through points `a..b` (exclusive end).
    fn cost(&self, a: usize, b: usize) -> f64 {
        let n = self.n[b] - self.n[a];
        let sx = self.x[b] - self.x[a];
        let sy = self.y[b] - self.y[a];
        let sxx = self.xx[b] - self.xx[a] - sx * sx / n;
        let sxy = self.xy[b] - self.xy[a] - sx * sy / n;
        let syy = self.yy[b] - self.yy[a] - sy * sy / n;
        let r = if sxx > 0.0 { syy - sxy * sxy / sxx } else { syy };
        r.max(0.0)
    }
}

/// Segment length used for `points` points split `n_segments` ways: three
/// points where the curve allows it, otherwise two.
pub fn min_segment_len(points: usize, n_segments: usize) -> usize {
    if points >= MIN_SEGMENT_POINTS * n_segments {
        MIN_SEGMENT_POINTS
    } else {
        2
    }
}

/// Globally optimal split of the log-log curve into `n_segments` contiguous
/// least-squares lines, by dynamic programming over breakpoint placements.
#[allow(clippy::needless_range_loop)]
pub fn fit_segments(curve: &CVCurve, n_segments: usize) -> Result<SegmentedFit> {
    if n_segments == 0 {
        return Err(Error::Config("at least one segment is required".into()));
    }
    let n = curve.len();
    if n < 2 * n_segments {
        return Err(Error::InsufficientData(format!(
            "{n} curve points cannot carry {n_segments} segments"
        )));
    }
    let min_len = min_segment_len(n, n_segments);
    let (x, y) = curve.log_points();
    let prefix = Prefix::new(&x, &y);
    // best[s][e]: least residual covering points 0..e with s + 1 segments
    let mut best = vec![vec![f64::INFINITY; n + 1]; n_segments];
    let mut start = vec![vec![0usize; n + 1]; n_segments];
    for e in min_len..=n {
        best[0][e] = prefix.cost(0, e);
    }
    for s in 1..n_segments {
        let (done, rest) = best.split_at_mut(s);
        let prev = &done[s - 1];
        let cur = &mut rest[0];
        for e in (s + 1) * min_len..=n {
            for b in s * min_len..=e - min_len {
                if prev[b].is_finite() {
                    let c = prev[b] + prefix.cost(b, e);
                    if c < cur[e] {
                        cur[e] = c;
                        start[s][e] = b;
                    }
                }
            }
        }
    }
    let mut bounds = vec![n];
    let mut e = n;
    for s in (1..n_segments).rev() {
        e = start[s][e];
        bounds.push(e);
    }
    bounds.push(0);
    bounds.reverse();
    let segments: Vec<Segment> = bounds
        .windows(2)
        .map(|w| {
            let (slope, intercept, residual) = line_fit(&x[w[0]..w[1]], &y[w[0]..w[1]]);
            Segment { first: w[0], last: w[1] - 1, slope, intercept, residual }
        })
        .collect();
    Ok(SegmentedFit {
        breakpoints: segments[1..].iter().map(|s| curve.values[s.first]).collect(),
        residual: segments.iter().map(|s| s.residual).sum(),
        segments,
    })
}

/// Class names for `n` thresholds.
pub fn class_labels(n: usize) -> Vec<String> {
    if n == 3 {
        return ["background", "possible anomaly", "probable anomaly", "certain anomaly"].map(String::from).to_vec();
    }
    (0..=n).map(|i| if i == 0 { "background".to_string() } else { format!("class {i}") }).collect()
}

/// Class per voxel = number of thresholds at or below its value.
pub fn classify(model: &ContinuousModel, thresholds: &[f64]) -> Result<CategoricalModel> {
    if thresholds.iter().any(|t| !t.is_finite()) || thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("thresholds must be finite and strictly ascending".into()));
    }
    let codes = (0..model.grid().len())
        .map(|v| model.value(v).map(|x| thresholds.partition_point(|&t| t <= x) as u32))
        .collect();
    CategoricalModel::new(model.mask().clone(), codes, class_labels(thresholds.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_space::GridSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model(values: Vec<f64>) -> ContinuousModel {
        let g = GridSpec::with_default_spacing([0.0; 3], [values.len(), 1, 1]).unwrap();
        ContinuousModel::new(VolumeMask::full(g), values, "ppm").unwrap()
    }

    #[test]
    fn small_curves() {
        let m = model(vec![3.0, 1.0, 2.0]);
        let c = cv_curve(&m, m.mask()).unwrap();
        assert_eq!(c.values(), &[1.0, 2.0, 3.0]);
        assert_eq!(c.volumes(), &[3.0, 2.0, 1.0]);
        let m = model(vec![4.0; 7]);
        let c = cv_curve(&m, m.mask()).unwrap();
        assert_eq!((c.values(), c.volumes()), (&[4.0][..], &[7.0][..]));
        let m = model(vec![0.0, -1.0, 2.0]);
        assert_eq!(cv_curve(&m, m.mask()).unwrap().dropped(), 2);
        assert!(cv_curve(&model(vec![0.0, 0.0]), &VolumeMask::full(*model(vec![0.0, 0.0]).grid())).is_err());
    }

    #[test]
    fn curve_matches_threshold_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [50usize, 400, 3000] {
            let values: Vec<f64> = (0..n).map(|_| (rng.gen_range(0..200) as f64) * 0.37 + 0.01).collect();
            let m = model(values.clone());
            let c = cv_curve(&m, m.mask()).unwrap();
            for (&t, &vol) in c.values().iter().zip(c.volumes()) {
                assert_eq!(vol as usize, values.iter().filter(|&&v| v >= t).count());
            }
            assert_eq!(c.volumes()[0] as usize, n);
        }
        let values: Vec<f64> = (0..5000).map(|_| rng.gen_range(0.001f64..10.0)).collect();
        let m = model(values.clone());
        let c = cv_curve(&m, m.mask()).unwrap();
        assert_eq!(c.len(), MAX_CURVE_POINTS);
        for (&t, &vol) in c.values().iter().zip(c.volumes()) {
            assert_eq!(vol as usize, values.iter().filter(|&&v| v >= t).count());
        }
    }

    #[test]
    fn single_power_law() {
        let values: Vec<f64> = (1..=60).map(|i| i as f64 * 0.5).collect();
        let volumes = values.iter().map(|v| 3000.0 * v.powf(-1.7)).collect();
        let c = CVCurve::from_points(values, volumes).unwrap();
        let f = fit_segments(&c, 1).unwrap();
        assert!(f.residual <= 1e-10);
        assert!((f.segments[0].slope + 1.7).abs() < 1e-10);
        assert!(f.breakpoints.is_empty());
    }

    fn piecewise(n: usize, breaks: &[usize], slopes: &[f64], noise: f64, rng: &mut ChaCha8Rng) -> CVCurve {
        let values: Vec<f64> = (0..n).map(|i| (0.05 * i as f64).exp()).collect();
        let mut logv = vec![12.0];
        for i in 1..n {
            let seg = breaks.partition_point(|&b| b <= i);
            logv.push(logv[i - 1] + slopes[seg] * 0.05);
        }
        let mut volumes: Vec<f64> = logv.iter().map(|l| l.exp() * (1.0 + noise * rng.gen_range(-1.0..1.0))).collect();
        for i in 1..n {
            volumes[i] = volumes[i].min(volumes[i - 1]);
        }
        CVCurve::from_points(values, volumes).unwrap()
    }

    #[test]
    fn recovers_planted_breaks() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = piecewise(120, &[50], &[-0.3, -2.5], 0.0, &mut rng);
        let f = fit_segments(&c, 2).unwrap();
        assert!(f.breakpoint_indices()[0].abs_diff(50) <= 1);
        let c = piecewise(150, &[40, 100], &[-0.2, -1.5, -4.0], 0.0, &mut rng);
        let f = fit_segments(&c, 3).unwrap();
        let idx = f.breakpoint_indices();
        assert!(idx[0].abs_diff(40) <= 1 && idx[1].abs_diff(100) <= 1);
        assert!(f.breakpoints[0] < f.breakpoints[1]);
    }

    #[test]
    fn exhaustive_search_agrees_with_dp() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let c = piecewise(30, &[12, 21], &[-0.5, -1.8, -3.0], 0.03, &mut rng);
            let f = fit_segments(&c, 3).unwrap();
            let (x, y) = c.log_points();
            let mut best = f64::INFINITY;
            for a in 3..=24 {
                for b in a + 3..=27 {
                    let r = line_fit(&x[..a], &y[..a]).2 + line_fit(&x[a..b], &y[a..b]).2 + line_fit(&x[b..], &y[b..]).2;
                    best = best.min(r);
                }
            }
            assert!((f.residual - best).abs() <= 1e-9 * (1.0 + best));
        }
    }

    #[test]
    fn too_few_points() {
        let c = CVCurve::from_points(vec![1.0, 2.0, 3.0], vec![3.0, 2.0, 1.0]).unwrap();
        assert!(matches!(fit_segments(&c, 2), Err(Error::InsufficientData(_))));
        assert!(fit_segments(&c, 0).is_err());
        let c = CVCurve::from_points(vec![1.0, 2.0, 3.0, 4.0], vec![4.0, 3.0, 2.0, 1.0]).unwrap();
        assert_eq!(fit_segments(&c, 2).unwrap().breakpoint_indices(), vec![2]);
    }

    #[test]
    fn classify_examples() {
        let m = model(vec![0.05, 0.09, 0.12, 0.15, 0.2, 0.23, 0.3]);
        let c = classify(&m, &[0.09, 0.15, 0.23]).unwrap();
        let got: Vec<&str> = (0..7).map(|v| c.code(v).unwrap()).collect();
        assert_eq!(got[0], "background");
        assert_eq!(got[1], "possible anomaly");
        assert_eq!(got[6], "certain anomaly");
        let s = model(vec![3.0, 4.0, 5.0]);
        let c = classify(&s, &[3.8, 4.9]).unwrap();
        assert_eq!((0..3).map(|v| c.code_index(v).unwrap()).collect::<Vec<_>>(), vec![0, 1, 2]);
        let c = classify(&s, &[]).unwrap();
        assert_eq!(c.dictionary(), &["background".to_string()]);
        assert!(classify(&s, &[2.0, 1.0]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn classify_consistent_with_curve(values in proptest::collection::vec(0.01f64..50.0, 6..80), pick in 0usize..1000) {
            let m = model(values);
            let curve = cv_curve(&m, m.mask()).unwrap();
            let t = curve.values()[pick % curve.len()];
            let c = classify(&m, &[t]).unwrap();
            let above = (0..m.grid().len()).filter(|&v| c.code_index(v) == Some(1)).count();
            proptest::prop_assert_eq!(above as f64, curve.volume_at(t));
        }

        #[test]
        fn classify_monotone(values in proptest::collection::vec(0.0f64..10.0, 2..40), bump in 0.0f64..5.0, at in 0usize..40) {
            let at = at % values.len();
            let thresholds = [1.0, 2.5, 4.0, 7.5];
            let before = classify(&model(values.clone()), &thresholds).unwrap();
            let mut raised = values;
            raised[at] += bump;
            let after = classify(&model(raised), &thresholds).unwrap();
            proptest::prop_assert!(after.code_index(at) >= before.code_index(at));
        }

        #[test]
        fn residual_non_increasing(seed in 0u64..10_000, k in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 6 * (k + 1) + rng.gen_range(0..20);
            let values: Vec<f64> = (1..=n).map(|i| i as f64).collect();
            let mut vol = vec![1e6];
            for i in 1..n {
                vol.push(vol[i - 1] * rng.gen_range(0.3..0.99));
            }
            let c = CVCurve::from_points(values, vol).unwrap();
            let r1 = fit_segments(&c, k).unwrap().residual;
            let r2 = fit_segments(&c, k + 1).unwrap().residual;
            proptest::prop_assert!(r2 <= r1 + 1e-9);
        }
    }
}

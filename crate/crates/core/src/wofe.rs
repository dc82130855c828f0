//! Weights of evidence: contingency counts, ordinary and fuzzy weights with
//! their variances, evidence selection, and integration into posterior and
//! studentized posterior probability.
//!
//! Notation follows the usual 2x2 table over the modeling space: `E` is the
//! evidence pattern (a geological unit, a fault buffer, a geochemical class)
//! and `M` the training (mineralized) voxels.

use crate::error::{Cell, Error, Result};
use crate::interpolate::ContinuousModel;
use crate::model_space::{GridSpec, VolumeMask};

/// Voxel counts of the four evidence/training combinations. Stored as reals
/// so a continuity correction can add half a voxel to each cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContingencyCounts {
    /// N(E and M)
    pub e_m: f64,
    /// N(E and not M)
    pub e_not_m: f64,
    /// N(not E and M)
    pub not_e_m: f64,
    /// N(not E and not M)
    pub not_e_not_m: f64,
}

impl ContingencyCounts {
    pub fn new(e_m: u64, e_not_m: u64, not_e_m: u64, not_e_not_m: u64) -> Self {
        Self { e_m: e_m as f64, e_not_m: e_not_m as f64, not_e_m: not_e_m as f64, not_e_not_m: not_e_not_m as f64 }
    }

    pub fn total(&self) -> f64 {
        self.e_m + self.e_not_m + self.not_e_m + self.not_e_not_m
    }

    pub fn mineralized(&self) -> f64 {
        self.e_m + self.not_e_m
    }

    pub fn barren(&self) -> f64 {
        self.e_not_m + self.not_e_not_m
    }

    pub fn evidence(&self) -> f64 {
        self.e_m + self.e_not_m
    }

    pub fn no_evidence(&self) -> f64 {
        self.not_e_m + self.not_e_not_m
    }

    /// First empty cell, if any.
    pub fn zero_cell(&self) -> Option<Cell> {
        [
            (self.e_m, Cell::EvidenceMineralized),
            (self.e_not_m, Cell::EvidenceBarren),
            (self.not_e_m, Cell::NoEvidenceMineralized),
            (self.not_e_not_m, Cell::NoEvidenceBarren),
        ]
        .into_iter()
        .find(|(n, _)| *n <= 0.0)
        .map(|(_, c)| c)
    }

    /// Adds 0.5 to every cell when any cell is empty. Returns the counts and
    /// whether they were changed.
    pub fn with_continuity_correction(&self) -> (Self, bool) {
        if self.zero_cell().is_none() {
            return (*self, false);
        }
        (
            Self {
                e_m: self.e_m + 0.5,
                e_not_m: self.e_not_m + 0.5,
                not_e_m: self.not_e_m + 0.5,
                not_e_not_m: self.not_e_not_m + 0.5,
            },
            true,
        )
    }

    /// P(E|M)
    pub fn p_e_given_m(&self) -> f64 {
        self.e_m / self.mineralized()
    }

    /// P(E|not M)
    pub fn p_e_given_not_m(&self) -> f64 {
        self.e_not_m / self.barren()
    }

    /// P(not E|M)
    pub fn p_not_e_given_m(&self) -> f64 {
        self.not_e_m / self.mineralized()
    }

    /// P(not E|not M)
    pub fn p_not_e_given_not_m(&self) -> f64 {
        self.not_e_not_m / self.barren()
    }
}

/// Training must be a non-empty proper subset of the modeling space.
pub fn check_training(training: &VolumeMask, space: &VolumeMask) -> Result<()> {
    if !training.is_subset_of(space)? {
        return Err(Error::DegenerateTraining("training mask extends outside the modeling space".into()));
    }
    if training.is_empty() {
        return Err(Error::DegenerateTraining("no training voxels".into()));
    }
    if training.count() == space.count() {
        return Err(Error::DegenerateTraining("every voxel of the modeling space is a training voxel".into()));
    }
    Ok(())
}

/// Tallies evidence against training over the active voxels of `space`.
pub fn count_contingency(evidence: &VolumeMask, training: &VolumeMask, space: &VolumeMask) -> Result<ContingencyCounts> {
    if !evidence.is_subset_of(space)? {
        return Err(Error::Config("evidence mask extends outside the modeling space".into()));
    }
    check_training(training, space)?;
    let mut n = [0u64; 4];
    for v in space.iter_active() {
        let slot = match (evidence.get(v), training.get(v)) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        };
        n[slot] += 1;
    }
    Ok(ContingencyCounts::new(n[0], n[1], n[2], n[3]))
}

/// Ordinary weights and their uncertainty for one binary pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightRecord {
    pub w_plus: f64,
    pub w_minus: f64,
    pub contrast: f64,
    pub var_w_plus: f64,
    pub var_w_minus: f64,
    /// Standard deviation of the contrast.
    pub std_contrast: f64,
    pub studentized_contrast: f64,
}

impl WeightRecord {
    /// Derives contrast, its standard deviation and the studentized contrast
    /// from the two weights and their variances.
    pub fn from_parts(w_plus: f64, w_minus: f64, var_w_plus: f64, var_w_minus: f64) -> Self {
        let contrast = w_plus - w_minus;
        let std_contrast = (var_w_plus + var_w_minus).sqrt();
        Self {
            w_plus,
            w_minus,
            contrast,
            var_w_plus,
            var_w_minus,
            std_contrast,
            studentized_contrast: contrast / std_contrast,
        }
    }
}

/// Standard deviation of a contrast recovered from its studentized value.
pub fn std_from_studentized(contrast: f64, studentized: f64) -> f64 {
    contrast / studentized
}

/// W+, W-, their variances and the contrast diagnostics. Fails on an empty
/// cell; see [`ContingencyCounts::with_continuity_correction`].
pub fn binary_weights(c: &ContingencyCounts) -> Result<WeightRecord> {
    if let Some(cell) = c.zero_cell() {
        return Err(Error::ZeroCell(cell));
    }
    let w_plus = (c.p_e_given_m() / c.p_e_given_not_m()).ln();
    let w_minus = (c.p_not_e_given_m() / c.p_not_e_given_not_m()).ln();
    let var_w_plus = 1.0 / c.e_m + 1.0 / c.e_not_m;
    let var_w_minus = 1.0 / c.not_e_m + 1.0 / c.not_e_not_m;
    Ok(WeightRecord::from_parts(w_plus, w_minus, var_w_plus, var_w_minus))
}

/// Weights after the continuity correction when needed; the flag records
/// whether the correction was applied.
pub fn corrected_weights(c: &ContingencyCounts) -> (ContingencyCounts, WeightRecord, bool) {
    let (counts, corrected) = c.with_continuity_correction();
    let record = binary_weights(&counts).expect("corrected counts have no empty cell");
    (counts, record, corrected)
}

/// Value range of one class. The first class includes its lower bound; every
/// other class is `(lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Index of the class holding `value`, clamped to the first and last class.
pub fn class_of(bounds: &[ClassBounds], value: f64) -> usize {
    bounds.partition_point(|b| b.upper < value).min(bounds.len() - 1)
}

/// Equal-count classes over the active values of `model`. Each upper bound
/// is a data value, tied values never straddle a bound, and every class is
/// non-empty.
pub fn decile_classes(model: &ContinuousModel, k: usize) -> Result<Vec<ClassBounds>> {
    let values: Vec<f64> = model.iter_active().map(|(_, v)| v).collect();
    equal_count_classes(&values, k)
}

pub fn equal_count_classes(values: &[f64], k: usize) -> Result<Vec<ClassBounds>> {
    if k < 2 {
        return Err(Error::Config(format!("at least 2 classes are required, got {k}")));
    }
    let mut sorted = values.to_vec();
    if sorted.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("class values must be finite".into()));
    }
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    // distinct values with the count of values at or below each
    let mut distinct: Vec<f64> = Vec::new();
    let mut cumulative: Vec<usize> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        if distinct.last() == Some(&v) {
            *cumulative.last_mut().expect("non-empty") = i + 1;
        } else {
            distinct.push(v);
            cumulative.push(i + 1);
        }
    }
    let m = distinct.len();
    if m < k {
        return Err(Error::InsufficientData(format!("{m} distinct values cannot form {k} classes")));
    }
    let mut bounds = Vec::with_capacity(k);
    let mut prev: Option<usize> = None;
    for class in 0..k {
        let target = (class + 1) * n;
        let mut j = cumulative.partition_point(|&c| c * k < target);
        let lowest = prev.map_or(0, |p| p + 1);
        let highest = m - (k - class);
        j = j.clamp(lowest, highest);
        let lower = prev.map_or(distinct[0], |p| distinct[p]);
        bounds.push(ClassBounds { lower, upper: distinct[j] });
        prev = Some(j);
    }
    Ok(bounds)
}

/// Logistic mapping of contrasts to fuzzy memberships. `None` selects the
/// default: inflection at the mean contrast and a slope that maps the largest
/// contrast to 0.99.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuzzyLogistic {
    pub slope: Option<f64>,
    pub inflection: Option<f64>,
    pub floor: f64,
    pub ceiling: f64,
}

impl Default for FuzzyLogistic {
    fn default() -> Self {
        Self { slope: None, inflection: None, floor: 0.01, ceiling: 0.99 }
    }
}

/// Fuzzy contrasts in `[floor, ceiling]`. All-equal contrasts map to 0.5.
pub fn fuzzify_contrasts(contrasts: &[f64], params: &FuzzyLogistic) -> Result<Vec<f64>> {
    if contrasts.len() < 2 {
        return Err(Error::InsufficientData("fuzzification needs at least 2 classes".into()));
    }
    if contrasts.iter().any(|c| !c.is_finite()) {
        return Err(Error::Config("contrasts must be finite".into()));
    }
    let mean = contrasts.iter().sum::<f64>() / contrasts.len() as f64;
    let inflection = params.inflection.unwrap_or(mean);
    let max = contrasts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = contrasts.iter().copied().fold(f64::INFINITY, f64::min);
    if max == min {
        return Ok(vec![0.5; contrasts.len()]);
    }
    let slope = match params.slope {
        Some(s) => s,
        None if max > inflection => (params.ceiling / (1.0 - params.ceiling)).ln() / (max - inflection),
        None => return Err(Error::Config("inflection is not below the largest contrast".into())),
    };
    Ok(contrasts
        .iter()
        .map(|&c| (1.0 / (1.0 + (-slope * (c - inflection)).exp())).clamp(params.floor, params.ceiling))
        .collect())
}

/// Fuzzy weight of a class with membership `mu`; equals W+ at `mu = 1` and
/// W- at `mu = 0`.
pub fn fuzzy_weight(c: &ContingencyCounts, mu: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Config(format!("membership {mu} outside [0, 1]")));
    }
    if c.mineralized() <= 0.0 || c.barren() <= 0.0 {
        return Err(Error::DegenerateTraining("training is empty or fills the space".into()));
    }
    let num = mu * c.p_e_given_m() + (1.0 - mu) * c.p_not_e_given_m();
    let den = mu * c.p_e_given_not_m() + (1.0 - mu) * c.p_not_e_given_not_m();
    if den <= 0.0 {
        return Err(Error::ZeroCell(if mu > 0.0 { Cell::EvidenceBarren } else { Cell::NoEvidenceBarren }));
    }
    if num <= 0.0 {
        return Err(Error::ZeroCell(if mu > 0.0 { Cell::EvidenceMineralized } else { Cell::NoEvidenceMineralized }));
    }
    Ok((num / den).ln())
}

/// Probabilities feeding the prior-probability variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorTerms {
    /// P(M)
    pub p_m: f64,
    /// P(M|E)
    pub p_m_given_e: f64,
    /// P(M|not E)
    pub p_m_given_not_e: f64,
}

impl PriorTerms {
    pub fn from_counts(c: &ContingencyCounts) -> Self {
        Self {
            p_m: c.mineralized() / c.total(),
            p_m_given_e: c.e_m / c.evidence(),
            p_m_given_not_e: c.not_e_m / c.no_evidence(),
        }
    }

    /// Variance of the prior probability of mineralization.
    pub fn prior_variance(&self, p_e: f64) -> f64 {
        (self.p_m_given_e - self.p_m).powi(2) * p_e + (self.p_m_given_not_e - self.p_m).powi(2) * (1.0 - p_e)
    }
}

/// Probability of the membership function, `mu P(E) + (1 - mu) P(not E)`.
pub fn membership_probability(mu: f64, p_e: f64) -> f64 {
    mu * p_e + (1.0 - mu) * (1.0 - p_e)
}

/// Variance contributed by a fuzzy membership:
/// `2 mu (1 - mu) / P(mu) * var[P(M)]`.
pub fn fuzzy_variance(mu: f64, p_e: f64, prior: &PriorTerms) -> Result<f64> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Config(format!("membership {mu} outside [0, 1]")));
    }
    if !(p_e > 0.0 && p_e < 1.0) {
        return Err(Error::Config(format!("P(E) = {p_e} outside (0, 1)")));
    }
    let p_mu = membership_probability(mu, p_e);
    if p_mu <= 0.0 {
        return Err(Error::DegenerateInput("membership probability is zero".into()));
    }
    Ok(2.0 * mu * (1.0 - mu) / p_mu * prior.prior_variance(p_e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryLayer {
    pub name: String,
    pub mask: VolumeMask,
    /// Counts the weights were computed from, after any correction.
    pub counts: ContingencyCounts,
    pub record: WeightRecord,
    pub corrected: bool,
    pub included: bool,
}

impl BinaryLayer {
    /// Weights of `evidence` (inside `space`) against `training`.
    pub fn build(name: impl Into<String>, evidence: &VolumeMask, training: &VolumeMask, space: &VolumeMask) -> Result<Self> {
        let evidence = evidence.and(space)?;
        let raw = count_contingency(&evidence, training, space)?;
        let (counts, record, corrected) = corrected_weights(&raw);
        Ok(Self { name: name.into(), mask: evidence, counts, record, corrected, included: true })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyClassRecord {
    pub bounds: ClassBounds,
    /// Counts of the class taken as a binary pattern, after any correction.
    pub counts: ContingencyCounts,
    pub record: WeightRecord,
    pub corrected: bool,
    pub fuzzy_contrast: f64,
    pub fuzzy_weight: f64,
    pub fuzzy_variance: f64,
    pub included: bool,
}

/// A continuous model cut into classes, each carrying a fuzzy weight.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassedLayer {
    pub name: String,
    pub unit: String,
    /// Class per voxel; `None` outside the model.
    pub class_of: Vec<Option<u16>>,
    pub classes: Vec<FuzzyClassRecord>,
}

impl ClassedLayer {
    pub fn build(
        name: impl Into<String>,
        model: &ContinuousModel,
        training: &VolumeMask,
        space: &VolumeMask,
        class_count: usize,
        fuzzy: &FuzzyLogistic,
    ) -> Result<Self> {
        let covered = model.mask().and(space)?;
        let model = model.restrict(&covered)?;
        let training = training.and(&covered)?;
        let bounds = decile_classes(&model, class_count)?;
        let grid = *covered.grid();
        let class_of: Vec<Option<u16>> = (0..grid.len())
            .map(|v| model.value(v).map(|x| class_of(&bounds, x) as u16))
            .collect();
        Self::from_assignment(name, model.unit(), bounds, class_of, &training, &covered, fuzzy)
    }

    /// Weights for an existing class assignment.
    pub fn from_assignment(
        name: impl Into<String>,
        unit: &str,
        bounds: Vec<ClassBounds>,
        class_of: Vec<Option<u16>>,
        training: &VolumeMask,
        covered: &VolumeMask,
        fuzzy: &FuzzyLogistic,
    ) -> Result<Self> {
        let grid = *covered.grid();
        if class_of.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        let mut tallies = Vec::with_capacity(bounds.len());
        for c in 0..bounds.len() {
            let evidence = VolumeMask::from_fn(grid, |v| covered.get(v) && class_of[v] == Some(c as u16));
            let raw = count_contingency(&evidence, training, covered)?;
            tallies.push(corrected_weights(&raw));
        }
        let contrasts: Vec<f64> = tallies.iter().map(|(_, r, _)| r.contrast).collect();
        let memberships = fuzzify_contrasts(&contrasts, fuzzy)?;
        let classes = bounds
            .into_iter()
            .zip(tallies)
            .zip(memberships)
            .map(|((bounds, (counts, record, corrected)), mu)| {
                let p_e = counts.evidence() / counts.total();
                Ok(FuzzyClassRecord {
                    bounds,
                    counts,
                    record,
                    corrected,
                    fuzzy_contrast: mu,
                    fuzzy_weight: fuzzy_weight(&counts, mu)?,
                    fuzzy_variance: fuzzy_variance(mu, p_e, &PriorTerms::from_counts(&counts))?,
                    included: true,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { name: name.into(), unit: unit.to_string(), class_of, classes })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvidenceLayer {
    Binary(BinaryLayer),
    Classed(ClassedLayer),
}

impl EvidenceLayer {
    pub fn name(&self) -> &str {
        match self {
            EvidenceLayer::Binary(b) => &b.name,
            EvidenceLayer::Classed(c) => &c.name,
        }
    }

    /// Whether anything from this layer enters the integration.
    pub fn contributes(&self) -> bool {
        match self {
            EvidenceLayer::Binary(b) => b.included,
            EvidenceLayer::Classed(c) => c.classes.iter().any(|k| k.included),
        }
    }

    /// Weight and variance this layer adds at `voxel`.
    pub fn contribution(&self, voxel: usize) -> (f64, f64) {
        match self {
            EvidenceLayer::Binary(b) if b.included => {
                if b.mask.get(voxel) {
                    (b.record.w_plus, b.record.var_w_plus)
                } else {
                    (b.record.w_minus, b.record.var_w_minus)
                }
            }
            EvidenceLayer::Binary(_) => (0.0, 0.0),
            EvidenceLayer::Classed(c) => match c.class_of[voxel] {
                Some(k) if c.classes[k as usize].included => {
                    let class = &c.classes[k as usize];
                    (class.fuzzy_weight, class.fuzzy_variance)
                }
                _ => (0.0, 0.0),
            },
        }
    }

    fn grid_len(&self) -> usize {
        match self {
            EvidenceLayer::Binary(b) => b.mask.grid().len(),
            EvidenceLayer::Classed(c) => c.class_of.len(),
        }
    }
}

/// Keeps binary patterns and classes with positive contrast; the rest are
/// marked excluded and contribute nothing.
pub fn select_evidence(mut layers: Vec<EvidenceLayer>) -> Result<Vec<EvidenceLayer>> {
    for layer in &mut layers {
        match layer {
            EvidenceLayer::Binary(b) => b.included = b.record.contrast > 0.0,
            EvidenceLayer::Classed(c) => {
                for class in &mut c.classes {
                    class.included = class.record.contrast > 0.0;
                }
            }
        }
    }
    if !layers.iter().any(EvidenceLayer::contributes) {
        return Err(Error::EmptyModel);
    }
    Ok(layers)
}

/// Pairs of included binary layers whose voxel sets overlap with a Jaccard
/// index above `limit`; such pairs are unlikely to be conditionally
/// independent.
pub fn independence_warnings(layers: &[EvidenceLayer], limit: f64) -> Vec<String> {
    let binaries: Vec<&BinaryLayer> = layers
        .iter()
        .filter_map(|l| match l {
            EvidenceLayer::Binary(b) if b.included => Some(b),
            _ => None,
        })
        .collect();
    let mut out = Vec::new();
    for (a, first) in binaries.iter().enumerate() {
        for second in &binaries[a + 1..] {
            let (Ok(inter), Ok(union)) = (first.mask.and(&second.mask), first.mask.or(&second.mask)) else {
                continue;
            };
            if union.count() == 0 {
                continue;
            }
            let jaccard = inter.count() as f64 / union.count() as f64;
            if jaccard > limit {
                out.push(format!(
                    "layers {} and {} overlap with Jaccard index {jaccard:.3}; conditional independence is doubtful",
                    first.name, second.name
                ));
            }
        }
    }
    out
}

/// Per-voxel result of evidence integration. Arrays cover the whole grid and
/// hold NaN outside the modeling space.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityModel {
    space: VolumeMask,
    prior: f64,
    logit: Vec<f64>,
    posterior: Vec<f64>,
    variance: Vec<f64>,
    studentized: Vec<Option<f64>>,
}

impl ProbabilityModel {
    pub fn grid(&self) -> &GridSpec {
        self.space.grid()
    }

    pub fn space(&self) -> &VolumeMask {
        &self.space
    }

    pub fn prior(&self) -> f64 {
        self.prior
    }

    pub fn logit(&self, v: usize) -> f64 {
        self.logit[v]
    }

    pub fn odds(&self, v: usize) -> f64 {
        self.logit[v].exp()
    }

    pub fn posterior(&self, v: usize) -> f64 {
        self.posterior[v]
    }

    pub fn variance(&self, v: usize) -> f64 {
        self.variance[v]
    }

    /// `None` where the total variance is zero.
    pub fn studentized(&self, v: usize) -> Option<f64> {
        self.studentized[v]
    }

    pub fn posterior_model(&self) -> ContinuousModel {
        ContinuousModel::new(self.space.clone(), self.posterior.clone(), "probability")
            .expect("posterior is finite on the space")
    }

    /// Studentized posterior over the voxels where it is defined.
    pub fn studentized_model(&self) -> ContinuousModel {
        let defined = VolumeMask::from_fn(*self.grid(), |v| self.studentized[v].is_some());
        let values = self.studentized.iter().map(|s| s.unwrap_or(f64::NAN)).collect();
        ContinuousModel::new(defined, values, "studentized").expect("studentized values are finite")
    }

    pub fn undefined_studentized(&self) -> usize {
        self.space.iter_active().filter(|&v| self.studentized[v].is_none()).count()
    }
}

/// Logistic of a logit, stable for large magnitudes.
pub fn logistic(logit: f64) -> f64 {
    if logit >= 0.0 {
        1.0 / (1.0 + (-logit).exp())
    } else {
        let o = logit.exp();
        o / (1.0 + o)
    }
}

/// Prior logit plus the weights of every contributing layer at each voxel,
/// converted to posterior probability; total variance sums the variances of
/// the contributing weights.
pub fn integrate(prior: f64, layers: &[EvidenceLayer], space: &VolumeMask) -> Result<ProbabilityModel> {
    if !(prior > 0.0 && prior < 1.0) {
        return Err(Error::Config(format!("prior probability {prior} outside (0, 1)")));
    }
    let n = space.grid().len();
    if layers.iter().any(|l| l.grid_len() != n) {
        return Err(Error::GridMismatch);
    }
    for l in layers {
        if let EvidenceLayer::Binary(b) = l {
            if b.mask.grid() != space.grid() {
                return Err(Error::GridMismatch);
            }
        }
    }
    let prior_logit = (prior / (1.0 - prior)).ln();
    let mut logit = vec![f64::NAN; n];
    let mut posterior = vec![f64::NAN; n];
    let mut variance = vec![f64::NAN; n];
    let mut studentized = vec![None; n];
    for v in space.iter_active() {
        let (mut l, mut var) = (prior_logit, 0.0);
        for layer in layers {
            let (w, s2) = layer.contribution(v);
            l += w;
            var += s2;
        }
        let p = logistic(l);
        logit[v] = l;
        posterior[v] = p;
        variance[v] = var;
        studentized[v] = (var > 0.0).then(|| p / var.sqrt());
    }
    Ok(ProbabilityModel { space: space.clone(), prior, logit, posterior, variance, studentized })
}

/// Training fraction of the modeling space.
pub fn default_prior(training: &VolumeMask, space: &VolumeMask) -> Result<f64> {
    let inside = training.and(space)?;
    if space.is_empty() {
        return Err(Error::DegenerateInput("empty modeling space".into()));
    }
    Ok(inside.count() as f64 / space.count() as f64)
}

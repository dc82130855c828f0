//! Pipeline configuration, read from a TOML file.
//!
//! Relative paths are resolved against the directory holding the file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub inputs: Inputs,
    pub grid: GridSection,
    #[serde(default)]
    pub training: Training,
    #[serde(default)]
    pub evidence: EvidenceSection,
    #[serde(default)]
    pub interpolation: Interpolation,
    #[serde(default)]
    pub threshold: ThresholdSection,
    #[serde(default)]
    pub validate: ValidateSection,
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    /// `hole_id,x,y,z,total_depth`
    pub collars: PathBuf,
    /// `hole_id,from,to,attribute,code` tables (lithology, alteration, ...).
    #[serde(default)]
    pub intervals: Vec<PathBuf>,
    /// `hole_id,from,to,element,value,unit` tables.
    pub assays: Vec<PathBuf>,
    /// `fault_id,vertex_order,x,y,dip,dip_direction`
    pub faults: Option<PathBuf>,
    /// `i,j,code` surface map of one categorical attribute.
    pub map_raster: Option<PathBuf>,
    /// `section_id,x0,y0,x1,y1` traces for profile exports.
    pub sections: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Outer corner of the first voxel.
    pub origin: [f64; 3],
    pub counts: [usize; 3],
    #[serde(default = "default_spacing")]
    pub spacing: [f64; 3],
}

fn default_spacing() -> [f64; 3] {
    [10.0; 3]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Training {
    pub element: String,
    /// In the element's assay unit.
    pub cutoff: f64,
}

impl Default for Training {
    fn default() -> Self {
        Self { element: "Cu".into(), cutoff: 0.4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvidenceSection {
    /// Categorical attributes whose units become binary layers; all logged
    /// attributes when absent.
    pub categorical: Option<Vec<String>>,
    pub elements: Vec<String>,
    pub classes: usize,
    pub buffer_radii: Vec<f64>,
    /// Categorical attribute the map raster constrains at surface.
    pub map_attribute: String,
    /// Down-dip extent of fault ribbons; the grid height when absent.
    pub fault_depth: Option<f64>,
    /// Overlap (Jaccard index) above which a pair of layers is reported.
    pub overlap_warning: f64,
}

impl Default for EvidenceSection {
    fn default() -> Self {
        Self {
            categorical: None,
            elements: vec!["Fe".into(), "Mo".into(), "Zn".into()],
            classes: 10,
            buffer_radii: vec![25.0, 50.0],
            map_attribute: "lithology".into(),
            fault_depth: None,
            overlap_warning: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Interpolation {
    pub power: f64,
    pub sectors: usize,
    pub vertical_anisotropy: f64,
    /// Downhole spacing of desurveyed samples.
    pub composite_length: f64,
}

impl Default for Interpolation {
    fn default() -> Self {
        Self { power: 2.0, sectors: 4, vertical_anisotropy: 1.0, composite_length: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThresholdSection {
    pub segments: usize,
}

impl Default for ThresholdSection {
    fn default() -> Self {
        Self { segments: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateSection {
    pub thresholds: usize,
}

impl Default for ValidateSection {
    fn default() -> Self {
        Self { thresholds: wofe3d::validate::DEFAULT_PV_THRESHOLDS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub dir: PathBuf,
}

impl Default for Output {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

impl PipelineConfig {
    /// Parses `path`, resolves relative paths and checks the result.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: PipelineConfig = toml::from_str(&text).map_err(|e| CliError::config(path, e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve(base);
        cfg.check(path)?;
        Ok(cfg)
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let i = &mut self.inputs;
        fix(&mut i.collars);
        i.intervals.iter_mut().for_each(fix);
        i.assays.iter_mut().for_each(fix);
        [&mut i.faults, &mut i.map_raster, &mut i.sections].into_iter().flatten().for_each(fix);
        fix(&mut self.output.dir);
    }

    /// Every referenced input exists and the numeric settings are usable.
    pub fn check(&self, path: &Path) -> CliResult<()> {
        let i = &self.inputs;
        let mut files: Vec<&PathBuf> = vec![&i.collars];
        files.extend(&i.intervals);
        files.extend(&i.assays);
        files.extend([&i.faults, &i.map_raster, &i.sections].into_iter().flatten());
        for f in files {
            if !f.is_file() {
                return Err(CliError::config(path, format!("input file {} does not exist", f.display())));
            }
        }
        let bad = |reason: String| Err(CliError::config(path, reason));
        if !(self.training.cutoff > 0.0) {
            return bad(format!("training cutoff must be positive, got {}", self.training.cutoff));
        }
        if self.evidence.classes < 2 {
            return bad("evidence.classes must be at least 2".into());
        }
        if self.evidence.buffer_radii.iter().any(|r| !(*r > 0.0)) {
            return bad("buffer radii must be positive".into());
        }
        if self.threshold.segments == 0 {
            return bad("threshold.segments must be at least 1".into());
        }
        if self.validate.thresholds < 2 {
            return bad("validate.thresholds must be at least 2".into());
        }
        if self.evidence.elements.contains(&self.training.element) {
            return bad(format!("{} is the training element and cannot also be evidence", self.training.element));
        }
        Ok(())
    }

    pub fn grid(&self) -> wofe3d::Result<wofe3d::GridSpec> {
        wofe3d::GridSpec::new(self.grid.origin, self.grid.counts, self.grid.spacing)
    }
}

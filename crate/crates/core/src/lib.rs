//! Voxel-based 3D weights-of-evidence mineral prospectivity modeling.
//!
//! The crate turns borehole logs, assays and fault traces into voxel
//! evidence layers, scores each against known mineralization with ordinary
//! and fuzzy weights of evidence, combines them into posterior and
//! studentized posterior probability, thresholds the result with a
//! concentration-volume fractal fit, and validates it with
//! prediction-volume curves.

// comparisons are written negated so NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod borehole;
pub mod chart;
pub mod error;
pub mod export;
pub mod interpolate;
pub mod model_space;
pub mod structures;
pub mod threshold;
pub mod validate;
pub mod wofe;

pub use borehole::{BoreholeSet, Collar, CsvTable, IntervalLog, PointSample, SampleValue, Unit};
pub use error::{Cell, Error, Result};
pub use interpolate::{CategoricalModel, ContinuousModel, IdwParams, MapRaster, NearestParams};
pub use model_space::{GridSpec, Polygon2D, SurfacePair, VolumeMask};
pub use structures::{FaultTrace, RibbonMesh};
pub use threshold::{CVCurve, SegmentedFit};
pub use validate::PVCurves;
pub use wofe::{
    BinaryLayer, ClassBounds, ClassedLayer, ContingencyCounts, EvidenceLayer, FuzzyLogistic, ProbabilityModel,
    WeightRecord,
};

//! Batch pipeline around the `wofe3d` engine: configuration, resumable
//! stages with versioned intermediates, the run report, and the synthetic
//! test deposit.

// comparisons are written negated so NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod fixture;
pub mod pipeline;
pub mod report;
pub mod store;

pub use config::PipelineConfig;
pub use error::{CliError, CliResult};
pub use pipeline::{run_pipeline, run_stage, STAGES};

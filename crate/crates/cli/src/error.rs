use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {reason}", path.display())]
    Config { path: PathBuf, reason: String },

    #[error("{}: {source}", path.display())]
    Data {
        path: PathBuf,
        #[source]
        source: wofe3d::Error,
    },

    #[error(transparent)]
    Core(#[from] wofe3d::Error),

    #[error("{}: missing intermediate; run the `{stage}` stage first", path.display())]
    MissingIntermediate { path: PathBuf, stage: String },

    #[error(
        "{}: intermediate schema version {found} (hash {found_hash}) does not match this build's version {expected} (hash {expected_hash}); rerun the `{stage}` stage",
        path.display()
    )]
    SchemaVersion {
        path: PathBuf,
        stage: String,
        found: u32,
        found_hash: String,
        expected: u32,
        expected_hash: String,
    },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<CliError>,
    },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn config(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        CliError::Config { path: path.into(), reason: reason.into() }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        match self {
            already @ CliError::Stage { .. } => already,
            other => CliError::Stage { stage, source: Box::new(other) },
        }
    }

    /// Label of the stage that failed, if known.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            CliError::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Attaches a file path to a core error.
pub trait WithPath<T> {
    fn at(self, path: &std::path::Path) -> CliResult<T>;
}

impl<T> WithPath<T> for wofe3d::Result<T> {
    fn at(self, path: &std::path::Path) -> CliResult<T> {
        self.map_err(|source| CliError::Data { path: path.to_path_buf(), source })
    }
}

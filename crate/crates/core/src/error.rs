use thiserror::Error;

/// Cell of a 2x2 contingency table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    EvidenceMineralized,
    EvidenceBarren,
    NoEvidenceMineralized,
    NoEvidenceBarren,
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Cell::EvidenceMineralized => "N(E and M)",
            Cell::EvidenceBarren => "N(E and not M)",
            Cell::NoEvidenceMineralized => "N(not E and M)",
            Cell::NoEvidenceBarren => "N(not E and not M)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{table}, row {row}: {reason}")]
    Parse {
        table: String,
        row: u64,
        reason: String,
    },

    #[error("volume masks or models are defined on different grids")]
    GridMismatch,

    #[error("degenerate training mask: {0}")]
    DegenerateTraining(String),

    #[error("contingency table has an empty cell {0}")]
    ZeroCell(Cell),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("every evidence layer and class was excluded from the model")]
    EmptyModel,

    #[error("prediction and volume curves do not intersect")]
    NoIntersection,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no edges")]
    NoEdges,
    #[error("empty graph")]
    EmptyGraph,
    #[error("undefined on edgeless graph")]
    Edgeless,
    #[error("no paths")]
    NoPaths,
    #[error("degenerate sequence")]
    DegenerateSequence,
    #[error("insufficient tail: {found} samples in range, need {required}")]
    InsufficientTail { found: usize, required: usize },
    #[error("zero variance")]
    ZeroVariance,
    #[error("no common support")]
    NoCommonSupport,
    #[error("degenerate scatter")]
    DegenerateScatter,
    #[error("degree sums differ: in={in_sum} out={out_sum}")]
    SumMismatch { in_sum: u64, out_sum: u64 },
    #[error("cannot balance sequences without going below floor {floor}")]
    CannotBalance { floor: u64 },
    #[error("no directed path of length >= 2")]
    NoLongPath,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

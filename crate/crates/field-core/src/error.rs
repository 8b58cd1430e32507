use thiserror::Error;

/// Errors raised by lattice construction, spectral transforms and checkpoint I/O.
#[derive(Debug, Error)]
pub enum FieldError {
    #[error("invalid lattice parameters: {0}")]
    InvalidLattice(String),
    #[error("physical grid too small: need M >= {need}, have M = {have}")]
    GridTooSmall { need: usize, have: usize },
    #[error("fields live on different lattices")]
    LatticeMismatch,
    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),
    #[error("checkpoint mismatch: {0}")]
    CheckpointMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FieldError>;

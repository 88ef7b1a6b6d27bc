use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid search parameters: n1={n1}, n2={n2} (both must be at least 1)")]
    InvalidParams { n1: u64, n2: u64 },

    #[error("invalid sizing: {0}")]
    InvalidSizing(String),

    #[error("marked set has {got} indices, expected {expected}")]
    MarkedCountMismatch { expected: u64, got: usize },

    #[error("marked index {index} out of range for N={n_total}")]
    IndexOutOfRange { index: usize, n_total: u64 },

    #[error("marked index {0} listed more than once")]
    DuplicateIndex(usize),

    #[error("squared norm {0} is not 1")]
    NotNormalized(f64),

    #[error("state vector of size {0} exceeds addressable memory")]
    TooLarge(u64),

    #[error("imaginary residue {residue:e} in T^{power} exceeds {limit:e}")]
    ImaginaryResidue {
        power: u64,
        residue: f64,
        limit: f64,
    },

    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),

    #[error("initial speed must be positive, got {0}")]
    NonPositiveSpeed(f64),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Configuration problems, as opposed to failures while running.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams { .. }
                | Error::InvalidSizing(_)
                | Error::MarkedCountMismatch { .. }
                | Error::IndexOutOfRange { .. }
                | Error::DuplicateIndex(_)
                | Error::NotNormalized(_)
                | Error::NonPositiveMass(_)
                | Error::NonPositiveSpeed(_)
                | Error::Config(_)
        )
    }
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported spin magnitude {0} (only 1/2 and 3/2)")]
    UnsupportedSpin(f64),

    #[error("operator of dimension {found} does not fit slot {slot} of dimension {expected}")]
    DimensionMismatch {
        slot: usize,
        expected: usize,
        found: usize,
    },

    #[error("magnetic quantum number {0} is not one of ±3/2, ±1/2")]
    InvalidProjection(f64),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("temperature must be non-negative and finite, got {0}")]
    NegativeTemperature(f64),

    #[error("post-measurement state leaks {0:.3e} of its weight out of the logical subspace")]
    Leakage(f64),

    #[error("Pauli classes cover only {0:.12} of the state's weight")]
    BasisCoverage(f64),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("bisection failed: {0}")]
    Bracket(String),

    #[error("k table: {0}")]
    KTable(String),

    #[error("propagation frame mismatch for {source_label} on branch {branch}: {detail}")]
    FrameMismatch {
        source_label: String,
        branch: String,
        detail: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::UnsupportedSpin(_)
                | Error::DimensionMismatch { .. }
                | Error::InvalidProjection(_)
                | Error::Domain(_)
                | Error::NegativeTemperature(_)
                | Error::Grid(_)
                | Error::KTable(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

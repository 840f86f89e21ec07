use thiserror::Error;

/// Errors raised by the geometry, grid and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("structuring element must contain at least one point")]
    EmptyStructuringElement,

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("polytope is unbounded")]
    Unbounded,

    #[error("grid needs {required} voxels but the cap is {allowed}")]
    MemoryCap { required: u128, allowed: u64 },

    #[error("offset r*|q|/h = {ratio:.3} is below the minimum of 4 voxels; use a finer spacing or a larger r")]
    OffsetResolution { ratio: f64 },

    #[error("plus-sampling margin {margin} is smaller than the required {required}")]
    MarginTooSmall { margin: f64, required: f64 },

    #[error("conditioning on the complement is degenerate: volume fraction {p_bar} (std err {std_err})")]
    DegenerateConditioning { p_bar: f64, std_err: f64 },

    #[error("rose of directions is undefined when the specific perimeter is zero")]
    UndefinedRose,

    #[error("exact boundary measurement is not available for {0}; use the grid path")]
    ExactPathUnavailable(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by invalid user input, as opposed to
    /// precision or budget failures detected while computing.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::DegenerateConditioning { .. } | Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

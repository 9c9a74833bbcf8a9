use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An exact integer computation left the widest supported integer type.
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    /// An argument or intermediate value is outside the domain of a formula.
    #[error("{what}: {detail}")]
    Domain { what: &'static str, detail: String },

    /// A bracketing root finder was handed an interval without a sign change.
    #[error("no sign change on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("{a} is not invertible modulo {r}")]
    NonInvertible { a: i64, r: u64 },

    /// Quadrature resolution below the sampling floor of the integrand.
    #[error("resolution {got} on axis {axis} is below the required {need}")]
    Resolution { axis: usize, got: usize, need: usize },

    #[error("unsupported: {0}")]
    Unsupported(&'static str),
}

impl Error {
    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            what,
            detail: detail.into(),
        }
    }
}

use thiserror::Error;

/// Errors produced by the bound computations, parsers and harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} must be {expected}, got {value}")]
    Domain {
        what: &'static str,
        expected: &'static str,
        value: f64,
    },

    #[error("invalid Orlicz specification: {0}")]
    InvalidSpec(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("generalized inverse is unbounded: the function never exceeds {level}")]
    UnboundedInverse { level: f64 },

    #[error("norm is undefined: the function vanishes identically")]
    UndefinedNorm,

    #[error("operation produced NaN in {0}")]
    NotANumber(&'static str),

    #[error("a finite domain bound b = {0} is not supported here; the selection bounds need b = inf")]
    FiniteDomain(f64),

    #[error("refusing {what}: {requested} exceeds the cap of {cap}")]
    ScaleCap {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_nonnegative(what: &'static str, value: f64) -> Result<()> {
    if value.is_nan() || value < 0.0 {
        return Err(Error::Domain {
            what,
            expected: "a nonnegative number",
            value,
        });
    }
    Ok(())
}

pub(crate) fn ensure_positive(what: &'static str, value: f64) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::Domain {
            what,
            expected: "a positive finite number",
            value,
        });
    }
    Ok(())
}

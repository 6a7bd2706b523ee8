use thiserror::Error;

/// Errors raised by the library.
///
/// The variants follow the kind of contract that was broken rather than the
/// module that detected it, so callers can react uniformly.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function (e.g. a quantile level outside `[0, 1)`).
    #[error("domain error: {0}")]
    Domain(String),
    /// Raw data failed validation while building a measure or density.
    #[error("validation error: {0}")]
    Validation(String),
    /// A parameter is out of range or inconsistent with the other inputs.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// A numerical routine produced a result outside its tolerance.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// The request would exceed a hard size limit.
    #[error("resource error: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("order p must be a finite real >= 1, got {p}")))
    }
}

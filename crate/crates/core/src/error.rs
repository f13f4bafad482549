use thiserror::Error;

/// Failures shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller's problem is valid but the requested method does not apply
    /// to it. The message names the alternative.
    #[error("method inapplicable: {0}")]
    MethodInapplicable(String),

    /// A precondition on the combination of arguments is violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An iterative method ran out of budget before meeting its target.
    #[error("not converged after {iterations} iterations: {detail}")]
    NotConverged { iterations: usize, detail: String },

    /// A quantity that must be nonzero vanished (or a degenerate input made
    /// the statistic undefined).
    #[error("degenerate: {0}")]
    Degenerate(String),

    /// A numeric routine failed in a way that indicates a bug or a
    /// precision limit.
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn check_open_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must lie in (0, 1), got {x}")))
    }
}

use thiserror::Error;

/// Errors raised by the special-function kernels, the analytic engine, the
/// simulator and the sweep harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OstnError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge within {terms} terms (last term magnitude {last_term:e}): {what}")]
    Truncation {
        what: String,
        terms: usize,
        last_term: f64,
    },

    #[error("capacity exceeded: {what} needs {needed} entries, cap is {cap}")]
    Capacity { what: String, needed: u128, cap: u128 },

    #[error("fading mode error: {0}")]
    Mode(String),

    #[error("no asymptotic branch: {0}")]
    Branch(String),

    #[error("QoS constraint infeasible: outage at mu -> 1 is {op_at_one:.6} > epsilon {epsilon}")]
    Infeasible { op_at_one: f64, epsilon: f64 },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, OstnError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(OstnError::Domain(msg.into()))
}

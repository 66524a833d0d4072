use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("equilibrium selector must lie in [0, 1], got {0}")]
    InvalidSelector(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("{0} has no sequential structure")]
    InvalidModel(&'static str),

    #[error("grid search needs {needed} payoff evaluations, cap is {cap}")]
    GridTooLarge { needed: u128, cap: u128 },

    #[error("advertiser pool is empty")]
    EmptyPool,

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("regime error: {0}")]
    Regime(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}

/// Rejects NaN/inf and values below zero.
pub(crate) fn check_non_negative(field: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(invalid(field, format!("must be finite, got {value}")));
    }
    if value < 0.0 {
        return Err(invalid(field, format!("must be >= 0, got {value}")));
    }
    Ok(())
}

pub(crate) fn check_positive(field: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(invalid(
            field,
            format!("must be finite and > 0, got {value}"),
        ));
    }
    Ok(())
}

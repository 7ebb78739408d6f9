use thiserror::Error;

/// Errors raised by the lab's operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("not a decimal or fraction: {0:?}")]
    NotAFraction(String),
    #[error("exponent {0} is an integer")]
    IntegerExponent(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("result exceeds the bit budget: {0}")]
    Overflow(String),
    #[error("range too large: {what} = {value} exceeds cap {cap}")]
    RangeTooLarge { what: &'static str, value: u128, cap: u128 },
    #[error("precision exhausted after {bits} bits")]
    PrecisionExhausted { bits: u64 },
    #[error("factorization of {n} exceeded its iteration budget")]
    FactorizationTimeout { n: u128 },
    #[error("rho = (k-2-eps)/(k(k+1)(2k-1)) is not positive for k = {k}, eps = {epsilon}")]
    NonPositiveRho { k: u64, epsilon: f64 },
    #[error("invalid R = {0} (need R >= 2)")]
    InvalidR(u64),
    #[error("indicator does not change on [{lo}, {hi}]")]
    NoCrossing { lo: f64, hi: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl LabError {
    /// True for errors caused by a resource cap rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            LabError::Overflow(_)
                | LabError::RangeTooLarge { .. }
                | LabError::PrecisionExhausted { .. }
                | LabError::FactorizationTimeout { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, LabError>;

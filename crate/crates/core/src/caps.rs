//! Resource caps.
//!
//! Every cap can be scaled at runtime through the `PSC_LAB_CAP` environment
//! variable, which holds a positive multiplier (e.g. `PSC_LAB_CAP=10`).

use crate::error::{LabError, Result};

pub const CAP_ENV: &str = "PSC_LAB_CAP";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Caps {
    /// Largest sieve bound accepted by `primes_in` / `prime_count`.
    pub sieve_limit: u64,
    /// Largest argument of `mangoldt_table`.
    pub mangoldt_limit: u64,
    /// Bit budget of the exact big-integer power path.
    pub exact_bits: u64,
    /// Precision ceiling of the certified floating path.
    pub precision_bits: u64,
    /// Term cap for Weyl and trilinear sums.
    pub sum_terms: u64,
    /// Term-evaluation cap for the triple sum.
    pub triple_terms: u64,
    /// Pollard rho iterations per split attempt.
    pub rho_iterations: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            sieve_limit: 10_000_000_000,
            mangoldt_limit: 10_000_000,
            exact_bits: 1_000_000,
            precision_bits: 100_000,
            sum_terms: 100_000_000,
            triple_terms: 1_000_000_000,
            rho_iterations: 1 << 24,
        }
    }
}

impl Caps {
    /// Default caps scaled by `PSC_LAB_CAP` when it is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(CAP_ENV) {
            Ok(v) => {
                let factor: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| LabError::InvalidParameter(format!("{CAP_ENV}={v}")))?;
                if !(factor.is_finite() && factor > 0.0) {
                    return Err(LabError::InvalidParameter(format!("{CAP_ENV}={v}")));
                }
                Ok(Caps::default().scaled(factor))
            }
            Err(_) => Ok(Caps::default()),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let s = |v: u64| ((v as f64) * factor).min(u64::MAX as f64).max(1.0) as u64;
        Caps {
            sieve_limit: s(self.sieve_limit),
            mangoldt_limit: s(self.mangoldt_limit),
            exact_bits: s(self.exact_bits),
            precision_bits: s(self.precision_bits),
            sum_terms: s(self.sum_terms),
            triple_terms: s(self.triple_terms),
            rho_iterations: s(self.rho_iterations),
        }
    }

    pub(crate) fn check(&self, what: &'static str, value: u128, cap: u64) -> Result<()> {
        if value > cap as u128 {
            Err(LabError::RangeTooLarge { what, value, cap: cap as u128 })
        } else {
            Ok(())
        }
    }
}

/// Caps in effect for the process: defaults scaled by `PSC_LAB_CAP`.
/// An unparsable variable falls back to the defaults.
pub fn current() -> Caps {
    Caps::from_env().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_multiplies_every_cap() {
        let c = Caps::default().scaled(2.0);
        assert_eq!(c.sieve_limit, 20_000_000_000);
        assert_eq!(c.precision_bits, 200_000);
    }

    #[test]
    fn check_reports_cap() {
        let c = Caps::default();
        assert!(c.check("x", 10, 10).is_ok());
        assert_eq!(
            c.check("x", 11, 10),
            Err(LabError::RangeTooLarge { what: "x", value: 11, cap: 10 })
        );
    }
}

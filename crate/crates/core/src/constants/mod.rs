//! Explicit constants and inequality systems.
//!
//! Inequalities are decided in exact rational arithmetic. Inputs given as
//! `f64` are converted with [`BigRational::from_float`], which is exact, so
//! no verdict depends on floating-point rounding.

mod margins;
mod regime;
mod small_c;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Serialize, Serializer};

use crate::error::{LabError, Result};
use crate::json::{rational_string, rational_to_f64};

pub use margins::{margin_verify, MarginReport, WindowReport, DEFAULT_EPSILON, DEFAULT_GRID};
pub use regime::{
    f1_f2, r_bound, regime_constants, regime_inequalities, threshold, RBound, RegimeConstants, RegimeIneq,
    Threshold,
};
pub use small_c::{
    check_inequalities, max_c_feasible, theta_interval, InequalityParams, ThetaInterval, KAPPA_GUARD,
};

/// An inequality counts as holding only when its slack exceeds this.
pub const STRICTNESS: f64 = 1e-12;

pub(crate) fn strictness() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10).pow(12))
}

/// Exact rational from an `f64` (every finite double is a dyadic rational).
pub fn exact(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| LabError::InvalidParameter(format!("{x} is not finite")))
}

/// Exact rational from a decimal or fraction string.
pub fn exact_str(text: &str) -> Result<BigRational> {
    let q = crate::exactpow::parse_rational(text)?;
    Ok(BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom())))
}

pub(crate) fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// An exact rational serialized as `{"exact": "num/den", "value": float}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Exact(pub BigRational);

impl Exact {
    pub fn value(&self) -> f64 {
        rational_to_f64(&self.0)
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Exact", 2)?;
        st.serialize_field("exact", &rational_string(&self.0))?;
        st.serialize_field("value", &self.value())?;
        st.end()
    }
}

/// Outcome of one strict inequality `lhs < rhs` (or `lhs > rhs`).
#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Signed distance in the direction that makes the inequality hold.
    pub slack: f64,
    pub holds: bool,
}

impl InequalityReport {
    /// Report for `lhs < rhs`.
    pub(crate) fn less(id: &str, lhs: &BigRational, rhs: &BigRational) -> Self {
        Self::build(id, lhs, rhs, rhs - lhs)
    }

    /// Report for `lhs > rhs`.
    pub(crate) fn greater(id: &str, lhs: &BigRational, rhs: &BigRational) -> Self {
        Self::build(id, lhs, rhs, lhs - rhs)
    }

    fn build(id: &str, lhs: &BigRational, rhs: &BigRational, slack: BigRational) -> Self {
        InequalityReport {
            id: id.to_string(),
            lhs: rational_to_f64(lhs),
            rhs: rational_to_f64(rhs),
            holds: slack > strictness(),
            slack: rational_to_f64(&slack),
        }
    }
}

/// delta_R from Greaves' weighted sieve.
pub fn greaves_delta(r: u64) -> Result<f64> {
    Ok(match r {
        0 | 1 => return Err(LabError::InvalidR(r)),
        2 => 0.044560,
        3 => 0.074267,
        4 => 0.103974,
        _ => 0.124820,
    })
}

/// delta_R as an exact decimal.
pub(crate) fn greaves_delta_exact(r: u64) -> Result<BigRational> {
    let micro = match r {
        0 | 1 => return Err(LabError::InvalidR(r)),
        2 => 44_560,
        3 => 74_267,
        4 => 103_974,
        _ => 124_820,
    };
    Ok(q(micro, 1_000_000))
}

/// Least R >= 2 with R - delta_R > rho.
pub fn greaves_min_r(rho: f64) -> Result<u64> {
    greaves_min_r_exact(&exact(rho)?)
}

pub(crate) fn greaves_min_r_exact(rho: &BigRational) -> Result<u64> {
    if !rho.is_positive() {
        return Err(LabError::InvalidParameter("rho must be positive".into()));
    }
    for r in 2..=4u64 {
        if BigRational::from_integer(r.into()) - greaves_delta_exact(r)? > *rho {
            return Ok(r);
        }
    }
    // R >= 5: R > rho + delta_5
    let bound = rho + greaves_delta_exact(5)?;
    let fl = bound.floor().to_integer();
    let r: u64 = (fl + 1u32)
        .try_into()
        .map_err(|_| LabError::OutOfRange("R does not fit in u64".into()))?;
    Ok(r.max(5))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmissiblePair {
    #[serde(rename = "R")]
    pub r: u64,
    pub c_r: f64,
}

const TABLE: [(u64, &str); 12] = [
    (8, "1.0521"),
    (9, "1.1056"),
    (10, "1.1308"),
    (11, "1.1494"),
    (12, "1.1649"),
    (13, "1.1780"),
    (14, "1.1891"),
    (15, "1.1988"),
    (16, "1.2073"),
    (17, "1.2148"),
    (18, "1.2214"),
    (19, "1.2273"),
];

/// The twelve admissible pairs (R, c_R), R = 8..19.
pub fn table11() -> Vec<AdmissiblePair> {
    TABLE
        .iter()
        .map(|&(r, c)| AdmissiblePair { r, c_r: c.parse().expect("table literal") })
        .collect()
}

/// c_R as an exact decimal.
pub fn table_c_exact(r: u64) -> Option<BigRational> {
    TABLE.iter().find(|(k, _)| *k == r).map(|(_, c)| exact_str(c).expect("table literal"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deltas() {
        assert_eq!(greaves_delta(2).unwrap(), 0.044560);
        assert_eq!(greaves_delta(3).unwrap(), 0.074267);
        assert_eq!(greaves_delta(4).unwrap(), 0.103974);
        assert_eq!(greaves_delta(5).unwrap(), 0.124820);
        assert_eq!(greaves_delta(100).unwrap(), 0.124820);
        assert_eq!(greaves_delta(1), Err(LabError::InvalidR(1)));
    }

    fn scan_min_r(rho: f64) -> u64 {
        (2..).find(|&r| r as f64 - greaves_delta(r).unwrap() > rho).unwrap()
    }

    #[test]
    fn min_r() {
        assert_eq!(greaves_min_r(4.8).unwrap(), 5);
        assert_eq!(greaves_min_r(4.9).unwrap(), 6);
        assert_eq!(greaves_min_r(0.5).unwrap(), 2);
        for i in 1..2000 {
            let rho = i as f64 * 0.37;
            assert_eq!(greaves_min_r(rho).unwrap(), scan_min_r(rho), "rho = {rho}");
        }
        assert!(greaves_min_r(0.0).is_err());
    }

    #[test]
    fn table() {
        let t = table11();
        assert_eq!(t.len(), 12);
        assert_eq!(t[0], AdmissiblePair { r: 8, c_r: 1.0521 });
        assert_eq!(t[11], AdmissiblePair { r: 19, c_r: 1.2273 });
        assert!(t.windows(2).all(|w| w[0].c_r < w[1].c_r));
        assert_eq!(table_c_exact(8).unwrap(), q(10521, 10000));
    }

    #[test]
    fn exact_serialization() {
        let v = serde_json::to_string(&Exact(q(3, 2))).unwrap();
        assert_eq!(v, r#"{"exact":"3/2","value":1.5}"#);
    }
}

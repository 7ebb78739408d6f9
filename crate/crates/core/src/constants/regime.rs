//! sigma, beta and the large-c inequalities.

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::{exact, greaves_min_r_exact, q, Exact, InequalityReport};
use crate::error::{LabError, Result};
use crate::json::rational_to_f64;

#[derive(Debug, Clone, Serialize)]
pub struct RegimeConstants {
    pub c: Exact,
    pub coeff: u32,
    pub sigma: Exact,
    pub beta: Exact,
    pub c1: Exact,
    pub c2: Exact,
}

fn coeff_for(c: &BigRational) -> i64 {
    if *c < q(3, 1) {
        179
    } else {
        88
    }
}

/// sigma = 1 / (16c^2 + coeff c - 1.15/c).
pub(crate) fn sigma(c: &BigRational) -> BigRational {
    let coeff = q(coeff_for(c), 1);
    let den = q(16, 1) * c * c + coeff * c - q(23, 20) / c;
    den.recip()
}

/// sigma, beta, c1 and c2 for c > 1.
pub fn regime_constants(c: &BigRational) -> Result<RegimeConstants> {
    if *c <= BigRational::one() {
        return Err(LabError::OutOfRange("c must exceed 1".into()));
    }
    let coeff = coeff_for(c);
    let s = sigma(c);
    let beta = if coeff == 179 { q(47, 1) * &s } else { q(20, 1) * &s };
    let c1 = c + &s;
    let c2 = c - BigRational::one() + q(3, 1) * &s;
    Ok(RegimeConstants {
        c: Exact(c.clone()),
        coeff: coeff as u32,
        sigma: Exact(s),
        beta: Exact(beta),
        c1: Exact(c1),
        c2: Exact(c2),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RBound {
    pub real_bound: Exact,
    #[serde(rename = "integer_R")]
    pub integer_r: u64,
    /// c/sigma + 1.15 equals the cubic exactly.
    pub identity_holds: bool,
}

/// Sieve dimension needed in the large-c regime: 16c^3 + coeff c^2.
pub fn r_bound(c: &BigRational) -> Result<RBound> {
    if *c < q(11, 5) {
        return Err(LabError::OutOfRange(format!("c = {} is below 11/5", rational_to_f64(c))));
    }
    let coeff = q(coeff_for(c), 1);
    let cubic = q(16, 1) * c * c * c + coeff * c * c;
    let ratio = c / sigma(c);
    let identity_holds = &ratio + q(23, 20) == cubic;
    let integer_r = greaves_min_r_exact(&(ratio + q(1, 1_000_000_000)))?;
    Ok(RBound { real_bound: Exact(cubic), integer_r, identity_holds })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeIneq {
    /// Type I minorant at 1/2 - beta exceeds sigma.
    TypeOneEdge,
    /// Type II minorant at 2/3 exceeds 2 sigma.
    TypeTwoLow,
    /// Type II minorant at 1 - 2 beta exceeds 2 sigma.
    TypeTwoHigh,
    /// beta < 1/10.
    BetaCap,
}

impl RegimeIneq {
    pub const ALL: [RegimeIneq; 4] =
        [RegimeIneq::TypeOneEdge, RegimeIneq::TypeTwoLow, RegimeIneq::TypeTwoHigh, RegimeIneq::BetaCap];

    pub fn id(self) -> &'static str {
        match self {
            RegimeIneq::TypeOneEdge => "type1-edge",
            RegimeIneq::TypeTwoLow => "type2-low",
            RegimeIneq::TypeTwoHigh => "type2-high",
            RegimeIneq::BetaCap => "beta-cap",
        }
    }
}

impl std::str::FromStr for RegimeIneq {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        RegimeIneq::ALL
            .into_iter()
            .find(|i| i.id() == s)
            .ok_or_else(|| LabError::InvalidParameter(format!("unknown inequality {s:?}")))
    }
}

/// f1(t) = (c1 t^3 - (1+eps) t^4) / ((c1+t)(c1+2t)(2c1+t))
fn f1_exact(t: &BigRational, c1: &BigRational, eps: &BigRational) -> BigRational {
    let one = BigRational::one();
    let t3 = t * t * t;
    let num = c1 * &t3 - (&one + eps) * &t3 * t;
    let two = q(2, 1);
    let den = (c1 + t) * (c1 + &two * t) * (&two * c1 + t);
    num / den
}

/// f2(t) = ((c2+2eps) t^3 - (1+eps) t^4) / ((c2+2t+2eps)(c2+3t+2eps)(2c2+3t+4eps))
fn f2_exact(t: &BigRational, c2: &BigRational, eps: &BigRational) -> BigRational {
    let one = BigRational::one();
    let two = q(2, 1);
    let three = q(3, 1);
    let t3 = t * t * t;
    let num = (c2 + &two * eps) * &t3 - (&one + eps) * &t3 * t;
    let den = (c2 + &two * t + &two * eps) * (c2 + &three * t + &two * eps) * (&two * c2 + &three * t + q(4, 1) * eps);
    num / den
}

pub(crate) fn f1_at(t: &BigRational, c: &BigRational, eps: &BigRational) -> BigRational {
    f1_exact(t, &(c + sigma(c)), eps)
}

pub(crate) fn f2_at(t: &BigRational, c: &BigRational, eps: &BigRational) -> BigRational {
    f2_exact(t, &(c - BigRational::one() + q(3, 1) * sigma(c)), eps)
}

/// The minorants f1 and f2 evaluated at t, in double precision.
pub fn f1_f2(t: f64, c: f64, epsilon: f64) -> Result<(f64, f64)> {
    if !(c > 1.0) || !c.is_finite() {
        return Err(LabError::OutOfRange("c must exceed 1".into()));
    }
    let s = rational_to_f64(&sigma(&exact(c)?));
    let (c1, c2, e) = (c + s, c - 1.0 + 3.0 * s, epsilon);
    let t3 = t * t * t;
    let f1 = (c1 * t3 - (1.0 + e) * t3 * t) / ((c1 + t) * (c1 + 2.0 * t) * (2.0 * c1 + t));
    let f2 = ((c2 + 2.0 * e) * t3 - (1.0 + e) * t3 * t)
        / ((c2 + 2.0 * t + 2.0 * e) * (c2 + 3.0 * t + 2.0 * e) * (2.0 * c2 + 3.0 * t + 4.0 * e));
    Ok((f1, f2))
}

fn evaluate(id: RegimeIneq, c: &BigRational) -> InequalityReport {
    let s = sigma(c);
    let k = regime_constants(c).expect("c > 1");
    let zero = BigRational::from_integer(0.into());
    let two_s = q(2, 1) * &s;
    match id {
        RegimeIneq::TypeOneEdge => {
            let t = q(1, 2) - &k.beta.0;
            InequalityReport::greater(id.id(), &f1_exact(&t, &k.c1.0, &zero), &s)
        }
        RegimeIneq::TypeTwoLow => InequalityReport::greater(id.id(), &f2_exact(&q(2, 3), &k.c2.0, &zero), &two_s),
        RegimeIneq::TypeTwoHigh => {
            let t = BigRational::one() - q(2, 1) * &k.beta.0;
            InequalityReport::greater(id.id(), &f2_exact(&t, &k.c2.0, &zero), &two_s)
        }
        RegimeIneq::BetaCap => InequalityReport::less(id.id(), &k.beta.0, &q(1, 10)),
    }
}

/// The three minorant inequalities and the beta cap at c.
pub fn regime_inequalities(c: &BigRational) -> Result<Vec<InequalityReport>> {
    if *c <= BigRational::one() {
        return Err(LabError::OutOfRange("c must exceed 1".into()));
    }
    Ok(RegimeIneq::ALL.iter().map(|&i| evaluate(i, c)).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct Threshold {
    pub id: String,
    pub value: f64,
    pub multi_crossing: bool,
    /// Scan cells in which the verdict switches from failing to holding.
    pub crossings: usize,
}

/// Least c in [lo, hi] (to within tol) from which the inequality holds.
pub fn threshold(id: RegimeIneq, lo: f64, hi: f64, tol: f64) -> Result<Threshold> {
    if !(lo < hi) || lo <= 1.0 {
        return Err(LabError::InvalidParameter("need 1 < lo < hi".into()));
    }
    if !(tol > 0.0) {
        return Err(LabError::InvalidParameter("tol must be positive".into()));
    }
    let (a, b) = (exact(lo)?, exact(hi)?);
    let holds = |c: &BigRational| evaluate(id, c).holds;
    const CELLS: i64 = 100;
    let pts: Vec<BigRational> = (0..=CELLS).map(|i| &a + (&b - &a) * q(i, CELLS)).collect();
    let verdicts: Vec<bool> = pts.iter().map(holds).collect();
    let ups: Vec<usize> = (0..CELLS as usize).filter(|&i| !verdicts[i] && verdicts[i + 1]).collect();
    let downs = (0..CELLS as usize).filter(|&i| verdicts[i] && !verdicts[i + 1]).count();
    let Some(&first) = ups.first() else {
        return Err(LabError::NoCrossing { lo, hi });
    };
    let (mut l, mut h) = (pts[first].clone(), pts[first + 1].clone());
    let tol = exact(tol)?;
    let half = q(1, 2);
    while &h - &l > tol {
        let mid = (&l + &h) * &half;
        if holds(&mid) {
            h = mid;
        } else {
            l = mid;
        }
    }
    let value = rational_to_f64(&((&l + &h) * &half));
    Ok(Threshold { id: id.id().to_string(), value, multi_crossing: ups.len() + downs > 1, crossings: ups.len() })
}

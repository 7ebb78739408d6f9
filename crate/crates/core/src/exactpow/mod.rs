//! Certified powers with rational exponents.
//!
//! Two evaluation paths are available for `floor(n^c)`:
//!
//! * **exact**: `n^num` as a big integer followed by an integer `den`-th root
//!   ([`nth_root_floor`]);
//! * **certified**: an interval enclosure of `exp(c ln n)` in fixed-point
//!   arithmetic whose working precision doubles until the floor is decided.
//!
//! Fractional parts (`{h n^c / d}`, `{z^c N^Delta}`) always use the certified
//! path. A value that is exactly rational is recognised from the prime
//! factorizations of the bases before precision escalation continues.

mod interval;
mod product;
mod root;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::caps::{self, Caps};
use crate::error::{LabError, Result};

pub(crate) use product::PowerProduct;
pub use root::nth_root_floor;

/// Default absolute tolerance for fractional parts.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Error bound used for Weyl-sum phases.
pub const PHASE_TOL: f64 = 3.552713678800501e-15; // 2^-48
/// Smallest tolerance a binary64 result can honour.
pub const MIN_TOL: f64 = 1e-15;
/// `floor_pow` takes the exact path when `num * log2(n)` is at most this.
pub const AUTO_EXACT_BITS: f64 = 8192.0;

/// Exact rational number with `i64` parts, used for Theta, Delta and friends.
pub type Q64 = Ratio<i64>;

/// The exponent c = num/den, reduced, non-integer and greater than one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalExponent {
    num: u64,
    den: u64,
}

impl RationalExponent {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(LabError::NotAFraction(format!("{num}/{den}")));
        }
        let g = num.gcd(&den);
        let (num, den) = (num / g, den / g);
        if den == 1 {
            return Err(LabError::IntegerExponent(num.to_string()));
        }
        if num <= den {
            return Err(LabError::OutOfRange(format!("c = {num}/{den} <= 1")));
        }
        if num > i64::MAX as u64 {
            return Err(LabError::OutOfRange(format!("numerator {num} too large")));
        }
        Ok(RationalExponent { num, den })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn as_q64(&self) -> Q64 {
        Ratio::new(self.num as i64, self.den as i64)
    }
}

impl fmt::Display for RationalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for RationalExponent {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        parse_exponent(s)
    }
}

impl Serialize for RationalExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Parse a finite decimal (`"1.0521"`), integer or fraction (`"3/2"`) exactly.
pub fn parse_rational(text: &str) -> Result<Q64> {
    let bad = || LabError::NotAFraction(text.to_string());
    let t = text.trim();
    if let Some((a, b)) = t.split_once('/') {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(a, b));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty()
        || !int.chars().all(|c| c.is_ascii_digit())
        || !frac.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: i64 = digits.parse().map_err(|_| bad())?;
    let den = 10i64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
    let q = Ratio::new(num, den);
    Ok(if neg { -q } else { q })
}

/// Parse the exponent c; rejects integers and values <= 1.
pub fn parse_exponent(text: &str) -> Result<RationalExponent> {
    let q = parse_rational(text)?;
    if q.is_integer() && *q.numer() > 1 {
        return Err(LabError::IntegerExponent(text.trim().to_string()));
    }
    if q <= Ratio::from_integer(1) {
        return Err(LabError::OutOfRange(format!("c = {} <= 1", text.trim())));
    }
    RationalExponent::new(*q.numer() as u64, *q.denom() as u64)
}

/// A real approximation with a certified absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifiedReal {
    pub value: f64,
    pub error_bound: f64,
}

impl CertifiedReal {
    pub fn exact(value: f64) -> Self {
        CertifiedReal { value, error_bound: 0.0 }
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.error_bound
    }
}

/// Which evaluation route `floor_pow` takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowPath {
    /// Exact when `num * log2(n)` is at most [`AUTO_EXACT_BITS`], certified otherwise.
    Auto,
    Exact,
    Certified,
}

/// floor(n^c), exactly.
pub fn floor_pow(n: u64, c: RationalExponent) -> Result<BigUint> {
    floor_pow_with(n, c, PowPath::Auto, &caps::current())
}

pub fn floor_pow_with(n: u64, c: RationalExponent, path: PowPath, caps: &Caps) -> Result<BigUint> {
    if n < 2 {
        return Ok(BigUint::from(n));
    }
    let exact_bits = c.num as f64 * (n as f64).log2();
    let exact = match path {
        PowPath::Exact => true,
        PowPath::Certified => false,
        PowPath::Auto => exact_bits <= AUTO_EXACT_BITS,
    };
    if exact {
        if exact_bits > caps.exact_bits as f64 {
            return Err(LabError::Overflow(format!("n^num needs {exact_bits:.0} bits")));
        }
        let den = u32::try_from(c.den)
            .map_err(|_| LabError::Overflow(format!("root degree {}", c.den)))?;
        let num = u32::try_from(c.num)
            .map_err(|_| LabError::Overflow(format!("power {}", c.num)))?;
        Ok(nth_root_floor(&BigUint::from(n).pow(num), den))
    } else {
        PowerProduct::new().with(n, c.as_q64()).floor(caps)
    }
}

/// floor(n^c) as a `u128`, failing with `Overflow` at or above 2^127.
pub fn floor_pow_u128(n: u64, c: RationalExponent, caps: &Caps) -> Result<u128> {
    let v = floor_pow_with(n, c, PowPath::Auto, caps)?;
    match v.to_u128() {
        Some(x) if x < 1u128 << 127 => Ok(x),
        _ => Err(LabError::Overflow(format!("floor({n}^{c}) >= 2^127"))),
    }
}

/// floor(n^q) for any non-negative rational q, e.g. range endpoints N^Theta.
pub fn floor_rational_power(n: u64, q: Q64) -> Result<BigUint> {
    floor_rational_power_with(n, q, &caps::current())
}

pub fn floor_rational_power_with(n: u64, q: Q64, caps: &Caps) -> Result<BigUint> {
    if *q.numer() < 0 {
        return Err(LabError::OutOfRange(format!("negative exponent {q}")));
    }
    if q.is_zero() {
        return Ok(BigUint::from(1u32));
    }
    if q.is_integer() {
        let e = u32::try_from(q.to_integer()).map_err(|_| LabError::Overflow(q.to_string()))?;
        return Ok(BigUint::from(n).pow(e));
    }
    PowerProduct::new().with(n, q).floor(caps)
}

/// {h n^c / d} with error at most `tol`; exactly 0 when the product is an integer.
pub fn frac_scaled_pow(n: u64, c: RationalExponent, h: u64, d: u64, tol: f64) -> Result<CertifiedReal> {
    frac_scaled_pow_with(n, c, h, d, tol, &caps::current())
}

pub fn frac_scaled_pow_with(
    n: u64,
    c: RationalExponent,
    h: u64,
    d: u64,
    tol: f64,
    caps: &Caps,
) -> Result<CertifiedReal> {
    if d == 0 {
        return Err(LabError::InvalidParameter("d = 0".into()));
    }
    PowerProduct::new()
        .with(h, Ratio::from_integer(1))
        .with(n, c.as_q64())
        .with(d, Ratio::from_integer(-1))
        .frac(tol, caps)
}

/// {z^c N^Delta} with error at most 2^-48.
pub fn frac_phase(z: u64, c: RationalExponent, big_n: u64, delta: Q64) -> Result<CertifiedReal> {
    frac_phase_with(z, c, big_n, delta, PHASE_TOL, &caps::current())
}

pub fn frac_phase_with(
    z: u64,
    c: RationalExponent,
    big_n: u64,
    delta: Q64,
    tol: f64,
    caps: &Caps,
) -> Result<CertifiedReal> {
    if big_n < 2 {
        return Err(LabError::InvalidParameter(format!("N = {big_n} < 2")));
    }
    if *delta.numer() <= 0 {
        return Err(LabError::InvalidParameter(format!("Delta = {delta} <= 0")));
    }
    PowerProduct::new().with(z, c.as_q64()).with(big_n, delta).frac(tol, caps)
}

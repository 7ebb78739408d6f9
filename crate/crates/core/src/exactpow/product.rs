//! Certified evaluation of products of rational powers of naturals,
//! `V = prod b_i^(e_i)`, used for every floor and fractional part in the lab.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};

use super::interval::{exp_ival, ln2, ln_nat, Ival};
use super::CertifiedReal;
use crate::caps::Caps;
use crate::error::{LabError, Result};
use crate::factor::factor_u64;

const MIN_PREC: u64 = 128;

/// `[lo, hi] * 2^shift`
#[derive(Debug, Clone)]
pub(crate) struct Dyadic {
    pub lo: BigInt,
    pub hi: BigInt,
    pub shift: i64,
}

impl Dyadic {
    fn floors(&self) -> (BigInt, BigInt) {
        if self.shift >= 0 {
            (&self.lo << self.shift as usize, &self.hi << self.shift as usize)
        } else {
            let s = (-self.shift) as usize;
            (&self.lo >> s, &self.hi >> s)
        }
    }
}

pub(crate) fn dyadic_to_f64(m: &BigInt, shift: i64) -> f64 {
    let bits = m.bits() as i64;
    let (m, shift) = if bits > 100 {
        (m >> (bits - 100) as usize, shift + bits - 100)
    } else {
        (m.clone(), shift)
    };
    let v = m.to_f64().unwrap_or(f64::NAN);
    if shift < -1000 {
        v * 2f64.powi(-1000) * 2f64.powi((shift + 1000) as i32)
    } else {
        v * 2f64.powi(shift as i32)
    }
}

/// Product of rational powers of naturals. Bases of 1 are dropped; a base of 0
/// makes the whole product 0.
#[derive(Debug, Clone)]
pub(crate) struct PowerProduct {
    factors: Vec<(u64, Ratio<i64>)>,
    zero: bool,
}

impl PowerProduct {
    pub fn new() -> Self {
        PowerProduct { factors: Vec::new(), zero: false }
    }

    pub fn with(mut self, base: u64, exp: Ratio<i64>) -> Self {
        if base == 0 {
            self.zero = true;
        } else if base > 1 && !exp.is_zero() {
            self.factors.push((base, exp));
        }
        self
    }

    /// log2 V, approximately.
    fn log2_estimate(&self) -> f64 {
        self.factors
            .iter()
            .map(|(b, e)| (*b as f64).log2() * (*e.numer() as f64 / *e.denom() as f64))
            .sum()
    }

    /// sum |e_i| log2 b_i, which bounds |ln V| growth of interval error.
    fn weight(&self) -> f64 {
        self.factors
            .iter()
            .map(|(b, e)| (*b as f64).log2() * (*e.numer() as f64 / *e.denom() as f64).abs())
            .sum()
    }

    /// Exact value when V is rational (all prime exponents integral).
    /// `None` when V is irrational; `Err` when the exact value is too large.
    pub fn exact_rational(&self, caps: &Caps) -> Result<Option<BigRational>> {
        if self.zero {
            return Ok(Some(BigRational::zero()));
        }
        let mut exps: Vec<(u64, Ratio<i64>)> = Vec::new();
        for &(b, e) in &self.factors {
            for (p, v) in factor_u64(b) {
                let add = e * Ratio::from_integer(v as i64);
                match exps.iter_mut().find(|(q, _)| *q == p) {
                    Some((_, acc)) => *acc += add,
                    None => exps.push((p, add)),
                }
            }
        }
        if exps.iter().any(|(_, e)| !e.is_integer()) {
            return Ok(None);
        }
        let bits: f64 = exps
            .iter()
            .map(|(p, e)| (*p as f64).log2() * (e.to_integer().unsigned_abs() as f64))
            .sum();
        if bits > caps.exact_bits as f64 {
            return Err(LabError::Overflow(format!("exact value needs {bits:.0} bits")));
        }
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for (p, e) in exps {
            let k = e.to_integer();
            let pw = BigUint::from(p).pow(k.unsigned_abs() as u32);
            if k > 0 {
                num *= pw;
            } else if k < 0 {
                den *= pw;
            }
        }
        Ok(Some(BigRational::new(
            BigInt::from_biguint(Sign::Plus, num),
            BigInt::from_biguint(Sign::Plus, den),
        )))
    }

    /// Certified enclosure at working precision `prec`.
    pub fn enclose(&self, prec: u64) -> Dyadic {
        let l2 = ln2(prec);
        let mut y = Ival::zero();
        for &(b, e) in &self.factors {
            let l = ln_nat(&BigUint::from(b), prec, &l2);
            y = y.add(&l.mul_ratio(*e.numer(), *e.denom() as u64));
        }
        let (lo, hi, shift) = exp_ival(&y, prec, &l2);
        Dyadic { lo, hi, shift }
    }

    fn start_prec(&self, frac_bits: f64) -> u64 {
        let need = self.log2_estimate().max(0.0) + frac_bits + (1.0 + self.weight()).log2() + 24.0;
        (need.ceil() as u64).max(MIN_PREC)
    }

    fn check_magnitude(&self, caps: &Caps) -> Result<()> {
        let mag = self.log2_estimate();
        if mag + 64.0 > caps.precision_bits as f64 {
            return Err(LabError::Overflow(format!("value has about {mag:.0} bits")));
        }
        Ok(())
    }

    /// floor(V), never off by one.
    pub fn floor(&self, caps: &Caps) -> Result<BigUint> {
        if self.zero {
            return Ok(BigUint::zero());
        }
        if self.factors.is_empty() {
            return Ok(BigUint::one());
        }
        self.check_magnitude(caps)?;
        let mut prec = self.start_prec(32.0);
        let mut tried_exact = false;
        loop {
            if prec > caps.precision_bits {
                return Err(LabError::PrecisionExhausted { bits: prec / 2 });
            }
            let d = self.enclose(prec);
            let (a, b) = d.floors();
            if a == b {
                return Ok(a.to_biguint().expect("V > 0"));
            }
            if !tried_exact {
                tried_exact = true;
                if let Some(q) = self.exact_rational(caps)? {
                    return Ok(q.floor().to_integer().to_biguint().expect("V > 0"));
                }
            }
            prec *= 2;
        }
    }

    /// {V} with error at most `tol`.
    pub fn frac(&self, tol: f64, caps: &Caps) -> Result<CertifiedReal> {
        if !(tol >= super::MIN_TOL) {
            return Err(LabError::InvalidParameter(format!(
                "tolerance {tol:e} below {:e}",
                super::MIN_TOL
            )));
        }
        if self.zero {
            return Ok(CertifiedReal::exact(0.0));
        }
        if self.factors.is_empty() {
            return Ok(CertifiedReal::exact(0.0));
        }
        self.check_magnitude(caps)?;
        let mut prec = self.start_prec(-tol.log2() + 8.0);
        let mut tried_exact = false;
        loop {
            if prec > caps.precision_bits {
                return Err(LabError::PrecisionExhausted { bits: prec / 2 });
            }
            let d = self.enclose(prec);
            let (a, b) = d.floors();
            if a == b {
                let base = if d.shift < 0 { &a << (-d.shift) as usize } else { a.clone() };
                let flo = &d.lo - &base;
                let fhi = &d.hi - &base;
                let shift = d.shift.min(0);
                let half_width = dyadic_to_f64(&(&fhi - &flo), shift - 1) * (1.0 + 1e-12);
                let mid = dyadic_to_f64(&(&flo + &fhi), shift - 1);
                // mid is rounded once to f64 in [0, 1]
                let err = half_width + f64::EPSILON;
                if err <= tol {
                    let value = if mid >= 1.0 { 1.0 - f64::EPSILON / 2.0 } else { mid.max(0.0) };
                    return Ok(CertifiedReal { value, error_bound: err });
                }
            } else if !tried_exact {
                tried_exact = true;
                if let Some(q) = self.exact_rational(caps)? {
                    let f = &q - q.floor();
                    let value = crate::json::rational_to_f64(&f);
                    let exact = f.is_zero() || value == 0.0 || {
                        BigRational::from_float(value).is_some_and(|v| v == f)
                    };
                    return Ok(CertifiedReal {
                        value,
                        error_bound: if exact { 0.0 } else { f64::EPSILON / 2.0 },
                    });
                }
            }
            prec *= 2;
        }
    }
}

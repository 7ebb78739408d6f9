//! Fixed-point interval arithmetic for `ln` and `exp`.
//!
//! An [`Ival`] at precision `prec` is a pair of integers `[lo, hi]` that
//! encloses a real number scaled by `2^prec`. Every operation rounds `lo`
//! down and `hi` up, so enclosures stay valid through any sequence of steps.

use std::cell::RefCell;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Ival {
    pub lo: BigInt,
    pub hi: BigInt,
}

fn ceil_div(a: &BigInt, d: &BigInt) -> BigInt {
    -((-a).div_floor(d))
}

impl Ival {
    pub fn zero() -> Self {
        Ival { lo: BigInt::zero(), hi: BigInt::zero() }
    }

    pub fn add(&self, o: &Ival) -> Ival {
        Ival { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn neg(&self) -> Ival {
        Ival { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn mul_int(&self, k: &BigInt) -> Ival {
        let (a, b) = (&self.lo * k, &self.hi * k);
        if k.is_negative() {
            Ival { lo: b, hi: a }
        } else {
            Ival { lo: a, hi: b }
        }
    }

    /// Division by a positive integer.
    pub fn div_int(&self, d: &BigInt) -> Ival {
        debug_assert!(d.is_positive());
        Ival { lo: self.lo.div_floor(d), hi: ceil_div(&self.hi, d) }
    }

    /// Multiplication by the exact rational `num/den` (den > 0).
    pub fn mul_ratio(&self, num: i64, den: u64) -> Ival {
        self.mul_int(&BigInt::from(num)).div_int(&BigInt::from(den))
    }

    #[cfg(test)]
    pub fn width(&self) -> BigInt {
        &self.hi - &self.lo
    }
}

/// atanh(p/q) for 0 <= p/q <= 1/3, scaled by 2^prec.
fn atanh_ratio(p: &BigUint, q: &BigUint, prec: u64) -> Ival {
    if p.is_zero() {
        return Ival::zero();
    }
    let p = BigInt::from_biguint(Sign::Plus, p.clone());
    let q = BigInt::from_biguint(Sign::Plus, q.clone());
    let p2 = &p * &p;
    let q2 = &q * &q;
    let scaled = &p << prec as usize;
    let mut pw_lo = scaled.div_floor(&q);
    let mut pw_hi = ceil_div(&scaled, &q);
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut j: u64 = 0;
    loop {
        let d = BigInt::from(2 * j + 1);
        sum_lo += pw_lo.div_floor(&d);
        sum_hi += ceil_div(&pw_hi, &d);
        pw_lo = (&pw_lo * &p2).div_floor(&q2);
        pw_hi = ceil_div(&(&pw_hi * &p2), &q2);
        j += 1;
        if pw_hi <= BigInt::from(4) {
            // tail <= t^(2j+1) / (1 - t^2) <= 2 t^(2j+1)
            sum_hi += &pw_hi * 2 + 1;
            break;
        }
    }
    Ival { lo: sum_lo, hi: sum_hi }
}

fn compute_ln2(prec: u64) -> Ival {
    let a = atanh_ratio(&BigUint::one(), &BigUint::from(3u32), prec);
    Ival { lo: a.lo << 1, hi: a.hi << 1 }
}

thread_local! {
    static LN2_CACHE: RefCell<Vec<(u64, Ival)>> = const { RefCell::new(Vec::new()) };
}

/// ln 2 at precision `prec`; memoized per thread.
pub(crate) fn ln2(prec: u64) -> Ival {
    LN2_CACHE.with(|c| {
        let mut c = c.borrow_mut();
        if let Some((_, v)) = c.iter().find(|(p, _)| *p == prec) {
            return v.clone();
        }
        let v = compute_ln2(prec);
        if c.len() >= 16 {
            c.remove(0);
        }
        c.push((prec, v.clone()));
        v
    })
}

/// ln(n) for n >= 1.
pub(crate) fn ln_nat(n: &BigUint, prec: u64, ln2: &Ival) -> Ival {
    if n.is_one() {
        return Ival::zero();
    }
    assert!(!n.is_zero(), "ln(0)");
    let mut k = n.bits() - 1;
    // move n / 2^k into [3/4, 3/2)
    if n * 2u32 >= BigUint::from(3u32) << k as usize {
        k += 1;
    }
    let pk = BigUint::one() << k as usize;
    let denom = n + &pk;
    let atanh = if *n >= pk {
        atanh_ratio(&(n - &pk), &denom, prec)
    } else {
        atanh_ratio(&(&pk - n), &denom, prec).neg()
    };
    let two_atanh = Ival { lo: atanh.lo << 1, hi: atanh.hi << 1 };
    ln2.mul_int(&BigInt::from(k)).add(&two_atanh)
}

/// exp(r) rounded down, for 0 <= r (scaled by 2^prec).
fn exp_lower(r: &BigInt, prec: u64) -> BigInt {
    let one = BigInt::one() << prec as usize;
    let mut term = one.clone();
    let mut sum = one;
    let mut j: u64 = 1;
    loop {
        term = (&term * r) >> prec as usize;
        term = term.div_floor(&BigInt::from(j));
        if term.is_zero() {
            return sum;
        }
        sum += &term;
        j += 1;
    }
}

/// exp(r) rounded up, for 0 <= r (scaled by 2^prec).
fn exp_upper(r: &BigInt, prec: u64) -> BigInt {
    let one = BigInt::one() << prec as usize;
    // smallest j with j >= 2r + 1, so that later ratios r/(j+1) are <= 1/2
    let ratio_ok = {
        let two_r: BigInt = r << 1u32;
        ((two_r >> prec as usize) + 2u32).to_u64().unwrap_or(u64::MAX)
    };
    let mut term = one.clone();
    let mut sum = one;
    let mut j: u64 = 1;
    loop {
        let prod = &term * r;
        let shifted = -((-prod) >> prec as usize); // ceil shift
        term = ceil_div(&shifted, &BigInt::from(j));
        sum += &term;
        if j >= ratio_ok && term <= BigInt::one() {
            // tail <= term * sum (1/2)^i <= term, plus rounding slack
            sum += &term + 1;
            return sum;
        }
        j += 1;
    }
}

/// Enclosure of exp(y) as `[lo, hi] * 2^(shift)`.
pub(crate) fn exp_ival(y: &Ival, prec: u64, ln2: &Ival) -> (BigInt, BigInt, i64) {
    let k = if !y.lo.is_negative() {
        y.lo.div_floor(&ln2.hi)
    } else {
        y.lo.div_floor(&ln2.lo)
    };
    let kl = ln2.mul_int(&k);
    let r_lo = (&y.lo - &kl.hi).max(BigInt::zero());
    let r_hi = &y.hi - &kl.lo;
    let e_lo = exp_lower(&r_lo, prec);
    let e_hi = exp_upper(&r_hi, prec);
    let k = k.to_i64().expect("exponent fits in i64");
    (e_lo, e_hi, k - prec as i64)
}

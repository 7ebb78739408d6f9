//! Primality testing and complete factorization below 2^127.
//!
//! Below 2^64 primality is decided by a strong-pseudoprime test on the twelve
//! prime bases up to 37, which is deterministic for every 64-bit input. Above
//! that, 64 seeded random-base rounds are followed by a strong Lucas test and
//! the verdict is flagged as probabilistic.
//!
//! Factoring is trial division up to 10^5 followed by Brent's variant of
//! Pollard rho with the polynomial seeds 1, 2, 3, ... so results never depend
//! on scheduling or timing.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{LabError, Result};

/// Trial division bound.
pub const TRIAL_LIMIT: u64 = 100_000;

const MR_BASES_64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
const PROBABILISTIC_ROUNDS: usize = 64;
/// Inputs must stay below 2^127 so Montgomery sums never overflow.
pub const MAX_INPUT: u128 = 1 << 127;

fn small_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| crate::primes::simple_sieve(TRIAL_LIMIT))
}

/// How a primality verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Primality {
    Composite,
    Prime,
    /// Passed the probabilistic battery (only for n >= 2^64).
    ProbablePrime,
}

impl Primality {
    pub fn is_prime(self) -> bool {
        !matches!(self, Primality::Composite)
    }
}

/// Primality verdict and how it was reached.
pub fn primality(n: u128) -> Primality {
    if n < 2 {
        return Primality::Composite;
    }
    for &p in &small_primes()[..25] {
        let p = p as u128;
        if n == p {
            return Primality::Prime;
        }
        if n % p == 0 {
            return Primality::Composite;
        }
    }
    if n < 10_000 {
        // no factor below 100
        return Primality::Prime;
    }
    if n <= u64::MAX as u128 {
        let n = n as u64;
        if MR_BASES_64.iter().all(|&a| strong_probable_prime_u64(n, a)) {
            Primality::Prime
        } else {
            Primality::Composite
        }
    } else {
        if n >= MAX_INPUT {
            // Out of the supported range; fall back to big integers.
            return big_primality(n);
        }
        let m = Mont::new(n);
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64 ^ (n >> 64) as u64);
        for _ in 0..PROBABILISTIC_ROUNDS {
            let a = rng.gen_range(2..n - 1);
            if !m.strong_probable_prime(a) {
                return Primality::Composite;
            }
        }
        if m.strong_lucas(n) {
            Primality::ProbablePrime
        } else {
            Primality::Composite
        }
    }
}

/// Primality test; deterministic below 2^64.
pub fn is_prime(n: u128) -> bool {
    primality(n).is_prime()
}

fn big_primality(n: u128) -> Primality {
    use num_bigint::BigUint;
    let nb = BigUint::from(n);
    let one = BigUint::from(1u8);
    let nm1 = &nb - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'outer: for &a in &MR_BASES_64 {
        let mut x = BigUint::from(a).modpow(&d, &nb);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % &nb;
            if x == nm1 {
                continue 'outer;
            }
        }
        return Primality::Composite;
    }
    Primality::ProbablePrime
}

#[inline]
fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_u64(r, a, m);
        }
        a = mul_mod_u64(a, a, m);
        e >>= 1;
    }
    r
}

fn strong_probable_prime_u64(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod_u64(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod_u64(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Full 128x128 -> 256-bit product as (high, low).
#[inline]
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    let mask = u64::MAX as u128;
    let (a0, a1) = (a & mask, a >> 64);
    let (b0, b1) = (b & mask, b >> 64);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & mask) + (p10 & mask);
    let lo = (p00 & mask) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// Montgomery arithmetic modulo an odd m < 2^127 with R = 2^128.
#[derive(Debug, Clone, Copy)]
struct Mont {
    m: u128,
    /// -m^{-1} mod 2^128
    neg_inv: u128,
    /// R^2 mod m
    r2: u128,
}

impl Mont {
    fn new(m: u128) -> Self {
        debug_assert!(m & 1 == 1 && m < MAX_INPUT);
        let mut inv: u128 = 1;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(m.wrapping_mul(inv)));
        }
        let r1 = (u128::MAX % m + 1) % m;
        let mut r2 = r1;
        for _ in 0..128 {
            r2 = Self::add_raw(r2, r2, m);
        }
        Mont { m, neg_inv: inv.wrapping_neg(), r2 }
    }

    #[inline]
    fn add_raw(a: u128, b: u128, m: u128) -> u128 {
        // a, b < m < 2^127
        let s = a + b;
        if s >= m {
            s - m
        } else {
            s
        }
    }

    #[inline]
    fn add(&self, a: u128, b: u128) -> u128 {
        Self::add_raw(a, b, self.m)
    }

    #[inline]
    fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    fn half(&self, a: u128) -> u128 {
        if a & 1 == 0 {
            a >> 1
        } else {
            (a + self.m) >> 1
        }
    }

    #[inline]
    fn mul(&self, a: u128, b: u128) -> u128 {
        let (hi, lo) = mul_wide(a, b);
        let q = lo.wrapping_mul(self.neg_inv);
        let (qh, ql) = mul_wide(q, self.m);
        let (_, carry) = lo.overflowing_add(ql);
        // hi + qh + carry < 2m < 2^128
        let t = hi + qh + carry as u128;
        if t >= self.m {
            t - self.m
        } else {
            t
        }
    }

    fn to_mont(&self, a: u128) -> u128 {
        self.mul(a % self.m, self.r2)
    }

    fn from_mont(&self, a: u128) -> u128 {
        self.mul(a, 1)
    }

    fn pow(&self, base: u128, mut e: u128) -> u128 {
        let mut r = self.to_mont(1);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    fn strong_probable_prime(&self, a: u128) -> bool {
        let n = self.m;
        let s = (n - 1).trailing_zeros();
        let d = (n - 1) >> s;
        let one = self.to_mont(1);
        let minus_one = self.to_mont(n - 1);
        let mut x = self.pow(self.to_mont(a), d);
        if x == one || x == minus_one {
            return true;
        }
        for _ in 1..s {
            x = self.mul(x, x);
            if x == minus_one {
                return true;
            }
        }
        false
    }

    /// Strong Lucas probable-prime test with Selfridge parameters.
    fn strong_lucas(&self, n: u128) -> bool {
        if is_square_u128(n) {
            return false;
        }
        let mut d: i128 = 5;
        loop {
            let j = jacobi(d, n);
            if j == -1 {
                break;
            }
            if j == 0 && d.unsigned_abs() != n {
                return false;
            }
            d = if d > 0 { -(d + 2) } else { -d + 2 };
        }
        let to_mod = |v: i128| -> u128 {
            let r = v.rem_euclid(n as i128) as u128;
            self.to_mont(r)
        };
        let p = to_mod(1);
        let q = to_mod((1 - d) / 4);
        let dm = to_mod(d);
        let np1 = n + 1;
        let s = np1.trailing_zeros();
        let k = np1 >> s;

        // U_1 = 1, V_1 = P, Q^1
        let mut u = p;
        let mut v = p;
        let mut qk = q;
        let bits = 128 - k.leading_zeros();
        for i in (0..bits - 1).rev() {
            // doubling
            u = self.mul(u, v);
            v = self.sub(self.mul(v, v), self.add(qk, qk));
            qk = self.mul(qk, qk);
            if (k >> i) & 1 == 1 {
                let pu = self.mul(p, u);
                let u_new = self.half(self.add(pu, v));
                let v_new = self.half(self.add(self.mul(dm, u), self.mul(p, v)));
                u = u_new;
                v = v_new;
                qk = self.mul(qk, q);
            }
        }
        let zero = 0u128;
        if u == zero || v == zero {
            return true;
        }
        for _ in 1..s {
            v = self.sub(self.mul(v, v), self.add(qk, qk));
            qk = self.mul(qk, qk);
            if v == zero {
                return true;
            }
        }
        false
    }
}

fn is_square_u128(n: u128) -> bool {
    let r = isqrt_u128(n);
    r * r == n
}

pub(crate) fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|s| s <= n) {
        x += 1;
    }
    x
}

fn jacobi(a: i128, n: u128) -> i32 {
    let mut a = a.rem_euclid(n as i128) as u128;
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Brent's cycle-finding Pollard rho; returns a nontrivial factor of the odd
/// composite `n`, or `None` when the iteration budget runs out for every seed.
fn rho_split(n: u128, budget: u64) -> Option<u128> {
    let m = Mont::new(n);
    let mut spent = 0u64;
    for seed in 1u128.. {
        if spent >= budget {
            return None;
        }
        let c = m.to_mont(seed);
        let f = |x: u128| m.add(m.mul(x, x), c);
        let mut y = m.to_mont(2);
        let mut r: u64 = 1;
        let mut q = m.to_mont(1);
        let mut g = 1u128;
        let mut x = y;
        let mut ys = y;
        const BLOCK: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BLOCK.min(r - k) {
                    y = f(y);
                    q = m.mul(q, m.sub(x.max(y), x.min(y)));
                }
                g = gcd_u128(m.from_mont(q), n);
                k += BLOCK;
            }
            spent += r;
            r *= 2;
            if spent >= budget {
                break;
            }
        }
        if g == n {
            // backtrack one step at a time
            loop {
                ys = f(ys);
                g = gcd_u128(m.from_mont(m.sub(x.max(ys), x.min(ys))), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g > 1 && g < n {
            return Some(g);
        }
    }
    unreachable!()
}

/// Prime factorization as ascending (prime, exponent) pairs.
pub fn factorize(n: u128) -> Result<Vec<(u128, u32)>> {
    factorize_with(n, &Caps::default())
}

pub fn factorize_with(n: u128, caps: &Caps) -> Result<Vec<(u128, u32)>> {
    if n == 0 {
        return Err(LabError::OutOfRange("factorize(0)".into()));
    }
    if n >= MAX_INPUT {
        return Err(LabError::OutOfRange(format!("{n} >= 2^127")));
    }
    let mut out: Vec<(u128, u32)> = Vec::new();
    let mut rest = n;
    for &p in small_primes() {
        let p = p as u128;
        if p * p > rest {
            break;
        }
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if rest > 1 {
        let lim = TRIAL_LIMIT as u128;
        if rest < lim * lim {
            out.push((rest, 1));
        } else {
            let mut stack = vec![rest];
            let mut large = Vec::new();
            while let Some(m) = stack.pop() {
                if is_prime(m) {
                    large.push(m);
                    continue;
                }
                if is_square_u128(m) {
                    let r = isqrt_u128(m);
                    stack.push(r);
                    stack.push(r);
                    continue;
                }
                let f = rho_split(m, caps.rho_iterations)
                    .ok_or(LabError::FactorizationTimeout { n })?;
                stack.push(f);
                stack.push(m / f);
            }
            large.sort_unstable();
            for p in large {
                match out.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => out.push((p, 1)),
                }
            }
        }
    }
    Ok(out)
}

/// Factorization of a 64-bit number; never fails.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    factorize(n as u128)
        .expect("64-bit inputs factor within the default budget")
        .into_iter()
        .map(|(p, e)| (p as u64, e))
        .collect()
}

/// Multiplicative summary of one sequence member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FactorSignature {
    #[serde(serialize_with = "crate::json::u128_as_string")]
    pub n: u128,
    /// Omega(n): prime factors counted with multiplicity.
    pub omega_big: u32,
    pub squarefree: bool,
    pub prime: bool,
    /// True when a prime factor >= 2^64 was certified only probabilistically.
    pub probabilistic: bool,
}

pub fn factor_signature(n: u128) -> Result<FactorSignature> {
    factor_signature_with(n, &Caps::default())
}

pub fn factor_signature_with(n: u128, caps: &Caps) -> Result<FactorSignature> {
    let fs = factorize_with(n, caps)?;
    let omega_big = fs.iter().map(|&(_, e)| e).sum();
    Ok(FactorSignature {
        n,
        omega_big,
        squarefree: fs.iter().all(|&(_, e)| e == 1),
        prime: fs.len() == 1 && fs[0].1 == 1,
        probabilistic: fs.iter().any(|&(p, _)| p > u64::MAX as u128),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn small_cases() {
        assert!(!is_prime(0));
        assert!(!is_prime(1));
        assert!(is_prime(2));
        assert!(!is_prime(341));
        assert!(!is_prime(561));
        assert!(is_prime(97));
    }

    #[test]
    fn mersenne_61() {
        let m61 = (1u128 << 61) - 1;
        assert_eq!(primality(m61), Primality::Prime);
        assert!(!is_prime((1u128 << 59) - 1)); // 179951 * 3203431780337
    }

    #[test]
    fn agrees_with_trial_division_below_20000() {
        for n in 0..20_000u64 {
            assert_eq!(is_prime(n as u128), trial_prime(n), "n = {n}");
        }
    }

    #[test]
    fn strong_pseudoprimes_rejected() {
        // strong pseudoprimes to several small bases
        for n in [2047u128, 1373653, 25326001, 3215031751, 3825123056546413051] {
            assert!(!is_prime(n), "{n}");
        }
    }

    #[test]
    fn large_probable_primes() {
        let m89 = (1u128 << 89) - 1;
        let m107 = (1u128 << 107) - 1;
        assert_eq!(primality(m89), Primality::ProbablePrime);
        assert_eq!(primality(m107), Primality::ProbablePrime);
        assert_eq!(primality(m89 * 3), Primality::Composite);
        // (2^64 + 13) is prime, its square is not
        let p = (1u128 << 64) + 13;
        assert_eq!(primality(p), Primality::ProbablePrime);
    }

    #[test]
    fn lucas_rejects_composites_above_2_64() {
        let m = Mont::new((1u128 << 61) - 1);
        assert!(m.strong_lucas((1u128 << 61) - 1));
        let c = 4_294_967_311u128 * 4_294_967_357u128 * 3;
        let mc = Mont::new(c);
        assert!(!mc.strong_lucas(c));
    }

    #[test]
    fn signatures() {
        let s = factor_signature(12).unwrap();
        assert_eq!((s.omega_big, s.squarefree, s.prime), (3, false, false));
        let s = factor_signature(1).unwrap();
        assert_eq!((s.omega_big, s.squarefree, s.prime), (0, true, false));
        assert_eq!(factor_signature(27648).unwrap().omega_big, 13);
        let s = factor_signature(97).unwrap();
        assert!(s.prime && s.squarefree && s.omega_big == 1);
    }

    #[test]
    fn rho_splits_semiprimes() {
        let p = 1_000_000_007u128;
        let q = 998_244_353u128;
        assert_eq!(factorize(p * q).unwrap(), vec![(q, 1), (p, 1)]);
        let big_p = (1u128 << 61) - 1;
        let f = factorize(big_p * 1_000_003 * 1_000_003).unwrap();
        assert_eq!(f, vec![(1_000_003, 2), (big_p, 1)]);
        let a = 4_294_967_311u128;
        let b = 4_294_967_357u128;
        let c = 4_294_967_371u128;
        assert_eq!(factorize(a * b * c).unwrap(), vec![(a, 1), (b, 1), (c, 1)]);
    }

    #[test]
    fn squares_of_large_primes() {
        let p = 10_000_000_019u128;
        assert_eq!(factorize(p * p).unwrap(), vec![(p, 2)]);
        let s = factor_signature(p * p).unwrap();
        assert!(!s.squarefree && s.omega_big == 2);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(factorize(0).is_err());
        assert!(factorize(1u128 << 127).is_err());
    }

    #[test]
    fn mont_mul_matches_u128_reduction() {
        let m = (1u128 << 100) + 277;
        let mt = Mont::new(m);
        for (a, b) in [(3u128, 5u128), (m - 1, m - 1), (1 << 99, 12345678901234567)] {
            let got = mt.from_mont(mt.mul(mt.to_mont(a), mt.to_mont(b)));
            let want = num_bigint::BigUint::from(a) * num_bigint::BigUint::from(b)
                % num_bigint::BigUint::from(m);
            assert_eq!(num_bigint::BigUint::from(got), want);
        }
    }
}

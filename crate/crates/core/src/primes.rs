//! Segmented sieve of Eratosthenes over odd numbers, prime counting and the
//! von Mangoldt table.
//!
//! Segments are sieved independently (in parallel) and concatenated in
//! segment order, so output never depends on the thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::caps::{self, Caps};
use crate::error::Result;

/// Default segment width in integers; the bit array holds half as many odd slots.
pub const SEGMENT_WIDTH: u64 = 1 << 18;

/// Plain sieve of all primes `<= limit`.
pub fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primality of every integer in `[lo, hi)`.
#[derive(Debug, Clone)]
pub struct SieveSegment {
    pub lo: u64,
    pub hi: u64,
    /// Bit `i` set iff `lo + i` is prime.
    bits: Vec<u64>,
}

impl SieveSegment {
    /// Sieve `[lo, hi)` using `base` (all primes up to at least sqrt(hi)).
    pub fn new(lo: u64, hi: u64, base: &[u64]) -> Self {
        assert!(lo < hi);
        let lo_odd = lo | 1;
        // odd[j] <-> lo_odd + 2j
        let odd_len = if hi > lo_odd { (hi - lo_odd).div_ceil(2) } else { 0 } as usize;
        let mut odd_composite = vec![false; odd_len];
        for &p in base.iter().skip(1) {
            if p * p >= hi {
                break;
            }
            let mut start = (p * p).max(lo_odd.div_ceil(p) * p);
            if start % 2 == 0 {
                start += p;
            }
            let mut j = ((start - lo_odd) / 2) as usize;
            while j < odd_len {
                odd_composite[j] = true;
                j += p as usize;
            }
        }
        let len = (hi - lo) as usize;
        let mut bits = vec![0u64; len.div_ceil(64)];
        let mut set = |n: u64| {
            let i = (n - lo) as usize;
            bits[i / 64] |= 1 << (i % 64);
        };
        if lo <= 2 && 2 < hi {
            set(2);
        }
        for (j, &c) in odd_composite.iter().enumerate() {
            let n = lo_odd + 2 * j as u64;
            if !c && n >= 3 {
                set(n);
            }
        }
        SieveSegment { lo, hi, bits }
    }

    pub fn is_prime(&self, n: u64) -> bool {
        assert!(self.lo <= n && n < self.hi);
        let i = (n - self.lo) as usize;
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn primes(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for (w, &word) in self.bits.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let t = word.trailing_zeros() as u64;
                out.push(self.lo + 64 * w as u64 + t);
                word &= word - 1;
            }
        }
        out
    }

    pub fn count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }
}

fn segments(lo: u64, hi: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut a = lo;
    while a < hi {
        let b = (a + SEGMENT_WIDTH).min(hi);
        out.push((a, b));
        a = b;
    }
    out
}

fn base_primes(hi: u64) -> Vec<u64> {
    simple_sieve(crate::factor::isqrt_u128(hi as u128) as u64 + 1)
}

/// Ascending primes in the half-open range `(lo, hi]`.
pub fn primes_in(lo: u64, hi: u64) -> Result<Vec<u64>> {
    primes_in_with(lo, hi, &caps::current())
}

pub fn primes_in_with(lo: u64, hi: u64, caps: &Caps) -> Result<Vec<u64>> {
    caps.check("hi", hi as u128, caps.sieve_limit)?;
    if hi <= lo || hi < 2 {
        return Ok(Vec::new());
    }
    let base = base_primes(hi);
    let parts: Vec<Vec<u64>> = segments(lo.max(1) + 1, hi + 1)
        .into_par_iter()
        .map(|(a, b)| SieveSegment::new(a, b, &base).primes())
        .collect();
    Ok(parts.concat())
}

/// pi(x), the number of primes not exceeding `x`.
pub fn prime_count(x: u64) -> Result<u64> {
    prime_count_with(x, &caps::current())
}

pub fn prime_count_with(x: u64, caps: &Caps) -> Result<u64> {
    caps.check("x", x as u128, caps.sieve_limit)?;
    if x < 2 {
        return Ok(0);
    }
    let base = base_primes(x);
    Ok(segments(2, x + 1)
        .into_par_iter()
        .map(|(a, b)| SieveSegment::new(a, b, &base).count())
        .sum())
}

/// All prime powers `n = p^k <= limit` with their base prime.
#[derive(Debug, Clone, Serialize)]
pub struct MangoldtTable {
    pub limit: u64,
    /// (n, p), ascending in n.
    pub entries: Vec<(u64, u64)>,
}

impl MangoldtTable {
    /// Lambda(n): log p when n = p^k, else 0.
    pub fn lambda(&self, n: u64) -> f64 {
        match self.entries.binary_search_by_key(&n, |&(m, _)| m) {
            Ok(i) => (self.entries[i].1 as f64).ln(),
            Err(_) => 0.0,
        }
    }

    /// Entries with `lo < n <= hi`.
    pub fn range(&self, lo: u64, hi: u64) -> &[(u64, u64)] {
        let a = self.entries.partition_point(|&(m, _)| m <= lo);
        let b = self.entries.partition_point(|&(m, _)| m <= hi);
        &self.entries[a..b]
    }

    /// Chebyshev psi(x) = sum of Lambda(n) for n <= x.
    pub fn psi(&self, x: u64) -> f64 {
        self.range(0, x).iter().map(|&(_, p)| (p as f64).ln()).sum()
    }
}

pub fn mangoldt_table(x: u64) -> Result<MangoldtTable> {
    mangoldt_table_with(x, &caps::current())
}

pub fn mangoldt_table_with(x: u64, caps: &Caps) -> Result<MangoldtTable> {
    caps.check("x", x as u128, caps.mangoldt_limit)?;
    let mut entries = Vec::new();
    for p in primes_in_with(0, x, caps)? {
        let mut q = p;
        loop {
            entries.push((q, p));
            match q.checked_mul(p) {
                Some(n) if n <= x => q = n,
                _ => break,
            }
        }
    }
    entries.sort_unstable();
    Ok(MangoldtTable { limit: x, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_ranges() {
        assert_eq!(primes_in(1, 10).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(primes_in(90, 100).unwrap(), vec![97]);
        assert_eq!(primes_in(2, 3).unwrap(), vec![3]);
        assert_eq!(primes_in(0, 2).unwrap(), vec![2]);
        assert!(primes_in(10, 10).unwrap().is_empty());
    }

    #[test]
    fn counts() {
        assert_eq!(prime_count(10).unwrap(), 4);
        assert_eq!(prime_count(2).unwrap(), 1);
        assert_eq!(prime_count(1).unwrap(), 0);
        // crosses several segment boundaries; checked against the plain sieve
        let x = 3 * SEGMENT_WIDTH + 12345;
        assert_eq!(prime_count(x).unwrap() as usize, simple_sieve(x).len());
    }

    #[test]
    fn million() {
        assert_eq!(prime_count(1_000_000).unwrap(), 78498);
        assert_eq!(primes_in(1, 1_000_000).unwrap(), simple_sieve(1_000_000));
    }

    #[test]
    fn cap_is_enforced() {
        let caps = Caps { sieve_limit: 1000, ..Caps::default() };
        assert!(primes_in_with(0, 1001, &caps).is_err());
        assert!(prime_count_with(1000, &caps).is_ok());
    }

    #[test]
    fn mangoldt() {
        let t = mangoldt_table(100).unwrap();
        assert!(t.entries.contains(&(8, 2)));
        assert_eq!(t.lambda(8), 2f64.ln());
        assert_eq!(t.lambda(6), 0.0);
        assert!((t.psi(100) - 94.045).abs() < 1e-3);
        for &(n, p) in &t.entries {
            let mut m = n;
            while m % p == 0 {
                m /= p;
            }
            assert_eq!(m, 1, "{n} is not a power of {p}");
        }
    }

    #[test]
    fn segment_bits() {
        let base = simple_sieve(100);
        let s = SieveSegment::new(2, 50, &base);
        assert!(s.is_prime(2) && s.is_prime(47) && !s.is_prime(49));
        assert_eq!(s.count(), 15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn split_ranges_concatenate(a in 0u64..700_000, b in 0u64..700_000, c in 0u64..700_000) {
            let mut v = [a, b, c];
            v.sort_unstable();
            let [a, b, c] = v;
            let mut left = primes_in(a, b).unwrap();
            left.extend(primes_in(b, c).unwrap());
            prop_assert_eq!(left, primes_in(a, c).unwrap());
        }
    }
}

//! Integer k-th roots by Newton iteration from above.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// log2(x) for x >= 1, accurate to ~1e-15 relative.
pub(crate) fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX) as f64;
    top.log2() + shift as f64
}

/// `2^e` rounded up to an integer, for e >= 0.
fn pow2_ceil(e: f64) -> BigUint {
    if e < 52.0 {
        BigUint::from(e.exp2().ceil() as u64)
    } else {
        let whole = e.floor() as u64 - 52;
        let mant = (e - whole as f64).exp2().ceil() as u64;
        BigUint::from(mant) << whole
    }
}

/// floor(x^(1/k)).
pub fn nth_root_floor(x: &BigUint, k: u32) -> BigUint {
    assert!(k >= 1);
    if k == 1 || x.is_zero() || x.is_one() {
        return x.clone();
    }
    if x.bits() <= k as u64 {
        // 1 <= x < 2^k
        return BigUint::one();
    }
    // Overestimate by a relative 2^-30 plus one, then confirm it is above.
    let g = log2_big(x) / k as f64;
    let mut r = pow2_ceil(g + 2f64.powi(-30) * g.max(1.0)) + 1u32;
    while r.pow(k) <= *x {
        r <<= 1;
    }
    // From above, Newton decreases monotonically to the floor root.
    let km1 = BigUint::from(k - 1);
    let kb = BigUint::from(k);
    loop {
        let next = (&km1 * &r + x / r.pow(k - 1)) / &kb;
        if next >= r {
            return r;
        }
        r = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixed_values() {
        assert_eq!(nth_root_floor(&BigUint::from(27u32), 2), BigUint::from(5u32));
        assert_eq!(nth_root_floor(&BigUint::from(8u32), 2), BigUint::from(2u32));
        assert_eq!(nth_root_floor(&BigUint::from(832_972_004_929u64), 5), BigUint::from(242u32));
        assert_eq!(nth_root_floor(&BigUint::from(0u32), 3), BigUint::from(0u32));
        assert_eq!(nth_root_floor(&BigUint::from(7u32), 3), BigUint::from(1u32));
    }

    #[test]
    fn exact_powers_and_neighbours() {
        for k in 2..20u32 {
            for base in [2u64, 3, 10, 255, 65_537, 1 << 40] {
                let p = BigUint::from(base).pow(k);
                assert_eq!(nth_root_floor(&p, k), BigUint::from(base));
                assert_eq!(nth_root_floor(&(&p - 1u32), k), BigUint::from(base - 1));
                assert_eq!(nth_root_floor(&(&p + 1u32), k), BigUint::from(base));
            }
        }
    }

    proptest! {
        #[test]
        fn matches_num_integer_roots(bytes in proptest::collection::vec(any::<u8>(), 1..80), k in 1u32..40) {
            let x = BigUint::from_bytes_le(&bytes);
            prop_assert_eq!(nth_root_floor(&x, k), x.nth_root(k));
        }
    }
}

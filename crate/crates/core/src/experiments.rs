//! Empirical statistics of `floor(p^c)` over primes `p <= x`.

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::caps::{self, Caps};
use crate::error::{LabError, Result};
use crate::exactpow::{floor_pow_u128, frac_scaled_pow_with, RationalExponent, DEFAULT_TOL};
use crate::factor::{factor_signature_with, is_prime, FactorSignature};
use crate::primes::primes_in_with;

/// 6/pi^2, the density of squarefree integers.
pub const SQUAREFREE_DENSITY: f64 = 0.607_927_101_854_026_6;

/// Pairs `(p, floor(p^c))` for primes `p <= x`, in increasing order of `p`.
pub fn members(x: u64, c: RationalExponent) -> Result<Vec<(u64, u128)>> {
    members_with(x, c, &caps::current())
}

pub fn members_with(x: u64, c: RationalExponent, caps: &Caps) -> Result<Vec<(u64, u128)>> {
    let ps = primes_in_with(0, x, caps)?;
    ps.par_iter().map(|&p| Ok((p, floor_pow_u128(p, c, caps)?))).collect()
}

fn signatures(x: u64, c: RationalExponent, caps: &Caps) -> Result<Vec<FactorSignature>> {
    let ms = members_with(x, c, caps)?;
    ms.par_iter().map(|&(_, a)| factor_signature_with(a, caps)).collect()
}

fn ln2x_over_x(x: u64) -> f64 {
    let l = (x as f64).ln();
    l * l / x as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    pub x: u64,
    pub c: RationalExponent,
    #[serde(rename = "R")]
    pub r: u32,
    pub count: u64,
    pub pi_x: u64,
    /// count * ln^2 x / x
    pub eta_hat: f64,
    /// Some member had a prime factor above 2^64 certified only probabilistically.
    pub probabilistic: bool,
}

/// Number of primes `p <= x` with Omega(floor(p^c)) <= R.
pub fn almost_prime_census(x: u64, c: RationalExponent, r: u32) -> Result<CensusReport> {
    almost_prime_census_with(x, c, r, &caps::current())
}

pub fn almost_prime_census_with(x: u64, c: RationalExponent, r: u32, caps: &Caps) -> Result<CensusReport> {
    if r == 0 {
        return Err(LabError::InvalidParameter("R must be at least 1".into()));
    }
    let sigs = signatures(x, c, caps)?;
    let count = sigs.iter().filter(|s| s.omega_big <= r).count() as u64;
    Ok(CensusReport {
        x,
        c,
        r,
        count,
        pi_x: sigs.len() as u64,
        eta_hat: if x < 2 { 0.0 } else { count as f64 * ln2x_over_x(x) },
        probabilistic: sigs.iter().any(|s| s.probabilistic),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SquarefreeReport {
    pub x: u64,
    pub c: RationalExponent,
    pub count: u64,
    pub pi_x: u64,
    pub ratio: f64,
    /// |ratio - 6/pi^2|
    pub deviation: f64,
}

pub fn squarefree_census(x: u64, c: RationalExponent) -> Result<SquarefreeReport> {
    squarefree_census_with(x, c, &caps::current())
}

pub fn squarefree_census_with(x: u64, c: RationalExponent, caps: &Caps) -> Result<SquarefreeReport> {
    let sigs = signatures(x, c, caps)?;
    if sigs.is_empty() {
        return Err(LabError::InvalidParameter(format!("no primes up to {x}")));
    }
    let count = sigs.iter().filter(|s| s.squarefree).count() as u64;
    let ratio = count as f64 / sigs.len() as f64;
    Ok(SquarefreeReport { x, c, count, pi_x: sigs.len() as u64, ratio, deviation: (ratio - SQUAREFREE_DENSITY).abs() })
}

#[derive(Debug, Clone, Serialize)]
pub struct PsPrimeCount {
    pub x: u64,
    pub c: RationalExponent,
    #[serde(rename = "Pi_c")]
    pub pi_c: u64,
    /// x / (c ln^2 x)
    pub balog_ref: f64,
}

/// Number of primes `p <= x` with floor(p^c) prime.
pub fn ps_prime_count(x: u64, c: RationalExponent) -> Result<PsPrimeCount> {
    ps_prime_count_with(x, c, &caps::current())
}

pub fn ps_prime_count_with(x: u64, c: RationalExponent, caps: &Caps) -> Result<PsPrimeCount> {
    let ms = members_with(x, c, caps)?;
    let pi_c = ms.par_iter().filter(|&&(_, a)| is_prime(a)).count() as u64;
    let balog_ref = if x < 2 { 0.0 } else { 1.0 / (c.as_f64() * ln2x_over_x(x)) };
    Ok(PsPrimeCount { x, c, pi_c, balog_ref })
}

/// Counts of floor(p^c) mod d, one bin per residue 0..d.
pub fn residue_histogram(x: u64, c: RationalExponent, d: u64) -> Result<Vec<u64>> {
    residue_histogram_with(x, c, d, &caps::current())
}

pub fn residue_histogram_with(x: u64, c: RationalExponent, d: u64, caps: &Caps) -> Result<Vec<u64>> {
    if d == 0 {
        return Err(LabError::InvalidParameter("d must be at least 1".into()));
    }
    if d > 1 << 26 {
        return Err(LabError::RangeTooLarge { what: "histogram bins", value: d as u128, cap: 1 << 26 });
    }
    let ms = members_with(x, c, caps)?;
    Ok(histogram(&ms, d))
}

fn histogram(ms: &[(u64, u128)], d: u64) -> Vec<u64> {
    let mut bins = vec![0u64; d as usize];
    for &(_, a) in ms {
        bins[(a % d as u128) as usize] += 1;
    }
    bins
}

/// Expected share f(d)/d of each residue class mod d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FModel {
    /// f(d) = 1: every residue class gets N/d.
    #[default]
    Constant1,
    /// f(d) = d/phi(d): reduced classes get N/phi(d).
    DOverPhi,
}

impl FModel {
    pub fn f(self, d: u64) -> f64 {
        match self {
            FModel::Constant1 => 1.0,
            FModel::DOverPhi => d as f64 / euler_phi(d) as f64,
        }
    }
}

impl std::str::FromStr for FModel {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant-1" | "1" => Ok(FModel::Constant1),
            "d-over-phi" => Ok(FModel::DOverPhi),
            _ => Err(LabError::InvalidParameter(format!("unknown f model {s:?}"))),
        }
    }
}

fn euler_phi(mut n: u64) -> u64 {
    let mut phi = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelReport {
    pub x: u64,
    pub c: RationalExponent,
    #[serde(rename = "D")]
    pub d: u64,
    pub f_model: FModel,
    /// The max ranges over every residue rather than the reduced ones.
    pub all_residues: bool,
    #[serde(rename = "E")]
    pub e: f64,
    /// E log^2 N / N with N = pi(x)
    pub normalized: f64,
}

/// sum over d <= D of max over s (gcd(s, d) = 1) of |#{a = s mod d} - f(d) N / d|.
pub fn level_error(x: u64, c: RationalExponent, big_d: u64, f_model: FModel, all_residues: bool) -> Result<LevelReport> {
    level_error_with(x, c, big_d, f_model, all_residues, &caps::current())
}

pub fn level_error_with(
    x: u64,
    c: RationalExponent,
    big_d: u64,
    f_model: FModel,
    all_residues: bool,
    caps: &Caps,
) -> Result<LevelReport> {
    if big_d == 0 {
        return Err(LabError::InvalidParameter("D must be at least 1".into()));
    }
    if big_d > 1 << 16 {
        return Err(LabError::RangeTooLarge { what: "level D", value: big_d as u128, cap: 1 << 16 });
    }
    let ms = members_with(x, c, caps)?;
    let n = ms.len() as f64;
    let terms: Vec<f64> = (1..=big_d)
        .into_par_iter()
        .map(|d| {
            let bins = histogram(&ms, d);
            let expect = f_model.f(d) * n / d as f64;
            bins.iter()
                .enumerate()
                .filter(|&(s, _)| all_residues || (s as u64).gcd(&d) == 1)
                .map(|(_, &k)| (k as f64 - expect).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let e: f64 = terms.iter().sum();
    let normalized = if n >= 2.0 { e * n.ln().powi(2) / n } else { 0.0 };
    Ok(LevelReport { x, c, d: big_d, f_model, all_residues, e, normalized })
}

/// Star discrepancy of {h p^c / d} over primes p <= x.
pub fn star_discrepancy(x: u64, c: RationalExponent, h: u64, d: u64) -> Result<f64> {
    star_discrepancy_with(x, c, h, d, &caps::current())
}

pub fn star_discrepancy_with(x: u64, c: RationalExponent, h: u64, d: u64, caps: &Caps) -> Result<f64> {
    let ps = primes_in_with(0, x, caps)?;
    let pts: Vec<f64> = ps
        .par_iter()
        .map(|&p| Ok(frac_scaled_pow_with(p, c, h, d, DEFAULT_TOL, caps)?.value))
        .collect::<Result<_>>()?;
    star_discrepancy_of(&pts)
}

/// D*_N = max_i max(i/N - u_(i), u_(i) - (i-1)/N) over the sorted sample.
pub fn star_discrepancy_of(points: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(LabError::InvalidParameter("empty sample".into()));
    }
    if points.iter().any(|u| !(0.0..1.0).contains(u)) {
        return Err(LabError::InvalidParameter("points must lie in [0, 1)".into()));
    }
    let mut u = points.to_vec();
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    Ok(u.iter()
        .enumerate()
        .map(|(i, &v)| ((i + 1) as f64 / n - v).max(v - i as f64 / n))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpow::parse_exponent;

    fn c(s: &str) -> RationalExponent {
        parse_exponent(s).unwrap()
    }

    #[test]
    fn small_members() {
        let ms: Vec<u128> = members(20, c("3/2")).unwrap().into_iter().map(|m| m.1).collect();
        assert_eq!(ms, vec![2, 5, 11, 18, 36, 46, 70, 82]);
    }

    #[test]
    fn census_small() {
        assert_eq!(almost_prime_census(20, c("3/2"), 1).unwrap().count, 3);
        let all = almost_prime_census(20, c("3/2"), 50).unwrap();
        assert_eq!((all.count, all.pi_x), (8, 8));
        assert!(almost_prime_census(20, c("3/2"), 0).is_err());
    }

    #[test]
    fn census_monotone() {
        // independent factorization of every member
        let want = [35, 111, 183, 236, 268, 286, 296];
        let mut prev = 0;
        for r in 1..8 {
            let k = almost_prime_census(2000, c("7/5"), r).unwrap().count;
            assert!(k >= prev);
            assert_eq!(k, want[r as usize - 1]);
            prev = k;
        }
        assert_eq!(almost_prime_census(2000, c("7/5"), 127).unwrap().count, 303);
    }

    #[test]
    fn squarefree_small() {
        let r = squarefree_census(20, c("3/2")).unwrap();
        assert_eq!(r.count, 6);
        assert_eq!(r.ratio, 0.75);
        assert!((SQUAREFREE_DENSITY - 6.0 / std::f64::consts::PI.powi(2)).abs() < 1e-16);
    }

    #[test]
    fn ps_primes_small() {
        assert_eq!(ps_prime_count(10, c("3/2")).unwrap().pi_c, 3);
        assert_eq!(ps_prime_count(2, c("3/2")).unwrap().pi_c, 1);
    }

    #[test]
    fn histograms() {
        assert_eq!(residue_histogram(20, c("3/2"), 1).unwrap(), vec![8]);
        assert_eq!(residue_histogram(20, c("3/2"), 2).unwrap(), vec![6, 2]);
        assert_eq!(residue_histogram(20, c("3/2"), 5).unwrap().iter().sum::<u64>(), 8);
    }

    #[test]
    fn level_errors() {
        let r = level_error(20, c("3/2"), 1, FModel::Constant1, false).unwrap();
        assert_eq!(r.e, 0.0);
        let r = level_error(20, c("3/2"), 2, FModel::Constant1, false).unwrap();
        assert_eq!(r.e, 2.0);
        // all residues at d = 2: max(|6 - 4|, |2 - 4|) = 2 as well
        let r = level_error(20, c("3/2"), 2, FModel::Constant1, true).unwrap();
        assert_eq!(r.e, 2.0);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(FModel::DOverPhi.f(6), 3.0);
    }

    #[test]
    fn discrepancy_formula() {
        assert_eq!(star_discrepancy_of(&[0.0]).unwrap(), 1.0);
        let n = 64;
        let grid: Vec<f64> = (0..n).map(|k| k as f64 / n as f64).collect();
        assert_eq!(star_discrepancy_of(&grid).unwrap(), 1.0 / n as f64);
        let mut rev = grid.clone();
        rev.reverse();
        assert_eq!(star_discrepancy_of(&rev).unwrap(), 1.0 / n as f64);
        assert!(star_discrepancy_of(&[]).is_err());
        let d = star_discrepancy(1000, c("3/2"), 1, 7).unwrap();
        assert!(d > 0.0 && d <= 1.0);
    }

    #[test]
    fn overflow_is_reported() {
        // 97^20 > 2^127
        assert!(matches!(members(100, c("41/2")), Err(LabError::Overflow(_))));
    }
}

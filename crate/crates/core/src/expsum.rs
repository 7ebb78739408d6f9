//! Direct evaluation of exponential sums `sum w_i e(theta_i)`, `e(t) = exp(2 pi i t)`.
//!
//! Phases come from certified fractional parts. Terms are summed in fixed
//! chunks of [`CHUNK`] with Neumaier compensation and the chunk totals are
//! combined in order, so the result does not depend on the thread count.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::json;

use crate::caps::{self, Caps};
use crate::constants::regime_constants;
use crate::error::{LabError, Result};
use crate::exactpow::{
    floor_rational_power_with, frac_phase_with, frac_scaled_pow_with, RationalExponent, PHASE_TOL, Q64,
};
use crate::primes::{mangoldt_table_with, primes_in_with};

pub const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SumKind {
    Weyl,
    Prime,
    Trilinear,
    Triple,
}

fn complex_pair<S: Serializer>(v: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [v.re, v.im].serialize(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct SumEval {
    pub kind: SumKind,
    pub params: serde_json::Value,
    #[serde(serialize_with = "complex_pair")]
    pub value: Complex64,
    /// Sum of |weights|; the term count for unit weights.
    pub trivial_bound: f64,
    /// The analytic upper bound, without its implied constant.
    pub analytic_bound: Option<f64>,
    /// |value| / analytic_bound
    pub ratio: Option<f64>,
    /// Whether the hypothesis of the analytic bound is met, when it has one.
    pub bound_hypothesis: Option<bool>,
}

impl SumEval {
    fn new(kind: SumKind, params: serde_json::Value, value: Complex64, trivial_bound: f64, bound: Option<f64>) -> Self {
        let ratio = bound.filter(|b| *b > 0.0).map(|b| value.norm() / b);
        SumEval { kind, params, value, trivial_bound, analytic_bound: bound, ratio, bound_hypothesis: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Sum the terms last to first.
    pub reverse: bool,
    /// Per-term phase tolerance.
    pub phase_tol: f64,
    /// Outer-loop order of the triple sum: d outside h.
    pub swap_loops: bool,
    /// epsilon in rho(k, epsilon).
    pub epsilon: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { reverse: false, phase_tol: PHASE_TOL, swap_loops: false, epsilon: 0.0 }
    }
}

/// Neumaier's compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ComplexAcc {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexAcc {
    fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    fn total(&self) -> Complex64 {
        Complex64::new(self.re.total(), self.im.total())
    }
}

/// e(theta)
pub fn e(theta: f64) -> Complex64 {
    let a = std::f64::consts::TAU * theta;
    Complex64::new(a.cos(), a.sin())
}

/// sum over i < n of weight(i) e(phase(i)); term(i) returns None for a zero weight.
fn sum_terms<F>(n: usize, reverse: bool, term: F) -> Result<Complex64>
where
    F: Fn(usize) -> Result<Option<(f64, f64)>> + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<Complex64> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let idx = if reverse { chunks - 1 - k } else { k };
            let lo = idx * CHUNK;
            let hi = (lo + CHUNK).min(n);
            let mut acc = ComplexAcc::default();
            let mut visit = |i: usize| -> Result<()> {
                if let Some((w, theta)) = term(i)? {
                    acc.add(e(theta) * w);
                }
                Ok(())
            };
            if reverse {
                for i in (lo..hi).rev() {
                    visit(i)?;
                }
            } else {
                for i in lo..hi {
                    visit(i)?;
                }
            }
            Ok(acc.total())
        })
        .collect::<Result<_>>()?;
    let mut acc = ComplexAcc::default();
    for z in partial {
        acc.add(z);
    }
    Ok(acc.total())
}

fn big(q: Q64) -> BigRational {
    BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

fn qf(q: Q64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

fn qs(q: Q64) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// k = floor(c + Delta/Theta) + 1.
pub fn k_of(c: RationalExponent, theta: Q64, delta: Q64) -> Result<u64> {
    if *theta.numer() <= 0 || *delta.numer() <= 0 {
        return Err(LabError::InvalidParameter("Theta and Delta must be positive".into()));
    }
    let v = big(c.as_q64()) + big(delta) / big(theta);
    (v.floor().to_integer() + 1u32)
        .to_u64()
        .ok_or_else(|| LabError::OutOfRange("k does not fit in u64".into()))
}

/// rho = (k - 2 - eps) / (k (k+1) (2k-1)).
pub fn rho_of(k: u64, epsilon: f64) -> Result<f64> {
    if k < 3 {
        return Err(LabError::InvalidParameter(format!("k = {k} < 3")));
    }
    if !(epsilon >= 0.0) {
        return Err(LabError::InvalidParameter("epsilon must be non-negative".into()));
    }
    let kf = k as f64;
    if epsilon >= kf - 2.0 {
        return Err(LabError::NonPositiveRho { k, epsilon });
    }
    Ok((kf - 2.0 - epsilon) / (kf * (kf + 1.0) * (2.0 * kf - 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VinogradovParams {
    pub c: RationalExponent,
    #[serde(serialize_with = "q_string")]
    pub theta: Q64,
    #[serde(serialize_with = "q_string")]
    pub delta: Q64,
    pub k: u64,
    pub rho: f64,
    pub epsilon: f64,
}

fn q_string<S: Serializer>(q: &Q64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&qs(*q))
}

impl VinogradovParams {
    pub fn new(c: RationalExponent, theta: Q64, delta: Q64, epsilon: f64) -> Result<Self> {
        let k = k_of(c, theta, delta)?;
        let rho = rho_of(k, epsilon)?;
        Ok(VinogradovParams { c, theta, delta, k, rho, epsilon })
    }
}

/// S(N) = sum over z in (M, 2M] of e(z^c N^Delta), M = floor(N^Theta).
pub fn weyl_sum(c: RationalExponent, theta: Q64, delta: Q64, n: u64, opts: &EvalOptions) -> Result<SumEval> {
    weyl_sum_with(c, theta, delta, n, opts, &caps::current())
}

pub fn weyl_sum_with(
    c: RationalExponent,
    theta: Q64,
    delta: Q64,
    n: u64,
    opts: &EvalOptions,
    caps: &Caps,
) -> Result<SumEval> {
    if n < 2 {
        return Err(LabError::InvalidParameter("N must be at least 2".into()));
    }
    let vp = VinogradovParams::new(c, theta, delta, opts.epsilon)?;
    let m = floor_rational_power_with(n, theta, caps)?;
    let m = m.to_u64().filter(|&m| m <= caps.sum_terms).ok_or(LabError::RangeTooLarge {
        what: "Weyl sum terms",
        value: m.to_u128().unwrap_or(u128::MAX),
        cap: caps.sum_terms as u128,
    })?;
    let value = sum_terms(m as usize, opts.reverse, |i| {
        let z = m + 1 + i as u64;
        Ok(Some((1.0, frac_phase_with(z, c, n, delta, opts.phase_tol, caps)?.value)))
    })?;
    let bound = (n as f64).powf(qf(theta) * (1.0 - vp.rho));
    let params = json!({
        "c": c, "Theta": qs(theta), "Delta": qs(delta), "N": n,
        "k": vp.k, "rho": vp.rho, "epsilon": vp.epsilon, "terms": m,
    });
    Ok(SumEval::new(SumKind::Weyl, params, value, m as f64, Some(bound)))
}

/// Phase {h n^c / d} for signed h.
fn signed_phase(n: u64, c: RationalExponent, h: i64, d: u64, tol: f64, caps: &Caps) -> Result<f64> {
    let f = frac_scaled_pow_with(n, c, h.unsigned_abs(), d, tol, caps)?.value;
    Ok(if h < 0 { -f } else { f })
}

/// sum over primes p <= x of e(h p^c / d).
pub fn prime_expsum(x: u64, c: RationalExponent, h: i64, d: u64, opts: &EvalOptions) -> Result<SumEval> {
    prime_expsum_with(x, c, h, d, opts, &caps::current())
}

pub fn prime_expsum_with(
    x: u64,
    c: RationalExponent,
    h: i64,
    d: u64,
    opts: &EvalOptions,
    caps: &Caps,
) -> Result<SumEval> {
    if d == 0 {
        return Err(LabError::InvalidParameter("d must be at least 1".into()));
    }
    let ps = primes_in_with(0, x, caps)?;
    let value = sum_terms(ps.len(), opts.reverse, |i| Ok(Some((1.0, signed_phase(ps[i], c, h, d, opts.phase_tol, caps)?))))?;
    let cq = big(c.as_q64());
    let bound = if cq >= BigRational::new(11.into(), 5.into()) {
        let sigma = regime_constants(&cq)?.sigma.value();
        Some((x as f64).powf(1.0 - sigma))
    } else {
        None
    };
    let params = json!({ "x": x, "c": c, "h": h, "d": d, "terms": ps.len() });
    Ok(SumEval::new(SumKind::Prime, params, value, ps.len() as f64, bound))
}

/// Coefficients of the trilinear sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum Weights {
    /// c_d = a_m = b_l = 1.
    Unit,
    /// c_d = a_m = 1 and b_l = 1 exactly for lo <= l <= hi.
    IntervalCharacteristic { lo: u64, hi: u64 },
    /// Independent uniform signs from ChaCha8 seeded with `seed`, drawn
    /// for c_d, then a_m, then b_l, each in increasing index order.
    RandomSigns { seed: u64 },
}

fn weight_vectors(w: Weights, d: u64, m: u64, l: u64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let ones = |k: u64| vec![1.0; k as usize];
    match w {
        Weights::Unit => (ones(d), ones(m), ones(l)),
        Weights::IntervalCharacteristic { lo, hi } => {
            let b = (l + 1..=2 * l).map(|v| if lo <= v && v <= hi { 1.0 } else { 0.0 }).collect();
            (ones(d), ones(m), b)
        }
        Weights::RandomSigns { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut signs = |k: u64| -> Vec<f64> { (0..k).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect() };
            let cd = signs(d);
            let am = signs(m);
            let bl = signs(l);
            (cd, am, bl)
        }
    }
}

/// DLM ((DL)^(-1/2) + (X / (D L M^2))^(1/6)) log(2DL), with whether X >= DL.
pub fn trilinear_bound(d: f64, l: f64, m: f64, x: f64) -> (f64, bool) {
    let dl = d * l;
    let v = dl * m * (dl.powf(-0.5) + (x / (dl * m * m)).powf(1.0 / 6.0)) * (2.0 * dl).ln();
    (v, x >= dl)
}

/// sum over d ~ D, m ~ M, l ~ L of c_d a_m b_l e(h l^c m^c / d).
pub fn trilinear_sum(
    big_d: u64,
    big_m: u64,
    big_l: u64,
    h: u64,
    c: RationalExponent,
    weights: Weights,
    opts: &EvalOptions,
) -> Result<SumEval> {
    trilinear_sum_with(big_d, big_m, big_l, h, c, weights, opts, &caps::current())
}

#[allow(clippy::too_many_arguments)]
pub fn trilinear_sum_with(
    big_d: u64,
    big_m: u64,
    big_l: u64,
    h: u64,
    c: RationalExponent,
    weights: Weights,
    opts: &EvalOptions,
    caps: &Caps,
) -> Result<SumEval> {
    if big_d == 0 || big_m == 0 || big_l == 0 {
        return Err(LabError::InvalidParameter("D, M, L must be at least 1".into()));
    }
    let terms = big_d as u128 * big_m as u128 * big_l as u128;
    caps.check("trilinear terms", terms, caps.sum_terms)?;
    if (2 * big_l as u128) * (2 * big_m as u128) > u64::MAX as u128 {
        return Err(LabError::Overflow("l m exceeds 64 bits".into()));
    }
    let (cd, am, bl) = weight_vectors(weights, big_d, big_m, big_l);
    let (nm, nl) = (big_m as usize, big_l as usize);
    let value = sum_terms(terms as usize, opts.reverse, |i| {
        let li = i % nl;
        let mi = (i / nl) % nm;
        let di = i / (nl * nm);
        let w = cd[di] * am[mi] * bl[li];
        if w == 0.0 {
            return Ok(None);
        }
        let n = (big_l + 1 + li as u64) * (big_m + 1 + mi as u64);
        let d = big_d + 1 + di as u64;
        Ok(Some((w, frac_scaled_pow_with(n, c, h, d, opts.phase_tol, caps)?.value)))
    })?;
    let trivial = cd.iter().map(|v| v.abs()).sum::<f64>()
        * am.iter().map(|v| v.abs()).sum::<f64>()
        * bl.iter().map(|v| v.abs()).sum::<f64>();
    let cf = c.as_f64();
    let x = h as f64 / big_d as f64 * (big_l as f64).powf(cf) * (big_m as f64).powf(cf);
    let (bound, ok) = trilinear_bound(big_d as f64, big_l as f64, big_m as f64, x);
    let params = json!({
        "D": big_d, "M": big_m, "L": big_l, "h": h, "c": c, "weights": weights, "X": x,
    });
    let mut ev = SumEval::new(SumKind::Trilinear, params, value, trivial, Some(bound));
    ev.bound_hypothesis = Some(ok);
    Ok(ev)
}

/// The H = D log^3 x choice, rounded up.
pub fn default_h(x: u64, big_d: u64) -> u64 {
    (big_d as f64 * (x as f64).ln().powi(3)).ceil() as u64
}

/// sum over n ~ x of Lambda(n) e(h n^c / d), for signed h.
pub fn triple_sum_inner(x: u64, h: i64, d: u64, c: RationalExponent, opts: &EvalOptions) -> Result<Complex64> {
    let caps = caps::current();
    let table = mangoldt_table_with(2 * x, &caps)?;
    inner(table.range(x, 2 * x), h, d, c, opts, &caps)
}

fn inner(entries: &[(u64, u64)], h: i64, d: u64, c: RationalExponent, opts: &EvalOptions, caps: &Caps) -> Result<Complex64> {
    sum_terms(entries.len(), opts.reverse, |i| {
        let (n, p) = entries[i];
        Ok(Some(((p as f64).ln(), signed_phase(n, c, h, d, opts.phase_tol, caps)?)))
    })
}

/// sum over 1 <= h <= H and d ~ D of |sum over n ~ x of Lambda(n) e(h n^c / d)|.
pub fn triple_sum(x: u64, big_d: u64, big_h: u64, c: RationalExponent, opts: &EvalOptions) -> Result<SumEval> {
    triple_sum_with(x, big_d, big_h, c, opts, &caps::current())
}

pub fn triple_sum_with(
    x: u64,
    big_d: u64,
    big_h: u64,
    c: RationalExponent,
    opts: &EvalOptions,
    caps: &Caps,
) -> Result<SumEval> {
    if x < 2 || big_d == 0 {
        return Err(LabError::InvalidParameter("need x >= 2 and D >= 1".into()));
    }
    caps.check("triple-sum evaluations", big_h as u128 * big_d as u128 * x as u128, caps.triple_terms)?;
    let table = mangoldt_table_with(2 * x, caps)?;
    let entries = table.range(x, 2 * x);
    let mut pairs: Vec<(u64, u64)> = Vec::with_capacity((big_h * big_d) as usize);
    if opts.swap_loops {
        for d in big_d + 1..=2 * big_d {
            for h in 1..=big_h {
                pairs.push((h, d));
            }
        }
    } else {
        for h in 1..=big_h {
            for d in big_d + 1..=2 * big_d {
                pairs.push((h, d));
            }
        }
    }
    let mut acc = Neumaier::default();
    for (h, d) in pairs {
        acc.add(inner(entries, h as i64, d, c, opts, caps)?.norm());
    }
    let mass: f64 = {
        let mut m = Neumaier::default();
        for &(_, p) in entries {
            m.add((p as f64).ln());
        }
        m.total()
    };
    let lx = (x as f64).ln();
    let bound = big_d as f64 * x as f64 / lx.powi(3);
    let params = json!({ "x": x, "D": big_d, "H": big_h, "c": c });
    Ok(SumEval::new(
        SumKind::Triple,
        params,
        Complex64::new(acc.total(), 0.0),
        big_h as f64 * big_d as f64 * mass,
        Some(bound),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpow::parse_exponent;
    use num_rational::Ratio;

    fn c(s: &str) -> RationalExponent {
        parse_exponent(s).unwrap()
    }

    fn q(n: i64, d: i64) -> Q64 {
        Ratio::new(n, d)
    }

    #[test]
    fn k_and_rho() {
        assert_eq!(k_of(c("5/2"), q(1, 1), q(3, 10)).unwrap(), 3);
        assert_eq!(k_of(c("11/5"), q(1, 2), q(1, 1)).unwrap(), 5);
        assert_eq!(k_of(c("3/2"), q(1, 1), q(1, 2)).unwrap(), 3);
        assert_eq!(k_of(c("3/2"), q(2, 1), q(1, 1)).unwrap(), 3);
        assert!((rho_of(3, 0.0).unwrap() - 1.0 / 60.0).abs() < 1e-17);
        assert!((rho_of(4, 0.0).unwrap() - 1.0 / 70.0).abs() < 1e-17);
        assert_eq!(rho_of(3, 1.0), Err(LabError::NonPositiveRho { k: 3, epsilon: 1.0 }));
        let rs: Vec<f64> = (3..40).map(|k| rho_of(k, 0.0).unwrap()).collect();
        assert!(rs.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn homogeneous_k() {
        for t in 1..20 {
            assert_eq!(k_of(c("7/3"), q(t, 3), q(2 * t, 5)).unwrap(), k_of(c("7/3"), q(1, 3), q(2, 5)).unwrap());
        }
    }

    #[test]
    fn neumaier_recovers_cancellation() {
        let mut a = Neumaier::default();
        for x in [1.0, 1e100, 1.0, -1e100] {
            a.add(x);
        }
        assert_eq!(a.total(), 2.0);
    }

    #[test]
    fn single_terms() {
        let o = EvalOptions::default();
        let w = weyl_sum(c("5/2"), q(1, 1), q(3, 10), 2, &o);
        // M = 2 gives z in {3, 4}, still k = 3
        assert!(w.is_ok());
        let p = prime_expsum(2, c("3/2"), 1, 1, &o).unwrap();
        assert!((p.value.norm() - 1.0).abs() < 1e-14);
        let t = trilinear_sum(1, 1, 1, 1, c("3/2"), Weights::Unit, &o).unwrap();
        assert!((t.value.norm() - 1.0).abs() < 1e-14);
        assert_eq!(t.trivial_bound, 1.0);
    }

    #[test]
    fn weyl_one_term() {
        // N^(1/2) with N = 3 gives M = 1: one term z = 2
        let w = weyl_sum(c("5/2"), q(1, 2), q(1, 1), 3, &EvalOptions::default()).unwrap();
        assert!((w.value.norm() - 1.0).abs() < 1e-14);
        assert_eq!(w.trivial_bound, 1.0);
    }

    #[test]
    fn reverse_agrees() {
        let f = EvalOptions::default();
        let r = EvalOptions { reverse: true, ..f };
        let a = weyl_sum(c("5/2"), q(1, 1), q(3, 10), 10_000, &f).unwrap();
        let b = weyl_sum(c("5/2"), q(1, 1), q(3, 10), 10_000, &r).unwrap();
        assert!((a.value - b.value).norm() <= 1e-9 * a.value.norm().max(1.0));
        assert!(a.value.norm() <= a.trivial_bound + 1e-6);
    }

    #[test]
    fn prime_sum_conjugates() {
        let o = EvalOptions::default();
        let a = prime_expsum(2000, c("11/5"), 3, 7, &o).unwrap();
        let b = prime_expsum(2000, c("11/5"), -3, 7, &o).unwrap();
        assert!((a.value - b.value.conj()).norm() < 1e-12);
        assert!(a.analytic_bound.is_some());
        assert!(prime_expsum(2000, c("3/2"), 1, 1, &o).unwrap().analytic_bound.is_none());
        let z = prime_expsum(100, c("3/2"), 0, 1, &o).unwrap();
        assert_eq!(z.value, Complex64::new(25.0, 0.0));
    }

    #[test]
    fn trilinear_bound_values() {
        let (v, _) = trilinear_bound(1.0, 1.0, 1.0, 1.0);
        assert!((v - 1.386_294_361_1).abs() < 1e-10);
        assert!(trilinear_bound(2.0, 2.0, 2.0, 64.0).0 >= trilinear_bound(2.0, 2.0, 2.0, 1.0).0);
        let t = trilinear_sum(2, 8, 4, 1, c("3/2"), Weights::Unit, &EvalOptions::default()).unwrap();
        let x = t.params["X"].as_f64().unwrap();
        assert!((x - 0.5 * 8.0 * 512f64.sqrt()).abs() < 1e-9);
        assert_eq!(t.bound_hypothesis, Some(true));
    }

    #[test]
    fn random_weights_are_pinned() {
        let (a, b, l) = weight_vectors(Weights::RandomSigns { seed: 42 }, 3, 4, 5);
        let (a2, b2, l2) = weight_vectors(Weights::RandomSigns { seed: 42 }, 3, 4, 5);
        assert_eq!((a.clone(), b.clone(), l.clone()), (a2, b2, l2));
        assert!(a.iter().chain(&b).chain(&l).all(|v| v.abs() == 1.0));
        let (_, _, l) = weight_vectors(Weights::IntervalCharacteristic { lo: 6, hi: 7 }, 1, 1, 5);
        assert_eq!(l, vec![1.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn triple_sum_basics() {
        let o = EvalOptions::default();
        let z = triple_sum(100, 2, 0, c("3/2"), &o).unwrap();
        assert_eq!(z.value, Complex64::new(0.0, 0.0));
        let a = triple_sum(100, 2, 2, c("3/2"), &o).unwrap();
        let b = triple_sum(100, 2, 2, c("3/2"), &EvalOptions { swap_loops: true, ..o }).unwrap();
        assert!((a.value.re - b.value.re).abs() <= 1e-9 * a.value.re);
        assert!(a.value.re <= a.trivial_bound + 1e-6);
        let i1 = triple_sum_inner(100, 2, 3, c("3/2"), &o).unwrap();
        let i2 = triple_sum_inner(100, -2, 3, c("3/2"), &o).unwrap();
        assert!((i1 - i2.conj()).norm() < 1e-12);
        assert_eq!(default_h(100, 1), (100f64.ln().powi(3)).ceil() as u64);
    }
}

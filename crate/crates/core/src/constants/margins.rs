//! Grid check of Theta rho against the Type I and Type II targets.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use super::regime::{f1_at, f2_at, regime_constants};
use super::{exact, q, InequalityReport};
use crate::error::{LabError, Result};
use crate::json::rational_to_f64;

pub const DEFAULT_EPSILON: f64 = 1e-3;
pub const DEFAULT_GRID: usize = 100;

#[derive(Debug, Clone, Serialize)]
pub struct WindowReport {
    pub window: &'static str,
    pub theta_range: [f64; 2],
    pub target: f64,
    pub points: usize,
    pub worst_margin: f64,
    pub worst_theta: f64,
    pub worst_delta: f64,
    pub worst_k: u64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MarginReport {
    pub c: f64,
    pub epsilon: f64,
    pub sigma: f64,
    pub beta: f64,
    pub type1: WindowReport,
    pub type2: WindowReport,
    /// f1(1/2 - beta) >= sigma + eps and min(f2(2/3), f2(1 - 2 beta)) >= 2 sigma + 3 eps.
    pub minorants: Vec<InequalityReport>,
    pub all_hold: bool,
}

/// k = floor(c + Delta/Theta) + 1, exactly.
fn k_exact(c: &BigRational, theta: &BigRational, delta: &BigRational) -> u64 {
    let v = c + delta / theta;
    (v.floor().to_integer() + 1u32).to_u64().expect("k fits in u64")
}

#[allow(clippy::too_many_arguments)]
fn scan(
    window: &'static str,
    c: &BigRational,
    eps: f64,
    target: &BigRational,
    theta_lo: &BigRational,
    theta_hi: &BigRational,
    delta: impl Fn(&BigRational) -> (BigRational, BigRational),
    grid: usize,
) -> WindowReport {
    let target_f = rational_to_f64(target);
    let cf = rational_to_f64(c);
    let n = grid as i64;
    let mut worst = (f64::INFINITY, 0.0, 0.0, 0u64);
    let mut points = 0;
    for i in 0..=n {
        let theta = theta_lo + (theta_hi - theta_lo) * q(i, n);
        let tf = rational_to_f64(&theta);
        let (dlo, dhi) = delta(&theta);
        let (dlo_f, dhi_f) = (rational_to_f64(&dlo), rational_to_f64(&dhi));
        for j in 0..=n {
            let df = dlo_f + (dhi_f - dlo_f) * (j as f64 / n as f64);
            let v = cf + df / tf;
            // exact k only where rounding could move the floor
            let k = if (v - v.round()).abs() < 1e-9 || df.abs() < 1e-9 {
                let d = &dlo + (&dhi - &dlo) * q(j, n);
                if !d.is_positive() {
                    continue;
                }
                k_exact(c, &theta, &d)
            } else if df <= 0.0 {
                continue;
            } else {
                v.floor() as u64 + 1
            };
            points += 1;
            let kf = k as f64;
            let rho = (kf - 2.0 - eps) / (kf * (kf + 1.0) * (2.0 * kf - 1.0));
            let margin = if k < 3 { f64::NEG_INFINITY } else { tf * rho - target_f };
            if margin < worst.0 {
                worst = (margin, tf, df, k);
            }
        }
    }
    WindowReport {
        window,
        theta_range: [rational_to_f64(theta_lo), rational_to_f64(theta_hi)],
        target: target_f,
        points,
        worst_margin: worst.0,
        worst_theta: worst.1,
        worst_delta: worst.2,
        worst_k: worst.3,
        holds: worst.0 >= 0.0,
    }
}

/// Checks Theta rho against sigma + eps over the Type I window and against
/// 2 sigma + 3 eps over the Type II window on a (grid+1)^2 lattice.
pub fn margin_verify(c: &BigRational, epsilon: f64, grid: usize) -> Result<MarginReport> {
    if *c < q(11, 5) {
        return Err(LabError::OutOfRange("c must be at least 11/5".into()));
    }
    if !(epsilon > 0.0) {
        return Err(LabError::OutOfRange("epsilon must be positive".into()));
    }
    if grid == 0 {
        return Err(LabError::InvalidParameter("grid must be positive".into()));
    }
    let eps = exact(epsilon)?;
    let k = regime_constants(c)?;
    let sigma = k.sigma.0.clone();
    let beta = k.beta.0.clone();
    let one = BigRational::one();
    let two = q(2, 1);
    let three = q(3, 1);

    let t1 = &sigma + &eps;
    let type1 = scan(
        "type1",
        c,
        epsilon,
        &t1,
        &(q(1, 2) - &beta),
        &one,
        |theta| {
            let mid = (&one - theta) * c;
            (&mid - &sigma, &mid + &sigma)
        },
        grid,
    );
    let t2 = &two * &sigma + &three * &eps;
    let cm1 = c - &one;
    let type2 = scan(
        "type2",
        c,
        epsilon,
        &t2,
        &q(2, 3),
        &(&one - &two * &beta),
        |theta| {
            let mid = (&one - theta) * &cm1;
            (&mid - &sigma, &mid + &three * &sigma + &two * &eps)
        },
        grid,
    );

    let f1 = f1_at(&(q(1, 2) - &beta), c, &eps);
    let f2a = f2_at(&q(2, 3), c, &eps);
    let f2b = f2_at(&(&one - &two * &beta), c, &eps);
    let f2 = if f2a < f2b { f2a } else { f2b };
    let minorants = vec![
        InequalityReport::greater("type1-minorant", &f1, &t1),
        InequalityReport::greater("type2-minorant", &f2, &t2),
    ];
    let all_hold = type1.holds && type2.holds && minorants.iter().all(|m| m.holds);
    Ok(MarginReport {
        c: rational_to_f64(c),
        epsilon,
        sigma: k.sigma.value(),
        beta: k.beta.value(),
        type1,
        type2,
        minorants,
        all_hold,
    })
}

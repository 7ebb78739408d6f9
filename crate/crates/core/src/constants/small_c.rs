//! The eleven linear inequalities in (c, theta, alpha) that drive the small-c
//! almost-prime result, and the feasible region they cut out.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{exact, greaves_delta_exact, q, strictness, Exact, InequalityReport};
use crate::error::{LabError, Result};
use crate::json::rational_to_f64;

/// Stand-in for kappa -> 0+ when searching for feasible c.
pub const KAPPA_GUARD: f64 = 1e-9;

/// alpha is max(1/20, theta + kappa).
fn alpha_floor() -> BigRational {
    q(1, 20)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityParams {
    pub c: BigRational,
    pub theta: BigRational,
    pub kappa: BigRational,
}

impl InequalityParams {
    pub fn new(c: BigRational, theta: BigRational, kappa: BigRational) -> Result<Self> {
        if !theta.is_positive() {
            return Err(LabError::InvalidParameter("theta must be positive".into()));
        }
        if !kappa.is_positive() {
            return Err(LabError::InvalidParameter("kappa must be positive".into()));
        }
        Ok(InequalityParams { c, theta, kappa })
    }

    pub fn from_f64(c: f64, theta: f64, kappa: f64) -> Result<Self> {
        Self::new(exact(c)?, exact(theta)?, exact(kappa)?)
    }

    pub fn alpha(&self) -> BigRational {
        let t = &self.theta + &self.kappa;
        if t > alpha_floor() {
            t
        } else {
            alpha_floor()
        }
    }
}

impl Serialize for InequalityParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("InequalityParams", 4)?;
        st.serialize_field("c", &Exact(self.c.clone()))?;
        st.serialize_field("theta", &Exact(self.theta.clone()))?;
        st.serialize_field("kappa", &Exact(self.kappa.clone()))?;
        st.serialize_field("alpha", &Exact(self.alpha()))?;
        st.end()
    }
}

/// `lhs(1, c, theta, alpha) < rhs(1, c)` with lhs = a0 + a1 c + a2 theta + a3 alpha.
struct Row {
    id: &'static str,
    lhs: [(i64, i64); 4],
    rhs: [(i64, i64); 2],
}

const ROWS: [Row; 11] = [
    Row { id: "i", lhs: [(0, 1), (0, 1), (2, 1), (2, 1)], rhs: [(0, 1), (1, 1)] },
    Row { id: "ii", lhs: [(0, 1), (1, 1), (5, 1), (2, 1)], rhs: [(2, 1), (0, 1)] },
    Row { id: "iii", lhs: [(365, 3), (32, 1), (147, 1), (0, 1)], rhs: [(174, 1), (0, 1)] },
    Row { id: "iv", lhs: [(8, 3), (1, 1), (2, 1), (0, 1)], rhs: [(4, 1), (0, 1)] },
    Row { id: "v", lhs: [(2, 1), (1, 1), (4, 1), (0, 1)], rhs: [(4, 1), (0, 1)] },
    Row { id: "vi", lhs: [(1, 1), (0, 1), (1, 1), (-2, 1)], rhs: [(1, 1), (0, 1)] },
    Row { id: "vii", lhs: [(1, 1), (0, 1), (1, 2), (-1, 1)], rhs: [(1, 1), (0, 1)] },
    Row { id: "viii", lhs: [(2, 3), (0, 1), (1, 1), (0, 1)], rhs: [(1, 1), (0, 1)] },
    Row { id: "ix", lhs: [(1, 1), (-1, 2), (3, 2), (0, 1)], rhs: [(1, 1), (0, 1)] },
    Row { id: "x", lhs: [(1, 2), (0, 1), (2, 1), (1, 2)], rhs: [(0, 1), (1, 1)] },
    Row { id: "xi", lhs: [(0, 1), (2, 1), (6, 1), (1, 1)], rhs: [(3, 1), (0, 1)] },
];

fn r(p: (i64, i64)) -> BigRational {
    q(p.0, p.1)
}

impl Row {
    fn sides(&self, c: &BigRational, theta: &BigRational, alpha: &BigRational) -> (BigRational, BigRational) {
        let lhs = r(self.lhs[0]) + r(self.lhs[1]) * c + r(self.lhs[2]) * theta + r(self.lhs[3]) * alpha;
        let rhs = r(self.rhs[0]) + r(self.rhs[1]) * c;
        (lhs, rhs)
    }

    /// With alpha = a0 + a1 theta, the row reads `slope * theta < bound`.
    fn in_theta(&self, c: &BigRational, a0: &BigRational, a1: &BigRational) -> (BigRational, BigRational) {
        let slope = r(self.lhs[2]) + r(self.lhs[3]) * a1;
        let bound = r(self.rhs[0]) + r(self.rhs[1]) * c - r(self.lhs[0]) - r(self.lhs[1]) * c - r(self.lhs[3]) * a0;
        (slope, bound)
    }
}

/// Evaluates all eleven inequalities exactly.
pub fn check_inequalities(p: &InequalityParams) -> Vec<InequalityReport> {
    let alpha = p.alpha();
    ROWS.iter()
        .map(|row| {
            let (lhs, rhs) = row.sides(&p.c, &p.theta, &alpha);
            InequalityReport::less(row.id, &lhs, &rhs)
        })
        .collect()
}

/// Open interval of admissible theta, with a witness inside it.
#[derive(Debug, Clone, Serialize)]
pub struct ThetaInterval {
    pub lo: Exact,
    pub hi: Exact,
    pub witness: Exact,
}

/// Intersect the theta-constraints on one linear piece of alpha, theta in (lo, hi).
/// Every inequality must clear the strictness margin.
fn piece(
    c: &BigRational,
    a0: &BigRational,
    a1: &BigRational,
    mut lo: BigRational,
    mut hi: BigRational,
) -> Option<(BigRational, BigRational)> {
    let margin = strictness();
    for row in &ROWS {
        let (slope, bound) = row.in_theta(c, a0, a1);
        let bound = bound - &margin;
        if slope.is_zero() {
            if !bound.is_positive() {
                return None;
            }
        } else if slope.is_positive() {
            let t = bound / slope;
            if t < hi {
                hi = t;
            }
        } else {
            let t = bound / slope;
            if t > lo {
                lo = t;
            }
        }
    }
    (lo < hi).then_some((lo, hi))
}

/// The set of theta in (0, 1/R) for which all eleven inequalities hold at
/// (c, kappa), as the hull of at most two intervals. With `greaves`, the
/// range is instead theta > c/(R - delta_R).
pub fn theta_interval(c: &BigRational, kappa: &BigRational, r: u64, greaves: bool) -> Result<Option<ThetaInterval>> {
    if r < 2 {
        return Err(LabError::InvalidR(r));
    }
    if !kappa.is_positive() {
        return Err(LabError::InvalidParameter("kappa must be positive".into()));
    }
    // Degree c/theta below R - delta_R forces theta > c/(R - delta_R) > 1/R,
    // so the Greaves variant replaces the cap theta < 1/R by that floor.
    let (lo, hi) = if greaves {
        let room = BigRational::from_integer(r.into()) - greaves_delta_exact(r)?;
        (c / room, BigRational::one())
    } else {
        (BigRational::zero(), q(1, r as i64))
    };
    let knee = alpha_floor() - kappa;
    let mut found: Vec<(BigRational, BigRational)> = Vec::new();
    // alpha = 1/20 for theta <= 1/20 - kappa
    if knee.is_positive() {
        let top = if knee < hi { knee.clone() } else { hi.clone() };
        if let Some(iv) = piece(c, &alpha_floor(), &BigRational::zero(), lo.clone(), top) {
            found.push(iv);
        }
    }
    // alpha = theta + kappa for theta >= 1/20 - kappa
    let start = if knee > lo { knee } else { lo };
    if let Some(iv) = piece(c, kappa, &BigRational::one(), start, hi) {
        found.push(iv);
    }
    if found.is_empty() {
        return Ok(None);
    }
    let lo = found.iter().map(|v| v.0.clone()).min().expect("non-empty");
    let hi = found.iter().map(|v| v.1.clone()).max().expect("non-empty");
    let (wl, wh) = &found[0];
    let witness = (wl + wh) / BigRational::from_integer(2.into());
    Ok(Some(ThetaInterval { lo: Exact(lo), hi: Exact(hi), witness: Exact(witness) }))
}

fn feasible(c: &BigRational, r: u64, greaves: bool) -> Result<bool> {
    Ok(theta_interval(c, &exact(KAPPA_GUARD)?, r, greaves)?.is_some())
}

/// Supremum of c in (1, 2) for which some theta in (0, 1/R) satisfies all
/// eleven inequalities, to within `tol`.
pub fn max_c_feasible(r: u64, tol: f64, greaves: bool) -> Result<f64> {
    if !(8..=19).contains(&r) {
        return Err(LabError::InvalidR(r));
    }
    if !(tol > 0.0) {
        return Err(LabError::InvalidParameter("tol must be positive".into()));
    }
    let step = q(1, 1000);
    let one = BigRational::one();
    let mut c = &one + &step;
    let two = BigRational::from_integer(2.into());
    // first feasible grid point
    while !feasible(&c, r, greaves)? {
        c += &step;
        if c >= two {
            return Err(LabError::NoCrossing { lo: 1.0, hi: 2.0 });
        }
    }
    // last feasible grid point
    while c < two && feasible(&(&c + &step), r, greaves)? {
        c += &step;
    }
    let mut lo = c.clone();
    let mut hi = c + step;
    let tol = exact(tol)?;
    while &hi - &lo > tol {
        let mid = (&lo + &hi) / &two;
        if feasible(&mid, r, greaves)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(rational_to_f64(&lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(c: f64, theta: f64, kappa: f64) -> InequalityParams {
        InequalityParams::from_f64(c, theta, kappa).unwrap()
    }

    #[test]
    fn alpha_is_max() {
        assert_eq!(params(1.1, 0.01, 1e-4).alpha(), q(1, 20));
        let p = params(1.1, 0.12, 0.5);
        assert_eq!(p.alpha(), &p.theta + &p.kappa);
    }

    #[test]
    fn all_hold_at_table_start() {
        let reps = check_inequalities(&params(1.0521, 0.12, 1e-4));
        assert_eq!(reps.len(), 11);
        assert!(reps.iter().all(|r| r.holds), "{reps:?}");
    }

    #[test]
    fn third_fails_for_larger_c() {
        let reps = check_inequalities(&params(1.3, 0.12, 1e-4));
        let iii = reps.iter().find(|r| r.id == "iii").unwrap();
        assert!(!iii.holds);
        assert!((iii.lhs - 180.906_666_666_7).abs() < 1e-6);
        assert_eq!(iii.rhs, 174.0);
    }

    #[test]
    fn sixth_holds_on_upper_piece() {
        for theta in [0.06, 0.1, 0.3, 0.9] {
            for kappa in [1e-9, 1e-3, 0.2] {
                let reps = check_inequalities(&params(1.1, theta, kappa));
                assert!(reps[5].holds || reps[5].slack <= 1e-12);
                assert!(reps[5].slack > 0.0);
            }
        }
    }

    #[test]
    fn interval_witness_checks_out() {
        for (r, c) in [(8u64, "1.0521"), (19, "1.2273"), (12, "1.1649")] {
            let c = super::super::exact_str(c).unwrap();
            let kappa = q(1, 1_000_000);
            let iv = theta_interval(&c, &kappa, r, false).unwrap().expect("feasible");
            let p = InequalityParams::new(c.clone(), iv.witness.0.clone(), kappa.clone()).unwrap();
            assert!(check_inequalities(&p).iter().all(|x| x.holds));
            assert!(iv.witness.0 < q(1, r as i64));
        }
    }

    #[test]
    fn interval_agrees_with_grid() {
        // grid oracle: evaluate directly at many theta
        let kappa = q(1, 1_000_000);
        for r in [8u64, 13, 19] {
            for cm in [1010i64, 1100, 1200, 1300, 1330, 1400] {
                let c = q(cm, 1000);
                let iv = theta_interval(&c, &kappa, r, false).unwrap();
                let n = 2000i64;
                let grid_hit = (1..n).any(|i| {
                    let theta = q(i, n * r as i64);
                    let p = InequalityParams::new(c.clone(), theta, kappa.clone()).unwrap();
                    check_inequalities(&p).iter().all(|x| x.holds)
                });
                if grid_hit {
                    assert!(iv.is_some(), "R={r} c={cm}");
                }
                if let Some(iv) = iv {
                    let p = InequalityParams::new(c.clone(), iv.witness.0, kappa.clone()).unwrap();
                    assert!(check_inequalities(&p).iter().all(|x| x.holds));
                }
            }
        }
    }

    #[test]
    fn max_c_monotone_and_covers_table() {
        let mut prev = 0.0;
        for pair in super::super::table11() {
            let m = max_c_feasible(pair.r, 1e-6, false).unwrap();
            assert!(m >= pair.c_r, "R={} max={m}", pair.r);
            assert!(m >= prev);
            prev = m;
        }
        assert_eq!(max_c_feasible(7, 1e-6, false), Err(LabError::InvalidR(7)));
    }

    #[test]
    fn greaves_variant_brackets_table() {
        let low = max_c_feasible(8, 1e-6, true).unwrap();
        let high = max_c_feasible(19, 1e-6, true).unwrap();
        assert!(low < 1.0521 && (low - 1.0329).abs() < 1e-3, "{low}");
        assert!(high < 1.2273 && (high - 1.2056).abs() < 1e-3, "{high}");
        assert!(low < max_c_feasible(8, 1e-6, false).unwrap());
    }
}

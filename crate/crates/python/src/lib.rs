//! Python module `psc_lab`. Reports come back as plain dicts and lists;
//! exponents are `RationalExponent` objects or strings such as `"7/5"`.

use num_bigint::BigUint;
use num_rational::BigRational;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

use psc_lab::constants::{self, exact_str, InequalityParams, RegimeIneq};
use psc_lab::exactpow::{self, parse_rational};
use psc_lab::experiments::{self, FModel};
use psc_lab::expsum::{self, EvalOptions, Weights};
use psc_lab::{factor, primes, verify, LabError};

create_exception!(psc_lab, PscLabError, PyException, "An operation rejected its input.");
create_exception!(psc_lab, ResourceCapError, PscLabError, "A resource cap (PSC_LAB_CAP) was exceeded.");

fn err(e: LabError) -> PyErr {
    if e.is_resource() {
        ResourceCapError::new_err(e.to_string())
    } else {
        PscLabError::new_err(e.to_string())
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any()
            } else if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.into_any()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any()
            }
        }
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let items = a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn report<'py, T: Serialize>(py: Python<'py>, r: Result<T, LabError>) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(r.map_err(err)?).map_err(|e| PscLabError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// Exact rational exponent num/den > 1, never an integer.
#[pyclass(name = "RationalExponent", frozen, eq, hash, from_py_object)]
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct PyExponent(psc_lab::RationalExponent);

#[pymethods]
impl PyExponent {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        exactpow::parse_exponent(text).map(PyExponent).map_err(err)
    }

    #[getter]
    fn num(&self) -> u64 {
        self.0.num()
    }

    #[getter]
    fn den(&self) -> u64 {
        self.0.den()
    }

    fn __float__(&self) -> f64 {
        self.0.as_f64()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("RationalExponent('{}')", self.0)
    }
}

#[derive(FromPyObject)]
enum ExpArg {
    Obj(PyExponent),
    Text(String),
}

impl ExpArg {
    fn get(&self) -> PyResult<psc_lab::RationalExponent> {
        match self {
            ExpArg::Obj(e) => Ok(e.0),
            ExpArg::Text(t) => exactpow::parse_exponent(t).map_err(err),
        }
    }
}

fn big(text: &str) -> PyResult<BigRational> {
    exact_str(text).map_err(err)
}

fn q64(text: &str) -> PyResult<psc_lab::Q64> {
    parse_rational(text).map_err(err)
}

// ---- exactpow, primes, factor ----

/// floor(n^c) as a Python int.
#[pyfunction]
fn floor_pow(n: u64, c: ExpArg) -> PyResult<BigUint> {
    exactpow::floor_pow(n, c.get()?).map_err(err)
}

/// {h n^c / d} with a certified error bound: {"value", "error_bound"}.
#[pyfunction]
#[pyo3(signature = (n, c, h = 1, d = 1, tol = exactpow::DEFAULT_TOL))]
fn frac_scaled_pow<'py>(py: Python<'py>, n: u64, c: ExpArg, h: u64, d: u64, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    report(py, exactpow::frac_scaled_pow(n, c.get()?, h, d, tol))
}

#[pyfunction]
fn is_prime(n: u128) -> bool {
    factor::is_prime(n)
}

/// [(p, e), ...] in increasing p.
#[pyfunction]
fn factorize(n: u128) -> PyResult<Vec<(u128, u32)>> {
    factor::factorize(n).map_err(err)
}

#[pyfunction]
fn factor_signature<'py>(py: Python<'py>, n: u128) -> PyResult<Bound<'py, PyAny>> {
    report(py, factor::factor_signature(n))
}

#[pyfunction]
fn prime_count(x: u64) -> PyResult<u64> {
    primes::prime_count(x).map_err(err)
}

// ---- experiments ----

#[pyfunction]
fn almost_prime_census<'py>(py: Python<'py>, x: u64, c: ExpArg, r: u32) -> PyResult<Bound<'py, PyAny>> {
    let c = c.get()?;
    report(py, py.detach(|| experiments::almost_prime_census(x, c, r)))
}

#[pyfunction]
fn squarefree_census<'py>(py: Python<'py>, x: u64, c: ExpArg) -> PyResult<Bound<'py, PyAny>> {
    let c = c.get()?;
    report(py, py.detach(|| experiments::squarefree_census(x, c)))
}

#[pyfunction]
fn ps_prime_count<'py>(py: Python<'py>, x: u64, c: ExpArg) -> PyResult<Bound<'py, PyAny>> {
    let c = c.get()?;
    report(py, py.detach(|| experiments::ps_prime_count(x, c)))
}

#[pyfunction]
fn residue_histogram(py: Python<'_>, x: u64, c: ExpArg, d: u64) -> PyResult<Vec<u64>> {
    let c = c.get()?;
    py.detach(|| experiments::residue_histogram(x, c, d)).map_err(err)
}

/// f_model is "constant-1" or "d-over-phi".
#[pyfunction]
#[pyo3(signature = (x, c, big_d, f_model = "constant-1", all_residues = false))]
fn level_error<'py>(
    py: Python<'py>,
    x: u64,
    c: ExpArg,
    big_d: u64,
    f_model: &str,
    all_residues: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let c = c.get()?;
    let model: FModel = f_model.parse().map_err(err)?;
    report(py, py.detach(|| experiments::level_error(x, c, big_d, model, all_residues)))
}

#[pyfunction]
#[pyo3(signature = (x, c, h = 1, d = 1))]
fn star_discrepancy(py: Python<'_>, x: u64, c: ExpArg, h: u64, d: u64) -> PyResult<f64> {
    let c = c.get()?;
    py.detach(|| experiments::star_discrepancy(x, c, h, d)).map_err(err)
}

// ---- exponential sums ----

/// Theta and Delta are decimal or fraction strings.
#[pyfunction]
#[pyo3(signature = (c, theta, delta, n, epsilon = 0.0, reverse = false))]
fn weyl_sum<'py>(
    py: Python<'py>,
    c: ExpArg,
    theta: &str,
    delta: &str,
    n: u64,
    epsilon: f64,
    reverse: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let (c, theta, delta) = (c.get()?, q64(theta)?, q64(delta)?);
    let opts = EvalOptions { reverse, epsilon, ..Default::default() };
    report(py, py.detach(|| expsum::weyl_sum(c, theta, delta, n, &opts)))
}

#[pyfunction]
#[pyo3(signature = (x, c, h, d, reverse = false))]
fn prime_expsum<'py>(py: Python<'py>, x: u64, c: ExpArg, h: i64, d: u64, reverse: bool) -> PyResult<Bound<'py, PyAny>> {
    let c = c.get()?;
    let opts = EvalOptions { reverse, ..Default::default() };
    report(py, py.detach(|| expsum::prime_expsum(x, c, h, d, &opts)))
}

/// weights: "unit", "interval" (with lo, hi) or "random" (with seed).
#[pyfunction]
#[pyo3(signature = (big_d, big_m, big_l, h, c, weights = "unit", seed = 0, lo = None, hi = None))]
#[allow(clippy::too_many_arguments)]
fn trilinear_sum<'py>(
    py: Python<'py>,
    big_d: u64,
    big_m: u64,
    big_l: u64,
    h: u64,
    c: ExpArg,
    weights: &str,
    seed: u64,
    lo: Option<u64>,
    hi: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let c = c.get()?;
    let w = match weights {
        "unit" => Weights::Unit,
        "interval" => Weights::IntervalCharacteristic { lo: lo.unwrap_or(big_l + 1), hi: hi.unwrap_or(2 * big_l) },
        "random" => Weights::RandomSigns { seed },
        other => return Err(PscLabError::new_err(format!("unknown weights {other:?}"))),
    };
    let opts = EvalOptions::default();
    report(py, py.detach(|| expsum::trilinear_sum(big_d, big_m, big_l, h, c, w, &opts)))
}

#[pyfunction]
fn trilinear_bound(d: f64, l: f64, m: f64, x: f64) -> (f64, bool) {
    expsum::trilinear_bound(d, l, m, x)
}

/// big_h = None uses H = D log^3 x.
#[pyfunction]
#[pyo3(signature = (x, big_d, c, big_h = None, swap_loops = false))]
fn triple_sum<'py>(
    py: Python<'py>,
    x: u64,
    big_d: u64,
    c: ExpArg,
    big_h: Option<u64>,
    swap_loops: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let c = c.get()?;
    let h = big_h.unwrap_or_else(|| expsum::default_h(x, big_d));
    let opts = EvalOptions { swap_loops, ..Default::default() };
    report(py, py.detach(|| expsum::triple_sum(x, big_d, h, c, &opts)))
}

#[pyfunction]
fn k_of(c: ExpArg, theta: &str, delta: &str) -> PyResult<u64> {
    expsum::k_of(c.get()?, q64(theta)?, q64(delta)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (k, epsilon = 0.0))]
fn rho_of(k: u64, epsilon: f64) -> PyResult<f64> {
    expsum::rho_of(k, epsilon).map_err(err)
}

// ---- constants ----

#[pyfunction]
fn greaves_delta(r: u64) -> PyResult<f64> {
    constants::greaves_delta(r).map_err(err)
}

#[pyfunction]
fn greaves_min_r(rho: f64) -> PyResult<u64> {
    constants::greaves_min_r(rho).map_err(err)
}

#[pyfunction]
fn table11<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    report(py, Ok(constants::table11()))
}

/// The eleven small-c inequalities; arguments are decimal or fraction strings.
#[pyfunction]
fn check_inequalities<'py>(py: Python<'py>, c: &str, theta: &str, kappa: &str) -> PyResult<Bound<'py, PyAny>> {
    let p = InequalityParams::new(big(c)?, big(theta)?, big(kappa)?).map_err(err)?;
    report(py, Ok(constants::check_inequalities(&p)))
}

#[pyfunction]
#[pyo3(signature = (r, tol = 1e-6, greaves = false))]
fn max_c_feasible(r: u64, tol: f64, greaves: bool) -> PyResult<f64> {
    constants::max_c_feasible(r, tol, greaves).map_err(err)
}

#[pyfunction]
fn regime_constants<'py>(py: Python<'py>, c: &str) -> PyResult<Bound<'py, PyAny>> {
    report(py, constants::regime_constants(&big(c)?))
}

#[pyfunction]
fn r_bound<'py>(py: Python<'py>, c: &str) -> PyResult<Bound<'py, PyAny>> {
    report(py, constants::r_bound(&big(c)?))
}

#[pyfunction]
fn regime_inequalities<'py>(py: Python<'py>, c: &str) -> PyResult<Bound<'py, PyAny>> {
    report(py, constants::regime_inequalities(&big(c)?))
}

/// ineq is "type1-edge", "type2-low", "type2-high" or "beta-cap".
#[pyfunction]
#[pyo3(signature = (ineq, lo, hi, tol = 1e-3))]
fn threshold<'py>(py: Python<'py>, ineq: &str, lo: f64, hi: f64, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let id: RegimeIneq = ineq.parse().map_err(err)?;
    report(py, constants::threshold(id, lo, hi, tol))
}

#[pyfunction]
fn f1_f2(t: f64, c: f64, epsilon: f64) -> PyResult<(f64, f64)> {
    constants::f1_f2(t, c, epsilon).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (c, epsilon = constants::DEFAULT_EPSILON, grid = constants::DEFAULT_GRID))]
fn margin_verify<'py>(py: Python<'py>, c: &str, epsilon: f64, grid: usize) -> PyResult<Bound<'py, PyAny>> {
    let c = big(c)?;
    report(py, py.detach(|| constants::margin_verify(&c, epsilon, grid)))
}

// ---- acceptance suite ----

/// One acceptance criterion: {"id", "name", "passed", "detail"}.
#[pyfunction]
fn run_criterion<'py>(py: Python<'py>, id: u32) -> PyResult<Bound<'py, PyAny>> {
    report(py, Ok(py.detach(|| verify::run(id))))
}

#[pymodule]
#[pyo3(name = "psc_lab")]
fn psc_lab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("PscLabError", m.py().get_type::<PscLabError>())?;
    m.add("ResourceCapError", m.py().get_type::<ResourceCapError>())?;
    m.add_class::<PyExponent>()?;
    m.add_function(wrap_pyfunction!(floor_pow, m)?)?;
    m.add_function(wrap_pyfunction!(frac_scaled_pow, m)?)?;
    m.add_function(wrap_pyfunction!(is_prime, m)?)?;
    m.add_function(wrap_pyfunction!(factorize, m)?)?;
    m.add_function(wrap_pyfunction!(factor_signature, m)?)?;
    m.add_function(wrap_pyfunction!(prime_count, m)?)?;
    m.add_function(wrap_pyfunction!(almost_prime_census, m)?)?;
    m.add_function(wrap_pyfunction!(squarefree_census, m)?)?;
    m.add_function(wrap_pyfunction!(ps_prime_count, m)?)?;
    m.add_function(wrap_pyfunction!(residue_histogram, m)?)?;
    m.add_function(wrap_pyfunction!(level_error, m)?)?;
    m.add_function(wrap_pyfunction!(star_discrepancy, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_sum, m)?)?;
    m.add_function(wrap_pyfunction!(prime_expsum, m)?)?;
    m.add_function(wrap_pyfunction!(trilinear_sum, m)?)?;
    m.add_function(wrap_pyfunction!(trilinear_bound, m)?)?;
    m.add_function(wrap_pyfunction!(triple_sum, m)?)?;
    m.add_function(wrap_pyfunction!(k_of, m)?)?;
    m.add_function(wrap_pyfunction!(rho_of, m)?)?;
    m.add_function(wrap_pyfunction!(greaves_delta, m)?)?;
    m.add_function(wrap_pyfunction!(greaves_min_r, m)?)?;
    m.add_function(wrap_pyfunction!(table11, m)?)?;
    m.add_function(wrap_pyfunction!(check_inequalities, m)?)?;
    m.add_function(wrap_pyfunction!(max_c_feasible, m)?)?;
    m.add_function(wrap_pyfunction!(regime_constants, m)?)?;
    m.add_function(wrap_pyfunction!(r_bound, m)?)?;
    m.add_function(wrap_pyfunction!(regime_inequalities, m)?)?;
    m.add_function(wrap_pyfunction!(threshold, m)?)?;
    m.add_function(wrap_pyfunction!(f1_f2, m)?)?;
    m.add_function(wrap_pyfunction!(margin_verify, m)?)?;
    m.add_function(wrap_pyfunction!(run_criterion, m)?)?;
    Ok(())
}

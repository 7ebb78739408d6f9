//! One test per acceptance criterion. Each prints a single line
//! `criterion <id> <name>: PASS|FAIL (<seconds>s, limit <seconds>s)`
//! followed by its detail record, and asserts both the verdict and the runtime.
//! The determinism criterion needs the binary and lives in the CLI crate.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use psc_lab::verify;

// Criteria run one at a time so their timings do not contend.
static SERIAL: Mutex<()> = Mutex::new(());

fn check(id: u32, limit: Duration) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let c = verify::run(id);
    let took = start.elapsed();
    let in_time = took <= limit;
    let verdict = if c.passed && in_time { "PASS" } else { "FAIL" };
    println!(
        "criterion {:>2} {}: {verdict} ({:.3}s, limit {:.3}s)",
        c.id,
        c.name,
        took.as_secs_f64(),
        limit.as_secs_f64()
    );
    println!("  {}", serde_json::to_string(&c.detail).unwrap());
    assert!(c.passed, "criterion {id} failed: {}", c.detail);
    assert!(in_time, "criterion {id} took {took:?}, limit {limit:?}");
}

#[test]
fn c01_greaves_constants() {
    check(1, Duration::from_millis(1));
}

#[test]
fn c02_cubic_identity() {
    check(2, Duration::from_secs(1));
}

#[test]
fn c03_thresholds() {
    check(3, Duration::from_secs(1));
}

#[test]
fn c04_beta_cap() {
    check(4, Duration::from_secs(1));
}

#[test]
fn c05_admissible_pairs() {
    check(5, Duration::from_secs(1));
}

#[test]
fn c06_floor_oracle() {
    check(6, Duration::from_secs(10));
}

#[test]
fn c07_omega_oracle() {
    check(7, Duration::from_secs(30));
}

#[test]
fn c08_squarefree_density() {
    check(8, Duration::from_secs(120));
}

#[test]
fn c09_almost_prime_density() {
    check(9, Duration::from_secs(120));
}

#[test]
fn c10_ps_prime_count() {
    check(10, Duration::from_secs(120));
}

#[test]
fn c11_equidistribution() {
    check(11, Duration::from_secs(120));
}

#[test]
fn c12_expsum_oracle() {
    check(12, Duration::from_secs(60));
}

#[test]
fn c13_margins() {
    check(13, Duration::from_secs(10));
}

//! Determinism of the full verify suite across thread counts. Prints
//! `criterion 14 determinism: PASS|FAIL (<seconds>s, limit 600.000s)`.

use std::process::Command;
use std::time::{Duration, Instant};

fn verify(jobs: &str) -> Vec<u8> {
    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures");
    let out = Command::new(env!("CARGO_BIN_EXE_psc-lab"))
        .args(["verify", "--no-timing", "--jobs", jobs, "--fixtures", fixtures])
        .output()
        .expect("binary runs");
    // exit 2 only reports failing criteria; the output is still complete
    assert!(matches!(out.status.code(), Some(0 | 2)), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

#[test]
fn c14_determinism() {
    let limit = Duration::from_secs(600);
    let start = Instant::now();
    let one = verify("1");
    let four = verify("4");
    let took = start.elapsed();
    let lines = String::from_utf8_lossy(&one).lines().count();
    let identical = one == four;
    let passed = identical && took <= limit && lines > 0;
    println!(
        "criterion 14 determinism: {} ({:.3}s, limit {:.3}s)",
        if passed { "PASS" } else { "FAIL" },
        took.as_secs_f64(),
        limit.as_secs_f64()
    );
    println!("  {{\"lines\":{lines},\"identical\":{identical}}}");
    assert!(lines > 0);
    assert!(identical, "verify output differs between --jobs 1 and --jobs 4");
    assert!(took <= limit, "took {took:?}");
}

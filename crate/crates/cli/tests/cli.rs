use std::process::{Command, Output};

use serde_json::Value;

fn psc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psc-lab")).args(args).output().expect("binary runs")
}

fn psc_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psc-lab")).args(args).env(key, val).output().expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("JSON line")).collect()
}

fn only(out: &Output) -> Value {
    let mut r = records(out);
    assert_eq!(r.len(), 1, "{}", String::from_utf8_lossy(&out.stdout));
    r.remove(0)
}

#[test]
fn floor_example() {
    let out = psc(&["floor", "-n", "97", "-c", "6/5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = only(&out);
    assert_eq!(r["result"]["floor"], "242");
    assert_eq!(r["params"]["c"], "6/5");
}

#[test]
fn delta_example() {
    let out = psc(&["constants", "delta", "-R", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = only(&out);
    assert_eq!(r["result"]["text"], "0.044560");
    assert_eq!(r["result"]["delta"].as_f64(), Some(0.044560));
}

#[test]
fn integer_exponent_is_usage_error() {
    let out = psc(&["floor", "-n", "97", "-c", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("integer"));
}

#[test]
fn parse_errors_exit_one() {
    for args in [
        &["census", "--x", "1.5e1x", "-c", "3/2", "-R", "2"][..],
        &["census", "--x", "100", "-c", "1/2", "-R", "2"],
        &["nonsense"],
        &["constants", "threshold", "--ineq", "unknown"],
        &["constants", "delta", "-R", "1"],
        &["--jobs", "0", "floor", "-n", "3", "-c", "3/2"],
    ] {
        assert_eq!(psc(args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn resource_cap_exits_three() {
    let out = psc_env(&["census", "--x", "1e6", "-c", "7/5", "-R", "3"], "PSC_LAB_CAP", "1e-6");
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn every_subcommand_has_help() {
    let paths: &[&[&str]] = &[
        &[],
        &["floor"],
        &["census"],
        &["squarefree"],
        &["psprimes"],
        &["histogram"],
        &["leveldist"],
        &["discrepancy"],
        &["expsum"],
        &["expsum", "weyl"],
        &["expsum", "prime"],
        &["expsum", "trilinear"],
        &["expsum", "triple"],
        &["constants"],
        &["constants", "delta"],
        &["constants", "table"],
        &["constants", "lemma23"],
        &["constants", "maxc"],
        &["constants", "sigma"],
        &["constants", "rbound"],
        &["constants", "regime"],
        &["constants", "threshold"],
        &["constants", "margins"],
        &["verify"],
    ];
    for p in paths {
        let mut args = p.to_vec();
        args.push("--help");
        let out = psc(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"), "{args:?}");
    }
}

#[test]
fn scientific_x_is_exact() {
    let a = only(&psc(&["psprimes", "--x", "2e4", "-c", "3/2", "--no-timing"]));
    let b = only(&psc(&["psprimes", "--x", "20000", "-c", "1.5", "--no-timing"]));
    assert_eq!(a, b);
    assert_eq!(a["params"]["x"], 20000);
}

#[test]
fn field_order_is_fixed() {
    let out = psc(&["constants", "sigma", "-c", "3"]);
    let line = String::from_utf8_lossy(&out.stdout).to_string();
    let pos: Vec<usize> = ["\"command\"", "\"params\"", "\"result\"", "\"tool_version\"", "\"elapsed_ms\""]
        .iter()
        .map(|k| line.find(k).unwrap())
        .collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{line}");
}

#[test]
fn seeded_runs_are_identical() {
    let args = ["expsum", "trilinear", "--D", "4", "--M", "16", "--L", "16", "-c", "3/2", "--weights", "random", "--no-timing"];
    let mut with_seed = args.to_vec();
    with_seed.extend(["--seed", "9"]);
    let a = psc(&with_seed);
    let b = psc(&with_seed);
    assert_eq!(a.stdout, b.stdout);
    let c = psc(&args);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(only(&a)["params"]["weights"]["seed"], 9);
}

#[test]
fn jobs_change_timing_only() {
    let base = ["census", "--x", "3e5", "-c", "10521/10000", "-R", "8"];
    let mut results = Vec::new();
    for jobs in ["1", "3"] {
        let mut args = base.to_vec();
        args.extend(["--jobs", jobs]);
        let r = only(&psc(&args));
        results.push((r["params"].clone(), r["result"].clone()));
    }
    assert_eq!(results[0], results[1]);
}

#[test]
fn csv_output() {
    let out = psc(&["histogram", "--x", "100", "-c", "3/2", "-d", "3", "--format", "csv"]);
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("command,total,counts.0,counts.1,counts.2"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "histogram");
    let counts: Vec<u64> = row[2..].iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(counts.iter().sum::<u64>(), 25);
    assert_eq!(row[1], "25");
}

#[test]
fn table_has_twelve_records() {
    let out = psc(&["constants", "table"]);
    let rs = records(&out);
    assert_eq!(rs.len(), 12);
    assert_eq!(rs[0]["result"]["R"], 8);
    assert_eq!(rs[11]["result"]["R"], 19);
}

#[test]
fn config_file_defaults() {
    let dir = std::env::temp_dir().join(format!("psc-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# census at x = 2000\nx = 2e3\nc = 7/5\nR = 2\nno_timing = true\nD = 9\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let r = only(&psc(&["census", "--config", cfg]));
    assert_eq!(r["result"]["count"], 111);
    assert_eq!(r["elapsed_ms"], 0);
    let r = only(&psc(&["census", "--config", cfg, "-R", "7"]));
    assert_eq!(r["result"]["count"], 296);

    std::fs::write(dir.join("bad.cfg"), "bogus = 1\n").unwrap();
    let out = psc(&["census", "--config", dir.join("bad.cfg").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn threshold_uses_tol() {
    let r = only(&psc(&["constants", "threshold", "--ineq", "type2-high", "--lo", "2", "--hi", "2.5", "--tol", "1e-6"]));
    let v = r["result"]["value"].as_f64().unwrap();
    assert!((2.196..=2.200).contains(&v), "{v}");
    assert_eq!(r["params"]["tol"].as_f64(), Some(1e-6));
}

#[test]
fn verify_subset_and_fixture_roundtrip() {
    let dir = std::env::temp_dir().join(format!("psc-lab-fix-{}", std::process::id()));
    let d = dir.to_str().unwrap();
    let out = psc(&["verify", "--criteria", "1,2", "--fixtures", d, "--no-timing"]);
    let rs = records(&out);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(rs[0]["params"]["criterion"], 1);
    assert_eq!(rs[2]["result"]["status"], "absent");
    assert_eq!(rs.last().unwrap()["result"]["passed"], true);

    // a fixture that disagrees fails the run
    let rec = psc(&["verify", "--record", "--fixtures", d]);
    assert_eq!(rec.status.code(), Some(0));
    let file = dir.join("derived.jsonl");
    let text = std::fs::read_to_string(&file).unwrap();
    let mut lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let squarefree = lines.iter_mut().find(|f| f["command"] == "squarefree").unwrap();
    squarefree["result"]["count"] = Value::from(1);
    let edited: Vec<String> = lines.iter().map(|v| v.to_string()).collect();
    std::fs::write(&file, edited.join("\n")).unwrap();
    let out = psc(&["verify", "--criteria", "1", "--fixtures", d]);
    assert_eq!(out.status.code(), Some(2));
    let rs = records(&out);
    assert!(rs.iter().any(|r| r["result"]["status"] == "mismatch"));
    std::fs::remove_dir_all(&dir).unwrap();
}

//! `psc-lab`: one JSONL (or CSV) record per computed result.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 verification failure,
//! 3 resource cap exceeded.

mod args;
mod config;
mod fixtures;
mod output;

use std::ffi::OsString;
use std::io::{self, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use num_rational::BigRational;
use psc_lab::constants::{
    check_inequalities, greaves_delta, margin_verify, max_c_feasible, r_bound, regime_constants, regime_inequalities,
    table11, threshold, InequalityParams, RegimeIneq,
};
use psc_lab::exactpow::{floor_pow_with, PowPath};
use psc_lab::experiments::{
    almost_prime_census, level_error, ps_prime_count, residue_histogram, squarefree_census, star_discrepancy, FModel,
};
use psc_lab::expsum::{default_h, prime_expsum, trilinear_sum, triple_sum, weyl_sum, EvalOptions, Weights};
use psc_lab::{caps, verify, LabError, Q64};
use serde::Serialize;
use serde_json::{json, Value};

use args::{Cli, Command, ConstantsCommand, ExpsumCommand, FModelArg, PathArg, WeightsArg};
use output::{RunRecord, Sink, TOOL_VERSION};

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lab(LabError),
    Io(io::Error),
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        Failure::Lab(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Out<'a> = Sink<io::StdoutLock<'a>>;

struct Ctx<'a> {
    sink: Out<'a>,
    seed: u64,
    tol: Option<f64>,
    timing: bool,
}

impl Ctx<'_> {
    /// Times `f` and emits its result as one record.
    fn run<T: Serialize>(
        &mut self,
        command: &str,
        params: Value,
        f: impl FnOnce() -> Result<T, Failure>,
    ) -> Result<(), Failure> {
        let start = Instant::now();
        let result = to_value(f()?);
        self.emit(command, params, result, start)
    }

    fn emit(&mut self, command: &str, params: Value, result: Value, start: Instant) -> Result<(), Failure> {
        let elapsed_ms = if self.timing { start.elapsed().as_millis() as u64 } else { 0 };
        let rec = RunRecord { command: command.to_string(), params, result, tool_version: TOOL_VERSION, elapsed_ms };
        self.sink.emit(&rec).map_err(Failure::Io)
    }
}

fn to_value<T: Serialize>(v: T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn qs(q: &Q64) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn bs(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os().collect()))
}

fn run(argv: Vec<OsString>) -> u8 {
    let argv = match config::config_path(&argv) {
        Some(p) => {
            let merged = std::fs::read_to_string(&p)
                .map_err(|e| format!("config {}: {e}", p.to_string_lossy()))
                .and_then(|text| config::parse_file(&text))
                .and_then(|entries| config::merge(argv, &entries));
            match merged {
                Ok(a) => a,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return EXIT_USAGE;
                }
            }
        }
        None => argv,
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    if let Some(j) = cli.global.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return EXIT_USAGE;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: thread pool: {e}");
            return EXIT_USAGE;
        }
    }
    if let Err(e) = caps::Caps::from_env() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    let stdout = io::stdout();
    let mut ctx = Ctx {
        sink: Sink::new(cli.global.format, stdout.lock()),
        seed: cli.global.seed,
        tol: cli.global.tol,
        timing: !cli.global.no_timing,
    };
    match dispatch(cli.command, &mut ctx) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Lab(e)) => {
            eprintln!("error: {e}");
            if e.is_resource() {
                EXIT_RESOURCE
            } else {
                EXIT_USAGE
            }
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: Command, ctx: &mut Ctx) -> Result<u8, Failure> {
    let caps = caps::current();
    match cmd {
        Command::Floor(a) => {
            let path = match a.path {
                PathArg::Auto => PowPath::Auto,
                PathArg::Exact => PowPath::Exact,
                PathArg::Certified => PowPath::Certified,
            };
            let params = json!({ "n": a.n, "c": a.c, "path": format!("{:?}", a.path).to_lowercase() });
            ctx.run("floor", params, || Ok(json!({ "floor": floor_pow_with(a.n, a.c, path, &caps)?.to_string() })))?;
        }
        Command::Census(a) => {
            let params = json!({ "x": a.xc.x, "c": a.xc.c, "R": a.r });
            ctx.run("census", params, || Ok(almost_prime_census(a.xc.x, a.xc.c, a.r)?))?;
        }
        Command::Squarefree(a) => {
            ctx.run("squarefree", json!({ "x": a.x, "c": a.c }), || Ok(squarefree_census(a.x, a.c)?))?;
        }
        Command::Psprimes(a) => {
            ctx.run("psprimes", json!({ "x": a.x, "c": a.c }), || Ok(ps_prime_count(a.x, a.c)?))?;
        }
        Command::Histogram(a) => {
            let params = json!({ "x": a.xc.x, "c": a.xc.c, "d": a.d });
            ctx.run("histogram", params, || {
                let bins = residue_histogram(a.xc.x, a.xc.c, a.d)?;
                Ok(json!({ "total": bins.iter().sum::<u64>(), "counts": bins }))
            })?;
        }
        Command::Leveldist(a) => {
            let model = match a.f_model {
                FModelArg::Constant1 => FModel::Constant1,
                FModelArg::DOverPhi => FModel::DOverPhi,
            };
            let params =
                json!({ "x": a.xc.x, "c": a.xc.c, "D": a.big_d, "f_model": model, "all_residues": a.all_residues });
            ctx.run("leveldist", params, || Ok(level_error(a.xc.x, a.xc.c, a.big_d, model, a.all_residues)?))?;
        }
        Command::Discrepancy(a) => {
            let params = json!({ "x": a.xc.x, "c": a.xc.c, "h": a.h, "d": a.d });
            ctx.run("discrepancy", params, || {
                Ok(json!({ "star_discrepancy": star_discrepancy(a.xc.x, a.xc.c, a.h, a.d)? }))
            })?;
        }
        Command::Expsum(e) => expsum(e, ctx)?,
        Command::Constants(c) => constants(c, ctx)?,
        Command::Verify(a) => return run_verify(a, ctx),
    }
    Ok(0)
}

fn expsum(cmd: ExpsumCommand, ctx: &mut Ctx) -> Result<(), Failure> {
    match cmd {
        ExpsumCommand::Weyl(a) => {
            let opts = EvalOptions { reverse: a.flags.reverse, epsilon: a.epsilon, ..Default::default() };
            let params = json!({
                "c": a.c, "Theta": qs(&a.theta), "Delta": qs(&a.delta), "N": a.n,
                "epsilon": a.epsilon, "reverse": a.flags.reverse,
            });
            ctx.run("expsum weyl", params, || Ok(weyl_sum(a.c, a.theta, a.delta, a.n, &opts)?))
        }
        ExpsumCommand::Prime(a) => {
            let opts = EvalOptions { reverse: a.flags.reverse, ..Default::default() };
            let params = json!({ "x": a.x, "c": a.c, "h": a.h, "d": a.d, "reverse": a.flags.reverse });
            ctx.run("expsum prime", params, || Ok(prime_expsum(a.x, a.c, a.h, a.d, &opts)?))
        }
        ExpsumCommand::Trilinear(a) => {
            let opts = EvalOptions { reverse: a.flags.reverse, ..Default::default() };
            let (weights, wparams) = match a.weights {
                WeightsArg::Unit => (Weights::Unit, json!("unit")),
                WeightsArg::Interval => {
                    let lo = a.lo.unwrap_or(a.big_l + 1);
                    let hi = a.hi.unwrap_or(2 * a.big_l);
                    (Weights::IntervalCharacteristic { lo, hi }, json!({ "type": "interval", "lo": lo, "hi": hi }))
                }
                WeightsArg::Random => {
                    (Weights::RandomSigns { seed: ctx.seed }, json!({ "type": "random", "seed": ctx.seed }))
                }
            };
            let params = json!({
                "D": a.big_d, "M": a.big_m, "L": a.big_l, "h": a.h, "c": a.c,
                "weights": wparams, "reverse": a.flags.reverse,
            });
            ctx.run("expsum trilinear", params, || {
                Ok(trilinear_sum(a.big_d, a.big_m, a.big_l, a.h, a.c, weights, &opts)?)
            })
        }
        ExpsumCommand::Triple(a) => {
            let opts = EvalOptions { reverse: a.flags.reverse, swap_loops: a.swap_loops, ..Default::default() };
            let h = a.big_h.unwrap_or_else(|| default_h(a.x, a.big_d));
            let params = json!({
                "x": a.x, "D": a.big_d, "H": h, "H_preset": a.big_h.is_none(), "c": a.c,
                "swap_loops": a.swap_loops, "reverse": a.flags.reverse,
            });
            ctx.run("expsum triple", params, || Ok(triple_sum(a.x, a.big_d, h, a.c, &opts)?))
        }
    }
}

fn constants(cmd: ConstantsCommand, ctx: &mut Ctx) -> Result<(), Failure> {
    match cmd {
        ConstantsCommand::Delta(a) => ctx.run("constants delta", json!({ "R": a.r }), || {
            let d = greaves_delta(a.r)?;
            Ok(json!({ "delta": d, "text": format!("{d:.6}") }))
        }),
        ConstantsCommand::Table => {
            let start = Instant::now();
            for pair in table11() {
                let v = to_value(&pair);
                ctx.emit("constants table", json!({ "R": v["R"] }), v, start)?;
            }
            Ok(())
        }
        ConstantsCommand::Inequalities(a) => {
            let params = json!({ "c": bs(&a.c), "theta": bs(&a.theta), "kappa": bs(&a.kappa) });
            ctx.run("constants lemma23", params, || {
                let p = InequalityParams::new(a.c, a.theta, a.kappa)?;
                let reports = check_inequalities(&p);
                let all_hold = reports.iter().all(|r| r.holds);
                Ok(json!({ "alpha": bs(&p.alpha()), "inequalities": reports, "all_hold": all_hold }))
            })
        }
        ConstantsCommand::Maxc(a) => {
            let tol = ctx.tol.unwrap_or(1e-6);
            let params = json!({ "R": a.r, "greaves": a.greaves, "tol": tol });
            ctx.run("constants maxc", params, || {
                let c = max_c_feasible(a.r, tol, a.greaves)?;
                let listed = table11().into_iter().find(|p| p.r == a.r).map(|p| p.c_r);
                Ok(json!({ "max_c": c, "table_c": listed }))
            })
        }
        ConstantsCommand::Sigma(a) => {
            ctx.run("constants sigma", json!({ "c": bs(&a.c) }), || Ok(regime_constants(&a.c)?))
        }
        ConstantsCommand::Rbound(a) => ctx.run("constants rbound", json!({ "c": bs(&a.c) }), || Ok(r_bound(&a.c)?)),
        ConstantsCommand::Regime(a) => ctx.run("constants regime", json!({ "c": bs(&a.c) }), || {
            let reports = regime_inequalities(&a.c)?;
            let all_hold = reports.iter().all(|r| r.holds);
            Ok(json!({ "inequalities": reports, "all_hold": all_hold }))
        }),
        ConstantsCommand::Threshold(a) => {
            let tol = ctx.tol.unwrap_or(1e-3);
            let id: RegimeIneq = a.ineq.parse().map_err(|e: LabError| Failure::Usage(e.to_string()))?;
            let params = json!({ "ineq": id.id(), "lo": a.lo, "hi": a.hi, "tol": tol });
            ctx.run("constants threshold", params, || Ok(threshold(id, a.lo, a.hi, tol)?))
        }
        ConstantsCommand::Margins(a) => {
            let params = json!({ "c": bs(&a.c), "epsilon": a.epsilon, "grid": a.grid });
            ctx.run("constants margins", params, || Ok(margin_verify(&a.c, a.epsilon, a.grid)?))
        }
    }
}

fn run_verify(a: args::VerifyArgs, ctx: &mut Ctx) -> Result<u8, Failure> {
    let cases = verify::fixture_cases();
    if a.record {
        let mut recorded = Vec::new();
        for case in &cases {
            let start = Instant::now();
            let result = (case.compute)()?;
            let key = fixtures::key(case.command, &case.params);
            let params = json!({ "command": case.command, "params": case.params, "key": key });
            ctx.emit("verify fixture", params, json!({ "status": "recorded" }), start)?;
            recorded.push(fixtures::Fixture {
                key,
                command: case.command.to_string(),
                params: case.params.clone(),
                result,
            });
        }
        fixtures::save(&a.fixtures, &recorded)?;
        return Ok(0);
    }

    let ids: Vec<u32> = if a.criteria.is_empty() {
        verify::CRITERIA.iter().map(|c| c.0).collect()
    } else {
        a.criteria.clone()
    };
    let mut failed_ids = Vec::new();
    for id in &ids {
        let start = Instant::now();
        let c = verify::run(*id);
        if !c.passed {
            failed_ids.push(c.id);
        }
        let params = json!({ "criterion": c.id, "name": c.name });
        ctx.emit("verify", params, json!({ "passed": c.passed, "detail": c.detail }), start)?;
    }

    let store = fixtures::load(&a.fixtures)?;
    let (mut matched, mut mismatched) = (0u32, 0u32);
    match &store {
        None => {
            let params = json!({ "fixtures": fixtures::path(&a.fixtures).to_string_lossy() });
            ctx.emit("verify fixture", params, json!({ "status": "absent" }), Instant::now())?;
        }
        Some(store) => {
            for case in &cases {
                let start = Instant::now();
                let key = fixtures::key(case.command, &case.params);
                let status = match (store.get(&key), (case.compute)()) {
                    (None, _) => "missing".to_string(),
                    (Some(_), Err(e)) => format!("error: {e}"),
                    (Some(f), Ok(v)) if verify::values_match(&f.result, &v, 1e-9) => "match".to_string(),
                    (Some(_), Ok(_)) => "mismatch".to_string(),
                };
                if status == "match" {
                    matched += 1;
                } else {
                    mismatched += 1;
                }
                let params = json!({ "command": case.command, "params": case.params, "key": key });
                ctx.emit("verify fixture", params, json!({ "status": status }), start)?;
            }
        }
    }

    let passed = failed_ids.is_empty() && mismatched == 0;
    let summary = json!({
        "passed": passed,
        "criteria_run": ids.len(),
        "criteria_failed": failed_ids,
        "fixtures_matched": matched,
        "fixtures_failed": mismatched,
    });
    ctx.emit("verify summary", json!({ "criteria": ids }), summary, Instant::now())?;
    io::stderr().flush()?;
    Ok(if passed { 0 } else { EXIT_VERIFY })
}

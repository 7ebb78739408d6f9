use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use psc_lab::constants::exact_str;
use psc_lab::exactpow::parse_rational;
use psc_lab::{parse_exponent, RationalExponent, Q64};

#[derive(Debug, Parser)]
#[command(name = "psc-lab", version, about = "Arithmetic of floor(p^c): censuses, exponential sums and explicit constants")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Worker threads (default: machine parallelism)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for randomized weights
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
    /// Tolerance of threshold and bisection commands
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Flat key=value file of default flags; flags on the command line win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Report elapsed_ms as 0
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// floor(n^c)
    Floor(FloorArgs),
    /// Count p <= x with floor(p^c) having at most R prime factors
    Census(CensusArgs),
    /// Count p <= x with floor(p^c) squarefree
    Squarefree(XcArgs),
    /// Count p <= x with floor(p^c) prime
    Psprimes(XcArgs),
    /// Histogram of floor(p^c) mod d
    Histogram(HistogramArgs),
    /// Level-of-distribution error up to D
    Leveldist(LevelArgs),
    /// Star discrepancy of h p^c / d mod 1
    Discrepancy(DiscrepancyArgs),
    /// Exponential sums with their analytic bounds
    #[command(subcommand)]
    Expsum(ExpsumCommand),
    /// Sieve and large-c constants
    #[command(subcommand)]
    Constants(ConstantsCommand),
    /// Run the acceptance suite and compare regression fixtures
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Auto,
    Exact,
    Certified,
}

#[derive(Debug, Args)]
pub struct FloorArgs {
    #[arg(short = 'n', value_parser = parse_natural)]
    pub n: u64,
    #[arg(short = 'c', value_parser = parse_c)]
    pub c: RationalExponent,
    #[arg(long, value_enum, default_value_t = PathArg::Auto)]
    pub path: PathArg,
}

#[derive(Debug, Args)]
pub struct XcArgs {
    #[arg(long, value_parser = parse_natural)]
    pub x: u64,
    #[arg(short = 'c', value_parser = parse_c)]
    pub c: RationalExponent,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[command(flatten)]
    pub xc: XcArgs,
    #[arg(short = 'R')]
    pub r: u32,
}

#[derive(Debug, Args)]
pub struct HistogramArgs {
    #[command(flatten)]
    pub xc: XcArgs,
    #[arg(short = 'd')]
    pub d: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FModelArg {
    #[value(name = "constant-1", alias = "1")]
    Constant1,
    DOverPhi,
}

#[derive(Debug, Args)]
pub struct LevelArgs {
    #[command(flatten)]
    pub xc: XcArgs,
    #[arg(long = "D", value_parser = parse_natural)]
    pub big_d: u64,
    #[arg(long, value_enum, default_value_t = FModelArg::Constant1)]
    pub f_model: FModelArg,
    /// Take the max over every residue, not only the reduced ones
    #[arg(long)]
    pub all_residues: bool,
}

#[derive(Debug, Args)]
pub struct DiscrepancyArgs {
    #[command(flatten)]
    pub xc: XcArgs,
    #[arg(long = "h", default_value_t = 1)]
    pub h: u64,
    #[arg(short = 'd', default_value_t = 1)]
    pub d: u64,
}

#[derive(Debug, Args)]
pub struct SumFlags {
    /// Sum the terms last to first
    #[arg(long)]
    pub reverse: bool,
}

#[derive(Debug, Subcommand)]
pub enum ExpsumCommand {
    /// sum over z ~ N^Theta of e(N^Delta (z/N^Theta)^c)
    Weyl(WeylArgs),
    /// sum over p <= x of log p e(h p^c / d)
    Prime(PrimeArgs),
    /// sum over d ~ D, m ~ M, l ~ L of c_d a_m b_l e(h l^c m^c / d)
    Trilinear(TrilinearArgs),
    /// sum over h <= H, d ~ D of |sum over n ~ x of Lambda(n) e(h n^c / d)|
    Triple(TripleArgs),
}

#[derive(Debug, Args)]
pub struct WeylArgs {
    #[arg(short = 'c', value_parser = parse_c)]
    pub c: RationalExponent,
    #[arg(long, value_parser = parse_q64)]
    pub theta: Q64,
    #[arg(long, value_parser = parse_q64)]
    pub delta: Q64,
    #[arg(long = "N", value_parser = parse_natural)]
    pub n: u64,
    /// epsilon in rho(k, epsilon)
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[command(flatten)]
    pub flags: SumFlags,
}

#[derive(Debug, Args)]
pub struct PrimeArgs {
    #[arg(long, value_parser = parse_natural)]
    pub x: u64,
    #[arg(short = 'c', value_parser = parse_c)]
    pub c: RationalExponent,
    #[arg(long = "h", allow_negative_numbers = true)]
    pub h: i64,
    #[arg(short = 'd')]
    pub d: u64,
    #[command(flatten)]
    pub flags: SumFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightsArg {
    Unit,
    Interval,
    Random,
}

#[derive(Debug, Args)]
pub struct TrilinearArgs {
    #[arg(long = "D", value_parser = parse_natural)]
    pub big_d: u64,
    #[arg(long = "M", value_parser = parse_natural)]
    pub big_m: u64,
    #[arg(long = "L", value_parser = parse_natural)]
    pub big_l: u64,
    #[arg(long = "h", default_value_t = 1)]
    pub h: u64,
    #[arg(short = 'c', value_parser = parse_c)]
    pub c: RationalExponent,
    #[arg(long, value_enum, default_value_t = WeightsArg::Unit)]
    pub weights: WeightsArg,
    /// Support of b_l for interval weights (default L+1)
    #[arg(long)]
    pub lo: Option<u64>,
    /// Support of b_l for interval weights (default 2L)
    #[arg(long)]
    pub hi: Option<u64>,
    #[command(flatten)]
    pub flags: SumFlags,
}

#[derive(Debug, Args)]
pub struct TripleArgs {
    #[arg(long, value_parser = parse_natural)]
    pub x: u64,
    #[arg(long = "D", value_parser = parse_natural)]
    pub big_d: u64,
    /// Number of frequencies; omit to use H = D log^3 x
    #[arg(long = "H", value_parser = parse_natural)]
    pub big_h: Option<u64>,
    #[arg(short = 'c', value_parser = parse_c)]
    pub c: RationalExponent,
    /// Put the d loop outside the h loop
    #[arg(long)]
    pub swap_loops: bool,
    #[command(flatten)]
    pub flags: SumFlags,
}

#[derive(Debug, Subcommand)]
pub enum ConstantsCommand {
    /// delta_R of Greaves' weighted sieve
    Delta(RArgs),
    /// The twelve admissible (R, c_R) pairs
    Table,
    /// The eleven small-c inequalities at (c, theta, kappa)
    #[command(name = "lemma23", alias = "inequalities")]
    Inequalities(InequalityArgs),
    /// Largest c for which the small-c system is feasible
    Maxc(MaxcArgs),
    /// sigma, beta, c1, c2 of the large-c regime
    Sigma(RationalC),
    /// Sieve dimension 16c^3 + coeff c^2 and the integer R it forces
    Rbound(RationalC),
    /// The large-c regime inequalities
    Regime(RationalC),
    /// Least c from which a regime inequality holds
    Threshold(ThresholdArgs),
    /// Grid check of the Type I and Type II margins
    Margins(MarginArgs),
}

#[derive(Debug, Args)]
pub struct RArgs {
    #[arg(short = 'R')]
    pub r: u64,
}

#[derive(Debug, Args)]
pub struct RationalC {
    #[arg(short = 'c', value_parser = parse_big)]
    pub c: BigRational,
}

#[derive(Debug, Args)]
pub struct InequalityArgs {
    #[arg(short = 'c', value_parser = parse_big)]
    pub c: BigRational,
    #[arg(long, value_parser = parse_big)]
    pub theta: BigRational,
    #[arg(long, value_parser = parse_big)]
    pub kappa: BigRational,
}

#[derive(Debug, Args)]
pub struct MaxcArgs {
    #[arg(short = 'R')]
    pub r: u64,
    /// Require theta > c/(R - delta_R) in place of theta < 1/R
    #[arg(long)]
    pub greaves: bool,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// type1-edge, type2-low, type2-high or beta-cap
    #[arg(long)]
    pub ineq: String,
    #[arg(long, default_value_t = 1.5)]
    pub lo: f64,
    #[arg(long, default_value_t = 3.0)]
    pub hi: f64,
}

#[derive(Debug, Args)]
pub struct MarginArgs {
    #[arg(short = 'c', value_parser = parse_big)]
    pub c: BigRational,
    #[arg(long, default_value_t = psc_lab::constants::DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = psc_lab::constants::DEFAULT_GRID)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Write the fixtures instead of comparing against them
    #[arg(long)]
    pub record: bool,
    #[arg(long, default_value = "fixtures")]
    pub fixtures: PathBuf,
    /// Comma-separated criterion ids (default: all)
    #[arg(long, value_delimiter = ',')]
    pub criteria: Vec<u32>,
}

fn parse_c(s: &str) -> Result<RationalExponent, String> {
    parse_exponent(s).map_err(|e| e.to_string())
}

fn parse_q64(s: &str) -> Result<Q64, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Decimal, fraction or scientific notation (`1e-4`), parsed exactly.
fn parse_big(s: &str) -> Result<BigRational, String> {
    let t = s.trim();
    match t.find(['e', 'E']) {
        Some(i) => {
            let mant = exact_str(&t[..i]).map_err(|e| e.to_string())?;
            let exp: i32 = t[i + 1..].trim_start_matches('+').parse().map_err(|_| format!("bad exponent in {s:?}"))?;
            if exp.unsigned_abs() > 400 {
                return Err(format!("exponent out of range in {s:?}"));
            }
            let scale = BigRational::from_integer(BigInt::from(10).pow(exp.unsigned_abs()));
            Ok(if exp >= 0 { mant * scale } else { mant / scale })
        }
        None => exact_str(t).map_err(|e| e.to_string()),
    }
}

/// A natural number written as an integer or in scientific notation
/// (`1e6`, `2.5E7`); the value must be an exact integer.
pub fn parse_natural(s: &str) -> Result<u64, String> {
    let bad = || format!("not a natural number: {s:?}");
    let t = s.trim().replace('_', "");
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].trim_start_matches('+').parse::<u32>().map_err(|_| bad())?),
        None => (t.as_str(), 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() || !(int.chars().chain(frac.chars())).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let mut digits = format!("{int}{frac}");
    let shift = exp as i64 - frac.len() as i64;
    if shift < 0 {
        let cut = digits.len() - (-shift) as usize;
        if digits[cut..].bytes().any(|b| b != b'0') {
            return Err(format!("not an integer: {s:?}"));
        }
        digits.truncate(cut);
    } else {
        digits.extend(std::iter::repeat('0').take(shift as usize));
    }
    let digits = digits.trim_start_matches('0');
    if digits.is_empty() {
        return Ok(0);
    }
    digits.parse::<u64>().map_err(|_| format!("too large: {s:?}"))
}

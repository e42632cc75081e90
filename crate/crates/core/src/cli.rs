//! The `dparts` command-line front end.
//!
//! Every subcommand produces one table, written either as CSV with a header
//! row or as a single JSON object `{"schema_version", "command", "columns",
//! "rows"}`. Diagnostics go to the error stream only.
//!
//! Exit codes: `0` success, `2` usage or domain error, `3` numeric failure
//! (including a failed `verify` check), `4` work budget exceeded or I/O failure.

use std::ffi::OsString;
use std::f64::consts::{PI, SQRT_2};
use std::io::Write;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::asymptotics::{compare_sweep_with_budget, estimate_dt, limit_shape_with};
use crate::beta_solver::{solve_beta, tilt_integral_quadrature};
use crate::boltzmann_model::BoltzmannModel;
use crate::bound::BoundFactor;
use crate::error::CoreError;
use crate::exact_count::{d_t_with_budget, DEFAULT_WORK_BUDGET};
use crate::lemma_verify::{
    lemma1_max_ratio, lemma1_s_grid, lemma1_small_s_max, lemma1_x_grid, lemma2_min,
    LEMMA1_CONSTANT, LEMMA1_SMALL_S_CONSTANT, LEMMA2_CONSTANT,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable read when `--budget` is absent.
pub const BUDGET_ENV: &str = "DPARTS_WORK_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "dparts", version, about = "Distinct-parts partitions with a bounded largest part")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Significant digits for floating-point output (1-17); shortest round-trip form if omitted.
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(1..=17))]
    pub precision: Option<u8>,
    /// Work budget for exact counting, in table cell updates.
    #[arg(long, global = true, env = BUDGET_ENV)]
    pub budget: Option<u128>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Lemmas,
    Beta,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact counts d_t(n).
    Count(PointArgs),
    /// Saddle-point estimate of d_t(n).
    Estimate(PointArgs),
    /// Exact counts against the estimate.
    Compare(PointArgs),
    /// Random partitions from the tilted measure.
    Sample(SampleArgs),
    /// Points on the limit-shape curve.
    LimitShape(ShapeArgs),
    /// Numerical certificates.
    Verify(VerifyArgs),
    /// β(t), β'(t), B(t), A(t) over a range of t.
    BetaTable(BetaTableArgs),
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Bound factor: `p/q`, an integer, or a decimal.
    #[arg(long)]
    pub t: BoundFactor,
    #[arg(long, required_unless_present = "n_list", conflicts_with = "n_list")]
    pub n: Option<u64>,
    /// Comma-separated list of n.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<u64>>,
}

impl PointArgs {
    fn ns(&self) -> Vec<u64> {
        match (&self.n, &self.n_list) {
            (Some(n), _) => vec![*n],
            (None, Some(list)) => list.clone(),
            (None, None) => Vec::new(),
        }
    }
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub t: BoundFactor,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct ShapeArgs {
    #[arg(long)]
    pub t: BoundFactor,
    /// Number of equally spaced x values in [0, t].
    #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u64).range(2..))]
    pub points: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
}

#[derive(Debug, Args)]
pub struct BetaTableArgs {
    #[arg(long, default_value_t = 1.5)]
    pub t_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    pub points: u64,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
    #[error("{0} of {1} entries failed")]
    PartialFailure(usize, usize, u8),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Core(CoreError::Domain(_)) => 2,
            Self::Core(CoreError::Convergence { .. }) => 3,
            Self::Core(CoreError::Resource { .. }) => 4,
            Self::ChecksFailed(_) => 3,
            Self::PartialFailure(_, _, code) => *code,
            Self::Io(_) | Self::Csv(_) | Self::Json(_) => 4,
        }
    }
}

/// One output value.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Self {
            command,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Rounds to `digits` significant digits via the decimal representation, so
/// the printed text and the JSON number agree.
fn round_sig(v: f64, digits: Option<u8>) -> f64 {
    match digits {
        Some(d) if v.is_finite() => format!("{:.*e}", d as usize - 1, v).parse().unwrap_or(v),
        _ => v,
    }
}

fn float_text(v: f64, digits: Option<u8>) -> String {
    match digits {
        Some(d) if v.is_finite() => format!("{:.*e}", d as usize - 1, v),
        _ => format!("{v:?}"),
    }
}

fn cell_text(c: &Cell, digits: Option<u8>) -> String {
    match c {
        Cell::Int(i) => i.to_string(),
        Cell::Float(f) => float_text(*f, digits),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
    }
}

fn cell_json(c: &Cell, digits: Option<u8>) -> Value {
    match c {
        Cell::Int(i) => json!(i),
        // Non-finite values have no JSON representation and become null.
        Cell::Float(f) => json!(round_sig(*f, digits)),
        Cell::Text(s) => json!(s),
        Cell::Bool(b) => json!(b),
    }
}

pub fn write_table(table: &Table, format: Format, digits: Option<u8>, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(|c| cell_text(c, digits)))?;
            }
            w.flush()?;
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| Value::Array(r.iter().map(|c| cell_json(c, digits)).collect()))
                .collect();
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": table.command,
                "columns": table.columns,
                "rows": rows,
            });
            serde_json::to_writer(&mut *out, &doc)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    2
                }
            };
        }
    };
    match run(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "dparts: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command, writing data to `out` and diagnostics to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let budget = cli.budget.unwrap_or(DEFAULT_WORK_BUDGET);
    let (table, failure) = match &cli.command {
        Command::Count(a) => count_table(a, budget, err)?,
        Command::Estimate(a) => (estimate_table(a)?, None),
        Command::Compare(a) => compare_table(a, budget, err)?,
        Command::Sample(a) => (sample_table(a)?, None),
        Command::LimitShape(a) => (limit_shape_table(a)?, None),
        Command::Verify(a) => {
            let table = verify_table(a.suite)?;
            let failed = table.rows.iter().filter(|r| r.last() == Some(&Cell::Bool(false))).count();
            (table, (failed > 0).then_some(CliError::ChecksFailed(failed)))
        }
        Command::BetaTable(a) => (beta_table(a)?, None),
    };
    write_table(&table, cli.format, cli.precision, out)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Per-entry errors are reported and skipped; the worst exit code is kept.
fn entry_failure(failures: &[CoreError], total: usize) -> Option<CliError> {
    let code = failures.iter().map(|e| CliError::Core(e.clone()).exit_code()).max()?;
    Some(CliError::PartialFailure(failures.len(), total, code))
}

fn count_table(a: &PointArgs, budget: u128, err: &mut dyn Write) -> Result<(Table, Option<CliError>), CliError> {
    let mut table = Table::new("count", &["t", "n", "L", "d_t"]);
    let ns = a.ns();
    let mut failures = Vec::new();
    for &n in &ns {
        match d_t_with_budget(n, &a.t, budget) {
            Ok(d) => table.push(vec![
                Cell::Text(a.t.to_string()),
                Cell::Int(n),
                Cell::Int(a.t.largest_part(n)),
                Cell::Text(d.to_string()),
            ]),
            Err(e) => {
                writeln!(err, "dparts: n = {n}: {e}")?;
                failures.push(e);
            }
        }
    }
    Ok((table, entry_failure(&failures, ns.len())))
}

fn estimate_table(a: &PointArgs) -> Result<Table, CliError> {
    let mut table = Table::new(
        "estimate",
        &["t", "n", "L", "frac", "log_estimate", "estimate", "a_n"],
    );
    let sol = solve_beta(a.t.value())?;
    for n in a.ns() {
        let e = estimate_dt(n, &a.t)?;
        table.push(vec![
            Cell::Text(a.t.to_string()),
            Cell::Int(n),
            Cell::Int(a.t.largest_part(n)),
            Cell::Float(e.frac_part),
            Cell::Float(e.log_estimate),
            Cell::Float(e.estimate),
            Cell::Float(sol.a_n(&a.t, n)),
        ]);
    }
    Ok(table)
}

fn compare_table(a: &PointArgs, budget: u128, err: &mut dyn Write) -> Result<(Table, Option<CliError>), CliError> {
    let mut table = Table::new(
        "compare",
        &["t", "n", "L", "frac", "d_t_exact_digits", "log_exact", "log_estimate", "ratio"],
    );
    let ns = a.ns();
    let mut failures = Vec::new();
    for (n, row) in ns.iter().zip(compare_sweep_with_budget(&a.t, &ns, budget)?) {
        match row {
            Ok(r) => table.push(vec![
                Cell::Text(a.t.to_string()),
                Cell::Int(r.n),
                Cell::Int(r.bound),
                Cell::Float(r.frac),
                Cell::Int(r.exact_digits as u64),
                Cell::Float(r.log_exact),
                Cell::Float(r.log_estimate),
                Cell::Float(r.ratio),
            ]),
            Err(e) => {
                writeln!(err, "dparts: n = {n}: {e}")?;
                failures.push(e);
            }
        }
    }
    Ok((table, entry_failure(&failures, ns.len())))
}

fn sample_table(a: &SampleArgs) -> Result<Table, CliError> {
    let model = BoltzmannModel::build(&a.t, a.n)?;
    let mut table = Table::new("sample", &["seed", "index", "size", "num_parts", "largest_part"]);
    for (i, p) in model.sample_batch(a.seed, a.count).iter().enumerate() {
        table.push(vec![
            Cell::Int(a.seed),
            Cell::Int(i as u64),
            Cell::Int(p.size()),
            Cell::Int(p.num_parts() as u64),
            Cell::Int(p.largest_part().unwrap_or(0)),
        ]);
    }
    Ok(table)
}

fn limit_shape_table(a: &ShapeArgs) -> Result<Table, CliError> {
    let sol = solve_beta(a.t.value())?;
    let t = sol.t;
    let mut table = Table::new("limit-shape", &["x", "y"]);
    let last = a.points - 1;
    for i in 0..a.points {
        // The final point is exactly t so the curve ends on its intercept.
        let x = if i == last { t } else { t * i as f64 / last as f64 };
        table.push(vec![Cell::Float(x), Cell::Float(limit_shape_with(&sol, x)?)]);
    }
    Ok(table)
}

fn check(table: &mut Table, suite: &str, name: &str, value: f64, limit: f64, pass: bool) {
    table.push(vec![
        Cell::Text(suite.into()),
        Cell::Text(name.into()),
        Cell::Float(value),
        Cell::Float(limit),
        Cell::Bool(pass),
    ]);
}

fn verify_table(suite: Suite) -> Result<Table, CliError> {
    let mut table = Table::new("verify", &["suite", "check", "value", "limit", "pass"]);
    if matches!(suite, Suite::Lemmas | Suite::All) {
        let xs = lemma1_x_grid();
        let ss = lemma1_s_grid();
        let r = lemma1_max_ratio(&xs, &ss)?;
        check(&mut table, "lemmas", "remainder_max_ratio", r, LEMMA1_CONSTANT, r <= LEMMA1_CONSTANT);
        let small = lemma1_small_s_max(&xs, &ss)?;
        check(
            &mut table,
            "lemmas",
            "remainder_small_s_ratio",
            small,
            LEMMA1_SMALL_S_CONSTANT,
            small <= LEMMA1_SMALL_S_CONSTANT,
        );
        for n in [10u64, 50, 100, 500] {
            let m = lemma2_min(n, 0.5)?;
            check(
                &mut table,
                "lemmas",
                &format!("weyl_min_normalized_n{n}"),
                m.normalized,
                LEMMA2_CONSTANT,
                m.normalized >= LEMMA2_CONSTANT,
            );
        }
    }
    if matches!(suite, Suite::Beta | Suite::All) {
        let two = solve_beta(2.0)?;
        check(&mut table, "beta", "beta_at_2", two.beta.abs(), 1e-12, two.beta.abs() <= 1e-12);
        let d = (two.beta_prime - 1.5).abs();
        check(&mut table, "beta", "beta_prime_at_2", d, 1e-9, d <= 1e-9);
        let far = solve_beta(30.0)?;
        let d = (far.beta - PI / (2.0 * 3f64.sqrt())).abs();
        check(&mut table, "beta", "beta_limit_at_30", d, 1e-8, d <= 1e-8);
        let d = (far.big_b - PI / 3f64.sqrt()).abs();
        check(&mut table, "beta", "growth_limit_at_30", d, 1e-8, d <= 1e-8);
        let d = (far.amplitude - 1.0 / (4.0 * 3f64.powf(0.25))).abs();
        check(&mut table, "beta", "amplitude_limit_at_30", d, 1e-6, d <= 1e-6);
        let mut worst = 0.0f64;
        for i in 0..20 {
            let t = SQRT_2 + 0.01 + i as f64 * 0.5;
            let sol = solve_beta(t)?;
            worst = worst.max((tilt_integral_quadrature(sol.beta, t, 20_000) - 1.0).abs());
        }
        check(&mut table, "beta", "quadrature_residual", worst, 1e-9, worst <= 1e-9);
    }
    Ok(table)
}

fn beta_table(a: &BetaTableArgs) -> Result<Table, CliError> {
    if a.t_min.is_nan() || a.t_max.is_nan() || a.t_min > a.t_max {
        return Err(CoreError::Domain(format!("t-min {} exceeds t-max {}", a.t_min, a.t_max)).into());
    }
    let mut table = Table::new(
        "beta-table",
        &["t", "beta", "beta_prime", "big_b", "amplitude", "residual"],
    );
    for i in 0..a.points {
        let t = if a.points == 1 {
            a.t_min
        } else {
            a.t_min + (a.t_max - a.t_min) * i as f64 / (a.points - 1) as f64
        };
        let s = solve_beta(t)?;
        table.push(vec![
            Cell::Float(t),
            Cell::Float(s.beta),
            Cell::Float(s.beta_prime),
            Cell::Float(s.big_b),
            Cell::Float(s.amplitude),
            Cell::Float(s.residual),
        ]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_count::d_t;

    fn run_args(args: &[&str]) -> (u8, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with_args(std::iter::once("dparts").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn count_matches_library() {
        let (code, out, err) = run_args(&["count", "--t", "2", "--n", "25"]);
        assert_eq!(code, 0, "{err}");
        let want = d_t(25, &BoundFactor::rational(2, 1).unwrap()).unwrap();
        assert_eq!(out, format!("t,n,L,d_t\n2,25,10,{want}\n"));
        assert!(err.is_empty());
    }

    #[test]
    fn count_accepts_small_t() {
        let (code, out, _) = run_args(&["count", "--t", "1/2", "--n-list", "16,36"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 3);
    }

    #[test]
    fn limit_shape_ends_at_zero() {
        let (code, out, _) = run_args(&["limit-shape", "--t", "2", "--points", "5"]);
        assert_eq!(code, 0);
        let last = out.lines().last().unwrap();
        assert_eq!(last, "2.0,0.0");
        assert_eq!(out.lines().nth(1).unwrap(), "0.0,1.0");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_args(&[]).0, 2);
        assert_eq!(run_args(&["count", "--t", "0", "--n", "5"]).0, 2);
        assert_eq!(run_args(&["count", "--t", "2"]).0, 2);
        assert_eq!(run_args(&["estimate", "--t", "1.2", "--n", "5"]).0, 2);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn budget_exits_four() {
        let (code, out, err) = run_args(&["--budget", "1000", "count", "--t", "3", "--n-list", "10,10000"]);
        assert_eq!(code, 4);
        assert_eq!(out.lines().count(), 2);
        assert!(err.contains("n = 10000"));
    }

    #[test]
    fn json_round_trip() {
        let (code, out, _) = run_args(&["--format", "json", "estimate", "--t", "3", "--n", "10000"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["schema_version"], 1);
        let e = estimate_dt(10_000, &BoundFactor::rational(3, 1).unwrap()).unwrap();
        assert_eq!(v["rows"][0][4].as_f64().unwrap(), e.log_estimate);
    }

    #[test]
    fn precision_rounds_consistently() {
        let (_, csv_out, _) = run_args(&["--precision", "6", "beta-table", "--t-min", "3", "--t-max", "3", "--points", "1"]);
        let (_, json_out, _) = run_args(&[
            "--precision", "6", "--format", "json", "beta-table", "--t-min", "3", "--t-max", "3", "--points", "1",
        ]);
        let text: f64 = csv_out.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        let v: Value = serde_json::from_str(&json_out).unwrap();
        assert_eq!(v["rows"][0][1].as_f64().unwrap(), text);
        assert_eq!(text, 0.655297);
    }

    #[test]
    fn sample_is_deterministic() {
        let args = ["sample", "--t", "3", "--n", "400", "--seed", "9", "--count", "20"];
        let a = run_args(&args);
        assert_eq!(a.0, 0);
        assert_eq!(a, run_args(&args));
        assert_eq!(a.1.lines().next().unwrap(), "seed,index,size,num_parts,largest_part");
        assert_eq!(a.1.lines().count(), 21);
    }

    #[test]
    fn verify_beta_suite_passes() {
        let (code, out, _) = run_args(&["verify", "--suite", "beta"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.lines().skip(1).all(|l| l.ends_with("true")));
    }
}

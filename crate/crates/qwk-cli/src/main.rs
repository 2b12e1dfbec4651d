//! `qwk`: exact genus-expanded correlators at ε = 0 from the command line.
//!
//! Output is JSON unless a table format is requested.  Every record has the
//! shape `{kind, key, value, metadata}` with `value` an exact rational
//! string; see `schema/record.schema.json`.  Exit codes: 0 success, 1
//! verification failure or engine error, 2 usage error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use qwk::algebra::{to_decimal, Rat};
use qwk::correlators::{CorrelatorKey, Correlators};
use qwk::hurwitz::{hurwitz_correlator, ENUMERATION_CAP};
use qwk::suites::{self, Grid, SuiteReport};
use serde_json::{json, Value};
use std::process::ExitCode;
use std::time::Instant;

const DECIMAL_DIGITS: usize = 30;

/// `println!` that ignores a closed stdout (e.g. piping into `head`).
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "qwk", version, about = "Exact genus-expanded correlators at ε = 0 and Hurwitz checks")]
struct Cli {
    /// Also print a decimal approximation (marked with `~` when inexact).
    #[arg(long, global = true)]
    decimal: bool,
    /// Worker threads for verification grids.
    #[arg(long, env = "QWK_JOBS", global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one correlator ⟨τ_{d_1}…τ_{d_n}⟩ at genus g.
    Correlator(CorrelatorArgs),
    /// Run a verification suite; exits 1 on the first mismatch.
    Verify(VerifyArgs),
    /// Print the correlator table grouped by genus and level.
    Table(TableArgs),
}

#[derive(Args)]
struct CorrelatorArgs {
    #[arg(long)]
    g: u32,
    /// Comma-separated insertion indices, e.g. `0,0,0`.
    #[arg(long, allow_hyphen_values = true)]
    d: String,
    /// Compare with the closed Hurwitz formula.
    #[arg(long)]
    hurwitz_oracle: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    MainTheorem,
    String,
    Levels,
    Identities,
    HurwitzOracle,
    BracketOracle,
    BracketStructure,
    Ehrhart,
    Hamiltonians,
    Golden,
    Dilaton,
}

#[derive(Args)]
struct VerifyArgs {
    suite: Suite,
    #[arg(long, default_value_t = 2)]
    g_max: u32,
    #[arg(long, default_value_t = 3)]
    n_max: usize,
    /// Fixed bound on Σd (default: 4g+n per key).
    #[arg(long)]
    sum_max: Option<u32>,
    /// Series order for the identity suite.
    #[arg(long, default_value_t = 8)]
    order: u32,
    /// Number of random pairs for the bracket oracle.
    #[arg(long, default_value_t = 50)]
    cases: usize,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Mode cutoff |a| ≤ modes for the bracket oracle.
    #[arg(long, default_value_t = 5)]
    modes: i64,
    /// Degree bound (hurwitz-oracle: 5, bracket-structure: 4, hamiltonians: 6).
    #[arg(long)]
    d_max: Option<u32>,
    /// ĥ-grade budget for bracket-structure.
    #[arg(long, default_value_t = 3)]
    budget: u32,
    /// Ehrhart: number of parts q.
    #[arg(long, default_value_t = 4)]
    q_max: usize,
    /// Ehrhart: bound on Σr.
    #[arg(long, default_value_t = 6)]
    r_sum_max: u32,
    /// Ehrhart: largest N compared.
    #[arg(long, default_value_t = 15)]
    big_n_max: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Md,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, default_value_t = 2)]
    g_max: u32,
    #[arg(long, default_value_t = 3)]
    n_max: usize,
    /// Fixed bound on Σd (default: the top of the band, 4g−3+n).
    #[arg(long)]
    sum_max: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

enum Failure {
    Usage(String),
    Verification(String),
    Engine(qwk::Error),
}

impl From<qwk::Error> for Failure {
    fn from(e: qwk::Error) -> Self {
        match e {
            qwk::Error::InvalidArgument(m) | qwk::Error::Parse(m) => Failure::Usage(m),
            e => Failure::Engine(e),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let out = match &cli.command {
        Command::Correlator(a) => correlator(&cli, a),
        Command::Verify(a) => verify(a),
        Command::Table(a) => table(&cli, a),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Engine(e)) => {
            eprintln!("engine error: {e}");
            ExitCode::from(1)
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<u32>, Failure> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| Failure::Usage(format!("not a nonnegative integer: `{x}`"))))
        .collect()
}

fn record(kind: &str, key: Value, value: &Rat, mut metadata: Value, decimal: bool) -> Value {
    if decimal {
        metadata["decimal"] = json!(to_decimal(value, DECIMAL_DIGITS));
    }
    json!({ "kind": kind, "key": key, "value": value.to_string(), "metadata": metadata })
}

fn print_json(v: &Value) {
    out!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn correlator(cli: &Cli, a: &CorrelatorArgs) -> Outcome {
    let d = parse_list(&a.d)?;
    let t = Instant::now();
    let c = Correlators::new();
    let value = c.correlator(&d, a.g)?;
    let key = json!({ "g": a.g, "d": d });
    let ms = t.elapsed().as_millis() as u64;
    let mut records = vec![record("correlator", key.clone(), &value, json!({ "runtime_ms": ms }), cli.decimal)];
    let mut mismatch = None;
    if a.hurwitz_oracle {
        if 2 * a.g as i64 - 3 + (d.len() as i64) < 0 {
            return Err(Failure::Usage("the closed Hurwitz form needs 2g − 3 + n ≥ 0".into()));
        }
        let h = hurwitz_correlator(&d, a.g)?;
        let equal = h == value;
        records.push(record("hurwitz", key.clone(), &h, json!({}), cli.decimal));
        records.push(json!({
            "kind": "verdict",
            "key": key,
            "value": if equal { "equal" } else { "mismatch" },
            "metadata": { "engine": value.to_string(), "hurwitz": h.to_string() },
        }));
        if !equal {
            mismatch = Some(format!("g={} d={:?}: engine {value} vs Hurwitz {h}", a.g, d));
        }
    }
    print_json(&Value::Array(records));
    match mismatch {
        Some(m) => Err(Failure::Verification(m)),
        None => Ok(()),
    }
}

fn check_caps(a: &VerifyArgs) -> Outcome {
    let usage = |m: String| Err(Failure::Usage(m));
    if a.g_max > 3 || a.n_max > 4 {
        return usage("grids are capped at g ≤ 3, n ≤ 4".into());
    }
    if a.suite == Suite::HurwitzOracle && a.d_max.unwrap_or(5) > ENUMERATION_CAP {
        return usage(format!("hurwitz-oracle is capped at d ≤ {ENUMERATION_CAP}"));
    }
    if !(1..=6).contains(&a.modes) || a.order > 12 || a.q_max > 6 || a.r_sum_max > 10 {
        return usage("bounds above the documented caps (modes ≤ 6, order ≤ 12, q ≤ 6, Σr ≤ 10)".into());
    }
    if a.suite == Suite::Identities && a.order < 2 {
        return usage("identities need --order ≥ 2".into());
    }
    Ok(())
}

fn run_suite(a: &VerifyArgs) -> Result<SuiteReport, Failure> {
    let grid = Grid { g_max: a.g_max, n_max: a.n_max, sum_max: a.sum_max };
    let c = Correlators::new();
    Ok(match a.suite {
        Suite::MainTheorem => suites::main_theorem(&c, grid)?,
        Suite::String => suites::string_equation(&c, grid)?,
        Suite::Levels => suites::levels(&c, grid)?,
        Suite::Dilaton => suites::dilaton(&c, grid)?,
        Suite::Golden => suites::golden(&c)?,
        Suite::Identities => suites::identities(a.order)?,
        Suite::HurwitzOracle => suites::hurwitz_oracle(a.d_max.unwrap_or(5), a.g_max)?,
        Suite::BracketOracle => suites::bracket_oracle(a.cases, a.seed, a.modes)?,
        Suite::BracketStructure => suites::bracket_structure(a.d_max.unwrap_or(4), a.budget)?,
        Suite::Ehrhart => suites::ehrhart(a.q_max, a.r_sum_max, a.big_n_max)?,
        Suite::Hamiltonians => suites::hamiltonians(a.d_max.unwrap_or(6) as i64)?,
    })
}

fn verify(a: &VerifyArgs) -> Outcome {
    check_caps(a)?;
    let t = Instant::now();
    let rep = run_suite(a)?;
    let ms = t.elapsed().as_millis() as u64;
    let kind = match a.suite {
        Suite::Identities => "identity",
        Suite::HurwitzOracle => "hurwitz",
        _ => "correlator",
    };
    let mut records: Vec<Value> = rep
        .checks
        .iter()
        .map(|c| {
            json!({
                "kind": kind,
                "key": { "suite": rep.suite, "check": c.key },
                "value": c.lhs,
                "metadata": { "expected": c.rhs, "equal": c.ok },
            })
        })
        .collect();
    records.push(json!({
        "kind": "verdict",
        "key": { "suite": rep.suite },
        "value": if rep.passed() { "pass" } else { "fail" },
        "metadata": {
            "bounds": rep.params,
            "checks": rep.checks.len(),
            "failures": rep.failures(),
            "notes": rep.notes,
            "runtime_ms": ms,
        },
    }));
    print_json(&Value::Array(records));
    match rep.first_failure() {
        Some(c) => Err(Failure::Verification(format!("{}: {} != {}", c.key, c.lhs, c.rhs))),
        None if rep.checks.is_empty() => Err(Failure::Verification("no checks were run".into())),
        None => Ok(()),
    }
}

struct Row {
    key: CorrelatorKey,
    level: i64,
    value: Rat,
    coefficient: Rat,
}

fn monomial(d: &[u32]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < d.len() {
        let j = d[i..].iter().take_while(|x| **x == d[i]).count();
        parts.push(if j == 1 { format!("t{}", d[i]) } else { format!("t{}^{}", d[i], j) });
        i += j;
    }
    parts.join(" ")
}

/// Series coefficient of `Π t_d`: the correlator over `Π (multiplicity)!`.
fn series_coefficient(d: &[u32], value: &Rat) -> Rat {
    let mut denom = 1i64;
    let mut i = 0;
    while i < d.len() {
        let j = d[i..].iter().take_while(|x| **x == d[i]).count();
        denom *= (1..=j as i64).product::<i64>();
        i += j;
    }
    value / Rat::from_integer(denom.into())
}

fn table(cli: &Cli, a: &TableArgs) -> Outcome {
    if a.g_max > 3 || a.n_max > 4 {
        return Err(Failure::Usage("tables are capped at g ≤ 3, n ≤ 4".into()));
    }
    let c = Correlators::new();
    let mut keys = Vec::new();
    for g in 0..=a.g_max {
        for n in 1..=a.n_max {
            let top = (4 * g as i64 - 3 + n as i64).max(0) as u32;
            for d in qwk::correlators::sorted_tuples(n, a.sum_max.unwrap_or(top)) {
                keys.push(CorrelatorKey { g, d });
            }
        }
    }
    use rayon::prelude::*;
    let values: Vec<Rat> = keys.par_iter().map(|k| c.correlator(&k.d, k.g)).collect::<Result<_, _>>()?;
    let mut rows: Vec<Row> = keys
        .into_iter()
        .zip(values)
        .filter(|(_, v)| *v != Rat::from_integer(0.into()))
        .map(|(key, value)| Row { level: key.band() / 2, coefficient: series_coefficient(&key.d, &value), key, value })
        .collect();
    rows.sort_by(|x, y| (x.key.g, x.level, &x.key.d).cmp(&(y.key.g, y.level, &y.key.d)));
    match a.format {
        Format::Json => {
            let recs: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let meta = json!({
                        "level": r.level,
                        "monomial": monomial(&r.key.d),
                        "coefficient": r.coefficient.to_string(),
                    });
                    record("table", json!({ "g": r.key.g, "d": r.key.d }), &r.value, meta, cli.decimal)
                })
                .collect();
            print_json(&Value::Array(recs));
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            let mut header = vec!["g", "level", "d", "monomial", "correlator", "coefficient"];
            if cli.decimal {
                header.push("decimal");
            }
            w.write_record(&header).map_err(io_failure)?;
            for r in &rows {
                let d: Vec<String> = r.key.d.iter().map(|x| x.to_string()).collect();
                let mut row = vec![
                    r.key.g.to_string(),
                    r.level.to_string(),
                    d.join(" "),
                    monomial(&r.key.d),
                    r.value.to_string(),
                    r.coefficient.to_string(),
                ];
                if cli.decimal {
                    row.push(to_decimal(&r.value, DECIMAL_DIGITS));
                }
                w.write_record(&row).map_err(io_failure)?;
            }
            w.flush().map_err(|e| io_failure(e.into()))?;
        }
        Format::Md => print_markdown(&rows, cli.decimal),
    }
    Ok(())
}

fn io_failure(e: csv::Error) -> Failure {
    Failure::Verification(format!("write failed: {e}"))
}

/// One section per genus, one sub-table per level; levels are the dashed
/// boxes of the ε⁰ row, counted from the top of the band.
fn print_markdown(rows: &[Row], decimal: bool) {
    out!("# ε⁰ correlators");
    let mut current: Option<(u32, i64)> = None;
    for r in rows {
        if current.map(|(g, _)| g) != Some(r.key.g) {
            out!();
            out!("## ħ^{}", r.key.g);
        }
        if current != Some((r.key.g, r.level)) {
            out!();
            out!("### level {} (4g−3+n−Σd = {})", r.level, 2 * r.level);
            out!();
            if decimal {
                out!("| monomial | correlator | coefficient | decimal |");
                out!("|---|---|---|---|");
            } else {
                out!("| monomial | correlator | coefficient |");
                out!("|---|---|---|");
            }
            current = Some((r.key.g, r.level));
        }
        if decimal {
            out!(
                "| {} | {} | {} | {} |",
                monomial(&r.key.d),
                r.value,
                r.coefficient,
                to_decimal(&r.value, DECIMAL_DIGITS)
            );
        } else {
            out!("| {} | {} | {} |", monomial(&r.key.d), r.value, r.coefficient);
        }
    }
}

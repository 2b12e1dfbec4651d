//! Acceptance criteria, one PASS/FAIL line each, all at exact equality.
//!
//! A criterion whose only failing checks are listed in `DOCUMENTED` still
//! prints FAIL; it just does not abort the run.  Anything else red exits 1.

use qwk::algebra::rat;
use qwk::correlators::Correlators;
use qwk::hurwitz::{aut_factor, factorization_count, one_part_polynomial, Partition};
use qwk::suites::{self, Check, Grid, SuiteReport};
use std::process::ExitCode;
use std::time::Instant;

/// Checks known to disagree with the published table, with the reason.
const DOCUMENTED: &[(&str, &str)] = &[(
    "g=2 d=[1,6]",
    "table prints 1/480; closed form, engine and the dilaton factor 3 seen in the \
     two lower boxes of the same genus all give 1/640",
)];

struct Outcome {
    number: u32,
    title: &'static str,
    report: SuiteReport,
    secs: f64,
}

fn run(number: u32, title: &'static str, f: impl FnOnce() -> qwk::Result<SuiteReport>) -> Outcome {
    let t = Instant::now();
    let report = f().unwrap_or_else(|e| SuiteReport {
        suite: title.into(),
        params: String::new(),
        checks: vec![Check { key: "engine error".into(), lhs: e.to_string(), rhs: String::new(), ok: false }],
        notes: Vec::new(),
    });
    Outcome { number, title, report, secs: t.elapsed().as_secs_f64() }
}

fn calibration() -> qwk::Result<SuiteReport> {
    let mut rep = suites::hurwitz_oracle(5, 2)?;
    let mu = Partition::new(&[1, 1])?;
    let closed = one_part_polynomial(0, 2)?.eval(&mu)?;
    let count = factorization_count(0, &mu)?;
    rep.checks.push(Check::rats("calibration closed form".into(), &closed, &rat(1, 1)));
    rep.checks.push(Check::rats("calibration count".into(), &count, &rat(1, 2)));
    rep.checks.push(Check::rats("calibration aut".into(), &rat(aut_factor(&mu) as i64, 1), &rat(2, 1)));
    Ok(rep)
}

fn main() -> ExitCode {
    let c = Correlators::new();
    let grid = Grid::default();
    let outcomes = vec![
        run(1, "golden values", || suites::golden(&c)),
        run(2, "main theorem", || suites::main_theorem(&c, grid)),
        run(3, "string equation", || suites::string_equation(&c, grid)),
        run(4, "level structure", || suites::levels(&c, grid)),
        run(5, "tau symmetry and integrability", || suites::bracket_structure(4, 3)),
        run(6, "bracket finite-mode oracle", || suites::bracket_oracle(50, 2024, 5)),
        run(7, "Ehrhart oracle", || suites::ehrhart(4, 6, 15)),
        run(8, "Hurwitz oracle", calibration),
        run(9, "identity suite", || suites::identities(8)),
        run(10, "Hamiltonian sanity", || suites::hamiltonians(6)),
    ];
    let mut hard_failure = false;
    for o in &outcomes {
        let r = &o.report;
        let verdict = if r.passed() { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {verdict}  {} [{}]: {}/{} checks equal ({:.2}s)",
            o.number,
            o.title,
            r.params,
            r.checks.len() - r.failures(),
            r.checks.len(),
            o.secs
        );
        for note in &r.notes {
            println!("    note: {note}");
        }
        for f in r.checks.iter().filter(|c| !c.ok) {
            match DOCUMENTED.iter().find(|(k, _)| *k == f.key) {
                Some((_, why)) => println!("    documented: {} got {} want {}: {why}", f.key, f.lhs, f.rhs),
                None => {
                    hard_failure = true;
                    println!("    failed: {} got {} want {}", f.key, f.lhs, f.rhs);
                }
            }
        }
    }
    let passed = outcomes.iter().filter(|o| o.report.passed()).count();
    println!("{passed}/{} criteria pass", outcomes.len());
    if hard_failure {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

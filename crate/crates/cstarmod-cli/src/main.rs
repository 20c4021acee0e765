//! `cstarmod` — norms on free Hilbert C*-modules over finite-dimensional
//! C*-algebras, from the command line.
//!
//! Two subcommands:
//!
//! * `norm <scenario.json>` evaluates the task described by a scenario file
//!   and prints a JSON report (optionally also written with `--out`).
//! * `verify <suite>` runs a named invariant suite (`axioms`, `multinorm`,
//!   `summing`, `polar`, `triangle`, `all`) and exits 0 iff every check
//!   passed.
//!
//! Exit codes: 0 success, 1 a verification or internal numeric failure,
//! 2 unusable input (CLI usage, unreadable/malformed/invalid scenario).
//!
//! Reports are pure functions of `(input, seed)`. Searches parallelize
//! across restarts with a deterministic reduction, so the thread count —
//! capped by the `RAYON_NUM_THREADS` environment variable — never changes
//! a result, only the wall clock.

mod report;
mod scenario;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use cstarmod::verify::{run_suite, CheckStatus, Suite};

#[derive(Parser)]
#[command(
    name = "cstarmod",
    version,
    about = "Norms on free Hilbert C*-modules over finite-dimensional C*-algebras",
    after_help = "Results are deterministic in (input, seed); RAYON_NUM_THREADS caps the \
                  worker threads without affecting any value. Exit codes: 0 success, \
                  1 verification failure, 2 unusable input."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the task in a scenario file and print a JSON report.
    Norm {
        /// Path of the scenario JSON file.
        scenario: PathBuf,
        /// Also write the report to this file.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Run a named invariant suite and print a JSON report.
    Verify {
        /// axioms, multinorm, summing, polar, triangle or all.
        suite: String,
        /// Base seed for every sampled instance in the suite.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scales sample counts and search budgets; below 1.0, attainment
        /// checks degrade to warnings instead of failures.
        #[arg(long, default_value_t = 1.0, value_name = "X")]
        budget_scale: f64,
        /// Also write the report to this file.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Norm { scenario, out } => run_norm(&scenario, out.as_deref()),
        Command::Verify {
            suite,
            seed,
            budget_scale,
            out,
        } => run_verify(&suite, seed, budget_scale, out.as_deref()),
    }
}

/// Prints the report to stdout and mirrors it to `--out` when given.
fn emit(report: &Value, out: Option<&Path>) -> Result<(), ExitCode> {
    let text = format!("{report:#}\n");
    print!("{text}");
    if let Some(path) = out {
        if let Err(e) = fs::write(path, &text) {
            eprintln!("cannot write {}: {e}", path.display());
            return Err(ExitCode::from(2));
        }
    }
    Ok(())
}

fn run_norm(path: &Path, out: Option<&Path>) -> ExitCode {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let value: Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        // serde_json's message already names the line and column.
        Err(e) => {
            eprintln!("scenario parse error: {e}");
            return ExitCode::from(2);
        }
    };
    let sc = match scenario::parse(&value) {
        Ok(sc) => sc,
        Err(bad) => {
            eprintln!("invalid scenario at `{}`: {}", bad.path, bad.message);
            return ExitCode::from(2);
        }
    };
    let started = Instant::now();
    let results = match report::dispatch(&sc) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("verification failure: {e}");
            return ExitCode::from(1);
        }
    };
    let rep = json!({
        "library_version": cstarmod::VERSION,
        "results": results,
        "scenario": scenario::canonical(&sc),
        "seed": sc.seed,
        "wall_clock_ms": started.elapsed().as_secs_f64() * 1e3,
    });
    match emit(&rep, out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

fn run_verify(name: &str, seed: u64, budget_scale: f64, out: Option<&Path>) -> ExitCode {
    let suite = match Suite::parse(name) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    if !budget_scale.is_finite() || budget_scale <= 0.0 {
        eprintln!("invalid --budget-scale {budget_scale}: expected a finite positive number");
        return ExitCode::from(2);
    }
    let started = Instant::now();
    let rep = match run_suite::<f64>(suite, seed, budget_scale) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("suite failed to run: {e}");
            return ExitCode::FAILURE;
        }
    };
    let value = json!({
        "library_version": cstarmod::VERSION,
        "report": report::verify_value(&rep),
        "wall_clock_ms": started.elapsed().as_secs_f64() * 1e3,
    });
    if let Err(code) = emit(&value, out) {
        return code;
    }
    // A terse human summary of everything that is not a plain pass.
    for c in &rep.checks {
        match c.status {
            CheckStatus::Pass => {}
            CheckStatus::Warn => eprintln!(
                "WARN {} (cases {}, residual {:.3e}, tol {:.3e}){}",
                c.id,
                c.cases,
                c.residual,
                c.tolerance,
                c.note.as_deref().map(|n| format!(": {n}")).unwrap_or_default()
            ),
            CheckStatus::Fail => eprintln!(
                "FAIL {} (cases {}, residual {:.3e}, tol {:.3e})",
                c.id, c.cases, c.residual, c.tolerance
            ),
        }
    }
    if rep.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

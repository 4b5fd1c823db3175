//! The `submaslov` command-line driver.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration error,
//! 3 numerical failure (integration error or clustered focal instants).

use super::config::{load_config, ResolvedRun};
use super::report::{summary_text, write_artifacts, write_atomic};
use crate::error::Error;
use crate::scenarios::{fuzz, reproduction_config, run_scenario, BUILTIN};
use crate::tolerances::Tolerances;
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "submaslov", version, about = "Maslov index equality for horizontal geodesics of semi-Riemannian submersions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify one configuration and write CSV, summary and JSON artifacts.
    Run {
        config: PathBuf,
        /// Output directory, overriding `[output] dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in scenarios.
    ListScenarios,
    /// Parse and validate a configuration without running it.
    Check { config: PathBuf },
    /// Verify `n` random stationary scenarios.
    Fuzz {
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        steps: usize,
        /// Directory for reproduction configs of failing cases.
        #[arg(long, default_value = "submaslov-fuzz")]
        out: PathBuf,
    },
}

fn is_config_error(e: &Error) -> bool {
    matches!(e, Error::Config { .. } | Error::ConfigParse { .. })
}

fn load(path: &Path) -> Result<ResolvedRun, i32> {
    let cfg = load_config(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_CONFIG
    })?;
    let mut run = cfg.resolve().map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_CONFIG
    })?;
    run.tolerances.apply_env();
    Ok(run)
}

fn cmd_run(path: &Path, out: Option<PathBuf>) -> i32 {
    let run = match load(path) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let dir = out.unwrap_or(run.output.dir.clone());
    let result = match run_scenario(&run.scenario, &run.tolerances) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}: {e}", run.scenario.name);
            return if is_config_error(&e) { EXIT_CONFIG } else { EXIT_NUMERICAL };
        }
    };
    let artifacts = match write_artifacts(&dir, &result) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    print!("{}", summary_text(&result));
    println!("wrote {}", artifacts.csv.display());
    if result.any_cluster() {
        eprintln!("error: clustered focal instants; contributions are not resolved at this step size");
        return EXIT_NUMERICAL;
    }
    if result.pass {
        return EXIT_PASS;
    }
    let repro = dir.join(format!("{}.repro.toml", result.name));
    let names: Vec<&str> = result.failed_checks().iter().map(|c| c.name.as_str()).collect();
    match write_atomic(&repro, &reproduction_config(&run.scenario, &run.tolerances)) {
        Ok(()) => eprintln!("failed checks: {}; reproduction config: {}", names.join(", "), repro.display()),
        Err(e) => eprintln!("failed checks: {}; could not write reproduction config: {e}", names.join(", ")),
    }
    EXIT_CHECK
}

fn cmd_check(path: &Path) -> i32 {
    match load(path) {
        Ok(run) => {
            println!(
                "{}: ok ({} steps on [{}, {}])",
                run.scenario.name, run.scenario.seed.steps, run.scenario.seed.interval[0], run.scenario.seed.interval[1]
            );
            EXIT_PASS
        }
        Err(code) => code,
    }
}

fn cmd_list() -> i32 {
    let mut list: Vec<_> = BUILTIN.to_vec();
    list.sort_unstable();
    for (name, description) in list {
        println!("{name:<20} {description}");
    }
    EXIT_PASS
}

fn cmd_fuzz(n: usize, seed: u64, steps: usize, out: &Path) -> i32 {
    if steps < 8 {
        eprintln!("error: --steps must be at least 8");
        return EXIT_CONFIG;
    }
    let tol = Tolerances::from_env();
    let cases = fuzz(n, seed, steps, &tol);
    let mut mismatches = 0;
    let mut errors = 0;
    for c in &cases {
        println!("{}", c.summary());
        if c.pass() {
            continue;
        }
        if c.outcome.is_err() {
            errors += 1;
        } else {
            mismatches += 1;
        }
        let repro = out.join(format!("{}.toml", c.scenario.name));
        match write_atomic(&repro, &reproduction_config(&c.scenario, &tol)) {
            Ok(()) => eprintln!("reproduction config: {}", repro.display()),
            Err(e) => eprintln!("could not write reproduction config: {e}"),
        }
    }
    println!("{} of {} cases satisfy mu_Q = mu_P (seed {seed})", cases.len() - mismatches - errors, cases.len());
    if mismatches > 0 {
        EXIT_CHECK
    } else if errors > 0 {
        EXIT_NUMERICAL
    } else {
        EXIT_PASS
    }
}

/// Parses `args` (including the program name) and runs the command; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    match cli.command {
        Command::Run { config, out } => cmd_run(&config, out),
        Command::ListScenarios => cmd_list(),
        Command::Check { config } => cmd_check(&config),
        Command::Fuzz { n, seed, steps, out } => cmd_fuzz(n, seed, steps, &out),
    }
}

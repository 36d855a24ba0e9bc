//! `diracspec`: command-line experiments over `dirac-spectra`.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 numerical failure,
//! 4 invariant violation.

mod args;
mod commands;
mod config;
mod error;
mod output;

use std::env;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;

/// Directory used when `--out-dir` is not given.
const OUT_ENV: &str = "DIRACSPEC_OUT";

fn execute(cli: &Cli) -> Result<(), CliError> {
    let common = cli.command.common();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads)
        .build()
        .map_err(|e| CliError::config("threads", e))?;
    let report = pool.install(|| commands::run(&cli.command))?;
    if common.dry_run {
        print!("{}", report.plan_text());
        return Ok(());
    }
    let dir = match &common.out_dir {
        Some(d) => d.clone(),
        None => env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from),
    };
    let stem = common.name.clone().unwrap_or_else(|| report.command.to_string());
    if stem.is_empty() || stem.contains(['/', '\\']) {
        return Err(CliError::config("name", "must be a plain file stem"));
    }
    let written = report.write(&dir, &stem, common.format)?;
    print!("{}", report.summary_text());
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let argv = match config::expand(env::args().collect(), &Command::NAMES) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

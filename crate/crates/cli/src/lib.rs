//! Front end for the `kl-strip` solvers.
//!
//! Every subcommand writes a CSV artifact (to `--out`, or stdout) and a JSON
//! summary (to `--summary`, or stdout when the CSV went to a file). Failures
//! exit with status 2 for invalid input and 3 for numerical trouble, after
//! printing a diagnostic JSON object on stderr.

pub mod commands;
pub mod config;
pub mod output;

use clap::Parser;
use config::Cli;
use kl_strip::Error;
use serde_json::json;
use std::ffi::OsString;

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Cap rayon's pool from `PLATE_THREADS`.
fn configure_threads() -> kl_strip::Result<()> {
    let Ok(v) = std::env::var("PLATE_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidParameter(format!("PLATE_THREADS must be a positive integer, got {v:?}")))?;
    // A second initialisation (tests calling `run` twice) keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_NUMERICAL
    }
}

fn diagnostic(e: &Error) -> serde_json::Value {
    let code = exit_code(e);
    json!({
        "status": "error",
        "kind": if code == EXIT_VALIDATION { "validation" } else { "numerical" },
        "exit_code": code,
        "message": e.to_string(),
        "detail": format!("{e:?}"),
    })
}

/// Parse `args`, run, and return the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (kind, flags) = cli.command.split();
    let result = configure_threads().and_then(|_| flags.resolve()).and_then(|f| commands::dispatch(kind, &f));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", diagnostic(&e));
            exit_code(&e)
        }
    }
}

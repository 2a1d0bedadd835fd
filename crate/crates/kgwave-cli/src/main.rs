//! `kgwave` command-line front end.

mod args;
mod commands;
mod report;

use clap::Parser;
use serde::Serialize;
use std::process::ExitCode;

#[derive(Serialize)]
struct ErrorBody {
    kind: String,
    message: String,
    exit_code: u8,
}

#[derive(Serialize)]
struct ErrorReport {
    schema: u32,
    error: ErrorBody,
}

// Variant name of a library error, e.g. "OnSeparatrix".
fn variant_name(e: &kgwave::Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|ch: char| !ch.is_alphanumeric())
        .next()
        .unwrap_or("Error")
        .to_string()
}

fn exit_code_for(err: &anyhow::Error) -> (u8, String) {
    match err.downcast_ref::<kgwave::Error>() {
        Some(e) if e.is_domain() => (2, variant_name(e)),
        Some(e) => (3, variant_name(e)),
        None => (2, "InvalidInput".to_string()),
    }
}

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (code, kind) = exit_code_for(&err);
            let body = ErrorReport {
                schema: 1,
                error: ErrorBody {
                    kind,
                    message: format!("{err:#}"),
                    exit_code: code,
                },
            };
            eprintln!(
                "{}",
                serde_json::to_string(&body).expect("error report serializes")
            );
            ExitCode::from(code)
        }
    }
}

use std::process::ExitCode;

use clap::Parser;
use entpoly_cli::{run, Cli, CliError};

/// `ENTPOLY_THREADS` sizes the worker pool; unset or 0 means one per core.
fn configure_threads() -> Result<(), CliError> {
    let threads = match std::env::var("ENTPOLY_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            CliError::validation(format!(
                "ENTPOLY_THREADS must be a non-negative integer, got {v:?}"
            ))
        })?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::validation(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(&cli));
    match result {
        Ok(out) => {
            print!("{}", out.text);
            if !out.text.ends_with('\n') {
                println!();
            }
            match out.failure {
                None => ExitCode::SUCCESS,
                Some(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

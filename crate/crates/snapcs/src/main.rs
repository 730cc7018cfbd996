use std::process::ExitCode;

use snapcs::cli::{run_from, RunError};

fn main() -> ExitCode {
    match run_from(std::env::args_os()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Args(e)) => {
            let code = e.exit_code();
            let _ = e.print();
            ExitCode::from(code as u8)
        }
        Err(RunError::Command(e)) => {
            eprintln!("snapcs: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}

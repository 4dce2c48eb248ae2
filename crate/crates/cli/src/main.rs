use std::process::ExitCode;

use qring_cli::{parse_args, run, CliError};

fn main() -> ExitCode {
    let outcome = parse_args(std::env::args_os()).and_then(|config| run(&config));
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(CliError::Clap(e)) => e.exit(),
        Err(e) => {
            eprintln!("qring: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

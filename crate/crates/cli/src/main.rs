use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use polariton_cli::{run, Cli, CliError, Environment};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = Environment::from_env()
        .map_err(CliError::from)
        .and_then(|env| run(cli, env, &mut out));
    let _ = out.flush();
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::process::ExitCode;

use clap::Parser;

use benford_smooth_cli::args::Cli;

fn main() -> ExitCode {
    match benford_smooth_cli::run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

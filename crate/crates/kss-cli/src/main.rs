use std::process::ExitCode;

use clap::Parser;
use kss_cli::{run, Cli};

fn main() -> ExitCode {
    // clap itself exits with code 2 on bad usage
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

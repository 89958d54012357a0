use std::process::ExitCode;

use clap::Parser;
use wavecast::cli::{run, Cli, Status};

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Passed) => ExitCode::SUCCESS,
        Ok(Status::AssertionFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

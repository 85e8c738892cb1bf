use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use rotlog_cli::args::Cli;
use rotlog_cli::commands::Status;
use rotlog_cli::{execute, exit};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(exit::USAGE),
            };
        }
    };
    match execute(&cli) {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::NotConverged) => ExitCode::from(exit::NOT_CONVERGED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::USAGE)
        }
    }
}

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use wsqaoa_cli::args::Cli;
use wsqaoa_cli::{run, Result};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let outcome: Result<String> = cli.command.resolve().and_then(|cfg| run(&cfg, cli.workers));
    match outcome {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("wsqaoa: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

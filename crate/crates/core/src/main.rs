use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use rknq::cli::{run, RunConfig};

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cfg) {
        Ok(outcome) => {
            println!("{}", outcome.summary_line());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_integration_failure() { 2 } else { 1 })
        }
    }
}

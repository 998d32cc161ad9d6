use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    hybrid_lab_cli::run(&hybrid_lab_cli::Cli::parse())
}

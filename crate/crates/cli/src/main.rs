use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    qsense_cli::main_with(&qsense_cli::Cli::parse())
}

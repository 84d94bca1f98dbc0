//! Command-line front end for the `invsim` solver: argument parsing, input
//! files and result files.

pub mod args;
pub mod commands;
pub mod error;
pub mod input;
pub mod output;

pub use args::{Cli, Command};
pub use error::CliError;

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Inverse(a) => commands::inverse(&a),
        Command::Forward(a) => commands::forward(&a),
        Command::Roundtrip(a) => commands::roundtrip(&a),
        Command::Trim(a) => commands::trim(&a),
        Command::Converge(a) => commands::converge(&a),
    }
}

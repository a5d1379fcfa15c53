//! Command-line front end for the `transduction` library.
//!
//! Exit codes: 0 success, 2 invalid input, 3 valid input the operation
//! cannot handle, 64 malformed command line.

pub mod args;
pub mod commands;
pub mod error;
pub mod matrix_file;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::{Cli, Command};
pub use error::{CliError, CliResult, ExitKind};

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Classify(a) => commands::classify(a, stdout),
        Command::Correct(a) => commands::correct_cmd(a, stdout),
        Command::SweepLossy(a) => commands::sweep_lossy(a, stdout),
        Command::CodeFidelity(a) => commands::code_fidelity(a, stdout),
        Command::SixPass(a) => commands::six_pass(a, stdout),
    }
}

/// Parse `args`, run the command and return the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    ExitKind::Usage.code()
                }
            };
        }
    };
    match run(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

//! `pencil`: spectra of the damped-wave pencil from the command line.
//!
//! Every subcommand writes one data file (CSV or JSON) atomically and prints a
//! one-line summary per result to stdout. CSV output carries its run metadata
//! in a `<file>.meta.json` sidecar; JSON output embeds it. Failures print a
//! JSON error record to stderr and exit with 2 (parameters), 3 (numerics) or
//! 4 (I/O).

/// `println!` that ignores a closed stdout (`pencil … | head`).
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Error carried to `main`, classified for the exit code.
#[derive(Debug)]
pub enum CliError {
    Core(pencil_core::Error),
    Parameter(String),
    Io { path: String, source: std::io::Error },
}

impl From<pencil_core::Error> for CliError {
    fn from(e: pencil_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e.kind() {
                pencil_core::ErrorKind::Parameter => 2,
                pencil_core::ErrorKind::Numerical => 3,
            },
            CliError::Parameter(_) => 2,
            CliError::Io { .. } => 4,
        }
    }

    fn record(&self) -> serde_json::Value {
        let (tag, kind, message) = match self {
            CliError::Core(e) => (
                e.tag().to_string(),
                match e.kind() {
                    pencil_core::ErrorKind::Parameter => "parameter",
                    pencil_core::ErrorKind::Numerical => "numerical",
                },
                e.to_string(),
            ),
            CliError::Parameter(m) => ("parameter".to_string(), "parameter", m.clone()),
            CliError::Io { path, source } => {
                ("io".to_string(), "io", format!("{path}: {source}"))
            }
        };
        serde_json::json!({
            "error": tag,
            "kind": kind,
            "message": message,
            "exit_code": self.exit_code(),
        })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let err = CliError::Parameter(e.render().to_string().trim().to_string());
            eprintln!("{}", err.record());
            return ExitCode::from(err.exit_code());
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.record());
            ExitCode::from(err.exit_code())
        }
    }
}

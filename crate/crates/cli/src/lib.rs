//! Command-line front end for `polymut-core`. Every subcommand prints one
//! JSON document (or a table rendering of it) to stdout.

mod args;
mod commands;
mod table;

pub use args::{Cli, Format};

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::{json, Value};

/// Environment variable bounding the height-function scan.
pub const MAX_SCAN_VAR: &str = "POLYMUT_MAX_SCAN";

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Domain(#[from] polymut_core::Error),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Input(_) => "input",
            CliError::Domain(e) => e.kind(),
        }
    }
}

/// Output of a successful command: the document and whether the checks it
/// reports passed.
pub(crate) struct Report {
    pub doc: Value,
    pub pass: bool,
}

impl Report {
    pub fn ok(doc: Value) -> Self {
        Report { doc, pass: true }
    }
}

/// Runs the command line `argv` (including the program name).
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match commands::execute(&cli.command) {
        Ok(report) => Outcome {
            code: if report.pass { 0 } else { 1 },
            stdout: render(&report.doc, cli.format),
            stderr: String::new(),
        },
        Err(CliError::Usage(msg)) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(e) => {
            let doc = json!({"error": {"kind": e.kind(), "message": e.to_string()}});
            Outcome {
                code: 1,
                stdout: render(&doc, Format::Json),
                stderr: String::new(),
            }
        }
    }
}

fn render(doc: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("JSON values serialize");
            s.push('\n');
            s
        }
        Format::Table => table::render(doc),
    }
}

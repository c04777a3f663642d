//! Command-line front end: argument parsing, model files and JSON reports.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 input or
//! parse error.

mod args;
mod commands;
mod model_file;

use std::ffi::OsString;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub use args::{Cli, Command};
pub use model_file::{parse_model, Metadata, ModelFile};

use crate::error::Error;

pub const SCHEMA_VERSION: &str = "1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Dimension(String),
    #[error("{0}")]
    Lib(#[from] Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "UsageError",
            CliError::Io(_) => "IoError",
            CliError::Parse(_) => "ParseError",
            CliError::Dimension(_) => "DimensionMismatch",
            CliError::Lib(e) => e.kind(),
            CliError::Internal(_) => "InternalError",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) | CliError::Parse(_) | CliError::Dimension(_) => EXIT_INPUT,
            CliError::Lib(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Lib(_) => EXIT_INPUT,
            CliError::Internal(_) => EXIT_NUMERICAL,
        }
    }
}

/// SHA-256 over every file the command read, in read order.
#[derive(Default)]
pub(crate) struct InputsDigest {
    hasher: Sha256,
}

impl InputsDigest {
    pub(crate) fn add(&mut self, bytes: &[u8]) {
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    pub(crate) fn read(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.add(&bytes);
        Ok(bytes)
    }

    fn finish(self) -> String {
        format!("sha256:{}", hex::encode(self.hasher.finalize()))
    }
}

/// Entry point used by the binary. Returns the process exit code.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
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
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    execute(&cli.command, stdout, stderr)
}

fn execute(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let common = command.common();
    let mut digest = InputsDigest::default();
    let mut partial = None;
    let outcome = catch_unwind(AssertUnwindSafe(|| commands::dispatch(command, &mut digest, &mut partial)))
        .unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            Err(CliError::Internal(msg))
        });

    let mut report = json!({
        "schema_version": SCHEMA_VERSION,
        "tool": { "name": "ltikit", "version": env!("CARGO_PKG_VERSION") },
        "command": command.name(),
        "args": serde_json::to_value(command).unwrap_or(Value::Null),
        "inputs_digest": digest.finish(),
        "diagnostics": commands::diagnostics(common),
    });
    let code = match &outcome {
        Ok(result) => {
            report["status"] = json!("ok");
            report["result"] = result.clone();
            EXIT_OK
        }
        Err(e) => {
            report["status"] = json!("error");
            report["error"] = json!({ "kind": e.kind(), "message": e.to_string() });
            if let Some(value) = partial {
                report["result"] = value;
            }
            let _ = writeln!(stderr, "error[{}]: {e}", e.kind());
            e.exit_code()
        }
    };
    if !common.reproducible {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        report["timestamp_unix"] = json!(now);
    }

    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    match &common.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                let _ = writeln!(stderr, "error[IoError]: {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => {
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    code
}

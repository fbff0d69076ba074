//! Command-line front end: roofline, table, curve, scan and verify-kernels.

pub mod args;
pub mod commands;
pub mod format;
pub mod svg;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;
use thiserror::Error;

use crate::args::{Cli, Command};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(i32)]
pub enum ExitStatus {
    Success = 0,
    Validation = 1,
    Io = 2,
    VerificationFailed = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Core(#[from] embdim::Error),
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Validation(_) => ExitStatus::Validation,
            CliError::Io { .. } | CliError::Core(embdim::Error::Io { .. }) => ExitStatus::Io,
            CliError::Core(_) => ExitStatus::Validation,
        }
    }

    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub body: String,
    /// Written atomically here instead of standard output when set.
    pub path: Option<PathBuf>,
    pub warnings: Vec<String>,
    pub status: ExitStatus,
}

impl Output {
    pub(crate) fn new(body: String, path: Option<PathBuf>) -> Self {
        Self {
            body,
            path,
            warnings: Vec::new(),
            status: ExitStatus::Success,
        }
    }
}

/// Writes through a temporary file in the target directory, then renames, so
/// a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn execute(command: Command) -> Result<Output, CliError> {
    match command {
        Command::Roofline(a) => commands::roofline(&a),
        Command::Table(a) => commands::table(&a),
        Command::Curve(a) => commands::curve(&a),
        Command::Scan(a) => commands::scan(&a),
        Command::VerifyKernels(a) => commands::verify_kernels(&a),
    }
}

/// Parses `args`, runs the command and reports to `out` / `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{e}");
            return ExitStatus::Success;
        }
        Err(e) => {
            let _ = write!(err, "{e}");
            return ExitStatus::Validation;
        }
    };
    let result = execute(cli.command).and_then(|output| {
        match &output.path {
            Some(path) => write_atomic(path, &output.body)?,
            None => out
                .write_all(output.body.as_bytes())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))?,
        }
        Ok(output)
    });
    match result {
        Ok(output) => {
            for w in &output.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            output.status
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.status()
        }
    }
}

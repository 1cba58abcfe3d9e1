//! Command implementations behind the CLI.
//!
//! Exit code contract: 0 success, 1 input error, 2 zero yield (a run
//! that produced no output rows), 3 backend failure after retries.

pub mod evaluate;
pub mod fuse;
pub mod project;
pub mod prompt;
pub mod trainset;

use std::fmt;
use std::path::{Path, PathBuf};

use crate::config::ConfigError;
use crate::pipeline::PipelineError;

#[derive(Debug)]
pub enum CmdError {
    /// Unreadable or malformed inputs, bad arguments, bad config.
    Input(String),
    /// The command ran but produced zero output rows.
    ZeroYield(String),
    /// A backend service failed after retries.
    Backend(String),
}

impl CmdError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CmdError::Input(_) => 1,
            CmdError::ZeroYield(_) => 2,
            CmdError::Backend(_) => 3,
        }
    }

    pub fn input(err: impl fmt::Display) -> Self {
        CmdError::Input(err.to_string())
    }
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Input(msg) | CmdError::ZeroYield(msg) | CmdError::Backend(msg) => {
                f.write_str(msg)
            }
        }
    }
}

impl From<ConfigError> for CmdError {
    fn from(err: ConfigError) -> Self {
        CmdError::Input(err.to_string())
    }
}

impl From<PipelineError> for CmdError {
    fn from(err: PipelineError) -> Self {
        if err.is_backend() {
            CmdError::Backend(err.to_string())
        } else {
            CmdError::Input(err.to_string())
        }
    }
}

impl From<crate::backend::BackendError> for CmdError {
    fn from(err: crate::backend::BackendError) -> Self {
        CmdError::Input(err.to_string())
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String, CmdError> {
    std::fs::read_to_string(path)
        .map_err(|err| CmdError::Input(format!("cannot read {}: {err}", path.display())))
}

pub(crate) fn write_file(path: &Path, contents: &[u8]) -> Result<(), CmdError> {
    std::fs::write(path, contents)
        .map_err(|err| CmdError::Input(format!("cannot write {}: {err}", path.display())))
}

/// `out.ext` -> `out.ext.suffix` next to the main output.
pub(crate) fn sibling_path(output: &Path, suffix: &str) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    output.with_file_name(name)
}

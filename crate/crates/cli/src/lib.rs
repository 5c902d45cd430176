//! Front end for the `freeprod` library: problem files, the four commands
//! and their text output.
//!
//! Every command prints a record of `key: value` lines in a fixed order.
//! Exit codes: 0 success (or member), 1 non-member, 2 input or internal
//! error, 3 resource cap exceeded.

pub mod commands;
pub mod problem;

use freeprod::{GroupError, KuroshError};
use thiserror::Error;

pub use commands::{run, Command, Options, Report};
pub use problem::Problem;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}:{line}: {source}")]
    Group {
        path: String,
        line: usize,
        #[source]
        source: GroupError,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("decomposition failed: {0}")]
    Kurosh(#[from] KuroshError),
    #[error("decomposition does not reproduce the subgroup graph: {0}")]
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Group {
                source: GroupError::CapExceeded(_) | GroupError::TooLarge { .. },
                ..
            } => 3,
            _ => 2,
        }
    }
}

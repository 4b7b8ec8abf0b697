use std::fmt;
use std::path::PathBuf;

use riscorr_core::RisError;
use thiserror::Error;

use crate::config::ConfigIssue;

/// Everything that can stop a run, each class with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", IssueList(.0))]
    Config(Vec<ConfigIssue>),

    #[error(transparent)]
    Model(#[from] RisError),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

struct IssueList<'a>(&'a [ConfigIssue]);

impl fmt::Display for IssueList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  {issue}")?;
        }
        Ok(())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Model(RisError::CapExceeded { .. }) => 4,
            Self::Model(_) => 3,
            Self::Io { .. } => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}

//! CLI error categories mapped to exit codes: 1 usage, 2 config, 3 numeric
//! (domain, solver, or runtime IO failures). Every error prints one
//! machine-parseable line `error: <category>: <reason>` on stderr.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Numeric(String),
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Numeric(_) => "numeric",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Config(m) | CliError::Numeric(m) => m,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.category(), self.message())
    }
}

/// Collapse multi-line library/parser messages into a single stderr line.
pub fn single_line(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}

macro_rules! numeric_from {
    ($($ty:ty),*) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Numeric(e.to_string())
            }
        })*
    };
}

numeric_from!(
    allocnet::graph::GraphError,
    allocnet::percolation::PercolationError,
    allocnet::dynamics::DynamicsError,
    allocnet::maps::MapError,
    allocnet::objective::ObjectiveError,
    allocnet::sim::SimError,
    std::io::Error
);

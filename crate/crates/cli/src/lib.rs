//! Command-line front end of the L3 computations.
//!
//! Every command produces a [`record::ResultRecord`] that can be written as
//! text, CSV or JSON. Payloads contain no timing information, so repeated
//! runs with the same flags give identical bytes.

pub mod commands;
pub mod config;
pub mod criteria;
pub mod record;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(#[from] l3lab_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status: 2 for argument errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }
}

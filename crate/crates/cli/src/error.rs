use std::io;
use std::path::PathBuf;

use psimc_core::logic::LogicError;
use psimc_core::measures::MeasureError;
use psimc_core::privacy::PrivacyError;
use psimc_core::protocols::ProtocolError;
use psimc_core::runtime::{AbortCode, ChannelError};
use thiserror::Error;

/// Process exit statuses.
pub mod exit {
    pub const OK: u8 = 0;
    /// `audit` found an input-privacy violation.
    pub const VIOLATION: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const NETWORK: u8 = 3;
    pub const PROTOCOL: u8 = 4;
    pub const INPUT: u8 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Kb {
        path: PathBuf,
        #[source]
        source: LogicError,
    },
    #[error("{path}: malformed transcript: {message}")]
    Transcript { path: PathBuf, message: String },
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Privacy(#[from] PrivacyError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => exit::CONFIG,
            CliError::Channel(_) => exit::NETWORK,
            CliError::Protocol(e) => protocol_exit_code(e),
            CliError::Read { .. }
            | CliError::Write { .. }
            | CliError::Kb { .. }
            | CliError::Transcript { .. }
            | CliError::Logic(_)
            | CliError::Measure(_)
            | CliError::Privacy(_) => exit::INPUT,
        }
    }
}

fn protocol_exit_code(e: &ProtocolError) -> u8 {
    match e {
        ProtocolError::ConfigMismatch { .. } => exit::CONFIG,
        ProtocolError::Channel(_) => exit::NETWORK,
        ProtocolError::PeerAbort { code, .. } => match code {
            AbortCode::Config => exit::CONFIG,
            AbortCode::Input => exit::INPUT,
            AbortCode::Protocol => exit::PROTOCOL,
        },
        ProtocolError::He(_)
        | ProtocolError::UnexpectedFrame { .. }
        | ProtocolError::SymmetricMismatch { .. }
        | ProtocolError::Violation(_) => exit::PROTOCOL,
        ProtocolError::Logic(_)
        | ProtocolError::Measure(_)
        | ProtocolError::InvalidInput(_)
        | ProtocolError::InconsistentKb => exit::INPUT,
    }
}

//! Two-party protocols as blocking state machines over a [`Channel`](crate::runtime::Channel).
//!
//! Each protocol has a key holder, who generates the session key pair, encrypts its own input
//! and decrypts the answer, and a peer, who evaluates a fixed public circuit over ciphertexts.
//! Role `A` holds the key; in symmetric mode the run repeats with `B` holding the key so both
//! parties learn the result.
//!
//! | protocol | key holder input | peer input | key holder output |
//! |----------|------------------|------------|-------------------|
//! | `alg1`   | interpretation   | interpretation | Hamming distance |
//! | `alg1_binary` | bit sequence | bit sequence | 0 iff some index is 1 on both sides |
//! | `alg2`   | knowledge base   | knowledge base | drastic measure of the union |
//! | `alg3`   | model list       | model list     | min pairwise distance; sees every distance |
//! | `alg4`   | model list, padded to 2^|At| | model list | min pairwise distance only |
//! | `psi`    | field element    | field element  | 1 iff equal |

pub mod circuits;
mod flows;
mod session;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::he::{HeError, SchemeParams};
use crate::limits::Limits;
use crate::logic::{LogicError, Signature};
use crate::measures::MeasureError;
use crate::runtime::{AbortCode, ChannelError, Counters, Role, Transcript};
use crate::Exec;

pub use flows::{
    run, run_alg1, run_alg1_binary, run_alg2, run_alg3, run_alg4, run_local, run_psi_singleton,
    Input,
};
pub use session::pad_models;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    Alg1,
    Alg1Binary,
    Alg2,
    Alg3,
    Alg4,
    Psi,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 6] = [
        ProtocolKind::Alg1,
        ProtocolKind::Alg1Binary,
        ProtocolKind::Alg2,
        ProtocolKind::Alg3,
        ProtocolKind::Alg4,
        ProtocolKind::Psi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Alg1 => "alg1",
            ProtocolKind::Alg1Binary => "alg1_binary",
            ProtocolKind::Alg2 => "alg2",
            ProtocolKind::Alg3 => "alg3",
            ProtocolKind::Alg4 => "alg4",
            ProtocolKind::Psi => "psi",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProtocolKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown protocol `{s}`"))
    }
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    He(#[from] HeError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("session configuration differs from the peer's (ours {ours}, theirs {theirs})")]
    ConfigMismatch { ours: String, theirs: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("knowledge base is inconsistent on its own")]
    InconsistentKb,
    #[error("peer aborted ({code:?}): {reason}")]
    PeerAbort { code: AbortCode, reason: String },
    #[error("unexpected frame: wanted {expected}, got {got}")]
    UnexpectedFrame {
        expected: &'static str,
        got: &'static str,
    },
    #[error("symmetric runs disagree: ours {ours}, peer's {theirs}")]
    SymmetricMismatch { ours: u64, theirs: u64 },
    #[error("protocol violation: {0}")]
    Violation(String),
}

/// Settings both parties must share. Everything except `seed` and `exec` enters the config
/// hash exchanged at session start.
#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub signature: Signature,
    pub params: SchemeParams,
    pub seed: u64,
    pub symmetric: bool,
    pub limits: Limits,
    pub exec: Exec,
}

impl SessionConfig {
    pub fn new(signature: Signature, seed: u64) -> Self {
        SessionConfig {
            signature,
            params: SchemeParams::default(),
            seed,
            symmetric: false,
            limits: Limits::default(),
            exec: Exec::default(),
        }
    }

    pub fn symmetric(mut self, on: bool) -> Self {
        self.symmetric = on;
        self
    }

    pub fn with_params(mut self, params: SchemeParams) -> Self {
        self.params = params;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn config_hash(&self, protocol: ProtocolKind) -> String {
        let mut h = Sha256::new();
        h.update(b"psimc-session-v1\n");
        h.update(protocol.name().as_bytes());
        h.update(b"\n");
        for atom in self.signature.atoms() {
            h.update(atom.name().as_bytes());
            h.update(b",");
        }
        h.update(format!(
            "\n{}\n{}\n{}\n",
            self.params.modulus, self.params.rho, self.symmetric
        ));
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Result of one protocol session for one party.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolOutcome {
    pub protocol: ProtocolKind,
    pub role: Role,
    /// Output learned by this party; `None` for a peer outside symmetric mode.
    pub result: Option<u64>,
    /// Every value this party decrypted (e.g. the meta-encrypted list for `alg4`).
    pub decrypted: Vec<u64>,
    /// One transcript per run: a single run, or two in symmetric mode.
    pub transcripts: Vec<Transcript>,
    pub counters: Counters,
}

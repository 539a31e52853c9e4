//! Post-hoc checks of recorded transcripts and the guessing bounds for `alg4` outputs.
//!
//! Both report types serialize to JSON. A [`LeakageReport`] looks like
//!
//! ```json
//! {"protocol":"alg3","session_id":"…","view":"A","key_holder":"A","atoms":3,
//!  "key_holder_observed":[2,1,1,2,2],"peer_observed":[],
//!  "ciphertexts_from_key_holder":12,"ciphertexts_from_peer":4,
//!  "structure":{"vector_lengths":[3],"vector_rounds":4,"peer_model_count":2,"list_length":null},
//!  "findings":[{"rule":"decrypted_outputs","level":"disclosed_by_design","detail":"…"}]}
//! ```
//!
//! and a [`GuessingReport`] carries rationals as `[numerator, denominator]` pairs and
//! interpretations as bit strings.

mod audit;
mod guessing;

use thiserror::Error;

use crate::logic::LogicError;
use crate::measures::MeasureError;

pub use audit::{audit_transcript, AuditRule, Finding, FindingLevel, LeakageReport, Structure};
pub use guessing::{
    guessing_probabilities, guessing_probabilities_with, mod_below_alg4, GuessingReport,
};

#[derive(Debug, Error)]
pub enum PrivacyError {
    #[error("transcript is incomplete; the session did not finish")]
    Incomplete,
    #[error("transcript records protocol `{found}`, audit requested for `{expected}`")]
    ProtocolMismatch { expected: String, found: String },
    #[error("knowledge base is inconsistent on its own")]
    InconsistentKb,
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

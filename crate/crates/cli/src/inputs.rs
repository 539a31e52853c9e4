//! Knowledge-base files and their translation into protocol inputs.

use std::fs;
use std::path::Path;

use psimc_core::logic::{
    cwa_interpretation, parse_kb, satisfaction_sequence_with, Interpretation, KnowledgeBase,
    Signature,
};
use psimc_core::protocols::{Input, ProtocolKind};
use psimc_core::{limits::Limits, Exec};

use crate::error::CliError;

pub fn load_kb(path: &Path) -> Result<KnowledgeBase, CliError> {
    let src = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_kb(&src).map_err(|source| CliError::Kb {
        path: path.to_path_buf(),
        source,
    })
}

/// The explicit `--signature` list, or else every atom occurring in `kbs`.
pub fn signature(explicit: Option<&str>, kbs: &[&KnowledgeBase]) -> Result<Signature, CliError> {
    let sig = match explicit {
        Some(list) => Signature::parse_list(list)?,
        None => kbs
            .iter()
            .fold(Signature::default(), |acc, k| acc.union(&k.atoms())),
    };
    if sig.is_empty() {
        return Err(CliError::Usage(
            "empty signature; pass --signature or a knowledge base with atoms".into(),
        ));
    }
    Ok(sig)
}

/// Row index of an interpretation (first atom most significant).
pub fn row_index(w: &Interpretation) -> u64 {
    w.bits().iter().fold(0, |acc, &b| (acc << 1) | u64::from(b))
}

/// What a party feeds into `kind` when its private data is the knowledge base `k`.
///
/// `alg1` and `psi` take the closed-world interpretation of `k` (for `psi`, its row index);
/// `alg1_binary` takes the satisfaction sequence; the others take `k` itself.
pub fn protocol_input(
    kind: ProtocolKind,
    k: &KnowledgeBase,
    sig: &Signature,
    limits: Limits,
) -> Result<Input, CliError> {
    sig.check_cap(limits.max_atoms)?;
    Ok(match kind {
        ProtocolKind::Alg1 => Input::Interpretation(cwa_interpretation(k, sig)?),
        ProtocolKind::Psi => Input::Element(row_index(&cwa_interpretation(k, sig)?)),
        ProtocolKind::Alg1Binary => {
            Input::Bits(satisfaction_sequence_with(k, sig, limits, Exec::default())?)
        }
        ProtocolKind::Alg2 | ProtocolKind::Alg3 | ProtocolKind::Alg4 => Input::Kb(k.clone()),
    })
}

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::PrivacyError;
use crate::limits::Limits;
use crate::logic::{interpretation_at, models_with, Interpretation, KnowledgeBase, Signature};
use crate::measures::min_mismatch_oracle_with;
use crate::Exec;

/// Chances of guessing one of B's models from the output of `alg4`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuessingReport {
    pub union_consistent: bool,
    /// Output of `alg4` on the two model sets.
    pub threshold: u64,
    /// `1 / |models(ka)|`.
    pub consistent_case_bound: Ratio<u64>,
    /// `1 / |Ω(At) \ Mod_<Alg4|`.
    pub inconsistent_case_bound: Ratio<u64>,
    pub mod_below_alg4: Vec<Interpretation>,
}

fn model_sets(
    ka: &KnowledgeBase,
    kb: &KnowledgeBase,
    sig: &Signature,
    limits: Limits,
    exec: Exec,
) -> Result<(Vec<Interpretation>, Vec<Interpretation>), PrivacyError> {
    let ma = models_with(ka, sig, limits, exec)?;
    let mb = models_with(kb, sig, limits, exec)?;
    if ma.is_empty() || mb.is_empty() {
        return Err(PrivacyError::InconsistentKb);
    }
    Ok((ma, mb))
}

fn below(
    ma: &[Interpretation],
    threshold: u64,
    sig: &Signature,
    exec: Exec,
) -> Result<Vec<Interpretation>, PrivacyError> {
    let mut out = Vec::new();
    for i in 0..sig.interpretation_count() {
        let m = interpretation_at(i, sig);
        if min_mismatch_oracle_with(ma, std::slice::from_ref(&m), exec)?.value() < threshold {
            out.push(m);
        }
    }
    Ok(out)
}

/// Interpretations `m` for which `alg4(models(ka), {m})` is below `alg4(models(ka), models(kb))`,
/// in ascending order.
pub fn mod_below_alg4(
    ka: &KnowledgeBase,
    kb: &KnowledgeBase,
    sig: &Signature,
) -> Result<Vec<Interpretation>, PrivacyError> {
    let (ma, mb) = model_sets(ka, kb, sig, Limits::default(), Exec::default())?;
    let threshold = min_mismatch_oracle_with(&ma, &mb, Exec::default())?.value();
    below(&ma, threshold, sig, Exec::default())
}

pub fn guessing_probabilities(
    ka: &KnowledgeBase,
    kb: &KnowledgeBase,
    sig: &Signature,
) -> Result<GuessingReport, PrivacyError> {
    guessing_probabilities_with(ka, kb, sig, Limits::default(), Exec::default())
}

pub fn guessing_probabilities_with(
    ka: &KnowledgeBase,
    kb: &KnowledgeBase,
    sig: &Signature,
    limits: Limits,
    exec: Exec,
) -> Result<GuessingReport, PrivacyError> {
    let (ma, mb) = model_sets(ka, kb, sig, limits, exec)?;
    let threshold = min_mismatch_oracle_with(&ma, &mb, exec)?.value();
    let below = below(&ma, threshold, sig, exec)?;
    // B's own models are never below the threshold, so the complement is non-empty.
    let rest = sig.interpretation_count() - below.len() as u64;
    Ok(GuessingReport {
        union_consistent: threshold == 0,
        threshold,
        consistent_case_bound: Ratio::new(1, ma.len() as u64),
        inconsistent_case_bound: Ratio::new(1, rest),
        mod_below_alg4: below,
    })
}

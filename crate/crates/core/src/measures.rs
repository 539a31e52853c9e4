//! Plaintext inconsistency measures; ground truth for every protocol result.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::limits::Limits;
use crate::logic::{
    models_with, CompiledKb, Interpretation, KnowledgeBase, LogicError, Signature,
    ThreeValuedInterpretation, TriValue,
};
use crate::Exec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeasureError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error("interpretations have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("model set is empty")]
    EmptyModelSet,
}

/// Value of an inconsistency measure; zero iff the measured base is consistent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InconsistencyValue(pub u64);

impl InconsistencyValue {
    pub fn value(self) -> u64 {
        self.0
    }
}

impl std::fmt::Display for InconsistencyValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Drastic measure: 1 if `k` has no model over `sig`, else 0.
pub fn drastic(k: &KnowledgeBase, sig: &Signature) -> Result<InconsistencyValue, MeasureError> {
    drastic_with(k, sig, Limits::default(), Exec::default())
}

pub fn drastic_with(
    k: &KnowledgeBase,
    sig: &Signature,
    limits: Limits,
    exec: Exec,
) -> Result<InconsistencyValue, MeasureError> {
    sig.check_cap(limits.max_atoms)?;
    let compiled = CompiledKb::new(k, sig)?;
    let consistent = exec
        .min_range(sig.interpretation_count(), |row| {
            compiled.satisfied_by_row(row).then_some(row)
        })
        .is_some();
    Ok(InconsistencyValue(u64::from(!consistent)))
}

/// Contension measure: fewest atoms assigned `both` over all three-valued models of `k`.
///
/// Brute force over the 3^|sig| three-valued interpretations.
pub fn contension(k: &KnowledgeBase, sig: &Signature) -> Result<InconsistencyValue, MeasureError> {
    contension_with(k, sig, Limits::default(), Exec::default())
}

pub fn contension_with(
    k: &KnowledgeBase,
    sig: &Signature,
    limits: Limits,
    exec: Exec,
) -> Result<InconsistencyValue, MeasureError> {
    sig.check_cap(limits.max_atoms_three_valued)?;
    let compiled = CompiledKb::new(k, sig)?;
    let n = sig.len();
    let total = 3u64.pow(n as u32);
    let best = exec.min_range(total, |code| {
        let values = tri_from_code(code, n);
        compiled
            .satisfied_by_tri(&values)
            .then(|| values.iter().filter(|&&v| v == TriValue::Both).count() as u64)
    });
    // assigning `both` everywhere satisfies any formula, so a minimum always exists
    Ok(InconsistencyValue(best.unwrap_or(n as u64)))
}

fn tri_from_code(mut code: u64, n: usize) -> Vec<TriValue> {
    let mut values = vec![TriValue::False; n];
    for v in values.iter_mut().rev() {
        *v = match code % 3 {
            0 => TriValue::False,
            1 => TriValue::Both,
            _ => TriValue::True,
        };
        code /= 3;
    }
    values
}

/// Number of positions where the two interpretations differ.
pub fn hamming(w1: &Interpretation, w2: &Interpretation) -> Result<u64, MeasureError> {
    if w1.len() != w2.len() {
        return Err(MeasureError::LengthMismatch(w1.len(), w2.len()));
    }
    Ok(w1
        .bits()
        .iter()
        .zip(w2.bits())
        .filter(|(a, b)| a != b)
        .count() as u64)
}

/// Keeps agreeing atoms and marks every disagreement `both`.
pub fn combine3(
    i1: &Interpretation,
    i2: &Interpretation,
) -> Result<ThreeValuedInterpretation, MeasureError> {
    if i1.len() != i2.len() {
        return Err(MeasureError::LengthMismatch(i1.len(), i2.len()));
    }
    Ok(ThreeValuedInterpretation::new(
        i1.bits()
            .iter()
            .zip(i2.bits())
            .map(|(&a, &b)| {
                if a == b {
                    TriValue::from(a)
                } else {
                    TriValue::Both
                }
            })
            .collect(),
    ))
}

/// Smallest Hamming distance over all pairs. Duplicates in either list are allowed.
pub fn min_mismatch_oracle(
    ma: &[Interpretation],
    mb: &[Interpretation],
) -> Result<InconsistencyValue, MeasureError> {
    min_mismatch_oracle_with(ma, mb, Exec::default())
}

pub fn min_mismatch_oracle_with(
    ma: &[Interpretation],
    mb: &[Interpretation],
    exec: Exec,
) -> Result<InconsistencyValue, MeasureError> {
    if ma.is_empty() || mb.is_empty() {
        return Err(MeasureError::EmptyModelSet);
    }
    let len = ma[0].len();
    if let Some(bad) = ma.iter().chain(mb).find(|w| w.len() != len) {
        return Err(MeasureError::LengthMismatch(len, bad.len()));
    }
    let best = exec
        .min_pairs(ma, mb, |a, b| hamming(a, b).expect("lengths checked"))
        .expect("non-empty");
    Ok(InconsistencyValue(best))
}

/// Convenience: min-mismatch upper bound straight from the two knowledge bases.
pub fn min_mismatch_of_kbs(
    ka: &KnowledgeBase,
    kb: &KnowledgeBase,
    sig: &Signature,
) -> Result<InconsistencyValue, MeasureError> {
    let ma = models_with(ka, sig, Limits::default(), Exec::default())?;
    let mb = models_with(kb, sig, Limits::default(), Exec::default())?;
    min_mismatch_oracle(&ma, &mb)
}

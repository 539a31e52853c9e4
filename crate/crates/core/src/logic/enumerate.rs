use super::eval::Compiled;
use super::{BitSequence, Interpretation, KnowledgeBase, LogicError, Signature};
use crate::limits::Limits;
use crate::Exec;

/// A knowledge base resolved against a signature, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledKb {
    formulas: Vec<Compiled>,
    atoms: usize,
}

impl CompiledKb {
    pub fn new(k: &KnowledgeBase, sig: &Signature) -> Result<Self, LogicError> {
        Ok(CompiledKb {
            formulas: k
                .formulas()
                .map(|f| Compiled::new(f, sig))
                .collect::<Result<_, _>>()?,
            atoms: sig.len(),
        })
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    /// Whether row `index` (ascending binary order) satisfies every formula.
    pub fn satisfied_by_row(&self, index: u64) -> bool {
        self.formulas.iter().all(|f| f.eval_row(index, self.atoms))
    }

    pub fn satisfied_by(&self, w: &Interpretation) -> bool {
        self.formulas.iter().all(|f| f.eval_bits(w.bits()))
    }

    pub(crate) fn satisfied_by_tri(&self, values: &[crate::logic::TriValue]) -> bool {
        self.formulas
            .iter()
            .all(|f| f.eval_tri(values).is_designated())
    }
}

pub fn interpretation_at(index: u64, sig: &Signature) -> Interpretation {
    Interpretation::from_index(index, sig.len())
}

/// All models of `k` over `sig`, ascending.
pub fn models(k: &KnowledgeBase, sig: &Signature) -> Result<Vec<Interpretation>, LogicError> {
    models_with(k, sig, Limits::default(), Exec::default())
}

pub fn models_with(
    k: &KnowledgeBase,
    sig: &Signature,
    limits: Limits,
    exec: Exec,
) -> Result<Vec<Interpretation>, LogicError> {
    let seq = satisfaction_sequence_with(k, sig, limits, exec)?;
    Ok(seq
        .bits()
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| Interpretation::from_index(i as u64, sig.len()))
        .collect())
}

/// Bit `i` is set iff the `i`-th interpretation in ascending binary order satisfies `k`.
pub fn satisfaction_sequence(
    k: &KnowledgeBase,
    sig: &Signature,
) -> Result<BitSequence, LogicError> {
    satisfaction_sequence_with(k, sig, Limits::default(), Exec::default())
}

pub fn satisfaction_sequence_with(
    k: &KnowledgeBase,
    sig: &Signature,
    limits: Limits,
    exec: Exec,
) -> Result<BitSequence, LogicError> {
    sig.check_cap(limits.max_atoms)?;
    let compiled = CompiledKb::new(k, sig)?;
    let bits = exec.map_range(sig.interpretation_count(), |row| {
        compiled.satisfied_by_row(row)
    });
    Ok(BitSequence::new(bits))
}

/// Closed-world reading of `k`: an atom is true iff every model makes it true.
pub fn cwa_interpretation(
    k: &KnowledgeBase,
    sig: &Signature,
) -> Result<Interpretation, LogicError> {
    let ms = models(k, sig)?;
    if ms.is_empty() {
        return Err(LogicError::InconsistentKb);
    }
    let bits = (0..sig.len())
        .map(|j| ms.iter().all(|m| m.get(j)))
        .collect();
    Ok(Interpretation::new(bits))
}

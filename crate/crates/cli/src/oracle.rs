use psimc_core::limits::Limits;
use psimc_core::logic::{models_with, KnowledgeBase, Signature};
use psimc_core::measures::{contension_with, drastic_with, min_mismatch_oracle_with};
use psimc_core::Exec;
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Serialize, PartialEq, Eq)]
pub struct MeasurePair {
    pub drastic: u64,
    pub contension: u64,
}

#[derive(Debug, Serialize)]
pub struct OracleReport {
    pub signature: Vec<String>,
    pub kb_a: MeasurePair,
    pub kb_b: Option<MeasurePair>,
    pub union: Option<MeasurePair>,
    /// Minimum Hamming distance between the two model sets; `None` unless both bases are
    /// individually consistent.
    pub min_mismatch: Option<u64>,
}

fn pair(k: &KnowledgeBase, sig: &Signature, limits: Limits) -> Result<MeasurePair, CliError> {
    let exec = Exec::default();
    Ok(MeasurePair {
        drastic: drastic_with(k, sig, limits, exec)?.value(),
        contension: contension_with(k, sig, limits, exec)?.value(),
    })
}

pub fn oracle(
    ka: &KnowledgeBase,
    kb: Option<&KnowledgeBase>,
    sig: &Signature,
    limits: Limits,
) -> Result<OracleReport, CliError> {
    let kb_a = pair(ka, sig, limits)?;
    let (kb_b, union, min_mismatch) = match kb {
        None => (None, None, None),
        Some(kb) => {
            let exec = Exec::default();
            let ma = models_with(ka, sig, limits, exec)?;
            let mb = models_with(kb, sig, limits, exec)?;
            let mm = if ma.is_empty() || mb.is_empty() {
                None
            } else {
                Some(min_mismatch_oracle_with(&ma, &mb, exec)?.value())
            };
            (
                Some(pair(kb, sig, limits)?),
                Some(pair(&ka.union(kb), sig, limits)?),
                mm,
            )
        }
    };
    Ok(OracleReport {
        signature: names(sig),
        kb_a,
        kb_b,
        union,
        min_mismatch,
    })
}

pub fn names(sig: &Signature) -> Vec<String> {
    sig.atoms().iter().map(|a| a.name().to_string()).collect()
}

impl OracleReport {
    pub fn table(&self) -> String {
        let mut out = format!("signature: {}\n", self.signature.join(", "));
        out.push_str(&format!("{:<10}{:>4}{:>4}\n", "", "Id", "Ic"));
        let mut row = |name: &str, p: &MeasurePair| {
            out.push_str(&format!("{name:<10}{:>4}{:>4}\n", p.drastic, p.contension));
        };
        row("K_A", &self.kb_a);
        if let (Some(b), Some(u)) = (&self.kb_b, &self.union) {
            row("K_B", b);
            row("union", u);
        }
        if self.kb_b.is_some() {
            match self.min_mismatch {
                Some(m) => out.push_str(&format!("min-mismatch upper bound: {m}\n")),
                None => out.push_str("min-mismatch upper bound: n/a (an input is inconsistent)\n"),
            }
        }
        out
    }
}

use std::fs;
use std::path::Path;

use psimc_core::privacy::{audit_transcript, FindingLevel, LeakageReport};
use psimc_core::protocols::ProtocolKind;
use psimc_core::runtime::Transcript;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Deserialize)]
#[serde(untagged)]
enum TranscriptFile {
    Many(Vec<Transcript>),
    One(Box<Transcript>),
}

/// Audits a file holding one transcript or a JSON array of them.
pub fn audit_file(path: &Path) -> Result<Vec<LeakageReport>, CliError> {
    let malformed = |message: String| CliError::Transcript {
        path: path.to_path_buf(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let transcripts = match serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))? {
        TranscriptFile::Many(ts) => ts,
        TranscriptFile::One(t) => vec![*t],
    };
    if transcripts.is_empty() {
        return Err(malformed("no transcripts".into()));
    }
    transcripts
        .iter()
        .map(|t| {
            let kind: ProtocolKind = t.protocol.parse().map_err(malformed)?;
            audit_transcript(t, kind).map_err(|e| malformed(e.to_string()))
        })
        .collect()
}

pub fn table(reports: &[LeakageReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!(
            "{} session {} (view {}, key holder {}): {}\n",
            r.protocol,
            r.session_id,
            r.view,
            r.key_holder,
            if r.ip_holds() {
                "input privacy holds"
            } else {
                "INPUT PRIVACY VIOLATED"
            }
        ));
        for f in &r.findings {
            let level = match f.level {
                FindingLevel::DisclosedByDesign => "disclosed by design",
                FindingLevel::Advisory => "advisory",
                FindingLevel::Violation => "violation",
            };
            let rule = serde_json::to_value(f.rule).expect("rule serializes");
            let rule = rule.as_str().unwrap_or_default();
            out.push_str(&format!("  [{level}] {rule}: {}\n", f.detail));
        }
    }
    out
}

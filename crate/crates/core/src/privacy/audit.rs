use std::collections::{BTreeSet, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::PrivacyError;
use crate::he::{encrypt, field, keygen, Ciphertext, SchemeParams, ShapeDigest};
use crate::protocols::circuits::{self, Meter};
use crate::protocols::ProtocolKind;
use crate::runtime::{Payload, ResultBody, ResultStage, Role, Transcript};
use crate::Exec;

// Meta-encrypted entries whose multiplicative order is at most this are enumerable.
const LOW_ORDER: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditRule {
    /// Frames carry only key material, fresh ciphertexts and protocol-level control values.
    PlaintextInFrames,
    /// The key holder decrypts only the protocol's defined outputs; the peer decrypts nothing.
    DecryptedOutputs,
    /// Scalars inside returned ciphertexts are the circuit's public constants.
    PublicScalars,
    /// Returned ciphertexts have exactly the shape of the public circuit.
    CircuitShape,
    /// `alg4` sends exactly 2^|At| sub-rounds per peer model.
    Padding,
    /// Frames arrive in the order the protocol prescribes.
    FrameOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingLevel {
    /// Leakage the protocol accepts openly, e.g. the distance list of `alg3`.
    DisclosedByDesign,
    /// Structural weakness that does not break a rule.
    Advisory,
    Violation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub rule: AuditRule,
    pub level: FindingLevel,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structure {
    /// Distinct lengths of the key holder's ciphertext vectors.
    pub vector_lengths: Vec<usize>,
    /// Number of ciphertext vectors the key holder sent.
    pub vector_rounds: usize,
    /// Model count announced by the peer (`alg3`, `alg4`).
    pub peer_model_count: Option<u64>,
    /// Length of the candidate list (`alg4`).
    pub list_length: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub protocol: ProtocolKind,
    pub session_id: String,
    pub view: Role,
    pub key_holder: Role,
    pub atoms: usize,
    /// Plaintexts the key holder obtains: decryptions (when this is its view) and values the
    /// peer sends in the clear.
    pub key_holder_observed: Vec<u64>,
    /// Plaintexts the peer obtains from the key holder's frames.
    pub peer_observed: Vec<u64>,
    pub ciphertexts_from_key_holder: u64,
    pub ciphertexts_from_peer: u64,
    pub structure: Structure,
    pub findings: Vec<Finding>,
}

impl LeakageReport {
    /// No finding at violation level.
    pub fn ip_holds(&self) -> bool {
        self.violations().next().is_none()
    }

    pub fn violations(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| f.level == FindingLevel::Violation)
    }

    pub fn has(&self, rule: AuditRule, level: FindingLevel) -> bool {
        self.findings
            .iter()
            .any(|f| f.rule == rule && f.level == level)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Auditor {
    report: LeakageReport,
}

impl Auditor {
    fn flag(&mut self, rule: AuditRule, level: FindingLevel, detail: impl Into<String>) {
        self.report.findings.push(Finding {
            rule,
            level,
            detail: detail.into(),
        });
    }

    fn violation(&mut self, rule: AuditRule, detail: impl Into<String>) {
        self.flag(rule, FindingLevel::Violation, detail);
    }
}

/// Rebuilds the public circuits over a placeholder leaf; leaves do not enter shape digests.
struct Templates {
    leaf: Ciphertext,
    cache: HashMap<(usize, u64), Vec<ShapeDigest>>,
}

impl Templates {
    fn new() -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let kp = keygen(&SchemeParams::default(), &mut rng).expect("default params are valid");
        let leaf = encrypt(&kp.public, 0, &mut rng).expect("zero is in range");
        Templates {
            leaf,
            cache: HashMap::new(),
        }
    }

    fn leaves(&self, n: usize) -> Vec<Ciphertext> {
        vec![self.leaf.clone(); n]
    }

    fn hamming(&self, n: usize) -> ShapeDigest {
        let v = self.leaves(n);
        circuits::hamming(&Meter::new(), &v, &v, Exec::Sequential)
            .expect("template circuit")
            .shape_digest()
    }

    fn row_mismatch(&self, n: usize) -> ShapeDigest {
        let v = self.leaves(n);
        circuits::row_mismatch_product(&Meter::new(), &v, &v, Exec::Sequential)
            .expect("template circuit")
            .shape_digest()
    }

    fn psi(&self) -> ShapeDigest {
        circuits::psi_blind(&Meter::new(), &self.leaf, &self.leaf, &self.leaf)
            .expect("template circuit")
            .shape_digest()
    }

    fn first_zero_list(&mut self, atoms: usize, distances: u64) -> &[ShapeDigest] {
        let leaf = self.leaf.clone();
        self.cache.entry((atoms, distances)).or_insert_with(|| {
            let meter = Meter::new();
            let v = vec![leaf.clone(); atoms];
            let d = circuits::hamming(&meter, &v, &v, Exec::Sequential).expect("template circuit");
            let ds = vec![d; distances as usize];
            let primes = vec![leaf; atoms + 1];
            circuits::first_zero_list(&meter, &ds, atoms, &primes, Exec::Sequential)
                .expect("template circuit")
                .iter()
                .map(Ciphertext::shape_digest)
                .collect()
        })
    }
}

fn allowed_scalars(kind: ProtocolKind, atoms: usize) -> BTreeSet<u64> {
    match kind {
        ProtocolKind::Alg1 | ProtocolKind::Alg3 => [0, 2].into(),
        ProtocolKind::Alg1Binary | ProtocolKind::Alg2 => [1, 2].into(),
        ProtocolKind::Alg4 => (0..=atoms as u64).chain([2]).collect(),
        ProtocolKind::Psi => BTreeSet::new(),
    }
}

/// Checks one party's transcript of a finished run against the protocol's disclosure rules.
///
/// Frames are visible from either side, so most rules apply to both views; decryptions are
/// only recorded in the key holder's view.
pub fn audit_transcript(
    t: &Transcript,
    protocol: ProtocolKind,
) -> Result<LeakageReport, PrivacyError> {
    if !t.complete {
        return Err(PrivacyError::Incomplete);
    }
    if t.protocol != protocol.name() {
        return Err(PrivacyError::ProtocolMismatch {
            expected: protocol.name().to_string(),
            found: t.protocol.clone(),
        });
    }
    let holder = t.key_holder;
    let n = t.atoms;
    let mut a = Auditor {
        report: LeakageReport {
            protocol,
            session_id: t.session_id.clone(),
            view: t.view,
            key_holder: holder,
            atoms: n,
            key_holder_observed: Vec::new(),
            peer_observed: Vec::new(),
            ciphertexts_from_key_holder: 0,
            ciphertexts_from_peer: 0,
            structure: Structure::default(),
            findings: Vec::new(),
        },
    };
    let scalars = allowed_scalars(protocol, n);
    let mut templates = Templates::new();
    let mut lengths = BTreeSet::new();
    let mut peer_replies: Vec<Ciphertext> = Vec::new();
    let mut peer_list: Option<Vec<Ciphertext>> = None;
    let mut modulus = SchemeParams::default().modulus;

    for entry in &t.entries {
        let frame = &entry.frame;
        let from_holder = frame.from == holder;
        let cts: Vec<Ciphertext> = match frame
            .payload
            .ciphertexts()
            .iter()
            .map(|w| w.decode())
            .collect::<Result<_, _>>()
        {
            Ok(c) => c,
            Err(e) => {
                a.violation(
                    AuditRule::PlaintextInFrames,
                    format!(
                        "seq {} from {}: undecodable ciphertext ({e})",
                        frame.seq, frame.from
                    ),
                );
                continue;
            }
        };
        if from_holder {
            a.report.ciphertexts_from_key_holder += cts.len() as u64;
            if let Some(c) = cts.iter().find(|c| !c.is_leaf()) {
                a.violation(
                    AuditRule::PlaintextInFrames,
                    format!(
                        "seq {}: key holder sent a computed ciphertext with scalars {:?}",
                        frame.seq,
                        c.scalars()
                    ),
                );
            }
            match &frame.payload {
                Payload::Pubkey(b) => modulus = b.key.modulus(),
                Payload::CtVector(b) => {
                    lengths.insert(b.cts.len());
                    a.report.structure.vector_rounds += 1;
                }
                Payload::Ct(_) if protocol == ProtocolKind::Psi => {}
                Payload::Result(ResultBody {
                    stage: ResultStage::Done,
                    value,
                }) => {
                    if let Some(v) = value {
                        a.report.peer_observed.push(*v);
                        a.flag(
                            AuditRule::PlaintextInFrames,
                            FindingLevel::DisclosedByDesign,
                            format!("symmetric mode: result {v} sent to the peer"),
                        );
                    }
                }
                other => a.violation(
                    AuditRule::FrameOrder,
                    format!("seq {}: key holder sent `{}`", frame.seq, other.kind()),
                ),
            }
        } else {
            a.report.ciphertexts_from_peer += cts.len() as u64;
            match &frame.payload {
                Payload::Result(ResultBody {
                    stage: ResultStage::Models,
                    value: Some(m),
                }) if matches!(protocol, ProtocolKind::Alg3 | ProtocolKind::Alg4) => {
                    a.report.structure.peer_model_count = Some(*m);
                    a.report.key_holder_observed.push(*m);
                    a.flag(
                        AuditRule::PlaintextInFrames,
                        FindingLevel::DisclosedByDesign,
                        format!("key holder learns the peer's model count {m}"),
                    );
                }
                Payload::Ct(_) => peer_replies.extend(cts.iter().cloned()),
                Payload::CtList(_) if protocol == ProtocolKind::Alg4 => {
                    a.report.structure.list_length = Some(cts.len());
                    peer_list = Some(cts.clone());
                }
                other => a.violation(
                    AuditRule::FrameOrder,
                    format!("seq {}: peer sent `{}`", frame.seq, other.kind()),
                ),
            }
            for c in &cts {
                let bad: Vec<u64> = c
                    .scalars()
                    .into_iter()
                    .filter(|s| !scalars.contains(s))
                    .collect();
                if !bad.is_empty() {
                    a.violation(
                        AuditRule::PublicScalars,
                        format!(
                            "seq {}: non-public scalars {bad:?} in returned ciphertext",
                            frame.seq
                        ),
                    );
                }
            }
        }
    }
    a.report.structure.vector_lengths = lengths.iter().copied().collect();

    // Expected vector length and per-reply circuit
    let expected_len = match protocol {
        ProtocolKind::Alg1 | ProtocolKind::Alg3 | ProtocolKind::Alg4 => Some(n),
        _ => None,
    };
    if let Some(len) = expected_len {
        if lengths.iter().any(|&l| l != len) {
            a.violation(
                AuditRule::FrameOrder,
                format!("vector lengths {lengths:?}, expected {len}"),
            );
        }
    }
    let reply_shape = match protocol {
        ProtocolKind::Alg1 | ProtocolKind::Alg3 => Some(templates.hamming(n)),
        ProtocolKind::Alg1Binary | ProtocolKind::Alg2 => {
            lengths.iter().next().map(|&l| templates.row_mismatch(l))
        }
        ProtocolKind::Psi => Some(templates.psi()),
        ProtocolKind::Alg4 => None,
    };
    if let Some(shape) = reply_shape {
        let off = peer_replies
            .iter()
            .filter(|c| c.shape_digest() != shape)
            .count();
        if off > 0 {
            a.violation(
                AuditRule::CircuitShape,
                format!("{off} returned ciphertexts deviate from the public circuit"),
            );
        }
    }

    if protocol == ProtocolKind::Alg4 {
        match (a.report.structure.peer_model_count, &peer_list) {
            (Some(m), Some(list)) => {
                let expected = (1u64 << n) * m;
                let rounds = a.report.structure.vector_rounds as u64;
                if rounds != expected {
                    a.violation(
                        AuditRule::Padding,
                        format!("{rounds} sub-rounds, expected 2^{n} x {m} = {expected}"),
                    );
                }
                let shapes = templates.first_zero_list(n, rounds).to_vec();
                let off = list
                    .iter()
                    .zip(shapes.iter().chain(std::iter::repeat(&[0u8; 32])))
                    .filter(|(c, s)| c.shape_digest() != **s)
                    .count();
                if off > 0 || list.len() != n + 1 {
                    a.violation(
                        AuditRule::CircuitShape,
                        format!(
                            "candidate list of {} entries, {off} deviating from the public circuit",
                            list.len()
                        ),
                    );
                }
            }
            _ => a.violation(
                AuditRule::Padding,
                "missing model count or candidate list".to_string(),
            ),
        }
    }

    audit_decryptions(&mut a, t, protocol, peer_replies.len(), modulus);
    Ok(a.report)
}

fn audit_decryptions(
    a: &mut Auditor,
    t: &Transcript,
    protocol: ProtocolKind,
    replies: usize,
    q: u64,
) {
    let n = t.atoms as u64;
    let d = &t.decrypted;
    if t.view != t.key_holder {
        if !d.is_empty() {
            a.violation(
                AuditRule::DecryptedOutputs,
                format!("peer decrypted {} values", d.len()),
            );
        }
        if protocol == ProtocolKind::Alg3 {
            a.flag(
                AuditRule::FrameOrder,
                FindingLevel::DisclosedByDesign,
                format!(
                    "peer learns |models| of the key holder from {} rounds",
                    a.report.structure.vector_rounds
                ),
            );
        }
        return;
    }
    a.report.key_holder_observed.extend_from_slice(d);
    let wrong = |a: &mut Auditor, what: String| a.violation(AuditRule::DecryptedOutputs, what);
    match protocol {
        ProtocolKind::Alg1 => {
            if d.len() != 1 || d[0] > n {
                wrong(a, format!("expected one distance in 0..={n}, got {d:?}"));
            }
        }
        ProtocolKind::Alg1Binary | ProtocolKind::Alg2 => {
            if d.len() != 1 || d[0] > 1 {
                wrong(a, format!("expected one bit, got {d:?}"));
            }
        }
        ProtocolKind::Psi => {
            if d.len() != 1 {
                wrong(a, format!("expected one value, got {} values", d.len()));
            }
        }
        ProtocolKind::Alg3 => {
            if d.len() != replies || d.iter().any(|&x| x > n) {
                wrong(
                    a,
                    format!("expected {replies} distances in 0..={n}, got {d:?}"),
                );
            } else {
                let mut multiset = d.clone();
                multiset.sort_unstable();
                a.flag(
                    AuditRule::DecryptedOutputs,
                    FindingLevel::DisclosedByDesign,
                    format!("key holder sees every pairwise distance {multiset:?}"),
                );
            }
        }
        ProtocolKind::Alg4 => {
            if d.len() != n as usize + 1 {
                wrong(
                    a,
                    format!("expected {} list entries, got {}", n + 1, d.len()),
                );
            }
            for (i, &x) in d.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                if let Some(order) = field::multiplicative_order(x, q) {
                    if order <= LOW_ORDER {
                        a.flag(
                            AuditRule::DecryptedOutputs,
                            FindingLevel::Advisory,
                            format!(
                                "list entry {i} has multiplicative order {order}; its meta-encryption is enumerable"
                            ),
                        );
                    }
                }
            }
        }
    }
}

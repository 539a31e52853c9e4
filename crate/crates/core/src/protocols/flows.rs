use rand::Rng;

use super::circuits::{self, Meter};
use super::session::{pad_models, unexpected, unwire, wire, Party};
use super::{ProtocolError, ProtocolKind, ProtocolOutcome, SessionConfig};
use crate::he::{field, Ciphertext, KeyPair, PublicKey};
use crate::logic::{satisfaction_sequence_with, BitSequence, Interpretation, KnowledgeBase};
use crate::runtime::{
    AbortCode, Counters, CtBody, CtsBody, Endpoint, Payload, ResultBody, ResultStage, Role,
};

/// A party's private input, for callers that pick the protocol at run time.
#[derive(Debug, Clone)]
pub enum Input {
    Interpretation(Interpretation),
    Bits(BitSequence),
    Kb(KnowledgeBase),
    Models(Vec<Interpretation>),
    Element(u64),
}

/// Input after local validation; nothing here has touched the channel yet.
enum Prepared {
    Vector(Vec<bool>),
    Models(Vec<Interpretation>),
    Element(u64),
}

pub fn run_alg1(
    ep: &mut Endpoint,
    cfg: &SessionConfig,
    w: &Interpretation,
) -> Result<ProtocolOutcome, ProtocolError> {
    run(
        ep,
        cfg,
        ProtocolKind::Alg1,
        Input::Interpretation(w.clone()),
    )
}

pub fn run_alg1_binary(
    ep: &mut Endpoint,
    cfg: &SessionConfig,
    s: &BitSequence,
) -> Result<ProtocolOutcome, ProtocolError> {
    run(ep, cfg, ProtocolKind::Alg1Binary, Input::Bits(s.clone()))
}

pub fn run_alg2(
    ep: &mut Endpoint,
    cfg: &SessionConfig,
    k: &KnowledgeBase,
) -> Result<ProtocolOutcome, ProtocolError> {
    run(ep, cfg, ProtocolKind::Alg2, Input::Kb(k.clone()))
}

pub fn run_alg3(
    ep: &mut Endpoint,
    cfg: &SessionConfig,
    ms: &[Interpretation],
) -> Result<ProtocolOutcome, ProtocolError> {
    run(ep, cfg, ProtocolKind::Alg3, Input::Models(ms.to_vec()))
}

pub fn run_alg4(
    ep: &mut Endpoint,
    cfg: &SessionConfig,
    ms: &[Interpretation],
) -> Result<ProtocolOutcome, ProtocolError> {
    run(ep, cfg, ProtocolKind::Alg4, Input::Models(ms.to_vec()))
}

pub fn run_psi_singleton(
    ep: &mut Endpoint,
    cfg: &SessionConfig,
    x: u64,
) -> Result<ProtocolOutcome, ProtocolError> {
    run(ep, cfg, ProtocolKind::Psi, Input::Element(x))
}

/// Runs `kind` as the endpoint's role. A knowledge base is accepted for `alg3`/`alg4`
/// and replaced by its models.
pub fn run(
    ep: &mut Endpoint,
    cfg: &SessionConfig,
    kind: ProtocolKind,
    input: Input,
) -> Result<ProtocolOutcome, ProtocolError> {
    let prepared = prepare(cfg, kind, input)?;
    let role = ep.role();
    let mut party = Party::new(ep, cfg, kind);
    let key_holders: &[Role] = if cfg.symmetric {
        &[Role::A, Role::B]
    } else {
        &[Role::A]
    };

    let mut own = None;
    let mut announced = None;
    let mut decrypted = Vec::new();
    let mut transcripts = Vec::new();
    for &holder in key_holders {
        party.ep.begin(kind.name(), holder, cfg.signature.len());
        let step = run_once(&mut party, holder, &prepared);
        if let Err(e) = &step {
            if let Some(code) = abort_code(e) {
                party.abort(code, &e.to_string());
            }
        }
        match step? {
            RunResult::Holder(r) => own = Some(r),
            RunResult::Peer(v) => announced = v,
        }
        let t = party.ep.take_transcript();
        decrypted.extend_from_slice(&t.decrypted);
        transcripts.push(t);
    }

    if let (Some(ours), Some(theirs)) = (own, announced) {
        if ours != theirs {
            return Err(ProtocolError::SymmetricMismatch { ours, theirs });
        }
    }
    let mut counters = Counters::default();
    for t in &transcripts {
        counters.merge(&t.counters);
    }
    Ok(ProtocolOutcome {
        protocol: kind,
        role,
        result: own,
        decrypted,
        transcripts,
        counters,
    })
}

fn abort_code(e: &ProtocolError) -> Option<AbortCode> {
    match e {
        ProtocolError::Channel(_)
        | ProtocolError::PeerAbort { .. }
        | ProtocolError::ConfigMismatch { .. } => None,
        ProtocolError::InvalidInput(_) => Some(AbortCode::Input),
        _ => Some(AbortCode::Protocol),
    }
}

fn prepare(
    cfg: &SessionConfig,
    kind: ProtocolKind,
    input: Input,
) -> Result<Prepared, ProtocolError> {
    let sig = &cfg.signature;
    let mismatch =
        |got: &str| ProtocolError::InvalidInput(format!("{kind} does not take {got} as input"));
    match (kind, input) {
        (ProtocolKind::Alg1, Input::Interpretation(w)) => {
            w.check_len(sig)?;
            Ok(Prepared::Vector(w.bits().to_vec()))
        }
        (ProtocolKind::Alg1Binary, Input::Bits(s)) => {
            if s.is_empty() {
                return Err(ProtocolError::InvalidInput("empty bit sequence".into()));
            }
            Ok(Prepared::Vector(s.bits().to_vec()))
        }
        (ProtocolKind::Alg2, Input::Kb(k)) => {
            let seq = satisfaction_sequence_with(&k, sig, cfg.limits, cfg.exec)?;
            if seq.count_ones() == 0 {
                return Err(ProtocolError::InconsistentKb);
            }
            Ok(Prepared::Vector(seq.bits().to_vec()))
        }
        (ProtocolKind::Alg3 | ProtocolKind::Alg4, Input::Kb(k)) => {
            let seq = satisfaction_sequence_with(&k, sig, cfg.limits, cfg.exec)?;
            let ms: Vec<Interpretation> = seq
                .bits()
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| Interpretation::from_index(i as u64, sig.len()))
                .collect();
            if ms.is_empty() {
                return Err(ProtocolError::InconsistentKb);
            }
            Ok(Prepared::Models(ms))
        }
        (ProtocolKind::Alg3 | ProtocolKind::Alg4, Input::Models(ms)) => {
            if ms.is_empty() {
                return Err(ProtocolError::InconsistentKb);
            }
            for m in &ms {
                m.check_len(sig)?;
            }
            if kind == ProtocolKind::Alg4 {
                sig.check_cap(cfg.limits.max_atoms)?;
            }
            Ok(Prepared::Models(ms))
        }
        (ProtocolKind::Psi, Input::Element(x)) => {
            if x >= cfg.params.modulus {
                return Err(crate::he::HeError::OutOfRange {
                    value: x,
                    modulus: cfg.params.modulus,
                }
                .into());
            }
            Ok(Prepared::Element(x))
        }
        (_, Input::Interpretation(_)) => Err(mismatch("an interpretation")),
        (_, Input::Bits(_)) => Err(mismatch("a bit sequence")),
        (_, Input::Kb(_)) => Err(mismatch("a knowledge base")),
        (_, Input::Models(_)) => Err(mismatch("a model list")),
        (_, Input::Element(_)) => Err(mismatch("a field element")),
    }
}

enum RunResult {
    Holder(u64),
    Peer(Option<u64>),
}

fn run_once(
    party: &mut Party<'_>,
    holder: Role,
    input: &Prepared,
) -> Result<RunResult, ProtocolError> {
    let is_holder = party.role() == holder;
    let kind = party.kind;
    match (kind, input, is_holder) {
        (ProtocolKind::Alg1, Prepared::Vector(v), true) => {
            vector_holder(party, v).map(RunResult::Holder)
        }
        (ProtocolKind::Alg1, Prepared::Vector(v), false) => {
            vector_peer(party, v, circuits::hamming).map(RunResult::Peer)
        }
        (ProtocolKind::Alg1Binary | ProtocolKind::Alg2, Prepared::Vector(v), true) => {
            vector_holder(party, v).map(RunResult::Holder)
        }
        (ProtocolKind::Alg1Binary | ProtocolKind::Alg2, Prepared::Vector(v), false) => {
            vector_peer(party, v, circuits::row_mismatch_product).map(RunResult::Peer)
        }
        (ProtocolKind::Alg3, Prepared::Models(ms), true) => {
            alg3_holder(party, ms).map(RunResult::Holder)
        }
        (ProtocolKind::Alg3, Prepared::Models(ms), false) => {
            alg3_peer(party, ms).map(RunResult::Peer)
        }
        (ProtocolKind::Alg4, Prepared::Models(ms), true) => {
            alg4_holder(party, ms).map(RunResult::Holder)
        }
        (ProtocolKind::Alg4, Prepared::Models(ms), false) => {
            alg4_peer(party, ms).map(RunResult::Peer)
        }
        (ProtocolKind::Psi, Prepared::Element(x), true) => {
            psi_holder(party, *x).map(RunResult::Holder)
        }
        (ProtocolKind::Psi, Prepared::Element(y), false) => {
            psi_peer(party, *y).map(RunResult::Peer)
        }
        _ => unreachable!("prepare() pairs every protocol with its input shape"),
    }
}

fn bits_as_field(v: &[bool]) -> Vec<u64> {
    v.iter().map(|&b| b as u64).collect()
}

fn send_vector(party: &mut Party<'_>, kp: &KeyPair, v: &[bool]) -> Result<(), ProtocolError> {
    let cts = party.encrypt_all(&kp.public, &bits_as_field(v))?;
    party.send(Payload::CtVector(CtsBody { cts: wire(&cts) }))
}

fn recv_ct(party: &mut Party<'_>) -> Result<Ciphertext, ProtocolError> {
    match party.recv()? {
        Payload::Ct(CtBody { ct }) => Ok(ct.decode()?),
        other => Err(unexpected("ct", &other)),
    }
}

fn recv_vector(party: &mut Party<'_>, len: usize) -> Result<Vec<Ciphertext>, ProtocolError> {
    let cts = match party.recv()? {
        Payload::CtVector(CtsBody { cts }) => unwire(&cts)?,
        other => return Err(unexpected("ct_vector", &other)),
    };
    if cts.len() != len {
        return Err(ProtocolError::InvalidInput(format!(
            "peer sent {} ciphertexts, own input has {len} entries",
            cts.len()
        )));
    }
    Ok(cts)
}

/// Alg1 and its binary variant, key holder side: send `E(v)`, decrypt the answer.
fn vector_holder(party: &mut Party<'_>, v: &[bool]) -> Result<u64, ProtocolError> {
    let kp = party.open_as_key_holder()?;
    send_vector(party, &kp, v)?;
    let reply = recv_ct(party)?;
    let result = party.decrypt(&kp.secret, &reply)?;
    party.close_as_key_holder(result)?;
    Ok(result)
}

type VectorCircuit =
    fn(&Meter, &[Ciphertext], &[Ciphertext], crate::Exec) -> Result<Ciphertext, crate::he::HeError>;

fn vector_peer(
    party: &mut Party<'_>,
    v: &[bool],
    circuit: VectorCircuit,
) -> Result<Option<u64>, ProtocolError> {
    let pk = party.open_as_peer()?;
    let theirs = recv_vector(party, v.len())?;
    let ours = party.encrypt_all(&pk, &bits_as_field(v))?;
    let meter = Meter::new();
    let out = circuit(&meter, &theirs, &ours, party.cfg.exec)?;
    party.count_ops(meter.ops());
    party.send(Payload::Ct(CtBody { ct: (&out).into() }))?;
    party.close_as_peer()
}

fn send_model_count(party: &mut Party<'_>, m: usize) -> Result<(), ProtocolError> {
    party.send(Payload::Result(ResultBody {
        stage: ResultStage::Models,
        value: Some(m as u64),
    }))
}

fn recv_model_count(party: &mut Party<'_>) -> Result<usize, ProtocolError> {
    let max = party.cfg.signature.interpretation_count();
    match party.recv()? {
        Payload::Result(ResultBody {
            stage: ResultStage::Models,
            value: Some(m),
        }) if m >= 1 && m <= max => Ok(m as usize),
        Payload::Result(ResultBody {
            stage: ResultStage::Models,
            value,
        }) => Err(ProtocolError::Violation(format!(
            "peer announced {value:?} models, expected 1..={max}"
        ))),
        other => Err(unexpected("result", &other)),
    }
}

fn encrypt_models(
    party: &mut Party<'_>,
    pk: &PublicKey,
    ms: &[Interpretation],
) -> Result<Vec<Vec<Ciphertext>>, ProtocolError> {
    ms.iter()
        .map(|m| party.encrypt_all(pk, &bits_as_field(m.bits())))
        .collect()
}

/// Alg3, key holder side: one Alg1 round per model pair, then MIN over every distance.
fn alg3_holder(party: &mut Party<'_>, ms: &[Interpretation]) -> Result<u64, ProtocolError> {
    let kp = party.open_as_key_holder()?;
    let peer_models = recv_model_count(party)?;
    let mut distances = Vec::with_capacity(ms.len() * peer_models);
    for m in ms {
        for _ in 0..peer_models {
            send_vector(party, &kp, m.bits())?;
            let reply = recv_ct(party)?;
            distances.push(party.decrypt(&kp.secret, &reply)?);
        }
    }
    let result = *distances.iter().min().expect("at least one model pair");
    party.close_as_key_holder(result)?;
    Ok(result)
}

/// Alg3, peer side: answer rounds until the key holder closes, pairing round `r` with own
/// model `r mod |ms|`.
fn alg3_peer(party: &mut Party<'_>, ms: &[Interpretation]) -> Result<Option<u64>, ProtocolError> {
    let pk = party.open_as_peer()?;
    send_model_count(party, ms.len())?;
    let ours = encrypt_models(party, &pk, ms)?;
    let n = party.atoms();
    let mut round = 0usize;
    loop {
        match party.recv()? {
            Payload::CtVector(CtsBody { cts }) => {
                let theirs = unwire(&cts)?;
                if theirs.len() != n {
                    return Err(ProtocolError::InvalidInput(format!(
                        "peer sent {} ciphertexts for {n} atoms",
                        theirs.len()
                    )));
                }
                let meter = Meter::new();
                let d =
                    circuits::hamming(&meter, &theirs, &ours[round % ms.len()], party.cfg.exec)?;
                party.count_ops(meter.ops());
                party.send(Payload::Ct(CtBody { ct: (&d).into() }))?;
                round += 1;
            }
            Payload::Result(ResultBody {
                stage: ResultStage::Done,
                value,
            }) => {
                party.ep.transcript_mut().complete = true;
                return Ok(value);
            }
            other => return Err(unexpected("ct_vector", &other)),
        }
    }
}

/// Alg4, key holder side: pad own models to 2^|At|, stream every pair, then decrypt the
/// candidate list and return the index of its first zero.
fn alg4_holder(party: &mut Party<'_>, ms: &[Interpretation]) -> Result<u64, ProtocolError> {
    let kp = party.open_as_key_holder()?;
    let peer_models = recv_model_count(party)?;
    let padded = pad_models(ms, party.cfg.signature.interpretation_count() as usize);
    for m in &padded {
        for _ in 0..peer_models {
            send_vector(party, &kp, m.bits())?;
        }
    }
    let list = match party.recv()? {
        Payload::CtList(CtsBody { cts }) => unwire(&cts)?,
        other => return Err(unexpected("ct_list", &other)),
    };
    if list.len() != party.atoms() + 1 {
        return Err(ProtocolError::Violation(format!(
            "candidate list has {} entries, expected {}",
            list.len(),
            party.atoms() + 1
        )));
    }
    let mut first_zero = None;
    for (i, c) in list.iter().enumerate() {
        if party.decrypt(&kp.secret, c)? == 0 && first_zero.is_none() {
            first_zero = Some(i as u64);
        }
    }
    let result = first_zero
        .ok_or_else(|| ProtocolError::Violation("candidate list has no zero entry".into()))?;
    party.close_as_key_holder(result)?;
    Ok(result)
}

/// Alg4, peer side: collect the encrypted distances, then publish the prime-exponentiated
/// prefix products.
fn alg4_peer(party: &mut Party<'_>, ms: &[Interpretation]) -> Result<Option<u64>, ProtocolError> {
    let pk = party.open_as_peer()?;
    send_model_count(party, ms.len())?;
    let ours = encrypt_models(party, &pk, ms)?;
    let n = party.atoms();
    let rounds = party.cfg.signature.interpretation_count() as usize * ms.len();
    let meter = Meter::new();
    let mut distances = Vec::with_capacity(rounds);
    for round in 0..rounds {
        let theirs = recv_vector(party, n)?;
        distances.push(circuits::hamming(
            &meter,
            &theirs,
            &ours[round % ms.len()],
            party.cfg.exec,
        )?);
    }
    let q = party.cfg.params.modulus;
    let primes: Vec<u64> = (0..=n)
        .map(|_| field::random_prime(&mut party.rng, 3, q))
        .collect();
    let primes = party.encrypt_all(&pk, &primes)?;
    let list = circuits::first_zero_list(&meter, &distances, n, &primes, party.cfg.exec)?;
    party.count_ops(meter.ops());
    party.send(Payload::CtList(CtsBody { cts: wire(&list) }))?;
    party.close_as_peer()
}

fn psi_holder(party: &mut Party<'_>, x: u64) -> Result<u64, ProtocolError> {
    let kp = party.open_as_key_holder()?;
    let cx = party.encrypt_all(&kp.public, &[x])?;
    party.send(Payload::Ct(CtBody {
        ct: (&cx[0]).into(),
    }))?;
    let reply = recv_ct(party)?;
    let blinded = party.decrypt(&kp.secret, &reply)?;
    let result = (blinded == 0) as u64;
    party.close_as_key_holder(result)?;
    Ok(result)
}

fn psi_peer(party: &mut Party<'_>, y: u64) -> Result<Option<u64>, ProtocolError> {
    let pk = party.open_as_peer()?;
    let cx = recv_ct(party)?;
    let r = party.rng.gen_range(1..party.cfg.params.modulus);
    let leaves = party.encrypt_all(&pk, &[y, r])?;
    let meter = Meter::new();
    let out = circuits::psi_blind(&meter, &cx, &leaves[0], &leaves[1])?;
    party.count_ops(meter.ops());
    party.send(Payload::Ct(CtBody { ct: (&out).into() }))?;
    party.close_as_peer()
}

/// Both roles on two threads joined by an in-memory channel.
pub fn run_local(
    kind: ProtocolKind,
    cfg_a: &SessionConfig,
    input_a: Input,
    cfg_b: &SessionConfig,
    input_b: Input,
) -> (
    Result<ProtocolOutcome, ProtocolError>,
    Result<ProtocolOutcome, ProtocolError>,
) {
    let (ca, cb) = crate::runtime::pair_memory_channels();
    std::thread::scope(|s| {
        let b = s.spawn(move || {
            let mut ep = Endpoint::new(cb, Role::B);
            run(&mut ep, cfg_b, kind, input_b)
        });
        let mut ep = Endpoint::new(ca, Role::A);
        let a = run(&mut ep, cfg_a, kind, input_a);
        // Dropping A's endpoint unblocks B if A failed early.
        drop(ep);
        (a, b.join().expect("peer thread panicked"))
    })
}

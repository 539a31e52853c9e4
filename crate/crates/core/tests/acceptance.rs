//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero if any fails.
//!
//! When `PSIMC_ACCEPTANCE_PEER` is set the binary instead acts as role B of one TCP session;
//! the transport criterion launches it that way as a second process.

mod common;

use std::collections::HashSet;
use std::env;
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use psimc_core::he::{encrypt, keygen, serialize_ct, SchemeParams};
use psimc_core::logic::{
    eval3, interpretation_at, models, parse_kb, satisfaction_sequence, Interpretation,
    KnowledgeBase, Signature, ThreeValuedInterpretation, TriValue,
};
use psimc_core::measures::{contension, drastic, min_mismatch_oracle};
use psimc_core::privacy::{
    audit_transcript, guessing_probabilities, mod_below_alg4, AuditRule, FindingLevel,
};
use psimc_core::protocols::{run, run_local, Input, ProtocolKind, ProtocolOutcome, SessionConfig};
use psimc_core::runtime::{tcp_connect_retry, Endpoint, Role, TcpAcceptor, Transcript};

const PEER_ENV: &str = "PSIMC_ACCEPTANCE_PEER";
const CORPUS_PAIRS: usize = 200;
const MAX_CORPUS_ATOMS: usize = 4;
const MAX_DEPTH: usize = 3;
const FLIP_TRIALS: usize = 1000;
const DISTINCT_ENCRYPTIONS: usize = 10_000;
const TRANSPORT_SESSIONS: usize = 20;
const GOLDEN_BUDGET: Duration = Duration::from_secs(5);
const CORPUS_BUDGET: Duration = Duration::from_secs(600);

type Verdict = Result<String, String>;

fn w(s: &str) -> Interpretation {
    s.parse().unwrap()
}

fn ws(xs: &[&str]) -> Vec<Interpretation> {
    xs.iter().map(|s| w(s)).collect()
}

fn kb(src: &str) -> KnowledgeBase {
    parse_kb(src).unwrap()
}

/// Runs both roles in memory and keeps every transcript for the privacy criterion.
struct Sessions {
    transcripts: Vec<(ProtocolKind, Transcript)>,
    seed: u64,
}

impl Sessions {
    fn run(
        &mut self,
        kind: ProtocolKind,
        sig: &Signature,
        a: Input,
        b: Input,
    ) -> (ProtocolOutcome, ProtocolOutcome) {
        self.seed += 2;
        let (ra, rb) = run_local(
            kind,
            &SessionConfig::new(sig.clone(), self.seed),
            a,
            &SessionConfig::new(sig.clone(), self.seed + 1),
            b,
        );
        let (oa, ob) = (ra.expect("role A"), rb.expect("role B"));
        for t in oa.transcripts.iter().chain(&ob.transcripts) {
            self.transcripts.push((kind, t.clone()));
        }
        (oa, ob)
    }

    fn result(&mut self, kind: ProtocolKind, sig: &Signature, a: Input, b: Input) -> u64 {
        self.run(kind, sig, a, b)
            .0
            .result
            .expect("key holder result")
    }
}

fn check(failures: &mut Vec<String>, ok: bool, what: impl Into<String>) {
    if !ok {
        failures.push(what.into());
    }
}

fn verdict(failures: Vec<String>, summary: String) -> Verdict {
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(failures.join("; "))
    }
}

fn worked_examples(s: &mut Sessions) -> Verdict {
    let start = Instant::now();
    let mut f = Vec::new();
    let sig3 = Signature::numbered(3);

    let d = s.result(
        ProtocolKind::Alg1,
        &sig3,
        Input::Interpretation(w("110")),
        Input::Interpretation(w("101")),
    );
    check(&mut f, d == 2, format!("alg1(110,101) = {d}, expected 2"));

    let ab = Signature::from_names(&["a", "b"]).unwrap();
    let (ka, kb_) = (kb("a & b"), kb("!a"));
    let sa = satisfaction_sequence(&ka, &ab).unwrap();
    let sb = satisfaction_sequence(&kb_, &ab).unwrap();
    check(
        &mut f,
        sa.to_string() == "0001",
        format!("S_A = {sa}, expected 0001"),
    );
    check(
        &mut f,
        sb.to_string() == "1100",
        format!("S_B = {sb}, expected 1100"),
    );
    let d = s.result(ProtocolKind::Alg2, &ab, Input::Kb(ka), Input::Kb(kb_));
    check(&mut f, d == 1, format!("alg2 = {d}, expected 1"));

    let a7 = || Input::Models(ws(&["111", "110"]));
    let b7 = || Input::Models(ws(&["100", "101"]));
    let d = s.result(ProtocolKind::Alg3, &sig3, a7(), b7());
    check(
        &mut f,
        d == 1,
        format!("alg3 on two-model sets = {d}, expected 1"),
    );

    let sig8 = Signature::from_names(&["a", "b1", "b2"]).unwrap();
    let ka8 = kb("a\na -> b1 & b2");
    let kb8 = kb("a\na -> !b1 & !b2");
    let (ma, mb) = (models(&ka8, &sig8).unwrap(), models(&kb8, &sig8).unwrap());
    check(
        &mut f,
        ma == ws(&["111"]) && mb == ws(&["100"]),
        "model sets {111} / {100}",
    );
    for kind in [ProtocolKind::Alg3, ProtocolKind::Alg4] {
        let d = s.result(
            kind,
            &sig8,
            Input::Models(ma.clone()),
            Input::Models(mb.clone()),
        );
        check(
            &mut f,
            d == 2,
            format!("{kind} on overestimating pair = {d}, expected 2"),
        );
    }
    let ic = contension(&ka8.union(&kb8), &sig8).unwrap().value();
    check(
        &mut f,
        ic == 1,
        format!("Ic of overestimating union = {ic}, expected 1"),
    );

    let (oa, _) = s.run(ProtocolKind::Alg4, &sig3, a7(), b7());
    let list = &oa.decrypted;
    check(
        &mut f,
        list.len() == 4 && list[0] != 0 && list[1..] == [0, 0, 0],
        format!("alg4 list {list:?}, expected <nonzero,0,0,0>"),
    );
    check(
        &mut f,
        oa.result == Some(1),
        format!("alg4 = {:?}, expected 1", oa.result),
    );

    let k1_sig = Signature::from_names(&["a", "b", "c"]).unwrap();
    let k1 = kb("a\na -> b\n!b & !a\nc");
    let id = drastic(&k1, &k1_sig).unwrap().value();
    let ic = contension(&k1, &k1_sig).unwrap().value();
    check(&mut f, id == 1, format!("Id(K1) = {id}, expected 1"));
    check(&mut f, ic == 2, format!("Ic(K1) = {ic}, expected 2"));

    let took = start.elapsed();
    check(
        &mut f,
        took < GOLDEN_BUDGET,
        format!("took {took:?}, budget {GOLDEN_BUDGET:?}"),
    );
    verdict(f, format!("all goldens exact in {took:.2?}"))
}

struct CorpusCase {
    alg3: u64,
    contension: u64,
    union_consistent: bool,
}

fn corpus() -> Vec<(Signature, KnowledgeBase, KnowledgeBase)> {
    let mut rng = ChaCha20Rng::seed_from_u64(0x5eed_c0de);
    let mut out: Vec<_> = (0..CORPUS_PAIRS)
        .map(|_| {
            let sig = Signature::numbered(rng.gen_range(1..=MAX_CORPUS_ATOMS));
            let ka = common::random_consistent_kb(&mut rng, &sig, MAX_DEPTH);
            let kb_ = common::random_consistent_kb(&mut rng, &sig, MAX_DEPTH);
            (sig, ka, kb_)
        })
        .collect();
    out.push((
        Signature::from_names(&["a", "b1", "b2"]).unwrap(),
        kb("a\na -> b1 & b2"),
        kb("a\na -> !b1 & !b2"),
    ));
    out
}

fn oracle_equivalence(s: &mut Sessions, cases: &mut Vec<CorpusCase>) -> Verdict {
    let start = Instant::now();
    let mut f = Vec::new();
    let pairs = corpus();
    for (i, (sig, ka, kb_)) in pairs.iter().enumerate() {
        assert!(ka
            .formulas()
            .chain(kb_.formulas())
            .all(|x| x.depth() <= MAX_DEPTH));
        let union = ka.union(kb_);
        let id = drastic(&union, sig).unwrap().value();
        let alg2 = s.result(
            ProtocolKind::Alg2,
            sig,
            Input::Kb(ka.clone()),
            Input::Kb(kb_.clone()),
        );
        check(
            &mut f,
            alg2 == id,
            format!("case {i}: alg2 {alg2} vs drastic {id}"),
        );

        let (ma, mb) = (models(ka, sig).unwrap(), models(kb_, sig).unwrap());
        let oracle = min_mismatch_oracle(&ma, &mb).unwrap().value();
        let alg3 = s.result(
            ProtocolKind::Alg3,
            sig,
            Input::Models(ma.clone()),
            Input::Models(mb.clone()),
        );
        let alg4 = s.result(
            ProtocolKind::Alg4,
            sig,
            Input::Models(ma),
            Input::Models(mb),
        );
        check(
            &mut f,
            alg3 == oracle && alg4 == oracle,
            format!("case {i}: alg3 {alg3}, alg4 {alg4}, oracle {oracle}"),
        );
        cases.push(CorpusCase {
            alg3,
            contension: contension(&union, sig).unwrap().value(),
            union_consistent: id == 0,
        });
    }
    let took = start.elapsed();
    check(
        &mut f,
        took < CORPUS_BUDGET,
        format!("took {took:?}, budget {CORPUS_BUDGET:?}"),
    );
    verdict(f, format!("{} pairs exact in {took:.2?}", pairs.len()))
}

fn propositions(cases: &[CorpusCase]) -> Verdict {
    let mut f = Vec::new();
    let mut strict = 0;
    for (i, c) in cases.iter().enumerate() {
        check(
            &mut f,
            c.alg3 >= c.contension,
            format!(
                "case {i}: alg3 {} below contension {}",
                c.alg3, c.contension
            ),
        );
        if c.union_consistent {
            check(
                &mut f,
                c.alg3 == 0,
                format!("case {i}: consistent union but alg3 {}", c.alg3),
            );
        }
        strict += (c.alg3 > c.contension) as usize;
    }
    check(
        &mut f,
        strict > 0,
        "no case with alg3 strictly above contension",
    );
    check(
        &mut f,
        cases
            .last()
            .is_some_and(|c| c.alg3 == 2 && c.contension == 1),
        "overestimating pair not strict",
    );
    verdict(
        f,
        format!(
            "{} cases hold, {strict} strictly above contension",
            cases.len()
        ),
    )
}

fn random_tri(rng: &mut impl Rng, n: usize) -> ThreeValuedInterpretation {
    ThreeValuedInterpretation::new(
        (0..n)
            .map(|_| match rng.gen_range(0..3) {
                0 => TriValue::False,
                1 => TriValue::Both,
                _ => TriValue::True,
            })
            .collect(),
    )
}

fn both_flip_properties() -> Verdict {
    let mut rng = ChaCha20Rng::seed_from_u64(0x1e33a);
    let mut f = Vec::new();
    let mut trials = 0;
    while trials < FLIP_TRIALS {
        let n = rng.gen_range(1..=MAX_CORPUS_ATOMS);
        let sig = Signature::numbered(n);
        let formula = common::random_formula(&mut rng, &sig, MAX_DEPTH);
        let w = interpretation_at(rng.gen_range(0..sig.interpretation_count()), &sig);
        let two = ThreeValuedInterpretation::from(&w);
        if !eval3(&formula, &two, &sig).unwrap().is_designated() {
            continue;
        }
        trials += 1;

        // value preservation for a single flip, from a two-valued and a three-valued model
        let atom = rng.gen_range(0..n);
        for i in [two.clone(), random_tri(&mut rng, n)] {
            let before = eval3(&formula, &i, &sig).unwrap();
            if !before.is_designated() {
                continue;
            }
            let mut j = i.clone();
            j.set(atom, TriValue::Both);
            let after = eval3(&formula, &j, &sig).unwrap();
            check(
                &mut f,
                after == before || after == TriValue::Both,
                format!("{formula} at {i}: {before:?} became {after:?} at {j}"),
            );
        }

        // any set of flips keeps a two-valued model a three-valued model
        let mut j = two.clone();
        for k in 0..n {
            if rng.gen_bool(0.5) {
                j.set(k, TriValue::Both);
            }
        }
        check(
            &mut f,
            eval3(&formula, &j, &sig).unwrap().is_designated(),
            format!("{formula}: {j} lost designation"),
        );
    }
    verdict(f, format!("{trials} trials, zero failures"))
}

fn privacy_structure(s: &Sessions) -> Verdict {
    let mut f = Vec::new();
    for (kind, t) in &s.transcripts {
        match audit_transcript(t, *kind) {
            Ok(r) if r.ip_holds() => {}
            Ok(r) => f.push(format!(
                "{kind} {} view {}: {:?}",
                t.session_id,
                t.view,
                r.violations().collect::<Vec<_>>()
            )),
            Err(e) => f.push(format!("{kind}: {e}")),
        }
    }

    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let kp = keygen(&SchemeParams::default(), &mut rng).unwrap();
    let distinct: HashSet<Vec<u8>> = (0..DISTINCT_ENCRYPTIONS)
        .map(|_| serialize_ct(&encrypt(&kp.public, 1, &mut rng).unwrap()))
        .collect();
    check(
        &mut f,
        distinct.len() == DISTINCT_ENCRYPTIONS,
        format!("{} distinct encryptions of 1", distinct.len()),
    );

    let sig = Signature::numbered(3);
    let mut fresh = Sessions {
        transcripts: Vec::new(),
        seed: 900,
    };
    let (oa, _) = fresh.run(
        ProtocolKind::Alg1,
        &sig,
        Input::Interpretation(w("110")),
        Input::Interpretation(w("101")),
    );
    let alg1 = oa.transcripts[0].clone();
    let (oa, _) = fresh.run(
        ProtocolKind::Alg4,
        &Signature::numbered(2),
        Input::Models(ws(&["11"])),
        Input::Models(ws(&["00"])),
    );
    let alg4 = oa.transcripts[0].clone();
    let faults = [
        (
            "plaintext in vector",
            ProtocolKind::Alg1,
            common::forge_plaintext_in_vector(alg1.clone()),
            AuditRule::PlaintextInFrames,
        ),
        (
            "extra decryption",
            ProtocolKind::Alg1,
            common::forge_extra_decryption(alg1.clone()),
            AuditRule::DecryptedOutputs,
        ),
        (
            "peer bits as scalars",
            ProtocolKind::Alg1,
            common::forge_peer_bits_as_scalars(alg1),
            AuditRule::PublicScalars,
        ),
        (
            "missing padding",
            ProtocolKind::Alg4,
            common::forge_missing_padding(alg4),
            AuditRule::Padding,
        ),
    ];
    for (name, kind, t, rule) in faults {
        let caught = audit_transcript(&t, kind)
            .map(|r| r.has(rule, FindingLevel::Violation))
            .unwrap_or(false);
        check(&mut f, caught, format!("fault `{name}` not detected"));
    }
    verdict(
        f,
        format!(
            "{} transcripts clean, {DISTINCT_ENCRYPTIONS} distinct ciphertexts, 4/4 faults caught",
            s.transcripts.len()
        ),
    )
}

fn vector_rounds(t: &Transcript) -> u64 {
    t.entries
        .iter()
        .filter(|e| e.frame.kind() == "ct_vector")
        .count() as u64
}

fn complexity(s: &mut Sessions) -> Verdict {
    let mut f = Vec::new();
    for n in 2..=16usize {
        let sig = Signature::numbered(n);
        let (_, ob) = s.run(
            ProtocolKind::Alg1,
            &sig,
            Input::Interpretation(interpretation_at(0, &sig)),
            Input::Interpretation(interpretation_at(sig.interpretation_count() - 1, &sig)),
        );
        let ops = ob.counters.homomorphic_ops;
        check(
            &mut f,
            ops == 3 * n as u64,
            format!("alg1 |At|={n}: {ops} ops, expected {}", 3 * n),
        );
    }
    for n in 2..=10usize {
        let sig = Signature::numbered(n);
        let (_, ob) = s.run(
            ProtocolKind::Alg2,
            &sig,
            Input::Kb(kb(&format!(
                "{x} | {y}",
                x = sig.atoms()[0].name(),
                y = sig.atoms()[1].name()
            ))),
            Input::Kb(kb(&format!("!{}", sig.atoms()[0].name()))),
        );
        let ops = ob.counters.homomorphic_ops;
        let rows = sig.interpretation_count();
        check(
            &mut f,
            ops % rows == 0 && ops / rows == 4,
            format!("alg2 |At|={n}: {ops} ops over {rows} rows, expected ratio 4"),
        );
    }
    for n in 2..=6usize {
        let sig = Signature::numbered(n);
        for peer_models in [1u64, 2] {
            let mb: Vec<_> = (0..peer_models)
                .map(|i| interpretation_at(i, &sig))
                .collect();
            let ma = vec![interpretation_at(sig.interpretation_count() - 1, &sig)];
            let (oa, ob) = s.run(
                ProtocolKind::Alg4,
                &sig,
                Input::Models(ma),
                Input::Models(mb),
            );
            let rounds = vector_rounds(&oa.transcripts[0]);
            let expected = (1u64 << n) * peer_models;
            check(
                &mut f,
                rounds == expected,
                format!("alg4 |At|={n}, |Mod_B|={peer_models}: {rounds} sub-rounds, expected {expected}"),
            );
            let ops = ob.counters.homomorphic_ops;
            let expected_ops = expected * 3 * n as u64 + (n as u64 + 1) * (2 * expected + 3);
            check(
                &mut f,
                ops == expected_ops,
                format!("alg4 |At|={n}: {ops} ops, expected {expected_ops}"),
            );
        }
    }
    verdict(
        f,
        "alg1 = 3|At| (2..16), alg2 = 4 * 2^|At| (2..10), alg4 sub-rounds = 2^|At| * |Mod_B| (2..6)".into(),
    )
}

fn guessing(s: &mut Sessions) -> Verdict {
    let mut f = Vec::new();
    let mut pairs = vec![
        (Signature::numbered(3), kb("x1 & x2"), kb("x1 & !x2")),
        (
            Signature::from_names(&["a", "b1", "b2"]).unwrap(),
            kb("a\na -> b1 & b2"),
            kb("a\na -> !b1 & !b2"),
        ),
        (
            Signature::numbered(3),
            kb("x1 & x2 & x3"),
            kb("!x1 & !x2 & !x3"),
        ),
        (Signature::numbered(2), kb("x1 | x2"), kb("x1 | x2")),
    ];
    pairs.extend(
        corpus()
            .into_iter()
            .filter(|(sig, _, _)| sig.len() <= 3)
            .take(8),
    );
    for (sig, ka, kb_) in &pairs {
        let ma = models(ka, sig).unwrap();
        let mb = models(kb_, sig).unwrap();
        let threshold = s.result(
            ProtocolKind::Alg4,
            sig,
            Input::Models(ma.clone()),
            Input::Models(mb),
        );
        let by_runs: Vec<Interpretation> = (0..sig.interpretation_count())
            .map(|i| interpretation_at(i, sig))
            .filter(|m| {
                s.result(
                    ProtocolKind::Alg4,
                    sig,
                    Input::Models(ma.clone()),
                    Input::Models(vec![m.clone()]),
                ) < threshold
            })
            .collect();
        let oracle = mod_below_alg4(ka, kb_, sig).unwrap();
        check(
            &mut f,
            oracle == by_runs,
            format!("{sig:?}: oracle {oracle:?} vs runs {by_runs:?}"),
        );

        let r = guessing_probabilities(ka, kb_, sig).unwrap();
        let consistent = Ratio::new(1, ma.len() as u64);
        let inconsistent = Ratio::new(1, sig.interpretation_count() - by_runs.len() as u64);
        check(
            &mut f,
            r.consistent_case_bound == consistent && r.inconsistent_case_bound == inconsistent,
            format!(
                "bounds {} / {}, expected {consistent} / {inconsistent}",
                r.consistent_case_bound, r.inconsistent_case_bound
            ),
        );
    }
    verdict(
        f,
        format!("{} pairs exhaustive over all interpretations", pairs.len()),
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum WireInput {
    Interpretation(String),
    Kb(String),
    Models(Vec<String>),
    Element(u64),
}

impl WireInput {
    fn input(&self) -> Input {
        match self {
            WireInput::Interpretation(s) => Input::Interpretation(w(s)),
            WireInput::Kb(s) => Input::Kb(kb(s)),
            WireInput::Models(xs) => Input::Models(xs.iter().map(|s| w(s)).collect()),
            WireInput::Element(x) => Input::Element(*x),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PeerJob {
    protocol: ProtocolKind,
    atoms: usize,
    seed: u64,
    input: WireInput,
    addr: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PeerReport {
    result: Option<u64>,
    profile: Vec<String>,
}

fn profile(o: &ProtocolOutcome) -> Vec<String> {
    o.transcripts
        .iter()
        .flat_map(|t| t.profile())
        .map(|p| format!("{p:?}"))
        .collect()
}

fn peer_process(job: &str) {
    let job: PeerJob = serde_json::from_str(job).expect("peer job");
    let channel = tcp_connect_retry(&job.addr, Duration::from_secs(10)).expect("connect");
    let mut ep = Endpoint::new(channel, Role::B);
    let cfg = SessionConfig::new(Signature::numbered(job.atoms), job.seed);
    let out = run(&mut ep, &cfg, job.protocol, job.input.input()).expect("peer run");
    let report = PeerReport {
        result: out.result,
        profile: profile(&out),
    };
    println!("{}", serde_json::to_string(&report).unwrap());
    std::io::stdout().flush().unwrap();
}

fn random_interpretation(rng: &mut impl Rng, n: usize) -> String {
    (0..n)
        .map(|_| if rng.gen_bool(0.5) { '1' } else { '0' })
        .collect()
}

fn random_job(rng: &mut impl Rng) -> (ProtocolKind, usize, WireInput, WireInput) {
    let n = rng.gen_range(1..=3);
    let sig = Signature::numbered(n);
    let kb_text = |rng: &mut _| {
        common::random_consistent_kb(rng, &sig, 2)
            .formulas()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
            .join("\n")
    };
    let models_of = |rng: &mut _| {
        let k = common::random_consistent_kb(rng, &sig, 2);
        models(&k, &sig)
            .unwrap()
            .iter()
            .map(|m| m.to_string())
            .collect()
    };
    match rng.gen_range(0..5) {
        0 => (
            ProtocolKind::Alg1,
            n,
            WireInput::Interpretation(random_interpretation(rng, n)),
            WireInput::Interpretation(random_interpretation(rng, n)),
        ),
        1 => (
            ProtocolKind::Alg2,
            n,
            WireInput::Kb(kb_text(rng)),
            WireInput::Kb(kb_text(rng)),
        ),
        2 => (
            ProtocolKind::Alg3,
            n,
            WireInput::Models(models_of(rng)),
            WireInput::Models(models_of(rng)),
        ),
        3 => (
            ProtocolKind::Alg4,
            n,
            WireInput::Models(models_of(rng)),
            WireInput::Models(models_of(rng)),
        ),
        _ => {
            let x = rng.gen_range(0..4);
            (
                ProtocolKind::Psi,
                n,
                WireInput::Element(x),
                WireInput::Element(rng.gen_range(0..4)),
            )
        }
    }
}

fn transport_equivalence() -> Verdict {
    let mut rng = ChaCha20Rng::seed_from_u64(0x7c9);
    let exe = env::current_exe().expect("own executable");
    let mut f = Vec::new();
    for i in 0..TRANSPORT_SESSIONS {
        let (kind, n, input_a, input_b) = random_job(&mut rng);
        let seed = 1000 + 2 * i as u64;
        let sig = Signature::numbered(n);
        let cfg_a = SessionConfig::new(sig.clone(), seed);
        let cfg_b = SessionConfig::new(sig, seed + 1);

        let (ma, mb) = run_local(kind, &cfg_a, input_a.input(), &cfg_b, input_b.input());
        let (ma, mb) = (ma.expect("memory A"), mb.expect("memory B"));

        let acceptor = TcpAcceptor::bind("127.0.0.1:0").expect("bind");
        let job = PeerJob {
            protocol: kind,
            atoms: n,
            seed: seed + 1,
            input: input_b.clone(),
            addr: acceptor.local_addr().unwrap().to_string(),
        };
        let child = Command::new(&exe)
            .env(PEER_ENV, serde_json::to_string(&job).unwrap())
            .stdout(Stdio::piped())
            .spawn()
            .expect("spawn peer process");
        let mut ep = Endpoint::new(acceptor.accept().expect("accept"), Role::A);
        let ta = run(&mut ep, &cfg_a, kind, input_a.input());
        drop(ep);
        let output = child.wait_with_output().expect("peer process");
        let ta = match ta {
            Ok(o) => o,
            Err(e) => {
                f.push(format!("session {i} ({kind}): tcp A failed: {e}"));
                continue;
            }
        };
        let tb: PeerReport = match serde_json::from_slice(&output.stdout) {
            Ok(r) => r,
            Err(_) => {
                f.push(format!(
                    "session {i} ({kind}): peer process failed ({})",
                    output.status
                ));
                continue;
            }
        };
        check(
            &mut f,
            ta.result == ma.result && tb.result == mb.result,
            format!("session {i} ({kind}): results differ across transports"),
        );
        check(
            &mut f,
            profile(&ta) == profile(&ma) && tb.profile == profile(&mb),
            format!("session {i} ({kind}): frame sequences differ across transports"),
        );
    }
    verdict(
        f,
        format!("{TRANSPORT_SESSIONS} sessions, memory and two-process TCP agree"),
    )
}

fn main() {
    if let Ok(job) = env::var(PEER_ENV) {
        peer_process(&job);
        return;
    }

    let mut sessions = Sessions {
        transcripts: Vec::new(),
        seed: 0,
    };
    let mut cases = Vec::new();
    let mut failed = 0;
    let mut report = |n: usize, name: &str, v: std::thread::Result<Verdict>| {
        let line = match v {
            Ok(Ok(detail)) => format!("criterion {n} PASS {name}: {detail}"),
            Ok(Err(detail)) => {
                failed += 1;
                format!("criterion {n} FAIL {name}: {detail}")
            }
            Err(_) => {
                failed += 1;
                format!("criterion {n} FAIL {name}: panicked")
            }
        };
        println!("{line}");
    };

    let guarded = |f: &mut dyn FnMut() -> Verdict| panic::catch_unwind(AssertUnwindSafe(f));
    report(
        1,
        "worked examples",
        guarded(&mut || worked_examples(&mut sessions)),
    );
    report(
        2,
        "oracle equivalence",
        guarded(&mut || oracle_equivalence(&mut sessions, &mut cases)),
    );
    report(
        3,
        "upper bound and consistency zero",
        guarded(&mut || propositions(&cases)),
    );
    report(
        4,
        "both-flip properties",
        guarded(&mut || both_flip_properties()),
    );
    report(
        5,
        "privacy structure",
        guarded(&mut || privacy_structure(&sessions)),
    );
    report(
        6,
        "operation counts",
        guarded(&mut || {
            complexity(&mut Sessions {
                transcripts: Vec::new(),
                seed: 5000,
            })
        }),
    );
    report(
        7,
        "guessing bounds",
        guarded(&mut || {
            guessing(&mut Sessions {
                transcripts: Vec::new(),
                seed: 7000,
            })
        }),
    );
    report(
        8,
        "transport equivalence",
        guarded(&mut || transport_equivalence()),
    );

    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

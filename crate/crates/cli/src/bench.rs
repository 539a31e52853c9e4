//! Operation-count benchmark: one CSV row per (|At|, trial), both roles in memory.

use std::ops::RangeInclusive;
use std::time::Instant;

use psimc_core::limits::Limits;
use psimc_core::logic::{parse_kb, BitSequence, Interpretation, KnowledgeBase, Signature};
use psimc_core::protocols::{run_local, Input, ProtocolKind, SessionConfig};
use psimc_core::runtime::Counters;
use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};

use crate::error::CliError;

pub const CSV_HEADER: &str = "protocol,atoms,trial,peer_models,sub_rounds,homomorphic_ops,\
frames,keygens,encryptions,decryptions,wall_ms";

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub protocol: ProtocolKind,
    pub atoms: RangeInclusive<usize>,
    pub trials: usize,
    pub peer_models: usize,
    pub seed: u64,
    pub limits: Limits,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub atoms: usize,
    pub trial: usize,
    pub sub_rounds: u64,
    pub counters: Counters,
    pub frames: u64,
    pub wall_ms: f64,
}

/// `"a..b"` (inclusive) or a single count.
pub fn parse_atoms(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad atom count `{t}`"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => (num(s)?, num(s)?),
    };
    if lo == 0 || lo > hi {
        return Err(format!(
            "atom range `{s}` must be non-empty and start at 1 or more"
        ));
    }
    Ok(lo..=hi)
}

fn random_interpretation(rng: &mut StdRng, n: usize) -> Interpretation {
    Interpretation::new((0..n).map(|_| rng.gen()).collect())
}

fn distinct_models(rng: &mut StdRng, n: usize, count: usize) -> Vec<Interpretation> {
    sample(rng, 1usize << n, count)
        .into_iter()
        .map(|i| Interpretation::from_index(i as u64, n))
        .collect()
}

/// The conjunction of literals true in `w`; its only model is `w`.
fn point_kb(w: &Interpretation, sig: &Signature) -> KnowledgeBase {
    let lits: Vec<String> = sig
        .atoms()
        .iter()
        .zip(w.bits())
        .map(|(a, &b)| format!("{}{}", if b { "" } else { "!" }, a.name()))
        .collect();
    parse_kb(&lits.join(" & ")).expect("literal conjunction parses")
}

fn inputs(
    kind: ProtocolKind,
    rng: &mut StdRng,
    sig: &Signature,
    peer_models: usize,
) -> (Input, Input, u64) {
    let n = sig.len();
    match kind {
        ProtocolKind::Alg1 => (
            Input::Interpretation(random_interpretation(rng, n)),
            Input::Interpretation(random_interpretation(rng, n)),
            1,
        ),
        ProtocolKind::Alg1Binary => {
            let mut bits = || BitSequence::new((0..1usize << n).map(|_| rng.gen()).collect());
            (Input::Bits(bits()), Input::Bits(bits()), 1)
        }
        ProtocolKind::Alg2 => (
            Input::Kb(point_kb(&random_interpretation(rng, n), sig)),
            Input::Kb(point_kb(&random_interpretation(rng, n), sig)),
            1,
        ),
        ProtocolKind::Alg3 => (
            Input::Models(distinct_models(rng, n, 1)),
            Input::Models(distinct_models(rng, n, peer_models)),
            peer_models as u64,
        ),
        ProtocolKind::Alg4 => (
            Input::Models(distinct_models(rng, n, 1)),
            Input::Models(distinct_models(rng, n, peer_models)),
            (1u64 << n) * peer_models as u64,
        ),
        ProtocolKind::Psi => (
            Input::Element(rng.gen_range(0..1u64 << n)),
            Input::Element(rng.gen_range(0..1u64 << n)),
            1,
        ),
    }
}

pub fn bench(spec: &BenchSpec, mut emit: impl FnMut(&Row)) -> Result<(), CliError> {
    Signature::numbered(*spec.atoms.end()).check_cap(spec.limits.max_atoms)?;
    if spec.peer_models == 0 {
        return Err(CliError::Usage("--peer-models must be at least 1".into()));
    }
    for n in spec.atoms.clone() {
        if spec.peer_models > 1usize << n {
            return Err(CliError::Usage(format!(
                "{} peer models do not fit in {n} atoms",
                spec.peer_models
            )));
        }
        let sig = Signature::numbered(n);
        for trial in 0..spec.trials {
            let mut rng = StdRng::seed_from_u64(spec.seed ^ ((n as u64) << 32) ^ trial as u64);
            let (a, b, sub_rounds) = inputs(spec.protocol, &mut rng, &sig, spec.peer_models);
            let cfg = SessionConfig::new(sig.clone(), rng.gen()).with_limits(spec.limits);
            let start = Instant::now();
            let (ra, rb) = run_local(spec.protocol, &cfg, a, &cfg, b);
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            let (oa, ob) = (ra?, rb?);
            let mut counters = oa.counters;
            counters.merge(&ob.counters);
            emit(&Row {
                atoms: n,
                trial,
                sub_rounds,
                frames: oa.counters.frames_sent + ob.counters.frames_sent,
                counters,
                wall_ms,
            });
        }
    }
    Ok(())
}

impl Row {
    pub fn csv(&self, protocol: ProtocolKind, peer_models: usize) -> String {
        let c = &self.counters;
        format!(
            "{protocol},{},{},{peer_models},{},{},{},{},{},{},{:.3}",
            self.atoms,
            self.trial,
            self.sub_rounds,
            c.homomorphic_ops,
            self.frames,
            c.keygens,
            c.encryptions,
            c.decryptions,
            self.wall_ms
        )
    }
}

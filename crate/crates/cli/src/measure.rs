use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use psimc_core::limits::Limits;
use psimc_core::logic::{KnowledgeBase, Signature};
use psimc_core::protocols::{
    run, run_local, ProtocolError, ProtocolKind, ProtocolOutcome, SessionConfig,
};
use psimc_core::runtime::{tcp_connect_retry, Counters, Endpoint, Role, TcpAcceptor, Transcript};
use serde::Serialize;

use crate::error::CliError;
use crate::inputs::{load_kb, protocol_input, signature};
use crate::oracle::names;

/// How long a connecting party keeps retrying a refused connection.
const CONNECT_WAIT: Duration = Duration::from_secs(20);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transport {
    Memory,
    Listen(String),
    Connect(String),
}

impl Transport {
    fn name(&self) -> &'static str {
        match self {
            Transport::Memory => "memory",
            Transport::Listen(_) | Transport::Connect(_) => "tcp",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSpec {
    pub protocol: ProtocolKind,
    pub kb_a: Option<PathBuf>,
    pub kb_b: Option<PathBuf>,
    pub signature: Option<String>,
    pub transport: Transport,
    /// Required for TCP; memory runs play both roles.
    pub role: Option<Role>,
    pub seed: u64,
    pub symmetric: bool,
    pub transcript_out: Option<PathBuf>,
    pub limits: Limits,
}

#[derive(Debug, Serialize)]
pub struct PartyReport {
    pub role: Role,
    pub result: Option<u64>,
    pub decrypted: Vec<u64>,
    pub counters: Counters,
}

#[derive(Debug, Serialize)]
pub struct MeasureReport {
    pub protocol: ProtocolKind,
    pub transport: &'static str,
    pub seed: u64,
    pub signature: Vec<String>,
    pub symmetric: bool,
    /// Role A's output in memory runs, this process's output over TCP.
    pub result: Option<u64>,
    pub parties: Vec<PartyReport>,
    pub transcript_out: Option<PathBuf>,
}

impl From<&ProtocolOutcome> for PartyReport {
    fn from(o: &ProtocolOutcome) -> Self {
        PartyReport {
            role: o.role,
            result: o.result,
            decrypted: o.decrypted.clone(),
            counters: o.counters,
        }
    }
}

fn kb_for(spec: &RunSpec, role: Role) -> Result<KnowledgeBase, CliError> {
    let (path, flag) = match role {
        Role::A => (&spec.kb_a, "--kb-a"),
        Role::B => (&spec.kb_b, "--kb-b"),
    };
    let path = path
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("role {role} needs {flag}")))?;
    load_kb(path)
}

fn config(spec: &RunSpec, sig: Signature) -> SessionConfig {
    SessionConfig::new(sig, spec.seed)
        .symmetric(spec.symmetric)
        .with_limits(spec.limits)
}

/// Of two failed parties, the one whose error is not just the channel closing.
fn root_cause(a: ProtocolError, b: Option<ProtocolError>) -> ProtocolError {
    match (a, b) {
        (ProtocolError::Channel(_), Some(b)) if !matches!(b, ProtocolError::Channel(_)) => b,
        (a, _) => a,
    }
}

pub fn measure(spec: &RunSpec) -> Result<MeasureReport, CliError> {
    let (sig, outcomes) = match &spec.transport {
        Transport::Memory => {
            let (ka, kb) = (kb_for(spec, Role::A)?, kb_for(spec, Role::B)?);
            let sig = signature(spec.signature.as_deref(), &[&ka, &kb])?;
            let ia = protocol_input(spec.protocol, &ka, &sig, spec.limits)?;
            let ib = protocol_input(spec.protocol, &kb, &sig, spec.limits)?;
            let cfg = config(spec, sig.clone());
            match run_local(spec.protocol, &cfg, ia, &cfg, ib) {
                (Ok(a), Ok(b)) => (sig, vec![a, b]),
                (Err(a), b) => return Err(root_cause(a, b.err()).into()),
                (Ok(_), Err(b)) => return Err(b.into()),
            }
        }
        tcp => {
            let role = spec
                .role
                .ok_or_else(|| CliError::Usage("TCP transport needs --role".into()))?;
            let k = kb_for(spec, role)?;
            let sig = signature(spec.signature.as_deref(), &[&k])?;
            let input = protocol_input(spec.protocol, &k, &sig, spec.limits)?;
            let cfg = config(spec, sig.clone());
            let channel = match tcp {
                Transport::Listen(addr) => {
                    let acceptor = TcpAcceptor::bind(addr)?;
                    eprintln!("listening on {}", acceptor.local_addr()?);
                    acceptor.accept()?
                }
                Transport::Connect(addr) => tcp_connect_retry(addr, CONNECT_WAIT)?,
                Transport::Memory => unreachable!(),
            };
            let mut ep = Endpoint::new(channel, role);
            (sig, vec![run(&mut ep, &cfg, spec.protocol, input)?])
        }
    };

    if let Some(path) = &spec.transcript_out {
        write_transcripts(path, outcomes.iter().flat_map(|o| &o.transcripts))?;
    }
    Ok(MeasureReport {
        protocol: spec.protocol,
        transport: spec.transport.name(),
        seed: spec.seed,
        signature: names(&sig),
        symmetric: spec.symmetric,
        result: outcomes[0].result,
        parties: outcomes.iter().map(PartyReport::from).collect(),
        transcript_out: spec.transcript_out.clone(),
    })
}

fn write_transcripts<'a>(
    path: &Path,
    ts: impl Iterator<Item = &'a Transcript>,
) -> Result<(), CliError> {
    let ts: Vec<&Transcript> = ts.collect();
    let json = serde_json::to_string_pretty(&ts).expect("transcripts serialize");
    fs::write(path, json + "\n").map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

impl MeasureReport {
    pub fn table(&self) -> String {
        let mut out = format!(
            "{} over {} (seed {}{})\nsignature: {}\n",
            self.protocol,
            self.transport,
            self.seed,
            if self.symmetric { ", symmetric" } else { "" },
            self.signature.join(", ")
        );
        match self.result {
            Some(r) => out.push_str(&format!("result: {r}\n")),
            None => out.push_str("result: (held by the key holder)\n"),
        }
        out.push_str(&format!(
            "{:<6}{:>8}{:>12}{:>12}{:>8}{:>8}{:>8}\n",
            "party", "keygens", "encryptions", "decryptions", "ops", "sent", "recv"
        ));
        for p in &self.parties {
            let c = &p.counters;
            out.push_str(&format!(
                "{:<6}{:>8}{:>12}{:>12}{:>8}{:>8}{:>8}\n",
                p.role.to_string(),
                c.keygens,
                c.encryptions,
                c.decryptions,
                c.homomorphic_ops,
                c.frames_sent,
                c.frames_received
            ));
        }
        if let Some(p) = &self.transcript_out {
            out.push_str(&format!("transcript: {}\n", p.display()));
        }
        out
    }
}

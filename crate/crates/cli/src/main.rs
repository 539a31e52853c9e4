//! `psimc`: private inconsistency measurement between two knowledge bases.
//!
//! Exit statuses: 0 success, 1 audit found a violation, 2 configuration or usage,
//! 3 network, 4 protocol, 5 input.

mod audit;
mod bench;
mod error;
mod inputs;
mod measure;
mod oracle;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use psimc_core::limits::Limits;
use psimc_core::protocols::ProtocolKind;
use psimc_core::runtime::Role;
use serde::Serialize;

use crate::error::{exit, CliError};
use crate::measure::{RunSpec, Transport};

#[derive(Parser)]
#[command(
    name = "psimc",
    version,
    about = "Private inconsistency measurement between two knowledge bases"
)]
#[command(
    after_help = "Exit status: 0 ok, 1 audit violation, 2 config, 3 network, 4 protocol, 5 input.\n\
PSIMC_MAX_ATOMS overrides the enumeration caps."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plaintext drastic and contension measures, and the min-mismatch upper bound.
    Oracle(OracleArgs),
    /// Run a two-party protocol, in one process or as one side of a TCP session.
    Measure(MeasureArgs),
    /// Check recorded transcripts for input leakage.
    Audit(AuditArgs),
    /// Operation counts and wall time per signature size, as CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_name = "FILE")]
    kb_a: PathBuf,
    #[arg(long, value_name = "FILE")]
    kb_b: Option<PathBuf>,
    /// Comma-separated atoms; defaults to the atoms of the given bases.
    #[arg(long, value_name = "ATOMS")]
    signature: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransportArg {
    Memory,
    Tcp,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long, value_parser = parse_protocol)]
    protocol: ProtocolKind,
    #[arg(long, value_name = "FILE")]
    kb_a: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    kb_b: Option<PathBuf>,
    #[arg(long, value_name = "ATOMS")]
    signature: Option<String>,
    /// Defaults to tcp when --listen or --connect is given.
    #[arg(long, value_enum)]
    transport: Option<TransportArg>,
    #[arg(long, value_name = "ADDR", conflicts_with = "connect")]
    listen: Option<String>,
    #[arg(long, value_name = "ADDR")]
    connect: Option<String>,
    /// A (key holder) or B.
    #[arg(long, value_parser = parse_role)]
    role: Option<Role>,
    /// Required with --json.
    #[arg(long)]
    seed: Option<u64>,
    /// Repeat the run with B holding the key so both parties learn the result.
    #[arg(long)]
    symmetric: bool,
    #[arg(long)]
    json: bool,
    #[arg(long, value_name = "FILE")]
    transcript_out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    /// A transcript, or a JSON array of transcripts as written by `measure --transcript-out`.
    path: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_parser = parse_protocol)]
    protocol: ProtocolKind,
    /// Inclusive range such as 2..10, or a single count.
    #[arg(long, value_parser = bench::parse_atoms)]
    atoms: std::ops::RangeInclusive<usize>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Model count of the peer's input for alg3 and alg4.
    #[arg(long, default_value_t = 1)]
    peer_models: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_protocol(s: &str) -> Result<ProtocolKind, String> {
    s.parse()
}

fn parse_role(s: &str) -> Result<Role, String> {
    s.parse()
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serializes")
    );
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let limits = Limits::from_env();
    match cli.command {
        Command::Oracle(a) => {
            let ka = inputs::load_kb(&a.kb_a)?;
            let kb = a.kb_b.as_deref().map(inputs::load_kb).transpose()?;
            let kbs: Vec<_> = std::iter::once(&ka).chain(kb.as_ref()).collect();
            let sig = inputs::signature(a.signature.as_deref(), &kbs)?;
            let report = oracle::oracle(&ka, kb.as_ref(), &sig, limits)?;
            if a.json {
                print_json(&report);
            } else {
                print!("{}", report.table());
            }
            Ok(exit::OK)
        }
        Command::Measure(a) => {
            let transport = match (a.transport, a.listen, a.connect) {
                (Some(TransportArg::Memory), None, None) | (None, None, None) => Transport::Memory,
                (Some(TransportArg::Memory), _, _) => {
                    return Err(CliError::Usage(
                        "--listen/--connect need --transport tcp".into(),
                    ))
                }
                (_, Some(addr), _) => Transport::Listen(addr),
                (_, None, Some(addr)) => Transport::Connect(addr),
                (Some(TransportArg::Tcp), None, None) => {
                    return Err(CliError::Usage(
                        "--transport tcp needs --listen or --connect".into(),
                    ))
                }
            };
            if transport != Transport::Memory && a.role.is_none() {
                return Err(CliError::Usage("--transport tcp needs --role".into()));
            }
            let seed = match (a.seed, a.json) {
                (Some(s), _) => s,
                (None, true) => {
                    return Err(CliError::Usage("--json needs an explicit --seed".into()))
                }
                (None, false) => rand::random(),
            };
            let spec = RunSpec {
                protocol: a.protocol,
                kb_a: a.kb_a,
                kb_b: a.kb_b,
                signature: a.signature,
                transport,
                role: a.role,
                seed,
                symmetric: a.symmetric,
                transcript_out: a.transcript_out,
                limits,
            };
            let report = measure::measure(&spec)?;
            if a.json {
                print_json(&report);
            } else {
                print!("{}", report.table());
            }
            Ok(exit::OK)
        }
        Command::Audit(a) => {
            let reports = audit::audit_file(&a.path)?;
            if a.json {
                print_json(&reports);
            } else {
                print!("{}", audit::table(&reports));
            }
            Ok(if reports.iter().all(|r| r.ip_holds()) {
                exit::OK
            } else {
                exit::VIOLATION
            })
        }
        Command::Bench(a) => {
            let spec = bench::BenchSpec {
                protocol: a.protocol,
                atoms: a.atoms,
                trials: a.trials,
                peer_models: a.peer_models,
                seed: a.seed,
                limits,
            };
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            let _ = writeln!(out, "{}", bench::CSV_HEADER);
            bench::bench(&spec, |row| {
                let _ = writeln!(out, "{}", row.csv(spec.protocol, spec.peer_models));
            })?;
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let mut msg = format!("psimc: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                msg.push_str(&format!(": {s}"));
                source = s.source();
            }
            eprintln!("{msg}");
            ExitCode::from(e.exit_code())
        }
    }
}

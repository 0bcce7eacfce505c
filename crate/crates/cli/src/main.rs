//! `hybridsim`: run protocols, sweep them against their oracles, meter
//! reductions and evaluate the two-party and lower-bound numerics.
//!
//! Exit codes: `simulate` returns 0 on accept and 1 on reject; `verify` and
//! `transform` return 1 when a check fails; every command returns 2 on error.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use hybridsim::engine::{execute, schedule_cost, Bandwidth, Schedule};
use hybridsim::graph::{parse_generator, LabeledGraph, NodeId};
use hybridsim::languages::{membership, LanguageId};
use hybridsim::protocols::{lookup, NamedProtocol};
use hybridsim::suite::{sweep, targets};
use hybridsim::transforms::{normalize_lb, swap_bl_to_lb, WrappedProtocol};
use hybridsim::twoparty::{bruteforce_min_error, cut_communication, fraction, CutConfig};
use hybridsim::xorlb::{budget_bound, kkt_csv, Posteriors};

#[derive(Parser)]
#[command(name = "hybridsim", version, about = "Hybrid LOCAL/CONGEST/BCC round simulator and analysis toolkit")]
struct Cli {
    /// Seed for node tapes and sampling.
    #[arg(long, global = true, env = "HYBRIDSIM_SEED", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct InstanceArgs {
    /// Generator text, `family:n:key=value,...`.
    #[arg(long, conflicts_with = "input")]
    gen: Option<String>,
    /// Graph JSON file.
    #[arg(long)]
    input: Option<PathBuf>,
}

impl InstanceArgs {
    fn load(&self) -> Result<LabeledGraph> {
        match (&self.gen, &self.input) {
            (Some(text), _) => parse_generator(text).with_context(|| format!("generator {text:?}")),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                LabeledGraph::from_json(&text).with_context(|| format!("parsing {}", path.display()))
            }
            (None, None) => bail!("give --gen or --input"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one protocol on one instance.
    Simulate {
        #[arg(long)]
        protocol: String,
        #[command(flatten)]
        instance: InstanceArgs,
        /// Replace the protocol's schedule, e.g. `B,L`.
        #[arg(long)]
        schedule: Option<String>,
        /// Fixed per-message budget in bits for C and B rounds.
        #[arg(long)]
        bandwidth: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep protocols against their oracles on exhaustive small instances.
    Verify {
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long)]
        only: Option<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Meter the bits a run sends across an Alice/Bob node partition.
    Reduce {
        #[arg(long)]
        protocol: String,
        #[command(flatten)]
        instance: InstanceArgs,
        /// Alice's nodes, e.g. `1-4,9`; every other node is Bob's.
        #[arg(long)]
        alice: String,
        /// Metered senders: `all`, `none` or a node list.
        #[arg(long, default_value = "all")]
        accounted: String,
    },
    /// Exact minimum error of one-round XOR-index protocols.
    Bruteforce {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ka: usize,
        #[arg(long)]
        kb: usize,
        /// Print the witness as JSON instead of the bare fraction.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate every stationary decision rule at the given posteriors (CSV).
    Kkt {
        #[arg(long, default_value_t = 0.7)]
        ra: f64,
        #[arg(long, default_value_t = 0.6)]
        rb: f64,
    },
    /// Smallest symmetric message budget compatible with error `eps`.
    Bound {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        eps: f64,
    },
    /// Weighted cost `a·#L + b·#B + c·#C` of a schedule.
    Cost {
        #[arg(long)]
        schedule: String,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// Reorder B and L rounds and compare verdicts with the original run.
    Transform {
        #[arg(value_enum)]
        mode: TransformMode,
        #[arg(long)]
        protocol: String,
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        schedule: Option<String>,
        /// 1-based index of the B round to swap (`swap` mode).
        #[arg(long)]
        t: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformMode {
    NormalizeLb,
    Swap,
}

fn protocol(name: &str) -> Result<NamedProtocol> {
    lookup(name).with_context(|| format!("no protocol named {name:?}"))
}

fn parse_schedule(text: &str) -> Result<Schedule> {
    text.parse().with_context(|| format!("schedule {text:?}"))
}

/// `1-4,9` style node lists.
fn node_list(text: &str) -> Result<BTreeSet<NodeId>> {
    let mut out = BTreeSet::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => out.extend(a.trim().parse::<NodeId>()?..=b.trim().parse::<NodeId>()?),
            None => {
                out.insert(part.parse::<NodeId>()?);
            }
        }
    }
    Ok(out)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let seed = cli.seed;
    match cli.command {
        Command::Simulate { protocol: name, instance, schedule, bandwidth, format, out } => {
            let mut np = protocol(&name)?;
            if let Some(s) = schedule {
                np = np.with_schedule(parse_schedule(&s)?);
            }
            if let Some(bits) = bandwidth {
                let s = np.schedule.clone().with_bandwidth(Bandwidth::Fixed(bits));
                np = np.with_schedule(s);
            }
            let g = instance.load()?;
            let exec = execute(&np.protocol, &g, &np.schedule, seed)?;
            let accepted = exec.verdict.accepted();
            let text = match format {
                Format::Csv => exec.transcript.to_csv(),
                Format::Json => serde_json::to_string_pretty(&json!({
                    "protocol": np.name(),
                    "schedule": np.schedule.to_string(),
                    "n": g.n(),
                    "seed": seed,
                    "accepted": accepted,
                    "member": membership(np.language, &g),
                    "rejecting": exec.verdict.rejecting(),
                    "transcript_bits": exec.transcript.total_bits(),
                    "bits_by_round": exec.transcript.bits_by_round(),
                    "transcript": exec.transcript,
                }))?,
            };
            emit(&text, out.as_ref())?;
            Ok(ExitCode::from(if accepted { 0 } else { 1 }))
        }
        Command::Verify { max_n, only, format } => {
            let only = only.map(|s| s.parse::<LanguageId>()).transpose()?;
            let picked = targets(max_n, only);
            if picked.is_empty() {
                bail!("no protocol matches");
            }
            let mut reports = Vec::new();
            for t in &picked {
                reports.push(sweep(t, seed)?);
            }
            match format {
                Format::Json => emit(&serde_json::to_string_pretty(&reports)?, None)?,
                Format::Csv => {
                    let mut text =
                        String::from("protocol,family,max_size,checked,members,mismatches,engine_errors,status");
                    for r in &reports {
                        text.push_str(&format!(
                            "\n{},{},{},{},{},{},{},{}",
                            r.protocol,
                            r.family,
                            r.max_size,
                            r.checked,
                            r.members,
                            r.mismatches,
                            r.engine_errors,
                            if r.passed() { "PASS" } else { "FAIL" }
                        ));
                    }
                    emit(&text, None)?;
                }
            }
            Ok(ExitCode::from(if reports.iter().all(|r| r.passed()) { 0 } else { 1 }))
        }
        Command::Reduce { protocol: name, instance, alice, accounted } => {
            let np = protocol(&name)?;
            let g = instance.load()?;
            let alice = node_list(&alice)?;
            let bob = g.nodes().filter(|v| !alice.contains(v)).collect();
            let accounted = match accounted.as_str() {
                "all" => g.nodes().collect(),
                "none" => BTreeSet::new(),
                list => node_list(list)?,
            };
            let report = cut_communication(&np, &g, &CutConfig { alice, bob, accounted }, seed)?;
            emit(
                &serde_json::to_string_pretty(&json!({
                    "protocol": np.name(),
                    "n": g.n(),
                    "bandwidth": np.schedule.budget(g.n()),
                    "total": report.total(),
                    "report": report,
                }))?,
                None,
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bruteforce { n, ka, kb, json } => {
            let result = bruteforce_min_error(n, ka, kb)?;
            if json {
                emit(&result.to_json(), None)?;
            } else {
                emit(&fraction(&result.min_error), None)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Kkt { ra, rb } => {
            emit(kkt_csv(&Posteriors::new(ra, rb)?).trim_end(), None)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bound { n, eps } => {
            emit(&budget_bound(n, eps)?.to_string(), None)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Cost { schedule, a, b, c } => {
            emit(&schedule_cost(&parse_schedule(&schedule)?, a, b, c).to_string(), None)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Transform { mode, protocol: name, instance, schedule, t } => {
            let np = protocol(&name)?;
            let sched = match schedule {
                Some(s) => parse_schedule(&s)?,
                None => np.schedule.clone(),
            };
            let g = instance.load()?;
            let (wrapped, new_sched): (WrappedProtocol, Schedule) = match mode {
                TransformMode::NormalizeLb => normalize_lb(np.protocol.clone(), &sched)?,
                TransformMode::Swap => swap_bl_to_lb(np.protocol.clone(), &sched, t.context("swap needs --t")?)?,
            };
            let before = execute(&np.protocol, &g, &sched, seed)?.verdict;
            let after = execute(&wrapped, &g, &new_sched, seed)?.verdict;
            let equal = before == after;
            emit(
                &serde_json::to_string_pretty(&json!({
                    "protocol": np.name(),
                    "schedule": sched.to_string(),
                    "transformed_schedule": new_sched.to_string(),
                    "swaps": wrapped.swaps,
                    "accepted": after.accepted(),
                    "verdicts_equal": equal,
                }))?,
                None,
            )?;
            Ok(ExitCode::from(if equal { 0 } else { 1 }))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

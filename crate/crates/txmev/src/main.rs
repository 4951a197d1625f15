//! `txmev` — parse, execute and analyse TxScript contracts.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use txmev::economics;
use txmev::knowledge::{self, ActorSet, Bounds};
use txmev::lang::ast::{ActorId, Transaction};
use txmev::lang::{check_wellformed, desugar_constants, parse_contract, parse_transaction, Severity};
use txmev::lang::pretty;
use txmev::mev::{self, Verdict};
use txmev::report::{Format, Report};
use txmev::scenario::{load_scenario, resolve_path, Scenario};
use txmev::semantics::exec_sequence;

/// Nonce base for transactions given on the command line, clear of the
/// scenario's own auto-assigned nonces.
const CLI_NONCE_BASE: u64 = 10_000;

#[derive(Parser)]
#[command(name = "txmev", version, about = "TxScript interpreter and MEV analyser")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Worker threads for searches. Results are identical for any value.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Override the scenario's depth bound.
    #[arg(long, global = true)]
    max_depth: Option<usize>,
    /// Override the scenario's amount bound.
    #[arg(long, global = true)]
    max_amount: Option<u64>,
    /// Override the scenario's representative count (mev-free).
    #[arg(long, global = true)]
    reps: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a contract (or a scenario's contract) and report diagnostics.
    Parse { path: String },
    /// Execute a transaction sequence and print the trace.
    Run {
        scenario: String,
        /// Transactions to execute (defaults to the scenario mempool, in order).
        #[arg(long = "tx")]
        txs: Vec<String>,
        /// File with one transaction per line.
        #[arg(long)]
        seq: Option<PathBuf>,
    },
    /// Can a coalition deduce a transaction from the mempool?
    Deduce {
        scenario: String,
        #[arg(long)]
        actors: String,
        #[arg(long)]
        tx: String,
    },
    /// The authorisers of a transaction.
    Auth {
        scenario: Option<String>,
        #[arg(long)]
        tx: String,
    },
    /// Gain, unrealized gain and external gain of a coalition on a sequence.
    Gain {
        scenario: String,
        #[arg(long)]
        actors: String,
        #[arg(long = "tx")]
        txs: Vec<String>,
        #[arg(long)]
        seq: Option<PathBuf>,
    },
    /// Maximal extractable value of a coalition from the scenario mempool.
    Mev {
        scenario: String,
        #[arg(long)]
        actors: String,
    },
    /// Is the scenario MEV-free? Exits 1 when an attack is found.
    MevFree { scenario: String },
    /// The attacker cluster of the scenario.
    Cluster { scenario: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers == 0 {
        eprintln!("error: --workers must be at least 1");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &str, cli: &Cli) -> Result<Scenario, String> {
    let p = resolve_path(path, None);
    let mut scn = load_scenario(&p).map_err(|e| e.to_string())?;
    if let Some(d) = cli.max_depth {
        scn.bounds.max_depth = d;
    }
    if let Some(a) = cli.max_amount {
        scn.bounds.max_amount = a;
    }
    if let Some(r) = cli.reps {
        scn.bounds.representatives = r;
    }
    Ok(scn)
}

fn parse_actors(spec: &str) -> ActorSet {
    ActorSet::finite(
        spec.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(ActorId::new),
    )
}

fn parse_cli_txs(
    scn: &Scenario,
    txs: &[String],
    seq: &Option<PathBuf>,
) -> Result<Option<Vec<Transaction>>, String> {
    let mut sources: Vec<String> = Vec::new();
    if let Some(seq) = seq {
        let p = resolve_path(&seq.display().to_string(), None);
        let text = std::fs::read_to_string(&p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
        sources.extend(
            text.lines()
                .map(|l| l.split('#').next().unwrap_or("").trim().to_string())
                .filter(|l| !l.is_empty()),
        );
    }
    sources.extend(txs.iter().cloned());
    if sources.is_empty() {
        return Ok(None);
    }
    let mut counter = CLI_NONCE_BASE;
    sources
        .iter()
        .map(|s| parse_transaction(s, &scn.tokens, &mut counter).map_err(|e| format!("bad transaction `{s}`: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn witness_strings(witness: &[Transaction]) -> Vec<String> {
    witness.iter().map(Transaction::to_string).collect()
}

fn bounds_string(b: &Bounds) -> String {
    format!(
        "depth={} amount={} secrets={} nonces={} reps={}",
        b.max_depth,
        b.max_amount,
        b.secret_values
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(","),
        b.nonces_per_actor,
        b.representatives
    )
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    match &cli.cmd {
        Cmd::Parse { path } => {
            let report = cmd_parse(path)?;
            print!("{}", report.render(cli.format));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Run { scenario, txs, seq } => {
            let scn = load(scenario, cli)?;
            let seq = parse_cli_txs(&scn, txs, seq)?.unwrap_or_else(|| scn.mempool.clone());
            let (end, trace) = exec_sequence(&scn.start, &scn.contract, &seq);
            let mut steps = Vec::new();
            for s in &trace.steps {
                let status = if s.applied {
                    if s.ambiguous {
                        "applied (ambiguous: several clauses matched)".to_string()
                    } else {
                        "applied".to_string()
                    }
                } else {
                    format!("invalid ({})", s.reason.as_ref().unwrap())
                };
                steps.push(format!("{} -> {status}", s.tx));
            }
            let mut report = Report::new("run")
                .field("scenario", scenario.as_str())
                .field("steps", trace.steps.len() as u64)
                .field(
                    "applied",
                    trace.steps.iter().filter(|s| s.applied).count() as u64,
                )
                .list("trace", steps);
            let mut balances = Vec::new();
            for (t, n) in &end.contract.balances {
                balances.push(format!("{t}: {n}"));
            }
            report = report.list("contract-balances", balances);
            let mut vars = Vec::new();
            for (x, v) in &end.contract.sigma {
                vars.push(format!("{x} = {v}"));
            }
            report = report.list("contract-state", vars);
            let mut wallets = Vec::new();
            for (a, w) in &end.wallets.0 {
                for (t, n) in w {
                    wallets.push(format!("{a}: {n}:{t}"));
                }
            }
            report = report.list("wallets", wallets);
            print!("{}", report.render(cli.format));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Deduce { scenario, actors, tx } => {
            let scn = load(scenario, cli)?;
            let set = parse_actors(actors);
            let mut counter = CLI_NONCE_BASE;
            let tx = parse_transaction(tx, &scn.tokens, &mut counter)
                .map_err(|e| format!("bad transaction `{tx}`: {e}"))?;
            let yes = knowledge::can_deduce(&set, &scn.mempool, &tx);
            let report = Report::new("deduce")
                .field("scenario", scenario.as_str())
                .field("actors", actors.as_str())
                .field("tx", tx.to_string())
                .field("deducible", if yes { "yes" } else { "no" });
            print!("{}", report.render(cli.format));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Auth { scenario, tx } => {
            let tokens = match scenario {
                Some(s) => load(s, cli)?.tokens,
                None => BTreeSet::new(),
            };
            let mut counter = CLI_NONCE_BASE;
            let tx = parse_transaction(tx, &tokens, &mut counter)
                .map_err(|e| format!("bad transaction `{tx}`: {e}"))?;
            let auth = knowledge::authorisers(&tx);
            let report = Report::new("auth")
                .field("tx", tx.to_string())
                .list("authorisers", auth.iter().map(ActorId::to_string).collect());
            print!("{}", report.render(cli.format));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Gain { scenario, actors, txs, seq } => {
            let scn = load(scenario, cli)?;
            let set = parse_actors(actors);
            let seq = parse_cli_txs(&scn, txs, seq)?
                .ok_or_else(|| "gain needs a sequence (--tx or --seq)".to_string())?;
            let g = economics::gain(&set, &scn.start, &scn.contract, &seq, &scn.prices);
            let u = economics::unrealized_gain(&set, &scn.start, &scn.contract, &scn.bounds, &scn.prices);
            let report = Report::new("gain")
                .field("scenario", scenario.as_str())
                .field("actors", actors.as_str())
                .list("sequence", witness_strings(&seq))
                .field("gain", g)
                .field("unrealized-gain", u.value)
                .field("external-gain", g - u.value)
                .field("states-explored", u.states_explored);
            print!("{}", report.render(cli.format));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Mev { scenario, actors } => {
            let scn = load(scenario, cli)?;
            let set = parse_actors(actors);
            let report_data = mev::mev(&set, &scn.start, &scn.contract, &scn.mempool, &scn.bounds, &scn.prices);
            let report = Report::new("mev")
                .field("scenario", scenario.as_str())
                .field("actors", actors.as_str())
                .field("bounds", bounds_string(&scn.bounds))
                .field("value", report_data.value)
                .list("witness", witness_strings(&report_data.witness))
                .field("states-explored", report_data.states_explored);
            print!("{}", report.render(cli.format));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::MevFree { scenario } => {
            let scn = load(scenario, cli)?;
            let verdict = mev::mev_freedom_check(&scn.start, &scn.contract, &scn.mempool, &scn.bounds, &scn.prices);
            match verdict {
                Verdict::AttackFound { representatives, value, witness, states_explored, .. } => {
                    let report = Report::new("mev-free")
                        .field("scenario", scenario.as_str())
                        .field("verdict", "attack-found")
                        .list(
                            "representatives",
                            representatives.iter().map(ActorId::to_string).collect(),
                        )
                        .field("value", value)
                        .list("witness", witness_strings(&witness))
                        .field("states-explored", states_explored);
                    print!("{}", report.render(cli.format));
                    Ok(ExitCode::from(1))
                }
                Verdict::NoAttackWithinBounds { bounds, states_explored } => {
                    let report = Report::new("mev-free")
                        .field("scenario", scenario.as_str())
                        .field("verdict", "no-attack-within-bounds")
                        .field("bounds", bounds_string(&bounds))
                        .field("states-explored", states_explored);
                    print!("{}", report.render(cli.format));
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Cmd::Cluster { scenario } => {
            let scn = load(scenario, cli)?;
            let excluded = mev::excluded_actors(&scn.start, &scn.mempool, &scn.contract);
            let report = Report::new("cluster")
                .field("scenario", scenario.as_str())
                .field("cluster", "cofinite (all actors except the excluded)")
                .list("excluded", excluded.iter().map(ActorId::to_string).collect());
            print!("{}", report.render(cli.format));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_parse(path: &str) -> Result<Report, String> {
    let p = resolve_path(path, None);
    if p.extension().and_then(|e| e.to_str()) == Some("scn") {
        let scn = load_scenario(&p).map_err(|e| e.to_string())?;
        return Ok(contract_report(&scn.contract, path, Vec::new()));
    }
    let text = std::fs::read_to_string(&p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
    let parsed = parse_contract(&text, &BTreeSet::new()).map_err(|e| e.to_string())?;
    let warnings: Vec<String> = check_wellformed(&parsed)
        .into_iter()
        .filter(|d| d.severity == Severity::Warning)
        .map(|d| d.message)
        .collect();
    let contract = desugar_constants(&parsed);
    Ok(contract_report(&contract, path, warnings))
}

fn contract_report(c: &txmev::lang::ContractDef, path: &str, warnings: Vec<String>) -> Report {
    let clauses: Vec<String> = c
        .clauses
        .iter()
        .map(|cl| {
            format!(
                "{}({}) [pre {}]",
                cl.name,
                cl.params.len(),
                pretty::expr_to_string(&cl.pre)
            )
        })
        .collect();
    Report::new("parse")
        .field("path", path)
        .field("contract", c.name.as_str())
        .field(
            "tokens",
            c.declared_tokens
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        )
        .field(
            "hardcoded-actors",
            c.hardcoded_actors
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        )
        .list("clauses", clauses)
        .list("warnings", warnings)
}

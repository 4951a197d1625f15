//! The line-oriented scenario format.
//!
//! ```text
//! # comment
//! contract coinpusher.txs          # path, relative to this file
//! tokens T
//! prices T=1
//! actor A { T: 1 }
//! actor B { T: 100 }
//! pool M                           # extra candidate actors for searches
//! setup []                         # executed at load time; must all apply
//! mempool [ play(A?1:T) ]
//! bounds depth=2 amount=100 secrets=0,1 nonces=1 reps=1
//! ```
//!
//! Directives may appear in any order except that `tokens` must precede
//! transactions. Bracketed lists may span lines; top-level commas separate
//! transactions. Elided `@nonce`s are assigned from one file-wide counter.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use crate::economics::PriceTable;
use crate::knowledge::Bounds;
use crate::lang::ast::{ActorId, ContractDef, TokenId, Transaction};
use crate::lang::check::{check_wellformed, Severity};
use crate::lang::desugar::desugar_constants;
use crate::lang::parser::{parse_contract, parse_transaction};
use crate::semantics::{exec_sequence, BlockchainState, WalletState};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    #[error("{path}:{line}: {msg}")]
    Syntax { path: String, line: usize, msg: String },
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("contract error in {path}: {msg}")]
    Contract { path: String, msg: String },
    #[error("setup transaction `{tx}` is invalid: {reason}")]
    SetupFailed { tx: String, reason: String },
    #[error("{0}")]
    Validation(String),
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub contract: ContractDef,
    pub contract_path: PathBuf,
    pub tokens: BTreeSet<TokenId>,
    pub prices: PriceTable,
    pub initial_wallets: WalletState,
    pub pool: BTreeSet<ActorId>,
    pub setup: Vec<Transaction>,
    pub mempool: Vec<Transaction>,
    pub bounds: Bounds,
    /// The state after executing `setup` from the initial wallets.
    pub start: BlockchainState,
}

/// Resolve a user-supplied path: as given, or relative to `base`, or
/// relative to the `TXMEV_CORPUS` directory when set.
pub fn resolve_path(path: &str, base: Option<&Path>) -> PathBuf {
    let p = PathBuf::from(path);
    if p.exists() {
        return p;
    }
    if let Some(base) = base {
        let rel = base.join(path);
        if rel.exists() {
            return rel;
        }
    }
    if let Ok(corpus) = std::env::var("TXMEV_CORPUS") {
        let rel = Path::new(&corpus).join(path);
        if rel.exists() {
            return rel;
        }
    }
    p
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Split on commas at parenthesis depth zero.
fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | '[' => {
                depth += 1;
                cur.push(ch);
            }
            ')' | ']' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur);
    }
    out.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

struct Directive {
    line: usize,
    keyword: String,
    rest: String,
}

/// Group the file into directives, joining continuation lines of bracketed
/// lists and brace blocks.
fn directives(src: &str, path: &str) -> Result<Vec<Directive>, ScenarioError> {
    let mut out: Vec<Directive> = Vec::new();
    let mut pending: Option<Directive> = None;
    for (i, raw) in src.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(mut d) = pending.take() {
            d.rest.push(' ');
            d.rest.push_str(line);
            if balanced(&d.rest) {
                out.push(d);
            } else {
                pending = Some(d);
            }
            continue;
        }
        let (keyword, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k.to_string(), r.trim().to_string()),
            None => (line.to_string(), String::new()),
        };
        let d = Directive { line: i + 1, keyword, rest };
        if balanced(&d.rest) {
            out.push(d);
        } else {
            pending = Some(d);
        }
    }
    if let Some(d) = pending {
        return Err(ScenarioError::Syntax {
            path: path.to_string(),
            line: d.line,
            msg: format!("unterminated `{}` directive", d.keyword),
        });
    }
    Ok(out)
}

fn balanced(s: &str) -> bool {
    let mut depth = 0i64;
    for ch in s.chars() {
        match ch {
            '[' | '{' | '(' => depth += 1,
            ']' | '}' | ')' => depth -= 1,
            _ => {}
        }
    }
    depth <= 0
}

fn bracket_body<'a>(rest: &'a str, keyword: &str, path: &str, line: usize) -> Result<&'a str, ScenarioError> {
    let rest = rest.trim();
    if let Some(inner) = rest.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        Ok(inner)
    } else {
        Err(ScenarioError::Syntax {
            path: path.to_string(),
            line,
            msg: format!("`{keyword}` expects a bracketed transaction list"),
        })
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    parse_scenario(&text, path)
}

pub fn parse_scenario(text: &str, path: &Path) -> Result<Scenario, ScenarioError> {
    let path_str = path.display().to_string();
    let dir = path.parent().map(Path::to_path_buf);
    let syntax = |line: usize, msg: String| ScenarioError::Syntax {
        path: path_str.clone(),
        line,
        msg,
    };

    let mut tokens: BTreeSet<TokenId> = BTreeSet::new();
    let mut prices = PriceTable::default();
    let mut contract_path: Option<PathBuf> = None;
    let mut wallets = WalletState::default();
    let mut pool: BTreeSet<ActorId> = BTreeSet::new();
    let mut setup_src: Vec<String> = Vec::new();
    let mut mempool_src: Vec<String> = Vec::new();
    let mut bounds = Bounds::default();

    for d in directives(text, &path_str)? {
        match d.keyword.as_str() {
            "tokens" => {
                for t in d.rest.split_whitespace() {
                    tokens.insert(TokenId::new(t));
                }
            }
            "prices" => {
                for kv in d.rest.split_whitespace() {
                    let (t, v) = kv
                        .split_once('=')
                        .ok_or_else(|| syntax(d.line, format!("bad price `{kv}`, expected TOKEN=NAT")))?;
                    let v: u64 = v
                        .parse()
                        .map_err(|_| syntax(d.line, format!("bad price value `{v}`")))?;
                    prices.0.insert(TokenId::new(t), v);
                }
            }
            "contract" => {
                contract_path = Some(resolve_path(d.rest.trim(), dir.as_deref()));
            }
            "actor" => {
                let rest = d.rest.trim();
                let (name, body) = rest
                    .split_once('{')
                    .ok_or_else(|| syntax(d.line, "expected `actor NAME { TOKEN: n ... }`".into()))?;
                let name = ActorId::new(name.trim());
                let body = body
                    .strip_suffix('}')
                    .ok_or_else(|| syntax(d.line, "unterminated actor wallet".into()))?;
                // entries look like `T: 5`, whitespace-separated pairs
                let words: Vec<&str> = body.split_whitespace().collect();
                let mut i = 0;
                while i < words.len() {
                    let t = words[i].trim_end_matches(':');
                    let n = words.get(i + 1).ok_or_else(|| {
                        syntax(d.line, format!("wallet entry `{t}` is missing an amount"))
                    })?;
                    let n: u64 = n
                        .trim_end_matches(',')
                        .parse()
                        .map_err(|_| syntax(d.line, format!("bad wallet amount `{n}`")))?;
                    wallets.add(&name, &TokenId::new(t), n);
                    i += 2;
                }
                // an actor with an empty wallet still joins the candidate pool
                pool.insert(name);
            }
            "pool" => {
                for a in d.rest.split_whitespace() {
                    pool.insert(ActorId::new(a));
                }
            }
            "setup" => {
                let body = bracket_body(&d.rest, "setup", &path_str, d.line)?;
                setup_src = split_top_level(body);
            }
            "mempool" => {
                let body = bracket_body(&d.rest, "mempool", &path_str, d.line)?;
                mempool_src = split_top_level(body);
            }
            "bounds" => {
                for kv in d.rest.split_whitespace() {
                    let (k, v) = kv
                        .split_once('=')
                        .ok_or_else(|| syntax(d.line, format!("bad bound `{kv}`, expected key=value")))?;
                    match k {
                        "depth" => {
                            bounds.max_depth = v
                                .parse()
                                .map_err(|_| syntax(d.line, format!("bad depth `{v}`")))?
                        }
                        "amount" => {
                            bounds.max_amount = v
                                .parse()
                                .map_err(|_| syntax(d.line, format!("bad amount `{v}`")))?
                        }
                        "secrets" => {
                            bounds.secret_values = v
                                .split(',')
                                .map(|s| s.parse::<u64>())
                                .collect::<Result<_, _>>()
                                .map_err(|_| syntax(d.line, format!("bad secrets `{v}`")))?
                        }
                        "nonces" => {
                            bounds.nonces_per_actor = v
                                .parse()
                                .map_err(|_| syntax(d.line, format!("bad nonces `{v}`")))?
                        }
                        "reps" => {
                            bounds.representatives = v
                                .parse()
                                .map_err(|_| syntax(d.line, format!("bad reps `{v}`")))?
                        }
                        other => return Err(syntax(d.line, format!("unknown bound `{other}`"))),
                    }
                }
            }
            other => return Err(syntax(d.line, format!("unknown directive `{other}`"))),
        }
    }

    let contract_path = contract_path.ok_or_else(|| {
        ScenarioError::Validation(format!("{path_str}: missing `contract` directive"))
    })?;
    let contract_text =
        std::fs::read_to_string(&contract_path).map_err(|e| ScenarioError::Io {
            path: contract_path.display().to_string(),
            msg: e.to_string(),
        })?;
    let parsed = parse_contract(&contract_text, &tokens).map_err(|e| ScenarioError::Contract {
        path: contract_path.display().to_string(),
        msg: e.to_string(),
    })?;
    for d in check_wellformed(&parsed) {
        if d.severity == Severity::Error {
            return Err(ScenarioError::Contract {
                path: contract_path.display().to_string(),
                msg: d.message,
            });
        }
    }
    let contract = desugar_constants(&parsed);
    let all_tokens = contract.declared_tokens.clone();

    let mut counter = 0u64;
    let mut parse_txs = |srcs: &[String]| -> Result<Vec<Transaction>, ScenarioError> {
        srcs.iter()
            .map(|s| {
                parse_transaction(s, &all_tokens, &mut counter).map_err(|e| {
                    ScenarioError::Validation(format!("{path_str}: bad transaction `{s}`: {e}"))
                })
            })
            .collect()
    };
    let setup = parse_txs(&setup_src)?;
    let mempool = parse_txs(&mempool_src)?;

    // Every transaction must target a procedure of the contract.
    for tx in setup.iter().chain(&mempool) {
        let ok = contract
            .clauses
            .iter()
            .any(|cl| cl.name == tx.name && cl.params.len() == tx.args.len());
        if !ok {
            return Err(ScenarioError::Validation(format!(
                "{path_str}: transaction `{tx}` matches no procedure of contract {}",
                contract.name
            )));
        }
    }
    // Wallet and price tokens must be declared.
    for (a, w) in &wallets.0 {
        for t in w.keys() {
            if !all_tokens.contains(t) {
                return Err(ScenarioError::Validation(format!(
                    "{path_str}: wallet of {a} uses undeclared token {t}"
                )));
            }
        }
    }
    for t in prices.0.keys() {
        if !all_tokens.contains(t) {
            return Err(ScenarioError::Validation(format!(
                "{path_str}: price given for undeclared token {t}"
            )));
        }
    }
    for t in &all_tokens {
        if !prices.0.contains_key(t) {
            return Err(ScenarioError::Validation(format!(
                "{path_str}: token {t} has no price"
            )));
        }
    }

    bounds.candidate_actors.extend(pool.iter().cloned());

    let initial = BlockchainState::initial(&contract, wallets.clone());
    let (start, trace) = exec_sequence(&initial, &contract, &setup);
    for step in &trace.steps {
        if !step.applied {
            return Err(ScenarioError::SetupFailed {
                tx: step.tx.to_string(),
                reason: step.reason.as_ref().map(|r| r.to_string()).unwrap_or_default(),
            });
        }
    }

    Ok(Scenario {
        contract,
        contract_path,
        tokens: all_tokens,
        prices,
        initial_wallets: wallets,
        pool,
        setup,
        mempool,
        bounds,
        start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_file(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        let mut f = std::fs::File::create(&p).unwrap();
        f.write_all(text.as_bytes()).unwrap();
        p
    }

    fn tmpdir(tag: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("txmev-scn-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn loads_a_full_scenario() {
        let dir = tmpdir("full");
        write_file(
            &dir,
            "pusher.txs",
            "tokens T;\ncontract CoinPusher { pre x>0 play(a?x:T) { if #T>=100 then a!#T:T } }\n",
        );
        let scn = write_file(
            &dir,
            "pusher.scn",
            r#"
# the coin pusher
contract pusher.txs
tokens T
prices T=1
actor A { T: 1 }
actor B { T: 100 }
setup []
mempool [ play(A?1:T) ]
bounds depth=2 amount=100 secrets=0,1 nonces=1 reps=1
"#,
        );
        let s = load_scenario(&scn).unwrap();
        assert_eq!(s.contract.name, "CoinPusher");
        assert_eq!(s.mempool.len(), 1);
        assert_eq!(s.bounds.max_depth, 2);
        assert_eq!(s.bounds.max_amount, 100);
        assert_eq!(s.prices.price(&TokenId::new("T")), 1);
        assert_eq!(s.start.wallets.get(&ActorId::new("B"), &TokenId::new("T")), 100);
        assert!(s.pool.contains(&ActorId::new("A")));
    }

    #[test]
    fn setup_executes_and_multiline_lists_parse() {
        let dir = tmpdir("setup");
        write_file(
            &dir,
            "c.txs",
            "tokens T;\ncontract C { pre tot=null join(a?x:T) { tot:=x } f() {} }\n",
        );
        let scn = write_file(
            &dir,
            "c.scn",
            "contract c.txs\ntokens T\nprices T=1\nactor A { T: 5 }\nsetup [\n  join(A?3:T)\n]\nmempool []\n",
        );
        let s = load_scenario(&scn).unwrap();
        assert_eq!(s.start.contract.balance(&TokenId::new("T")), 3);
        // distinct auto-nonces across setup and mempool
        assert_eq!(s.setup[0].nonce, 0);
    }

    #[test]
    fn rejects_unknown_procedure_and_failed_setup() {
        let dir = tmpdir("bad");
        write_file(&dir, "c.txs", "tokens T;\ncontract C { f(a?x:T) {} }\n");
        let scn = write_file(
            &dir,
            "bad1.scn",
            "contract c.txs\ntokens T\nprices T=1\nmempool [ g() ]\n",
        );
        assert!(matches!(load_scenario(&scn), Err(ScenarioError::Validation(_))));
        let scn = write_file(
            &dir,
            "bad2.scn",
            "contract c.txs\ntokens T\nprices T=1\nactor A { T: 0 }\nsetup [ f(A?5:T) ]\n",
        );
        assert!(matches!(load_scenario(&scn), Err(ScenarioError::SetupFailed { .. })));
        // every declared token needs a price
        let scn = write_file(&dir, "bad3.scn", "contract c.txs\ntokens T\nmempool []\n");
        assert!(matches!(load_scenario(&scn), Err(ScenarioError::Validation(_))));
    }
}

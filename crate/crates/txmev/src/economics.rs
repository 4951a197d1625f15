//! Wealth, gain and the bounded maximal-gain search.
//!
//! The search explores sequences of deducible transactions up to the depth
//! bound, maximising the coalition's wealth. Because gain only depends on
//! the final state, subtrees are memoised on (state, remaining depth).
//! Invalid transactions are pruned — skipping them is a no-op, so nothing
//! is lost. Ties between equal-wealth outcomes are broken towards shorter
//! witnesses and then lexicographically smaller ones, making every result,
//! including the witness, deterministic.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::knowledge::{
    candidate_transactions, Avail, Bounds, Candidate, KnowledgeBase, FRESH_NONCE_BASE,
};
use crate::lang::ast::{ActorId, ContractDef, TokenId, Transaction, TxArg};
use crate::knowledge::ActorSet;
use crate::semantics::{exec_sequence, fire, BlockchainState, Value, WalletState};

/// Token prices in an abstract currency (naturals).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PriceTable(pub BTreeMap<TokenId, u64>);

impl PriceTable {
    pub fn price(&self, token: &TokenId) -> u64 {
        self.0.get(token).copied().unwrap_or(0)
    }
}

/// The wealth of one wallet.
pub fn wallet_wealth(wallet: &BTreeMap<TokenId, u64>, prices: &PriceTable) -> u64 {
    wallet.iter().map(|(t, n)| n * prices.price(t)).sum()
}

/// Total wealth of the actors in `set` (wallets have finite support, so
/// this is well defined even for cofinite sets).
pub fn wealth(set: &ActorSet, wallets: &WalletState, prices: &PriceTable) -> u64 {
    wallets
        .0
        .iter()
        .filter(|(a, _)| set.contains(a))
        .map(|(_, w)| wallet_wealth(w, prices))
        .sum()
}

/// Wealth change of `set` across executing `txs` from `state` (invalid
/// transactions are skipped, as in `exec_sequence`).
pub fn gain(
    set: &ActorSet,
    state: &BlockchainState,
    contract: &ContractDef,
    txs: &[Transaction],
    prices: &PriceTable,
) -> i64 {
    let before = wealth(set, &state.wallets, prices) as i64;
    let (after, _) = exec_sequence(state, contract, txs);
    wealth(set, &after.wallets, prices) as i64 - before
}

/// Result of a bounded search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GainReport {
    /// The best gain found (a certified lower bound on the true supremum).
    pub value: i64,
    /// A sequence realising `value` when replayed from the query state.
    pub witness: Vec<Transaction>,
    pub states_explored: u64,
}

/// Actors worth considering when synthesising transactions: the coalition's
/// own members (when finite), the configured candidates, and every actor
/// visible in the mempool or the state.
fn effective_bounds(
    set: &ActorSet,
    state: &BlockchainState,
    mempool: &[Transaction],
    bounds: &Bounds,
) -> Bounds {
    let mut actors = bounds.candidate_actors.clone();
    if let ActorSet::Finite(members) = set {
        actors.extend(members.iter().cloned());
    }
    for tx in mempool {
        for arg in &tx.args {
            match arg {
                TxArg::Actor(a) => {
                    actors.insert(a.clone());
                }
                TxArg::TokenInput { actor, .. } => {
                    actors.insert(actor.clone());
                }
                TxArg::Commit(r, _) | TxArg::Reveal(r, _) => {
                    actors.insert(r.owner.clone());
                }
                _ => {}
            }
        }
    }
    for a in state.wallets.owners() {
        actors.insert(a.clone());
    }
    for v in state.contract.sigma.values() {
        collect_value_actors(v, &mut actors);
    }
    Bounds { candidate_actors: actors, ..bounds.clone() }
}

pub(crate) fn collect_value_actors(v: &Value, out: &mut BTreeSet<ActorId>) {
    match v {
        Value::Actor(a) => {
            out.insert(a.clone());
        }
        Value::Commit(r, _) | Value::Reveal(r, _) => {
            out.insert(r.owner.clone());
        }
        Value::Map(m) => {
            for (k, val) in m {
                collect_value_actors(k, out);
                collect_value_actors(val, out);
            }
        }
        Value::Null | Value::Nat(_) | Value::Token(_) => {}
    }
}

/// Memo key: the state with synthesised transactions stripped from the
/// executed set. Fresh-nonce transactions can never be replayed, so two
/// states differing only in them behave identically.
type MemoKey = (BlockchainState, usize);

struct Search<'a> {
    contract: &'a ContractDef,
    prices: &'a PriceTable,
    set: &'a ActorSet,
    candidates: &'a [Candidate],
    memo: HashMap<MemoKey, (u64, Vec<Transaction>)>,
    explored: u64,
    max_depth: usize,
}

impl Search<'_> {
    fn memo_key(&self, state: &BlockchainState, depth: usize) -> MemoKey {
        let mut key = state.clone();
        key.contract.executed.retain(|tx| tx.nonce < FRESH_NONCE_BASE);
        (key, depth)
    }

    /// Best reachable coalition wealth within `depth` further steps,
    /// together with the realising suffix.
    fn best(&mut self, state: &BlockchainState, depth: usize) -> (u64, Vec<Transaction>) {
        let key = self.memo_key(state, depth);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        self.explored += 1;
        let mut best_wealth = wealth(self.set, &state.wallets, self.prices);
        let mut best_suffix: Vec<Transaction> = Vec::new();
        if depth > 0 {
            let position = self.max_depth - depth;
            let candidates = self.candidates;
            for cand in candidates {
                let tx = match cand.avail {
                    Avail::Verbatim(n) => Transaction { nonce: n, ..cand.content.clone() },
                    // Position-based nonces keep synthesised transactions
                    // distinct within any assembled sequence.
                    Avail::Crafted => Transaction {
                        nonce: FRESH_NONCE_BASE + position as u64,
                        ..cand.content.clone()
                    },
                };
                let fired = match fire(state, self.contract, &tx) {
                    Ok(f) => f,
                    Err(_) => continue,
                };
                let (w, suffix) = self.best(&fired.state, depth - 1);
                let better = w > best_wealth
                    || (w == best_wealth
                        && !best_suffix.is_empty()
                        && (suffix.len() + 1 < best_suffix.len()
                            || (suffix.len() + 1 == best_suffix.len()
                                && seq_content_lt(&tx, &suffix, &best_suffix))));
                if better {
                    let mut full = Vec::with_capacity(suffix.len() + 1);
                    full.push(tx);
                    full.extend(suffix);
                    best_suffix = full;
                    best_wealth = w;
                }
            }
        }
        let result = (best_wealth, best_suffix);
        self.memo.insert(key, result.clone());
        result
    }
}

/// Content-wise lexicographic comparison of `[head] ++ tail` against `rhs`.
fn seq_content_lt(head: &Transaction, tail: &[Transaction], rhs: &[Transaction]) -> bool {
    let lhs_iter = std::iter::once(head).chain(tail.iter()).map(Transaction::content);
    let rhs_iter = rhs.iter().map(Transaction::content);
    lhs_iter.lt(rhs_iter)
}

/// Bounded maximal gain of the coalition in `kb` starting from `state`.
pub fn max_gain(
    state: &BlockchainState,
    contract: &ContractDef,
    kb: &KnowledgeBase,
    bounds: &Bounds,
    prices: &PriceTable,
) -> GainReport {
    let eff = effective_bounds(&kb.actors, state, &kb.mempool, bounds);
    let candidates = candidate_transactions(kb, contract, &eff);
    max_gain_with_candidates(state, contract, &kb.actors, &candidates, &eff, prices)
}

pub(crate) fn max_gain_with_candidates(
    state: &BlockchainState,
    contract: &ContractDef,
    set: &ActorSet,
    candidates: &[Candidate],
    bounds: &Bounds,
    prices: &PriceTable,
) -> GainReport {
    let mut search = Search {
        contract,
        prices,
        set,
        candidates,
        memo: HashMap::new(),
        explored: 0,
        max_depth: bounds.max_depth,
    };
    let base = wealth(set, &state.wallets, prices);
    let (best, witness) = search.best(state, bounds.max_depth);
    GainReport {
        value: best as i64 - base as i64,
        witness,
        states_explored: search.explored,
    }
}

/// What the coalition can gain on its own, without the mempool. Always
/// non-negative (the empty sequence gains nothing).
pub fn unrealized_gain(
    set: &ActorSet,
    state: &BlockchainState,
    contract: &ContractDef,
    bounds: &Bounds,
    prices: &PriceTable,
) -> GainReport {
    let kb = KnowledgeBase::new(set.clone(), &[]);
    max_gain(state, contract, &kb, bounds, prices)
}

/// Gain of `set` along `txs`, net of what it could have gained on its own.
pub fn external_gain(
    set: &ActorSet,
    state: &BlockchainState,
    contract: &ContractDef,
    txs: &[Transaction],
    bounds: &Bounds,
    prices: &PriceTable,
) -> i64 {
    gain(set, state, contract, txs, prices) - unrealized_gain(set, state, contract, bounds, prices).value
}

//! Execution semantics: values, blockchain states and the transaction-level
//! transition relation.

mod eval;
mod fire;

pub use eval::{eval_expr, exec_stmt, EvalError};
pub use fire::{exec_sequence, fire, match_clause, ExecTrace, Fired, Invalid, Step};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::lang::ast::{ActorId, ContractDef, NonceId, TokenId, Transaction};

/// Run-time values. Booleans are `Nat(0)` / `Nat(1)`. Every variant except
/// `Map` is a *base* value; maps are not first-class and only live in map
/// state variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Null,
    Nat(u64),
    Actor(ActorId),
    Token(TokenId),
    Commit(NonceId, u64),
    Reveal(NonceId, u64),
    Map(BTreeMap<Value, Value>),
}

impl Value {
    pub fn is_base(&self) -> bool {
        !matches!(self, Value::Map(_))
    }

    pub fn truth(b: bool) -> Value {
        Value::Nat(b as u64)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("null"),
            Value::Nat(n) => write!(f, "{n}"),
            Value::Actor(a) => write!(f, "{a}"),
            Value::Token(t) => write!(f, "{t}"),
            Value::Commit(r, n) => write!(f, "cmt({r}, {n})"),
            Value::Reveal(r, n) => write!(f, "rvl({r}, {n})"),
            Value::Map(m) => {
                f.write_str("{")?;
                for (i, (k, v)) in m.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k}: {v}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// Wallets of all actors. Kept canonical: zero balances and empty wallets
/// are pruned, so structural equality is semantic equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct WalletState(pub BTreeMap<ActorId, BTreeMap<TokenId, u64>>);

impl WalletState {
    pub fn get(&self, actor: &ActorId, token: &TokenId) -> u64 {
        self.0.get(actor).and_then(|w| w.get(token)).copied().unwrap_or(0)
    }

    pub fn set(&mut self, actor: &ActorId, token: &TokenId, amount: u64) {
        if amount == 0 {
            if let Some(w) = self.0.get_mut(actor) {
                w.remove(token);
                if w.is_empty() {
                    self.0.remove(actor);
                }
            }
        } else {
            self.0.entry(actor.clone()).or_default().insert(token.clone(), amount);
        }
    }

    pub fn add(&mut self, actor: &ActorId, token: &TokenId, amount: u64) {
        let cur = self.get(actor, token);
        self.set(actor, token, cur + amount);
    }

    /// Remove `amount` units; returns false (leaving the wallet untouched)
    /// when the balance is insufficient.
    pub fn sub(&mut self, actor: &ActorId, token: &TokenId, amount: u64) -> bool {
        let cur = self.get(actor, token);
        if cur < amount {
            return false;
        }
        self.set(actor, token, cur - amount);
        true
    }

    pub fn owners(&self) -> impl Iterator<Item = &ActorId> {
        self.0.keys()
    }

    /// Total units of `token` across all wallets.
    pub fn total(&self, token: &TokenId) -> u64 {
        self.0.values().map(|w| w.get(token).copied().unwrap_or(0)).sum()
    }
}

/// The contract's own state: variable store, token balances and the set of
/// already-executed transactions (for replay protection).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContractState {
    pub sigma: BTreeMap<String, Value>,
    pub balances: BTreeMap<TokenId, u64>,
    pub executed: BTreeSet<Transaction>,
}

impl ContractState {
    /// The initial state for `contract`: base variables `null`, map
    /// variables the empty map, all declared tokens at balance 0.
    pub fn initial(contract: &ContractDef) -> Self {
        let mut sigma = BTreeMap::new();
        for v in &contract.base_vars {
            sigma.insert(v.clone(), Value::Null);
        }
        for v in &contract.map_vars {
            sigma.insert(v.clone(), Value::Map(BTreeMap::new()));
        }
        let balances = contract.declared_tokens.iter().map(|t| (t.clone(), 0)).collect();
        ContractState { sigma, balances, executed: BTreeSet::new() }
    }

    pub fn balance(&self, token: &TokenId) -> u64 {
        self.balances.get(token).copied().unwrap_or(0)
    }
}

/// A full blockchain state: every actor's wallet plus the contract state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockchainState {
    pub wallets: WalletState,
    pub contract: ContractState,
}

impl BlockchainState {
    pub fn initial(contract: &ContractDef, wallets: WalletState) -> Self {
        BlockchainState { wallets, contract: ContractState::initial(contract) }
    }

    /// Per-token total across wallets and the contract — constant under
    /// every valid or invalid transaction (conservation).
    pub fn token_total(&self, token: &TokenId) -> u64 {
        self.wallets.total(token) + self.contract.balance(token)
    }
}

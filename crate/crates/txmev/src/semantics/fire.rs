//! The transaction-level transition relation.
//!
//! Firing `f(args)@n` against a contract proceeds in stages:
//!
//! 1. replay protection — the exact transaction must not have executed;
//! 2. clause selection — structural match of the arguments against the
//!    formal parameters, then the precondition evaluated in the state
//!    *before* any deposit (an evaluation error or a false precondition
//!    makes the clause non-applicable);
//! 3. argument evaluation — token inputs are deposited left to right;
//! 4. body execution.
//!
//! Any failure after stage 2 invalidates the transaction and rolls the
//! state back completely. When more than one clause is applicable the first
//! one fires and the step is flagged ambiguous.

use crate::lang::ast::{Clause, ContractDef, Param, ParamSlot, Transaction, TxArg};

use super::eval::{eval_expr, exec_stmt, Env, EvalError};
use super::{BlockchainState, Value};

/// Why a transaction was invalid.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Invalid {
    #[error("replay: transaction already executed")]
    Replay,
    #[error("no applicable clause")]
    NoMatch,
    #[error("token input failed: {0}")]
    Deposit(EvalError),
    #[error("body failed: {0}")]
    Body(EvalError),
}

/// Result of a successful fire.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fired {
    pub state: BlockchainState,
    /// More than one clause was applicable; the first one was used.
    pub ambiguous: bool,
}

fn arg_value(arg: &TxArg) -> Value {
    match arg {
        TxArg::Null => Value::Null,
        TxArg::Nat(n) => Value::Nat(*n),
        TxArg::Actor(a) => Value::Actor(a.clone()),
        TxArg::Token(t) => Value::Token(t.clone()),
        TxArg::Commit(r, n) => Value::Commit(r.clone(), *n),
        TxArg::Reveal(r, n) => Value::Reveal(r.clone(), *n),
        TxArg::TokenInput { .. } => unreachable!("token inputs are not plain values"),
    }
}

/// Bind one slot. Variable slots extend the environment (unifying with any
/// earlier binding of the same name); constant slots match only the equal
/// constant, so even undesugared contracts execute correctly.
fn bind_slot(slot: &ParamSlot, value: Value, rho: &mut Env) -> bool {
    match slot {
        ParamSlot::Var(v) => match rho.get(v) {
            Some(prev) => *prev == value,
            None => {
                rho.insert(v.clone(), value);
                true
            }
        },
        ParamSlot::ConstNat(n) => value == Value::Nat(*n),
        ParamSlot::ConstActor(a) => value == Value::Actor(a.clone()),
        ParamSlot::ConstToken(t) => value == Value::Token(t.clone()),
    }
}

/// Structurally match the actual arguments against a clause's formals,
/// producing the parameter environment.
fn structural_match(clause: &Clause, tx: &Transaction) -> Option<Env> {
    if clause.name != tx.name || clause.params.len() != tx.args.len() {
        return None;
    }
    let mut rho = Env::new();
    for (param, arg) in clause.params.iter().zip(&tx.args) {
        match (param, arg) {
            (
                Param::TokenInput { actor, amount, token },
                TxArg::TokenInput { actor: a, amount: n, token: t },
            ) => {
                if !bind_slot(actor, Value::Actor(a.clone()), &mut rho)
                    || !bind_slot(amount, Value::Nat(*n), &mut rho)
                    || !bind_slot(token, Value::Token(t.clone()), &mut rho)
                {
                    return None;
                }
            }
            (Param::Plain(slot), arg) if arg.shape() == crate::lang::ast::ParamShape::Plain => {
                if !bind_slot(slot, arg_value(arg), &mut rho) {
                    return None;
                }
            }
            _ => return None,
        }
    }
    Some(rho)
}

/// All applicable clauses for `tx` in `state`, as (clause index,
/// environment) pairs. Applicability = structural match plus precondition
/// evaluating to true in the pre-deposit state.
pub fn match_clause(
    contract: &ContractDef,
    tx: &Transaction,
    state: &BlockchainState,
) -> Vec<(usize, Env)> {
    let mut out = Vec::new();
    for (i, clause) in contract.clauses.iter().enumerate() {
        if let Some(rho) = structural_match(clause, tx) {
            match eval_expr(&clause.pre, &rho, state) {
                Ok(Value::Nat(1)) => out.push((i, rho)),
                // false, non-boolean or an evaluation error: not applicable
                _ => {}
            }
        }
    }
    out
}

/// Deposit the transaction's token inputs left to right.
fn eval_txargs(tx: &Transaction, state: &mut BlockchainState) -> Result<(), EvalError> {
    for arg in &tx.args {
        if let TxArg::TokenInput { actor, amount, token } = arg {
            if !state.wallets.sub(actor, token, *amount) {
                return Err(EvalError::InsufficientWallet {
                    actor: actor.to_string(),
                    token: token.to_string(),
                    need: *amount,
                    have: state.wallets.get(actor, token),
                });
            }
            let cur = state.contract.balance(token);
            state.contract.balances.insert(token.clone(), cur + amount);
        }
    }
    Ok(())
}

/// Attempt one transaction. On error the input state is unchanged (the
/// function is pure in its `state` argument).
pub fn fire(
    state: &BlockchainState,
    contract: &ContractDef,
    tx: &Transaction,
) -> Result<Fired, Invalid> {
    if state.contract.executed.contains(tx) {
        return Err(Invalid::Replay);
    }
    let applicable = match_clause(contract, tx, state);
    let (idx, rho) = match applicable.first() {
        Some((i, rho)) => (*i, rho.clone()),
        None => return Err(Invalid::NoMatch),
    };
    let mut next = state.clone();
    eval_txargs(tx, &mut next).map_err(Invalid::Deposit)?;
    exec_stmt(&contract.clauses[idx].body, &rho, &mut next).map_err(Invalid::Body)?;
    next.contract.executed.insert(tx.clone());
    Ok(Fired { state: next, ambiguous: applicable.len() > 1 })
}

/// One step of an executed sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub tx: Transaction,
    pub applied: bool,
    pub reason: Option<Invalid>,
    pub ambiguous: bool,
    pub post: BlockchainState,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExecTrace {
    pub steps: Vec<Step>,
}

/// Execute a sequence totally: invalid transactions are skipped (recorded
/// in the trace) and execution continues.
pub fn exec_sequence(
    state: &BlockchainState,
    contract: &ContractDef,
    txs: &[Transaction],
) -> (BlockchainState, ExecTrace) {
    let mut cur = state.clone();
    let mut trace = ExecTrace::default();
    for tx in txs {
        match fire(&cur, contract, tx) {
            Ok(fired) => {
                cur = fired.state;
                trace.steps.push(Step {
                    tx: tx.clone(),
                    applied: true,
                    reason: None,
                    ambiguous: fired.ambiguous,
                    post: cur.clone(),
                });
            }
            Err(reason) => trace.steps.push(Step {
                tx: tx.clone(),
                applied: false,
                reason: Some(reason),
                ambiguous: false,
                post: cur.clone(),
            }),
        }
    }
    (cur, trace)
}

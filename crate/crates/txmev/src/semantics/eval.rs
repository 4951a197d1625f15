//! Expression evaluation and statement execution.
//!
//! Arithmetic is over the naturals and partial: subtraction below zero and
//! non-exact (or zero) division are evaluation errors, as are type
//! mismatches. An error in a precondition makes the clause non-applicable;
//! an error in a body invalidates the whole transaction.

use std::collections::BTreeMap;

use crate::lang::ast::{BinOp, Expr, Stmt};

use super::{BlockchainState, Value};

/// The clause-local environment binding formal parameters.
pub type Env = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("operand of `{op}` is not a natural")]
    NatExpected { op: &'static str },
    #[error("arithmetic result falls outside the naturals")]
    OutOfNat,
    #[error("equality compares a non-base value")]
    NonBaseEquality,
    #[error("boolean operand is not 0 or 1")]
    NonBoolean,
    #[error("map lookup on a non-map value")]
    NotAMap,
    #[error("map key is not a base value")]
    NonBaseKey,
    #[error("`#` applied to a non-token value")]
    NonToken,
    #[error("`sec` applied to a non-reveal value")]
    SecOnNonReveal,
    #[error("`ver` requires a reveal and a commitment")]
    VerShape,
    #[error("token output recipient is not an actor")]
    NonActorRecipient,
    #[error("contract balance too low: need {need}:{token}, have {have}")]
    InsufficientContract { token: String, need: u64, have: u64 },
    #[error("wallet of {actor} too low: need {need}:{token}, have {have}")]
    InsufficientWallet {
        actor: String,
        token: String,
        need: u64,
        have: u64,
    },
    #[error("if guard is not 0 or 1")]
    NonBooleanGuard,
}

fn as_nat(v: &Value, op: &'static str) -> Result<u64, EvalError> {
    match v {
        Value::Nat(n) => Ok(*n),
        _ => Err(EvalError::NatExpected { op }),
    }
}

fn as_bool(v: &Value) -> Result<bool, EvalError> {
    match v {
        Value::Nat(0) => Ok(false),
        Value::Nat(1) => Ok(true),
        _ => Err(EvalError::NonBoolean),
    }
}

pub fn eval_expr(e: &Expr, rho: &Env, state: &BlockchainState) -> Result<Value, EvalError> {
    match e {
        Expr::Null => Ok(Value::Null),
        Expr::Nat(n) => Ok(Value::Nat(*n)),
        Expr::Actor(a) => Ok(Value::Actor(a.clone())),
        Expr::Token(t) => Ok(Value::Token(t.clone())),
        Expr::Var(x) => Ok(rho
            .get(x)
            .or_else(|| state.contract.sigma.get(x))
            .cloned()
            .unwrap_or(Value::Null)),
        Expr::Lookup(base, key) => {
            let base = eval_expr(base, rho, state)?;
            let key = eval_expr(key, rho, state)?;
            if !key.is_base() {
                return Err(EvalError::NonBaseKey);
            }
            match base {
                Value::Map(m) => Ok(m.get(&key).cloned().unwrap_or(Value::Null)),
                _ => Err(EvalError::NotAMap),
            }
        }
        Expr::Bin(op, l, r) => {
            let lv = eval_expr(l, rho, state)?;
            let rv = eval_expr(r, rho, state)?;
            eval_bin(*op, &lv, &rv)
        }
        Expr::Not(a) => {
            let b = as_bool(&eval_expr(a, rho, state)?)?;
            Ok(Value::truth(!b))
        }
        Expr::Balance(a) => match eval_expr(a, rho, state)? {
            Value::Token(t) => Ok(Value::Nat(state.contract.balance(&t))),
            _ => Err(EvalError::NonToken),
        },
        Expr::Sec(a) => match eval_expr(a, rho, state)? {
            Value::Reveal(_, n) => Ok(Value::Nat(n)),
            _ => Err(EvalError::SecOnNonReveal),
        },
        Expr::Ver(a, b) => {
            let av = eval_expr(a, rho, state)?;
            let bv = eval_expr(b, rho, state)?;
            match (av, bv) {
                (Value::Reveal(r, n), Value::Commit(r2, n2)) => Ok(Value::truth(r == r2 && n == n2)),
                _ => Err(EvalError::VerShape),
            }
        }
    }
}

fn eval_bin(op: BinOp, l: &Value, r: &Value) -> Result<Value, EvalError> {
    match op {
        BinOp::Add => {
            let (a, b) = (as_nat(l, "+")?, as_nat(r, "+")?);
            a.checked_add(b).map(Value::Nat).ok_or(EvalError::OutOfNat)
        }
        BinOp::Sub => {
            let (a, b) = (as_nat(l, "-")?, as_nat(r, "-")?);
            a.checked_sub(b).map(Value::Nat).ok_or(EvalError::OutOfNat)
        }
        BinOp::Mul => {
            let (a, b) = (as_nat(l, "*")?, as_nat(r, "*")?);
            a.checked_mul(b).map(Value::Nat).ok_or(EvalError::OutOfNat)
        }
        BinOp::Div => {
            let (a, b) = (as_nat(l, "/")?, as_nat(r, "/")?);
            // Division is defined only when some natural n satisfies a = n*b.
            if b == 0 || a % b != 0 {
                Err(EvalError::OutOfNat)
            } else {
                Ok(Value::Nat(a / b))
            }
        }
        BinOp::Eq | BinOp::Ne => {
            if !l.is_base() || !r.is_base() {
                return Err(EvalError::NonBaseEquality);
            }
            let eq = l == r;
            Ok(Value::truth(if op == BinOp::Eq { eq } else { !eq }))
        }
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
            let (a, b) = (as_nat(l, op.symbol())?, as_nat(r, op.symbol())?);
            Ok(Value::truth(match op {
                BinOp::Lt => a < b,
                BinOp::Le => a <= b,
                BinOp::Gt => a > b,
                _ => a >= b,
            }))
        }
        BinOp::And | BinOp::Or => {
            let (a, b) = (as_bool(l)?, as_bool(r)?);
            Ok(Value::truth(if op == BinOp::And { a && b } else { a || b }))
        }
    }
}

/// Execute a statement, mutating `state`. The caller (`fire`) is
/// responsible for rollback: on `Err` the state must be discarded.
pub fn exec_stmt(s: &Stmt, rho: &Env, state: &mut BlockchainState) -> Result<(), EvalError> {
    match s {
        Stmt::Skip => Ok(()),
        Stmt::Assign(x, e) => {
            let v = eval_expr(e, rho, state)?;
            state.contract.sigma.insert(x.clone(), v);
            Ok(())
        }
        Stmt::MapUpdate(x, k, v) => {
            let key = eval_expr(k, rho, state)?;
            if !key.is_base() {
                return Err(EvalError::NonBaseKey);
            }
            let val = eval_expr(v, rho, state)?;
            let cur = rho
                .get(x)
                .or_else(|| state.contract.sigma.get(x))
                .cloned()
                .unwrap_or_else(|| Value::Map(BTreeMap::new()));
            let mut m = match cur {
                Value::Map(m) => m,
                _ => return Err(EvalError::NotAMap),
            };
            // The default entry is null, so storing null erases the key;
            // this keeps map values canonical.
            if val == Value::Null {
                m.remove(&key);
            } else {
                m.insert(key, val);
            }
            state.contract.sigma.insert(x.clone(), Value::Map(m));
            Ok(())
        }
        Stmt::TokenOut(recv, amount, token) => {
            let recv = match eval_expr(recv, rho, state)? {
                Value::Actor(a) => a,
                _ => return Err(EvalError::NonActorRecipient),
            };
            let amount = as_nat(&eval_expr(amount, rho, state)?, "!")?;
            let token = match eval_expr(token, rho, state)? {
                Value::Token(t) => t,
                _ => return Err(EvalError::NonToken),
            };
            let have = state.contract.balance(&token);
            if have < amount {
                return Err(EvalError::InsufficientContract {
                    token: token.to_string(),
                    need: amount,
                    have,
                });
            }
            state.contract.balances.insert(token.clone(), have - amount);
            state.wallets.add(&recv, &token, amount);
            Ok(())
        }
        Stmt::Seq(a, b) => {
            exec_stmt(a, rho, state)?;
            exec_stmt(b, rho, state)
        }
        Stmt::If(g, t, e) => {
            let guard = eval_expr(g, rho, state)?;
            match guard {
                Value::Nat(1) => exec_stmt(t, rho, state),
                Value::Nat(0) => exec_stmt(e, rho, state),
                _ => Err(EvalError::NonBooleanGuard),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::ast::{ActorId, NonceId, TokenId};
    use crate::lang::parser::parse_contract;
    use crate::semantics::WalletState;
    use std::collections::BTreeSet;

    fn empty_state() -> BlockchainState {
        let c = parse_contract("tokens T; contract C { }", &BTreeSet::new()).unwrap();
        BlockchainState::initial(&c, WalletState::default())
    }

    fn ev(e: &Expr, st: &BlockchainState) -> Result<Value, EvalError> {
        eval_expr(e, &Env::new(), st)
    }

    #[test]
    fn naturals_are_partial() {
        let st = empty_state();
        let sub = Expr::bin(BinOp::Sub, Expr::Nat(5), Expr::Nat(7));
        assert_eq!(ev(&sub, &st), Err(EvalError::OutOfNat));
        let div = Expr::bin(BinOp::Div, Expr::Nat(7), Expr::Nat(2));
        assert_eq!(ev(&div, &st), Err(EvalError::OutOfNat));
        let div0 = Expr::bin(BinOp::Div, Expr::Nat(0), Expr::Nat(0));
        assert_eq!(ev(&div0, &st), Err(EvalError::OutOfNat));
        let exact = Expr::bin(
            BinOp::Div,
            Expr::bin(BinOp::Mul, Expr::Nat(15), Expr::Nat(10)),
            Expr::bin(BinOp::Add, Expr::Nat(10), Expr::Nat(15)),
        );
        assert_eq!(ev(&exact, &st), Ok(Value::Nat(6)));
    }

    #[test]
    fn equality_crosses_types_but_not_maps() {
        let st = empty_state();
        let e = Expr::bin(BinOp::Eq, Expr::Null, Expr::Nat(1));
        assert_eq!(ev(&e, &st), Ok(Value::Nat(0)));
        let e = Expr::bin(BinOp::Ne, Expr::Null, Expr::Actor(ActorId::new("A")));
        assert_eq!(ev(&e, &st), Ok(Value::Nat(1)));
        // Unbound variables read as null, so `x = null` holds initially.
        let e = Expr::bin(BinOp::Eq, Expr::Var("x".into()), Expr::Null);
        assert_eq!(ev(&e, &st), Ok(Value::Nat(1)));
    }

    #[test]
    fn ver_matches_nonce_and_secret() {
        let st = empty_state();
        let r = NonceId { owner: ActorId::new("A"), index: 0 };
        let rho: Env = [
            ("y".to_string(), Value::Reveal(r.clone(), 1)),
            ("yc".to_string(), Value::Commit(r.clone(), 1)),
            ("bad".to_string(), Value::Commit(r, 2)),
        ]
        .into_iter()
        .collect();
        let ok = Expr::Ver(Box::new(Expr::Var("y".into())), Box::new(Expr::Var("yc".into())));
        assert_eq!(eval_expr(&ok, &rho, &st), Ok(Value::Nat(1)));
        let no = Expr::Ver(Box::new(Expr::Var("y".into())), Box::new(Expr::Var("bad".into())));
        assert_eq!(eval_expr(&no, &rho, &st), Ok(Value::Nat(0)));
        // ver against null (e.g. a commitment slot not yet filled) is an error
        let err = Expr::Ver(Box::new(Expr::Var("y".into())), Box::new(Expr::Null));
        assert_eq!(eval_expr(&err, &rho, &st), Err(EvalError::VerShape));
    }

    #[test]
    fn sec_projects_reveals_only() {
        let st = empty_state();
        let r = NonceId { owner: ActorId::new("A"), index: 0 };
        let rho: Env = [("y".to_string(), Value::Reveal(r.clone(), 7))].into_iter().collect();
        assert_eq!(
            eval_expr(&Expr::Sec(Box::new(Expr::Var("y".into()))), &rho, &st),
            Ok(Value::Nat(7))
        );
        let rho: Env = [("y".to_string(), Value::Commit(r, 7))].into_iter().collect();
        assert_eq!(
            eval_expr(&Expr::Sec(Box::new(Expr::Var("y".into()))), &rho, &st),
            Err(EvalError::SecOnNonReveal)
        );
    }

    #[test]
    fn balance_reads_contract_funds() {
        let mut st = empty_state();
        let t = TokenId::new("T");
        st.contract.balances.insert(t.clone(), 42);
        assert_eq!(ev(&Expr::Balance(Box::new(Expr::Token(t))), &st), Ok(Value::Nat(42)));
        assert_eq!(
            ev(&Expr::Balance(Box::new(Expr::Nat(1))), &st),
            Err(EvalError::NonToken)
        );
    }

    #[test]
    fn token_output_moves_funds_and_checks_balance() {
        let mut st = empty_state();
        let t = TokenId::new("T");
        let a = ActorId::new("A");
        st.contract.balances.insert(t.clone(), 10);
        let pay = Stmt::TokenOut(Expr::Actor(a.clone()), Expr::Nat(4), Expr::Token(t.clone()));
        exec_stmt(&pay, &Env::new(), &mut st).unwrap();
        assert_eq!(st.contract.balance(&t), 6);
        assert_eq!(st.wallets.get(&a, &t), 4);
        let too_much = Stmt::TokenOut(Expr::Actor(a), Expr::Nat(7), Expr::Token(t));
        assert!(matches!(
            exec_stmt(&too_much, &Env::new(), &mut st),
            Err(EvalError::InsufficientContract { .. })
        ));
    }

    #[test]
    fn map_update_keeps_null_free_canonical_form() {
        let c = parse_contract("contract C { f() { m[0] := 1 } }", &BTreeSet::new()).unwrap();
        let mut st = BlockchainState::initial(&c, WalletState::default());
        let set = Stmt::MapUpdate("m".into(), Expr::Nat(0), Expr::Nat(1));
        exec_stmt(&set, &Env::new(), &mut st).unwrap();
        let clear = Stmt::MapUpdate("m".into(), Expr::Nat(0), Expr::Null);
        exec_stmt(&clear, &Env::new(), &mut st).unwrap();
        assert_eq!(st.contract.sigma["m"], Value::Map(Default::default()));
        // lookups on the (now empty) map default to null
        let look = Expr::Lookup(Box::new(Expr::Var("m".into())), Box::new(Expr::Nat(0)));
        assert_eq!(ev(&look, &st), Ok(Value::Null));
    }
}

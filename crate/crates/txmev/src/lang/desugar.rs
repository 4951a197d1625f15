//! Desugaring of constants in formal-parameter positions.
//!
//! A clause such as `commit(A?1:BTC, B, c) { ... }` is rewritten to
//! `pre a=A and x=1 and t=BTC and v=B commit(a?x:t, v, c) { ... }`: every
//! constant slot becomes a fresh variable and an equality conjunct is
//! appended to the precondition, in parameter order. The rewrite is
//! idempotent and semantics-preserving.

use std::collections::BTreeSet;

use super::ast::*;

pub fn desugar_constants(c: &ContractDef) -> ContractDef {
    let mut out = c.clone();
    for cl in &mut out.clauses {
        desugar_clause(cl);
    }
    out.recompute_derived();
    out
}

fn desugar_clause(cl: &mut Clause) {
    let mut used = clause_vars(cl);
    let mut conjuncts: Vec<Expr> = Vec::new();
    let params = std::mem::take(&mut cl.params);
    cl.params = params
        .into_iter()
        .map(|p| match p {
            Param::Plain(slot) => Param::Plain(fresh_slot(slot, "v", &mut used, &mut conjuncts)),
            Param::TokenInput { actor, amount, token } => Param::TokenInput {
                actor: fresh_slot(actor, "a", &mut used, &mut conjuncts),
                amount: fresh_slot(amount, "x", &mut used, &mut conjuncts),
                token: fresh_slot(token, "t", &mut used, &mut conjuncts),
            },
        })
        .collect();
    if conjuncts.is_empty() {
        return;
    }
    let mut pre = if cl.pre == Expr::truth() {
        conjuncts.remove(0)
    } else {
        cl.pre.clone()
    };
    for c in conjuncts {
        pre = Expr::bin(BinOp::And, pre, c);
    }
    cl.pre = pre;
}

fn fresh_slot(
    slot: ParamSlot,
    base: &str,
    used: &mut BTreeSet<String>,
    conjuncts: &mut Vec<Expr>,
) -> ParamSlot {
    let value = match slot {
        ParamSlot::Var(_) => return slot,
        ParamSlot::ConstNat(n) => Expr::Nat(n),
        ParamSlot::ConstActor(a) => Expr::Actor(a),
        ParamSlot::ConstToken(t) => Expr::Token(t),
    };
    let name = fresh_name(base, used);
    conjuncts.push(Expr::bin(BinOp::Eq, Expr::Var(name.clone()), value));
    ParamSlot::Var(name)
}

fn fresh_name(base: &str, used: &mut BTreeSet<String>) -> String {
    if used.insert(base.to_string()) {
        return base.to_string();
    }
    for i in 0.. {
        let cand = format!("{base}{i}");
        if used.insert(cand.clone()) {
            return cand;
        }
    }
    unreachable!()
}

/// All variable names occurring anywhere in the clause.
fn clause_vars(cl: &Clause) -> BTreeSet<String> {
    let mut vars = BTreeSet::new();
    for p in &cl.params {
        for s in p.slots() {
            if let Some(v) = s.as_var() {
                vars.insert(v.to_string());
            }
        }
    }
    expr_vars(&cl.pre, &mut vars);
    stmt_vars(&cl.body, &mut vars);
    vars
}

fn expr_vars(e: &Expr, out: &mut BTreeSet<String>) {
    match e {
        Expr::Var(v) => {
            out.insert(v.clone());
        }
        Expr::Null | Expr::Nat(_) | Expr::Actor(_) | Expr::Token(_) => {}
        Expr::Lookup(a, b) | Expr::Bin(_, a, b) | Expr::Ver(a, b) => {
            expr_vars(a, out);
            expr_vars(b, out);
        }
        Expr::Not(a) | Expr::Balance(a) | Expr::Sec(a) => expr_vars(a, out),
    }
}

fn stmt_vars(s: &Stmt, out: &mut BTreeSet<String>) {
    match s {
        Stmt::Skip => {}
        Stmt::Assign(x, e) => {
            out.insert(x.clone());
            expr_vars(e, out);
        }
        Stmt::MapUpdate(x, k, v) => {
            out.insert(x.clone());
            expr_vars(k, out);
            expr_vars(v, out);
        }
        Stmt::TokenOut(a, b, c) => {
            expr_vars(a, out);
            expr_vars(b, out);
            expr_vars(c, out);
        }
        Stmt::Seq(a, b) => {
            stmt_vars(a, out);
            stmt_vars(b, out);
        }
        Stmt::If(g, t, e) => {
            expr_vars(g, out);
            stmt_vars(t, out);
            stmt_vars(e, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::parse_contract;
    use crate::lang::pretty;
    use std::collections::BTreeSet;

    fn parse(src: &str) -> ContractDef {
        parse_contract(src, &BTreeSet::new()).unwrap()
    }

    #[test]
    fn commit_example() {
        let c = parse("tokens BTC; contract C { commit(A?1:BTC, B, c) { y:=c } }");
        let d = desugar_constants(&c);
        let cl = &d.clauses[0];
        assert!(cl.params.iter().all(|p| p.slots().iter().all(|s| !s.is_const())));
        assert_eq!(pretty::expr_to_string(&cl.pre), "a=A and x=1 and t=BTC and v=B");
    }

    #[test]
    fn appends_to_existing_precondition() {
        let c = parse("tokens T; contract C { pre done=null f(Oracle?0:T) { done:=1 } }");
        let d = desugar_constants(&c);
        assert_eq!(
            pretty::expr_to_string(&d.clauses[0].pre),
            "done=null and a=Oracle and x=0 and t=T"
        );
    }

    #[test]
    fn fresh_names_avoid_collisions() {
        let c = parse("tokens T; contract C { pre a>0 f(A?0:T, a) { y:=a } }");
        let d = desugar_constants(&c);
        // `a` is taken by the plain parameter, so the actor slot gets `a0`.
        assert_eq!(
            pretty::expr_to_string(&d.clauses[0].pre),
            "a>0 and a0=A and x=0 and t=T"
        );
    }

    #[test]
    fn idempotent_and_identity_on_pure_contracts() {
        let c = parse(
            "tokens T; contract C { pre x>0 f(a?x:t, y) { s:=y } g() { s:=0 } }",
        );
        assert_eq!(desugar_constants(&c), c);
        let c2 = parse("tokens T; contract C { commit(A?1:T, B, c) { x:=c } }");
        let d = desugar_constants(&c2);
        assert_eq!(desugar_constants(&d), d);
    }
}

//! Static well-formedness checks.
//!
//! Errors make a contract unusable; warnings flag suspicious but executable
//! contracts (the interpreter additionally reports an `Ambiguous` diagnostic
//! at run time when several clauses apply to one transaction).

use std::collections::BTreeSet;

use super::ast::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    /// Index of the (first) clause involved, when applicable.
    pub clause: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    fn error(clause: Option<usize>, message: String) -> Self {
        Diagnostic { severity: Severity::Error, clause, message }
    }

    fn warning(clause: Option<usize>, message: String) -> Self {
        Diagnostic { severity: Severity::Warning, clause, message }
    }
}

/// Check a contract, returning all diagnostics in a deterministic order.
pub fn check_wellformed(c: &ContractDef) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    // Per-clause structural checks.
    for (i, cl) in c.clauses.iter().enumerate() {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for p in &cl.params {
            for slot in p.slots() {
                if let Some(v) = slot.as_var() {
                    if !seen.insert(v) {
                        out.push(Diagnostic::error(
                            Some(i),
                            format!("clause `{}`: duplicate formal parameter `{v}`", cl.name),
                        ));
                    }
                }
            }
        }
        let mut targets = Vec::new();
        collect_targets(&cl.body, &mut targets);
        for t in targets {
            if seen.contains(t.as_str()) {
                out.push(Diagnostic::error(
                    Some(i),
                    format!(
                        "clause `{}`: assignment to a formal parameter `{t}` (targets must be state variables)",
                        cl.name
                    ),
                ));
            }
        }
    }

    // Variable-class conflicts across the whole contract.
    for v in c.base_vars.intersection(&c.map_vars) {
        out.push(Diagnostic::error(
            None,
            format!("state variable `{v}` is used both as a base variable and as a map variable"),
        ));
    }

    // Overlap lint: same name and arity, preconditions not syntactically
    // disjoint. This is a heuristic; run-time ambiguity is the ground truth.
    let desugared = super::desugar::desugar_constants(c);
    for i in 0..desugared.clauses.len() {
        for j in i + 1..desugared.clauses.len() {
            let (a, b) = (&desugared.clauses[i], &desugared.clauses[j]);
            if a.name == b.name && a.params.len() == b.params.len() && !syntactically_disjoint(&a.pre, &b.pre) {
                out.push(Diagnostic::warning(
                    Some(i),
                    format!(
                        "clauses {i} and {j} of `{}` may overlap: their preconditions are not syntactically disjoint",
                        a.name
                    ),
                ));
            }
        }
    }

    out
}

fn collect_targets(s: &Stmt, out: &mut Vec<String>) {
    match s {
        Stmt::Skip | Stmt::TokenOut(..) => {}
        Stmt::Assign(x, _) | Stmt::MapUpdate(x, _, _) => out.push(x.clone()),
        Stmt::Seq(a, b) => {
            collect_targets(a, out);
            collect_targets(b, out);
        }
        Stmt::If(_, t, e) => {
            collect_targets(t, out);
            collect_targets(e, out);
        }
    }
}

/// Split a precondition into its top-level `and` conjuncts.
fn conjuncts(e: &Expr) -> Vec<&Expr> {
    match e {
        Expr::Bin(BinOp::And, l, r) => {
            let mut v = conjuncts(l);
            v.extend(conjuncts(r));
            v
        }
        _ => vec![e],
    }
}

fn is_literal(e: &Expr) -> bool {
    matches!(e, Expr::Null | Expr::Nat(_) | Expr::Actor(_) | Expr::Token(_))
}

/// Two preconditions are syntactically disjoint when some pair of conjuncts
/// is contradictory: `e = k` against `e != k`, or `e = lit1` against
/// `e = lit2` for distinct literals.
fn syntactically_disjoint(p: &Expr, q: &Expr) -> bool {
    let cp = conjuncts(p);
    let cq = conjuncts(q);
    for a in &cp {
        for b in &cq {
            if contradicts(a, b) || contradicts(b, a) {
                return true;
            }
        }
    }
    false
}

fn contradicts(a: &Expr, b: &Expr) -> bool {
    match (a, b) {
        (Expr::Bin(BinOp::Eq, al, ar), Expr::Bin(BinOp::Ne, bl, br)) => {
            (al == bl && ar == br) || (al == br && ar == bl)
        }
        (Expr::Bin(BinOp::Eq, al, ar), Expr::Bin(BinOp::Eq, bl, br)) => {
            al == bl && is_literal(ar) && is_literal(br) && ar != br
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::parse_contract;
    use std::collections::BTreeSet;

    const BAD_LOTTERY: &str = r#"
        tokens T;
        contract BadLottery {
          pre p1=null
          commit(a?1:T, c) { p1:=a; y1:=c }

          pre p1!=null and p2=null
          commit(a?1:T, c) { p2:=a; y2:=c }

          pre s1=null and ver(y, y1)
          reveal(y) { s1:=sec(y) }

          pre s2=null and ver(y, y2)
          reveal(y) { s2:=sec(y) }

          pre s1!=null and s2!=null
          win() { if s1=s2 then p1!2:T else p2!2:T }
        }
    "#;

    #[test]
    fn badlottery_reveal_overlap_warned_commits_not() {
        let c = parse_contract(BAD_LOTTERY, &BTreeSet::new()).unwrap();
        let diags = check_wellformed(&c);
        let warnings: Vec<_> = diags
            .iter()
            .filter(|d| d.severity == Severity::Warning)
            .collect();
        assert_eq!(warnings.len(), 1, "{warnings:?}");
        assert!(warnings[0].message.contains("reveal"), "{warnings:?}");
    }

    #[test]
    fn htlc_is_clean() {
        let src = r#"
            tokens T;
            contract HTLC {
              pre xa=null and x=1 and t=T
              commit(a?x:t, b, c) { xa:=a; xb:=b; yc:=c }
              pre xa!=null and ver(y, yc)
              reveal(y) { xa!#T:T }
              pre xa!=null
              timeout(Oracle?0:T) { xb!#T:T }
            }
        "#;
        let c = parse_contract(src, &BTreeSet::new()).unwrap();
        assert!(check_wellformed(&c).is_empty());
    }

    #[test]
    fn amm_swap_clauses_disjoint_after_desugar() {
        let src = r#"
            tokens T0 T1;
            contract AMM {
              pre #T0=0 and #T1=0
              init(a0?x0:T0, a1?x1:T1) {}
              pre y = x*#T1/(#T0+x) and y < #T1
              swap(a?x:T0, y) { a!y:T1 }
              pre y = x*#T0/(#T1+x) and y < #T0
              swap(a?x:T1, y) { a!y:T0 }
            }
        "#;
        let c = parse_contract(src, &BTreeSet::new()).unwrap();
        assert!(check_wellformed(&c).is_empty());
    }
}

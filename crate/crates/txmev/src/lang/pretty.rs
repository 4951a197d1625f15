//! Precedence-aware pretty printer. `parse_contract(contract_to_string(c))`
//! yields `c` back (the printer emits a `tokens` pragma so constant
//! classification is self-contained).

use std::fmt::Write;

use super::ast::*;

// Precedence levels, loosest to tightest.
const L_OR: u8 = 1;
const L_AND: u8 = 2;
const L_CMP: u8 = 3;
const L_ADD: u8 = 4;
const L_MUL: u8 = 5;
const L_UNARY: u8 = 6;
const L_ATOM: u8 = 7;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Bin(op, _, _) => match op {
            BinOp::Or => L_OR,
            BinOp::And => L_AND,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => L_CMP,
            BinOp::Add | BinOp::Sub => L_ADD,
            BinOp::Mul | BinOp::Div => L_MUL,
        },
        Expr::Not(_) | Expr::Balance(_) => L_UNARY,
        _ => L_ATOM,
    }
}

fn spaced(op: BinOp) -> bool {
    matches!(op, BinOp::And | BinOp::Or)
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 0);
    s
}

fn write_expr(out: &mut String, e: &Expr, min: u8) {
    let lvl = level(e);
    if lvl < min {
        out.push('(');
        write_expr(out, e, 0);
        out.push(')');
        return;
    }
    match e {
        Expr::Null => out.push_str("null"),
        Expr::Nat(n) => {
            let _ = write!(out, "{n}");
        }
        Expr::Actor(a) => {
            let _ = write!(out, "{a}");
        }
        Expr::Token(t) => {
            let _ = write!(out, "{t}");
        }
        Expr::Var(v) => out.push_str(v),
        Expr::Lookup(b, k) => {
            write_expr(out, b, L_ATOM);
            out.push('[');
            write_expr(out, k, 0);
            out.push(']');
        }
        Expr::Bin(op, l, r) => {
            // Left-associative chains reuse the operator's own level on the
            // left; comparisons are non-associative so both sides tighten.
            let (lmin, rmin) = if lvl == L_CMP { (lvl + 1, lvl + 1) } else { (lvl, lvl + 1) };
            write_expr(out, l, lmin);
            if spaced(*op) {
                let _ = write!(out, " {} ", op.symbol());
            } else {
                out.push_str(op.symbol());
            }
            write_expr(out, r, rmin);
        }
        Expr::Not(a) => {
            out.push_str("not ");
            write_expr(out, a, L_UNARY);
        }
        Expr::Balance(a) => {
            out.push('#');
            write_expr(out, a, L_UNARY);
        }
        Expr::Sec(a) => {
            out.push_str("sec(");
            write_expr(out, a, 0);
            out.push(')');
        }
        Expr::Ver(a, b) => {
            out.push_str("ver(");
            write_expr(out, a, 0);
            out.push_str(", ");
            write_expr(out, b, 0);
            out.push(')');
        }
    }
}

pub fn stmt_to_string(s: &Stmt) -> String {
    let mut out = String::new();
    write_stmt(&mut out, s, 1);
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_stmt(out: &mut String, s: &Stmt, depth: usize) {
    match s {
        Stmt::Skip => {
            indent(out, depth);
            out.push_str("skip");
        }
        Stmt::Assign(x, e) => {
            indent(out, depth);
            let _ = write!(out, "{x} := {}", expr_to_string(e));
        }
        Stmt::MapUpdate(x, k, v) => {
            indent(out, depth);
            let _ = write!(out, "{x}[{}] := {}", expr_to_string(k), expr_to_string(v));
        }
        Stmt::TokenOut(a, n, t) => {
            indent(out, depth);
            let mut recv = String::new();
            write_expr(&mut recv, a, L_ATOM);
            let mut amount = String::new();
            write_expr(&mut amount, n, L_ATOM);
            let mut token = String::new();
            write_expr(&mut token, t, L_ATOM);
            let _ = write!(out, "{recv}!{amount}:{token}");
        }
        Stmt::Seq(a, b) => {
            write_stmt(out, a, depth);
            out.push_str(";\n");
            write_stmt(out, b, depth);
        }
        Stmt::If(g, t, e) => {
            indent(out, depth);
            let _ = write!(out, "if {} then {{\n", expr_to_string(g));
            write_stmt(out, t, depth + 1);
            out.push('\n');
            indent(out, depth);
            out.push_str("} else {\n");
            write_stmt(out, e, depth + 1);
            out.push('\n');
            indent(out, depth);
            out.push('}');
        }
    }
}

fn slot_to_string(s: &ParamSlot) -> String {
    match s {
        ParamSlot::Var(v) => v.clone(),
        ParamSlot::ConstNat(n) => n.to_string(),
        ParamSlot::ConstActor(a) => a.to_string(),
        ParamSlot::ConstToken(t) => t.to_string(),
    }
}

pub fn contract_to_string(c: &ContractDef) -> String {
    let mut out = String::new();
    if !c.declared_tokens.is_empty() {
        out.push_str("tokens");
        for t in &c.declared_tokens {
            let _ = write!(out, " {t}");
        }
        out.push_str(";\n");
    }
    let _ = writeln!(out, "contract {} {{", c.name);
    for (i, cl) in c.clauses.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        if cl.pre != Expr::truth() {
            let _ = writeln!(out, "  pre {}", expr_to_string(&cl.pre));
        }
        let params: Vec<String> = cl
            .params
            .iter()
            .map(|p| match p {
                Param::Plain(s) => slot_to_string(s),
                Param::TokenInput { actor, amount, token } => format!(
                    "{}?{}:{}",
                    slot_to_string(actor),
                    slot_to_string(amount),
                    slot_to_string(token)
                ),
            })
            .collect();
        let _ = write!(out, "  {}({})", cl.name, params.join(", "));
        if cl.body == Stmt::Skip {
            out.push_str(" {}\n");
        } else {
            out.push_str(" {\n");
            let mut body = String::new();
            write_stmt(&mut body, &cl.body, 2);
            out.push_str(&body);
            out.push_str("\n  }\n");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::parse_contract;
    use std::collections::BTreeSet;

    #[test]
    fn round_trips_a_rich_contract() {
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
        let printed = contract_to_string(&c);
        let back = parse_contract(&printed, &BTreeSet::new()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn prints_preserving_precedence() {
        let e = Expr::bin(
            BinOp::Mul,
            Expr::Nat(2),
            Expr::bin(BinOp::Add, Expr::Var("x".into()), Expr::Nat(1)),
        );
        assert_eq!(expr_to_string(&e), "2*(x+1)");
        let e = Expr::bin(
            BinOp::Add,
            Expr::bin(BinOp::Mul, Expr::Nat(2), Expr::Var("x".into())),
            Expr::Nat(1),
        );
        assert_eq!(expr_to_string(&e), "2*x+1");
    }
}

//! Recursive-descent parser for contracts and transactions.
//!
//! Operator precedence, tightest first: `not`/`#`, then `*` `/`, then `+`
//! `-`, then the comparisons (non-associative), then `and`, then `or`.
//!
//! An uppercase-initial name is a constant: a token if declared (by the
//! `tokens ...;` pragma or the caller), otherwise an actor. Lowercase-initial
//! names are variables.

use std::collections::BTreeSet;

use super::ast::*;
use super::check::{self, Severity};
use super::lexer::{lex, Spanned, Tok};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    tokens: BTreeSet<TokenId>,
}

impl Parser {
    fn new(src: &str, known_tokens: &BTreeSet<TokenId>) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            tokens: known_tokens.clone(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|s| &s.tok)
    }

    fn here(&self) -> (u32, u32) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|s| (s.line, s.col))
            .unwrap_or((1, 1))
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError { line, col, msg: msg.into() }
    }

    fn next(&mut self) -> Result<Tok, ParseError> {
        let t = self
            .toks
            .get(self.pos)
            .map(|s| s.tok.clone())
            .ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn eat(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected {}, found {}", want.describe(), t.describe()))),
            None => Err(self.err(format!("expected {}, found end of input", want.describe()))),
        }
    }

    fn at(&self, want: &Tok) -> bool {
        self.peek() == Some(want)
    }

    fn take_if(&mut self, want: Tok) -> bool {
        if self.at(&want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.next()? {
            Tok::Ident(s) => Ok(s),
            t => {
                self.pos -= 1;
                Err(self.err(format!("expected identifier, found {}", t.describe())))
            }
        }
    }

    fn constant(&mut self) -> Result<String, ParseError> {
        match self.next()? {
            Tok::Const(s) => Ok(s),
            t => {
                self.pos -= 1;
                Err(self.err(format!("expected constant, found {}", t.describe())))
            }
        }
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        match self.next()? {
            Tok::Num(n) => Ok(n),
            t => {
                self.pos -= 1;
                Err(self.err(format!("expected number, found {}", t.describe())))
            }
        }
    }

    fn classify_const(&self, name: String) -> Expr {
        if self.tokens.contains(&TokenId(name.clone())) {
            Expr::Token(TokenId(name))
        } else {
            Expr::Actor(ActorId(name))
        }
    }

    // ---- contracts ---------------------------------------------------

    fn pragma(&mut self) -> Result<(), ParseError> {
        if self.take_if(Tok::KwTokens) {
            loop {
                let name = self.constant()?;
                self.tokens.insert(TokenId(name));
                if self.take_if(Tok::Semi) {
                    break;
                }
            }
        }
        Ok(())
    }

    fn contract(&mut self) -> Result<ContractDef, ParseError> {
        self.pragma()?;
        self.eat(Tok::KwContract)?;
        let name = self.constant()?;
        self.eat(Tok::LBrace)?;
        let mut clauses = Vec::new();
        while !self.at(&Tok::RBrace) {
            clauses.push(self.clause()?);
        }
        self.eat(Tok::RBrace)?;
        if self.peek().is_some() {
            return Err(self.err("trailing input after contract"));
        }
        let mut def = ContractDef {
            name,
            clauses,
            declared_tokens: self.tokens.clone(),
            hardcoded_actors: BTreeSet::new(),
            map_vars: BTreeSet::new(),
            base_vars: BTreeSet::new(),
        };
        def.recompute_derived();
        Ok(def)
    }

    fn clause(&mut self) -> Result<Clause, ParseError> {
        let pre = if self.take_if(Tok::KwPre) {
            self.expr()?
        } else {
            Expr::truth()
        };
        let name = self.ident()?;
        self.eat(Tok::LParen)?;
        let mut params = Vec::new();
        if !self.at(&Tok::RParen) {
            loop {
                params.push(self.param()?);
                if !self.take_if(Tok::Comma) {
                    break;
                }
            }
        }
        self.eat(Tok::RParen)?;
        self.eat(Tok::LBrace)?;
        let body = if self.at(&Tok::RBrace) {
            Stmt::Skip
        } else {
            self.stmt_seq()?
        };
        self.eat(Tok::RBrace)?;
        Ok(Clause { pre, name, params, body })
    }

    fn param_slot(&mut self) -> Result<ParamSlot, ParseError> {
        match self.next()? {
            Tok::Ident(v) => Ok(ParamSlot::Var(v)),
            Tok::Num(n) => Ok(ParamSlot::ConstNat(n)),
            Tok::Const(c) => Ok(if self.tokens.contains(&TokenId(c.clone())) {
                ParamSlot::ConstToken(TokenId(c))
            } else {
                ParamSlot::ConstActor(ActorId(c))
            }),
            t => {
                self.pos -= 1;
                Err(self.err(format!("expected parameter, found {}", t.describe())))
            }
        }
    }

    fn param(&mut self) -> Result<Param, ParseError> {
        let first = self.param_slot()?;
        if self.take_if(Tok::Question) {
            let amount = self.param_slot()?;
            self.eat(Tok::Colon)?;
            let token = self.param_slot()?;
            Ok(Param::TokenInput { actor: first, amount, token })
        } else {
            Ok(Param::Plain(first))
        }
    }

    fn stmt_seq(&mut self) -> Result<Stmt, ParseError> {
        let mut stmt = self.stmt()?;
        while self.take_if(Tok::Semi) {
            if self.at(&Tok::RBrace) {
                break; // tolerate a trailing semicolon
            }
            let next = self.stmt()?;
            stmt = Stmt::Seq(Box::new(stmt), Box::new(next));
        }
        Ok(stmt)
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        match self.peek() {
            Some(Tok::KwSkip) => {
                self.pos += 1;
                Ok(Stmt::Skip)
            }
            Some(Tok::KwIf) => {
                self.pos += 1;
                let guard = self.expr()?;
                self.eat(Tok::KwThen)?;
                let then = self.stmt()?;
                let els = if self.take_if(Tok::KwElse) {
                    self.stmt()?
                } else {
                    Stmt::Skip
                };
                Ok(Stmt::If(guard, Box::new(then), Box::new(els)))
            }
            Some(Tok::LBrace) => {
                self.pos += 1;
                let inner = if self.at(&Tok::RBrace) {
                    Stmt::Skip
                } else {
                    self.stmt_seq()?
                };
                self.eat(Tok::RBrace)?;
                Ok(inner)
            }
            Some(Tok::Ident(_)) if self.peek2() == Some(&Tok::Assign) => {
                let x = self.ident()?;
                self.eat(Tok::Assign)?;
                let e = self.expr()?;
                Ok(Stmt::Assign(x, e))
            }
            Some(Tok::Ident(_)) if self.peek2() == Some(&Tok::LBracket) => {
                // Either a map update `x[k] := v` or a token output whose
                // recipient expression starts with a lookup.
                let x = self.ident()?;
                self.eat(Tok::LBracket)?;
                let key = self.expr()?;
                self.eat(Tok::RBracket)?;
                if self.take_if(Tok::Assign) {
                    let v = self.expr()?;
                    Ok(Stmt::MapUpdate(x, key, v))
                } else {
                    let base = Expr::Lookup(Box::new(Expr::Var(x)), Box::new(key));
                    let recipient = self.expr_continue_postfix(base)?;
                    self.token_out(recipient)
                }
            }
            _ => {
                let recipient = self.expr()?;
                self.token_out(recipient)
            }
        }
    }

    fn token_out(&mut self, recipient: Expr) -> Result<Stmt, ParseError> {
        self.eat(Tok::Bang)?;
        let amount = self.expr()?;
        self.eat(Tok::Colon)?;
        let token = self.expr()?;
        Ok(Stmt::TokenOut(recipient, amount, token))
    }

    // ---- expressions --------------------------------------------------

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.and_expr()?;
        while self.take_if(Tok::KwOr) {
            let r = self.and_expr()?;
            e = Expr::bin(BinOp::Or, e, r);
        }
        Ok(e)
    }

    fn and_expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.cmp_expr()?;
        while self.take_if(Tok::KwAnd) {
            let r = self.cmp_expr()?;
            e = Expr::bin(BinOp::And, e, r);
        }
        Ok(e)
    }

    fn cmp_expr(&mut self) -> Result<Expr, ParseError> {
        let e = self.add_expr()?;
        let op = match self.peek() {
            Some(Tok::Eq) => BinOp::Eq,
            Some(Tok::Ne) => BinOp::Ne,
            Some(Tok::Lt) => BinOp::Lt,
            Some(Tok::Le) => BinOp::Le,
            Some(Tok::Gt) => BinOp::Gt,
            Some(Tok::Ge) => BinOp::Ge,
            _ => return Ok(e),
        };
        self.pos += 1;
        let r = self.add_expr()?;
        Ok(Expr::bin(op, e, r))
    }

    fn add_expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let r = self.mul_expr()?;
            e = Expr::bin(op, e, r);
        }
        Ok(e)
    }

    fn mul_expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.unary_expr()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => break,
            };
            self.pos += 1;
            let r = self.unary_expr()?;
            e = Expr::bin(op, e, r);
        }
        Ok(e)
    }

    fn unary_expr(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(Tok::KwNot) => {
                self.pos += 1;
                Ok(Expr::Not(Box::new(self.unary_expr()?)))
            }
            Some(Tok::Hash) => {
                self.pos += 1;
                Ok(Expr::Balance(Box::new(self.unary_expr()?)))
            }
            _ => self.postfix_expr(),
        }
    }

    fn postfix_expr(&mut self) -> Result<Expr, ParseError> {
        let e = self.primary_expr()?;
        self.expr_continue_postfix(e)
    }

    fn expr_continue_postfix(&mut self, mut e: Expr) -> Result<Expr, ParseError> {
        while self.take_if(Tok::LBracket) {
            let key = self.expr()?;
            self.eat(Tok::RBracket)?;
            e = Expr::Lookup(Box::new(e), Box::new(key));
        }
        Ok(e)
    }

    fn primary_expr(&mut self) -> Result<Expr, ParseError> {
        match self.next()? {
            Tok::KwNull => Ok(Expr::Null),
            Tok::KwTrue => Ok(Expr::Nat(1)),
            Tok::KwFalse => Ok(Expr::Nat(0)),
            Tok::Num(n) => Ok(Expr::Nat(n)),
            Tok::Const(c) => Ok(self.classify_const(c)),
            Tok::Ident(v) => Ok(Expr::Var(v)),
            Tok::KwSec => {
                self.eat(Tok::LParen)?;
                let e = self.expr()?;
                self.eat(Tok::RParen)?;
                Ok(Expr::Sec(Box::new(e)))
            }
            Tok::KwVer => {
                self.eat(Tok::LParen)?;
                let a = self.expr()?;
                self.eat(Tok::Comma)?;
                let b = self.expr()?;
                self.eat(Tok::RParen)?;
                Ok(Expr::Ver(Box::new(a), Box::new(b)))
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.eat(Tok::RParen)?;
                Ok(e)
            }
            t => {
                self.pos -= 1;
                Err(self.err(format!("expected expression, found {}", t.describe())))
            }
        }
    }

    // ---- transactions --------------------------------------------------

    fn nonce_id(&mut self) -> Result<NonceId, ParseError> {
        let owner = self.constant()?;
        self.eat(Tok::Dot)?;
        let index = self.number()?;
        Ok(NonceId { owner: ActorId(owner), index })
    }

    fn tx_arg(&mut self) -> Result<TxArg, ParseError> {
        match self.next()? {
            Tok::KwNull => Ok(TxArg::Null),
            Tok::Num(n) => Ok(TxArg::Nat(n)),
            Tok::Const(c) => {
                if self.take_if(Tok::Question) {
                    let amount = self.number()?;
                    self.eat(Tok::Colon)?;
                    let token = self.constant()?;
                    Ok(TxArg::TokenInput {
                        actor: ActorId(c),
                        amount,
                        token: TokenId(token),
                    })
                } else if self.tokens.contains(&TokenId(c.clone())) {
                    Ok(TxArg::Token(TokenId(c)))
                } else {
                    Ok(TxArg::Actor(ActorId(c)))
                }
            }
            Tok::KwCmt => {
                self.eat(Tok::LParen)?;
                let r = self.nonce_id()?;
                self.eat(Tok::Comma)?;
                let n = self.number()?;
                self.eat(Tok::RParen)?;
                Ok(TxArg::Commit(r, n))
            }
            Tok::KwRvl => {
                self.eat(Tok::LParen)?;
                let r = self.nonce_id()?;
                self.eat(Tok::Comma)?;
                let n = self.number()?;
                self.eat(Tok::RParen)?;
                Ok(TxArg::Reveal(r, n))
            }
            t => {
                self.pos -= 1;
                Err(self.err(format!("expected transaction argument, found {}", t.describe())))
            }
        }
    }

    fn transaction(&mut self, counter: &mut u64) -> Result<Transaction, ParseError> {
        let name = self.ident()?;
        self.eat(Tok::LParen)?;
        let mut args = Vec::new();
        if !self.at(&Tok::RParen) {
            loop {
                args.push(self.tx_arg()?);
                if !self.take_if(Tok::Comma) {
                    break;
                }
            }
        }
        self.eat(Tok::RParen)?;
        let nonce = if self.take_if(Tok::At) {
            self.number()?
        } else {
            let n = *counter;
            *counter += 1;
            n
        };
        if self.peek().is_some() {
            return Err(self.err("trailing input after transaction"));
        }
        Ok(Transaction { name, args, nonce })
    }
}

/// Parse a contract. `known_tokens` augments the contract's own `tokens`
/// pragma and drives uppercase-constant classification.
///
/// Structural well-formedness violations (duplicate formal parameters,
/// assignments to formals, a state variable used both as a base and as a map
/// variable) are reported as errors.
pub fn parse_contract(src: &str, known_tokens: &BTreeSet<TokenId>) -> Result<ContractDef, ParseError> {
    let mut p = Parser::new(src, known_tokens)?;
    let def = p.contract()?;
    for d in check::check_wellformed(&def) {
        if d.severity == Severity::Error {
            return Err(ParseError { line: 1, col: 1, msg: d.message });
        }
    }
    Ok(def)
}

/// Parse a transaction `f(args)` or `f(args)@nonce`. When the nonce is
/// elided one is drawn from `counter`, which the caller threads through so
/// that successive transactions get distinct nonces.
pub fn parse_transaction(
    src: &str,
    known_tokens: &BTreeSet<TokenId>,
    counter: &mut u64,
) -> Result<Transaction, ParseError> {
    let mut p = Parser::new(src, known_tokens)?;
    p.transaction(counter)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(names: &[&str]) -> BTreeSet<TokenId> {
        names.iter().map(|n| TokenId::new(*n)).collect()
    }

    const HTLC: &str = r#"
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

    #[test]
    fn parses_htlc() {
        let c = parse_contract(HTLC, &BTreeSet::new()).unwrap();
        assert_eq!(c.name, "HTLC");
        assert_eq!(c.clauses.len(), 3);
        assert_eq!(
            c.hardcoded_actors,
            [ActorId::new("Oracle")].into_iter().collect()
        );
        assert_eq!(c.base_vars, ["xa", "xb", "yc"].iter().map(|s| s.to_string()).collect());
        assert!(c.map_vars.is_empty());
        // timeout's token input carries two constants and a variable-free actor
        let timeout = &c.clauses[2];
        assert_eq!(timeout.params.len(), 1);
        assert!(matches!(
            timeout.params[0],
            Param::TokenInput {
                actor: ParamSlot::ConstActor(_),
                amount: ParamSlot::ConstNat(0),
                token: ParamSlot::ConstToken(_),
            }
        ));
    }

    #[test]
    fn empty_contract_and_empty_body() {
        let c = parse_contract("contract C { }", &BTreeSet::new()).unwrap();
        assert!(c.clauses.is_empty());
        let c = parse_contract("contract C { f() {} }", &BTreeSet::new()).unwrap();
        assert_eq!(c.clauses[0].body, Stmt::Skip);
        assert_eq!(c.clauses[0].pre, Expr::truth());
    }

    #[test]
    fn precedence() {
        let c = parse_contract(
            "tokens T0 T1; contract C { pre y = x*#T1/(#T0+x) and y<#T1 f(y) {} }",
            &BTreeSet::new(),
        )
        .unwrap();
        // pre is ((y = ((x * #T1) / (#T0 + x))) and (y < #T1))
        match &c.clauses[0].pre {
            Expr::Bin(BinOp::And, l, _) => match l.as_ref() {
                Expr::Bin(BinOp::Eq, _, rhs) => {
                    assert!(matches!(rhs.as_ref(), Expr::Bin(BinOp::Div, _, _)))
                }
                other => panic!("unexpected {other:?}"),
            },
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn not_binds_tighter_than_and() {
        let c = parse_contract(
            "contract C { pre not isOpen and x>0 f(x) {} }",
            &BTreeSet::new(),
        )
        .unwrap();
        assert!(matches!(&c.clauses[0].pre, Expr::Bin(BinOp::And, l, _)
            if matches!(l.as_ref(), Expr::Not(_))));
    }

    #[test]
    fn duplicate_param_rejected() {
        let err = parse_contract("contract C { f(x, x) {} }", &BTreeSet::new()).unwrap_err();
        assert!(err.msg.contains("duplicate"), "{err}");
    }

    #[test]
    fn assignment_to_formal_rejected() {
        let err = parse_contract("contract C { f(x) { x := 1 } }", &BTreeSet::new()).unwrap_err();
        assert!(err.msg.contains("formal parameter"), "{err}");
    }

    #[test]
    fn base_map_conflict_rejected() {
        let err = parse_contract(
            "contract C { f() { m := 1 ; m[0] := 2 } }",
            &BTreeSet::new(),
        )
        .unwrap_err();
        assert!(err.msg.contains("both"), "{err}");
    }

    #[test]
    fn token_output_with_map_recipient() {
        let c = parse_contract(
            "tokens T; contract C { f() { id[pay]!2*dep[pay]:T } }",
            &BTreeSet::new(),
        )
        .unwrap();
        assert!(matches!(&c.clauses[0].body, Stmt::TokenOut(Expr::Lookup(..), _, _)));
    }

    #[test]
    fn transactions_and_auto_nonces() {
        let t = toks(&["T"]);
        let mut counter = 0;
        let tx1 = parse_transaction("commit(A?1:T, B, cmt(A.0, 1))", &t, &mut counter).unwrap();
        let tx2 = parse_transaction("reveal(rvl(A.0, 1))", &t, &mut counter).unwrap();
        assert_eq!(tx1.nonce, 0);
        assert_eq!(tx2.nonce, 1);
        assert_eq!(
            tx1.args,
            vec![
                TxArg::TokenInput {
                    actor: ActorId::new("A"),
                    amount: 1,
                    token: TokenId::new("T"),
                },
                TxArg::Actor(ActorId::new("B")),
                TxArg::Commit(NonceId { owner: ActorId::new("A"), index: 0 }, 1),
            ]
        );
        let tx3 = parse_transaction("win()@7", &t, &mut counter).unwrap();
        assert_eq!(tx3.nonce, 7);
        assert_eq!(counter, 2);
    }

    #[test]
    fn plain_constant_classification_uses_known_tokens() {
        let mut counter = 0;
        let tx = parse_transaction("f(T, B)", &toks(&["T"]), &mut counter).unwrap();
        assert_eq!(tx.args[0], TxArg::Token(TokenId::new("T")));
        assert_eq!(tx.args[1], TxArg::Actor(ActorId::new("B")));
    }
}

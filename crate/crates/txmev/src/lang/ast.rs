//! Abstract syntax for TxScript contracts and transactions.

use std::collections::BTreeSet;
use std::fmt;

/// An actor (account) name. Actors own wallets and commitment nonces.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActorId(pub String);

/// A token (asset) name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenId(pub String);

/// A commitment nonce `A.i`: the `i`-th nonce owned by actor `A`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NonceId {
    pub owner: ActorId,
    pub index: u64,
}

impl fmt::Display for ActorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for NonceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.owner, self.index)
    }
}

impl ActorId {
    pub fn new(s: impl Into<String>) -> Self {
        ActorId(s.into())
    }
}

impl TokenId {
    pub fn new(s: impl Into<String>) -> Self {
        TokenId(s.into())
    }
}

/// Binary operators, listed loosest-binding last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }
}

/// Expressions. Booleans are encoded as the naturals 0 and 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Null,
    Nat(u64),
    Actor(ActorId),
    Token(TokenId),
    Var(String),
    /// Map lookup `e1[e2]`.
    Lookup(Box<Expr>, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    /// Contract balance `#e` of the token `e`.
    Balance(Box<Expr>),
    /// `sec(e)`: the secret carried by a reveal.
    Sec(Box<Expr>),
    /// `ver(e1, e2)`: does reveal `e1` open commitment `e2`?
    Ver(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    /// The literal `true` (preconditions default to this when elided).
    pub fn truth() -> Expr {
        Expr::Nat(1)
    }
}

/// Statements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stmt {
    Skip,
    /// `x := e` where `x` is a base state variable.
    Assign(String, Expr),
    /// `x[e1] := e2` where `x` is a map state variable.
    MapUpdate(String, Expr, Expr),
    /// Token output `e1 ! e2 : e3` — pay `e2` units of token `e3` from the
    /// contract to actor `e1`.
    TokenOut(Expr, Expr, Expr),
    Seq(Box<Stmt>, Box<Stmt>),
    If(Expr, Box<Stmt>, Box<Stmt>),
}

/// One slot of a formal parameter. Constants are permitted by the surface
/// syntax and eliminated by `desugar_constants`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParamSlot {
    Var(String),
    ConstNat(u64),
    ConstActor(ActorId),
    ConstToken(TokenId),
}

impl ParamSlot {
    pub fn as_var(&self) -> Option<&str> {
        match self {
            ParamSlot::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_const(&self) -> bool {
        !matches!(self, ParamSlot::Var(_))
    }
}

/// A formal parameter: either a plain value parameter or a token input
/// `a ? x : t` binding the sender, amount and token of a deposit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    Plain(ParamSlot),
    TokenInput {
        actor: ParamSlot,
        amount: ParamSlot,
        token: ParamSlot,
    },
}

impl Param {
    /// The shape of the parameter, disregarding names/constants.
    pub fn shape(&self) -> ParamShape {
        match self {
            Param::Plain(_) => ParamShape::Plain,
            Param::TokenInput { .. } => ParamShape::TokenInput,
        }
    }

    pub fn slots(&self) -> Vec<&ParamSlot> {
        match self {
            Param::Plain(s) => vec![s],
            Param::TokenInput { actor, amount, token } => vec![actor, amount, token],
        }
    }
}

/// Structural shape of a parameter or argument position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParamShape {
    Plain,
    TokenInput,
}

/// One clause `pre e f(parg, ...) { s }`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub pre: Expr,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Stmt,
}

impl Clause {
    pub fn shape(&self) -> Vec<ParamShape> {
        self.params.iter().map(Param::shape).collect()
    }
}

/// A parsed contract together with the derived static information the
/// semantics and the analyses need.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractDef {
    pub name: String,
    pub clauses: Vec<Clause>,
    /// Tokens declared by the `tokens ...;` pragma plus any externally known
    /// tokens supplied to the parser.
    pub declared_tokens: BTreeSet<TokenId>,
    /// Every actor constant appearing anywhere in the contract.
    pub hardcoded_actors: BTreeSet<ActorId>,
    /// State variables written by map updates.
    pub map_vars: BTreeSet<String>,
    /// State variables written by plain assignments.
    pub base_vars: BTreeSet<String>,
}

impl ContractDef {
    /// Recompute the derived variable classes and hardcoded actors from the
    /// clauses. Used after programmatic construction or desugaring.
    pub fn recompute_derived(&mut self) {
        let mut map_vars = BTreeSet::new();
        let mut base_vars = BTreeSet::new();
        let mut actors = BTreeSet::new();
        for cl in &self.clauses {
            collect_stmt_vars(&cl.body, &mut base_vars, &mut map_vars);
            collect_expr_actors(&cl.pre, &mut actors);
            collect_stmt_actors(&cl.body, &mut actors);
            for p in &cl.params {
                for slot in p.slots() {
                    if let ParamSlot::ConstActor(a) = slot {
                        actors.insert(a.clone());
                    }
                }
            }
        }
        self.map_vars = map_vars;
        self.base_vars = base_vars;
        self.hardcoded_actors = actors;
    }
}

fn collect_stmt_vars(s: &Stmt, base: &mut BTreeSet<String>, map: &mut BTreeSet<String>) {
    match s {
        Stmt::Skip | Stmt::TokenOut(..) => {}
        Stmt::Assign(x, _) => {
            base.insert(x.clone());
        }
        Stmt::MapUpdate(x, _, _) => {
            map.insert(x.clone());
        }
        Stmt::Seq(a, b) => {
            collect_stmt_vars(a, base, map);
            collect_stmt_vars(b, base, map);
        }
        Stmt::If(_, t, e) => {
            collect_stmt_vars(t, base, map);
            collect_stmt_vars(e, base, map);
        }
    }
}

fn collect_expr_actors(e: &Expr, out: &mut BTreeSet<ActorId>) {
    match e {
        Expr::Actor(a) => {
            out.insert(a.clone());
        }
        Expr::Null | Expr::Nat(_) | Expr::Token(_) | Expr::Var(_) => {}
        Expr::Lookup(a, b) | Expr::Bin(_, a, b) | Expr::Ver(a, b) => {
            collect_expr_actors(a, out);
            collect_expr_actors(b, out);
        }
        Expr::Not(a) | Expr::Balance(a) | Expr::Sec(a) => collect_expr_actors(a, out),
    }
}

fn collect_stmt_actors(s: &Stmt, out: &mut BTreeSet<ActorId>) {
    match s {
        Stmt::Skip => {}
        Stmt::Assign(_, e) => collect_expr_actors(e, out),
        Stmt::MapUpdate(_, k, v) => {
            collect_expr_actors(k, out);
            collect_expr_actors(v, out);
        }
        Stmt::TokenOut(a, b, c) => {
            collect_expr_actors(a, out);
            collect_expr_actors(b, out);
            collect_expr_actors(c, out);
        }
        Stmt::Seq(a, b) => {
            collect_stmt_actors(a, out);
            collect_stmt_actors(b, out);
        }
        Stmt::If(g, t, e) => {
            collect_expr_actors(g, out);
            collect_stmt_actors(t, out);
            collect_stmt_actors(e, out);
        }
    }
}

/// An actual argument of a transaction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TxArg {
    Null,
    Nat(u64),
    Actor(ActorId),
    Token(TokenId),
    /// `A ? n : T` — the sender authorises a deposit of `n` units of `T`.
    TokenInput {
        actor: ActorId,
        amount: u64,
        token: TokenId,
    },
    /// `cmt(A.i, n)` — commitment to secret `n` under nonce `A.i`.
    Commit(NonceId, u64),
    /// `rvl(A.i, n)` — reveal of secret `n` under nonce `A.i`.
    Reveal(NonceId, u64),
}

impl TxArg {
    pub fn shape(&self) -> ParamShape {
        match self {
            TxArg::TokenInput { .. } => ParamShape::TokenInput,
            _ => ParamShape::Plain,
        }
    }
}

impl fmt::Display for TxArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TxArg::Null => f.write_str("null"),
            TxArg::Nat(n) => write!(f, "{n}"),
            TxArg::Actor(a) => write!(f, "{a}"),
            TxArg::Token(t) => write!(f, "{t}"),
            TxArg::TokenInput { actor, amount, token } => write!(f, "{actor}?{amount}:{token}"),
            TxArg::Commit(r, n) => write!(f, "cmt({r}, {n})"),
            TxArg::Reveal(r, n) => write!(f, "rvl({r}, {n})"),
        }
    }
}

/// A transaction `f(args)@nonce`. The nonce distinguishes otherwise equal
/// transactions for replay protection; it carries no other meaning.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transaction {
    pub name: String,
    pub args: Vec<TxArg>,
    pub nonce: u64,
}

impl Transaction {
    /// The nonce-less content of the transaction, the unit of comparison for
    /// deducibility and witness ordering.
    pub fn content(&self) -> (&str, &[TxArg]) {
        (&self.name, &self.args)
    }

    pub fn same_content(&self, other: &Transaction) -> bool {
        self.name == other.name && self.args == other.args
    }
}

impl fmt::Display for Transaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")@{}", self.nonce)
    }
}

//! Adversary knowledge.
//!
//! A coalition `A` of actors observing a mempool `P` can deduce a
//! transaction when it is in `P` itself, or when every argument is
//! obtainable: constants always; a token input only when the coalition owns
//! the depositing actor; a commitment or reveal when the coalition owns the
//! nonce, the nonce's secret was already revealed somewhere in `P`, or the
//! exact argument occurs (as a non-token-input argument) in `P` and can be
//! replayed verbatim.

use std::collections::{BTreeMap, BTreeSet};

use crate::lang::ast::{
    ActorId, BinOp, Clause, ContractDef, Expr, Param, ParamShape, ParamSlot, Stmt, TokenId,
    Transaction, TxArg,
};

/// A possibly infinite set of actors: either a finite set or the complement
/// of one. All operations are exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActorSet {
    Finite(BTreeSet<ActorId>),
    /// Every actor except the listed ones.
    Cofinite(BTreeSet<ActorId>),
}

impl ActorSet {
    pub fn finite<I: IntoIterator<Item = ActorId>>(actors: I) -> Self {
        ActorSet::Finite(actors.into_iter().collect())
    }

    pub fn empty() -> Self {
        ActorSet::Finite(BTreeSet::new())
    }

    pub fn universe() -> Self {
        ActorSet::Cofinite(BTreeSet::new())
    }

    pub fn contains(&self, a: &ActorId) -> bool {
        match self {
            ActorSet::Finite(s) => s.contains(a),
            ActorSet::Cofinite(e) => !e.contains(a),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ActorSet::Finite(_))
    }

    pub fn complement(&self) -> ActorSet {
        match self {
            ActorSet::Finite(s) => ActorSet::Cofinite(s.clone()),
            ActorSet::Cofinite(e) => ActorSet::Finite(e.clone()),
        }
    }

    pub fn intersect(&self, other: &ActorSet) -> ActorSet {
        use ActorSet::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a.intersection(b).cloned().collect()),
            (Finite(a), Cofinite(e)) | (Cofinite(e), Finite(a)) => {
                Finite(a.iter().filter(|x| !e.contains(*x)).cloned().collect())
            }
            (Cofinite(a), Cofinite(b)) => Cofinite(a.union(b).cloned().collect()),
        }
    }

    pub fn union(&self, other: &ActorSet) -> ActorSet {
        self.complement().intersect(&other.complement()).complement()
    }

    pub fn is_subset(&self, other: &ActorSet) -> bool {
        use ActorSet::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.is_subset(b),
            (Finite(a), Cofinite(e)) => a.intersection(e).next().is_none(),
            (Cofinite(_), Finite(_)) => false,
            (Cofinite(a), Cofinite(b)) => b.is_subset(a),
        }
    }
}

/// Precomputed knowledge of a coalition over a mempool.
#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    pub actors: ActorSet,
    pub mempool: Vec<Transaction>,
    /// Nonces whose secret some mempool reveal discloses.
    pub rev_nonces: BTreeSet<crate::lang::ast::NonceId>,
    /// Non-token-input arguments occurring in the mempool, replayable
    /// verbatim by anyone.
    pub reusable: BTreeSet<TxArg>,
}

impl KnowledgeBase {
    pub fn new(actors: ActorSet, mempool: &[Transaction]) -> Self {
        let mut rev_nonces = BTreeSet::new();
        let mut reusable = BTreeSet::new();
        for tx in mempool {
            for arg in &tx.args {
                match arg {
                    TxArg::Reveal(r, _) => {
                        rev_nonces.insert(r.clone());
                        reusable.insert(arg.clone());
                    }
                    TxArg::TokenInput { .. } => {}
                    _ => {
                        reusable.insert(arg.clone());
                    }
                }
            }
        }
        KnowledgeBase { actors, mempool: mempool.to_vec(), rev_nonces, reusable }
    }

    pub fn arg_deducible(&self, arg: &TxArg) -> bool {
        match arg {
            TxArg::Null | TxArg::Nat(_) | TxArg::Actor(_) | TxArg::Token(_) => true,
            TxArg::TokenInput { actor, .. } => self.actors.contains(actor),
            TxArg::Commit(r, _) | TxArg::Reveal(r, _) => {
                self.actors.contains(&r.owner)
                    || self.rev_nonces.contains(r)
                    || self.reusable.contains(arg)
            }
        }
    }

    /// Deducibility of a transaction; the nonce is irrelevant.
    pub fn can_deduce_tx(&self, tx: &Transaction) -> bool {
        self.mempool.iter().any(|m| m.same_content(tx)) || tx.args.iter().all(|a| self.arg_deducible(a))
    }
}

/// Can the coalition `actors`, observing `mempool`, author `tx`?
pub fn can_deduce(actors: &ActorSet, mempool: &[Transaction], tx: &Transaction) -> bool {
    KnowledgeBase::new(actors.clone(), mempool).can_deduce_tx(tx)
}

/// The actors whose cooperation a transaction requires: owners of its token
/// inputs and of the nonces in its commitments and reveals.
pub fn authorisers(tx: &Transaction) -> BTreeSet<ActorId> {
    let mut out = BTreeSet::new();
    for arg in &tx.args {
        match arg {
            TxArg::TokenInput { actor, .. } => {
                out.insert(actor.clone());
            }
            TxArg::Commit(r, _) | TxArg::Reveal(r, _) => {
                out.insert(r.owner.clone());
            }
            _ => {}
        }
    }
    out
}

pub fn authorisers_set(txs: &[Transaction]) -> BTreeSet<ActorId> {
    txs.iter().flat_map(authorisers).collect()
}

/// Enumeration bounds for deducible-transaction and maximal-gain searches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    /// Maximal sequence length explored by gain searches.
    pub max_depth: usize,
    /// Natural arguments and token-input amounts range over `0..=max_amount`.
    pub max_amount: u64,
    /// Secret values used in synthesised commitments and reveals.
    pub secret_values: BTreeSet<u64>,
    /// Nonce indices per actor: `A.0 .. A.(n-1)`.
    pub nonces_per_actor: u64,
    /// Actors used for synthesised token inputs and actor arguments.
    pub candidate_actors: BTreeSet<ActorId>,
    /// Fresh representatives introduced by the MEV-freedom check.
    pub representatives: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_depth: 3,
            max_amount: 2,
            secret_values: [0, 1].into(),
            nonces_per_actor: 1,
            candidate_actors: BTreeSet::new(),
            representatives: 1,
        }
    }
}

/// How a search may use a candidate transaction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Avail {
    /// The coalition can author the content itself, any number of times,
    /// each with a fresh nonce.
    Crafted,
    /// Only the exact mempool transaction (this nonce) can be replayed.
    Verbatim(u64),
}

/// A candidate move of the gain search. `content.nonce` is 0 and
/// meaningless; `avail` says how firing instantiates it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub content: Transaction,
    pub avail: Avail,
}

/// The base-value shape a parameter must carry for a clause to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ArgTy {
    Nat,
    Actor,
    Token,
    Commit,
    Reveal,
}

fn arg_ty(arg: &TxArg) -> Option<ArgTy> {
    match arg {
        TxArg::Nat(_) => Some(ArgTy::Nat),
        TxArg::Actor(_) => Some(ArgTy::Actor),
        TxArg::Token(_) => Some(ArgTy::Token),
        TxArg::Commit(..) => Some(ArgTy::Commit),
        TxArg::Reveal(..) => Some(ArgTy::Reveal),
        TxArg::Null | TxArg::TokenInput { .. } => None,
    }
}

/// What a parameter position admits, derived from the clause text. The
/// strict semantics evaluates every subexpression of the precondition and
/// every statement on the unconditional spine of the body, so a shape
/// mismatch there makes the clause non-applicable in every state: filtering
/// such arguments out of the enumeration loses nothing. Top-level equality
/// conjuncts against literals pin the argument exactly. Disequality hints
/// only narrow the enumeration window (a cross-shape disequality is
/// trivially true), which is part of this tool's bounded-search contract.
#[derive(Debug, Clone, PartialEq, Eq)]
enum PoolFilter {
    All,
    Ty(ArgTy),
    Exact(TxArg),
    Nothing,
}

impl PoolFilter {
    fn allows(&self, arg: &TxArg) -> bool {
        match self {
            PoolFilter::All => true,
            PoolFilter::Ty(t) => arg_ty(arg) == Some(*t),
            PoolFilter::Exact(a) => a == arg,
            PoolFilter::Nothing => false,
        }
    }

    fn meet(self, other: PoolFilter) -> PoolFilter {
        use PoolFilter::*;
        match (self, other) {
            (All, f) | (f, All) => f,
            (Nothing, _) | (_, Nothing) => Nothing,
            (Exact(a), Exact(b)) => {
                if a == b {
                    Exact(a)
                } else {
                    Nothing
                }
            }
            (Exact(a), Ty(t)) | (Ty(t), Exact(a)) => {
                if arg_ty(&a) == Some(t) {
                    Exact(a)
                } else {
                    Nothing
                }
            }
            (Ty(a), Ty(b)) => {
                if a == b {
                    Ty(a)
                } else {
                    Nothing
                }
            }
        }
    }
}

type TyEnv = BTreeMap<String, PoolFilter>;

fn tighten(env: &mut TyEnv, var: &str, f: PoolFilter) {
    let cur = env.remove(var).unwrap_or(PoolFilter::All);
    env.insert(var.to_string(), cur.meet(f));
}

fn want(env: &mut TyEnv, e: &Expr, ty: ArgTy) {
    if let Expr::Var(v) = e {
        tighten(env, v, PoolFilter::Ty(ty));
    }
}

/// Shape of an expression's value when statically evident.
fn shape_of(e: &Expr, env: &TyEnv) -> Option<ArgTy> {
    match e {
        Expr::Nat(_) => Some(ArgTy::Nat),
        Expr::Actor(_) => Some(ArgTy::Actor),
        Expr::Token(_) => Some(ArgTy::Token),
        Expr::Var(v) => match env.get(v) {
            Some(PoolFilter::Ty(t)) => Some(*t),
            Some(PoolFilter::Exact(a)) => arg_ty(a),
            _ => None,
        },
        Expr::Bin(op, ..) => match op {
            BinOp::And | BinOp::Or | BinOp::Eq | BinOp::Ne => Some(ArgTy::Nat),
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => Some(ArgTy::Nat),
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => Some(ArgTy::Nat),
        },
        Expr::Not(_) | Expr::Balance(_) | Expr::Sec(_) | Expr::Ver(..) => Some(ArgTy::Nat),
        Expr::Null | Expr::Lookup(..) => None,
    }
}

/// Collect constraints from an expression; `boolean` marks positions whose
/// value must be a truth value.
fn walk_expr(e: &Expr, env: &mut TyEnv, boolean: bool) {
    if boolean {
        if let Expr::Var(v) = e {
            tighten(env, v, PoolFilter::Ty(ArgTy::Nat));
            return;
        }
    }
    match e {
        Expr::Null | Expr::Nat(_) | Expr::Actor(_) | Expr::Token(_) | Expr::Var(_) => {}
        Expr::Bin(op, l, r) => match op {
            BinOp::And | BinOp::Or => {
                walk_expr(l, env, true);
                walk_expr(r, env, true);
            }
            BinOp::Add
            | BinOp::Sub
            | BinOp::Mul
            | BinOp::Div
            | BinOp::Lt
            | BinOp::Le
            | BinOp::Gt
            | BinOp::Ge => {
                want(env, l, ArgTy::Nat);
                want(env, r, ArgTy::Nat);
                walk_expr(l, env, false);
                walk_expr(r, env, false);
            }
            BinOp::Eq | BinOp::Ne => {
                walk_expr(l, env, false);
                walk_expr(r, env, false);
            }
        },
        Expr::Not(a) => walk_expr(a, env, true),
        Expr::Balance(a) => {
            want(env, a, ArgTy::Token);
            walk_expr(a, env, false);
        }
        Expr::Sec(a) => {
            want(env, a, ArgTy::Reveal);
            walk_expr(a, env, false);
        }
        Expr::Ver(a, b) => {
            want(env, a, ArgTy::Reveal);
            want(env, b, ArgTy::Commit);
            walk_expr(a, env, false);
            walk_expr(b, env, false);
        }
        Expr::Lookup(m, k) => {
            // the map side is a state variable, not a parameter
            let _ = m;
            walk_expr(k, env, false);
        }
    }
}

/// Statements that run whenever the body runs: `Seq` spines and `If` guards,
/// but not branch bodies.
fn walk_spine(s: &Stmt, env: &mut TyEnv) {
    match s {
        Stmt::Skip => {}
        Stmt::Assign(_, e) => walk_expr(e, env, false),
        Stmt::MapUpdate(_, k, v) => {
            walk_expr(k, env, false);
            walk_expr(v, env, false);
        }
        Stmt::TokenOut(rcpt, amount, token) => {
            want(env, rcpt, ArgTy::Actor);
            want(env, amount, ArgTy::Nat);
            want(env, token, ArgTy::Token);
            walk_expr(rcpt, env, false);
            walk_expr(amount, env, false);
            walk_expr(token, env, false);
        }
        Stmt::Seq(a, b) => {
            walk_spine(a, env);
            walk_spine(b, env);
        }
        Stmt::If(g, _, _) => walk_expr(g, env, true),
    }
}

fn conjuncts(e: &Expr) -> Vec<&Expr> {
    match e {
        Expr::Bin(BinOp::And, l, r) => {
            let mut out = conjuncts(l);
            out.extend(conjuncts(r));
            out
        }
        _ => vec![e],
    }
}

fn literal_arg(e: &Expr) -> Option<TxArg> {
    match e {
        Expr::Nat(n) => Some(TxArg::Nat(*n)),
        Expr::Actor(a) => Some(TxArg::Actor(a.clone())),
        Expr::Token(t) => Some(TxArg::Token(t.clone())),
        _ => None,
    }
}

fn eq_hint(env: &mut TyEnv, var_side: &Expr, other: &Expr, equality: bool) {
    let Expr::Var(v) = var_side else { return };
    if equality {
        if let Some(lit) = literal_arg(other) {
            tighten(env, v, PoolFilter::Exact(lit));
            return;
        }
    }
    if let Some(t) = shape_of(other, env) {
        tighten(env, v, PoolFilter::Ty(t));
    }
}

/// Infer a filter for each parameter slot of a clause.
fn clause_filters(cl: &Clause) -> Vec<Vec<PoolFilter>> {
    let mut env = TyEnv::new();
    // token-input components have fixed shapes
    for p in &cl.params {
        if let Param::TokenInput { actor, amount, token } = p {
            if let Some(v) = actor.as_var() {
                tighten(&mut env, v, PoolFilter::Ty(ArgTy::Actor));
            }
            if let Some(v) = amount.as_var() {
                tighten(&mut env, v, PoolFilter::Ty(ArgTy::Nat));
            }
            if let Some(v) = token.as_var() {
                tighten(&mut env, v, PoolFilter::Ty(ArgTy::Token));
            }
        }
    }
    // two passes so equality hints can propagate through the environment
    for _ in 0..2 {
        for c in conjuncts(&cl.pre) {
            if let Expr::Bin(op @ (BinOp::Eq | BinOp::Ne), l, r) = c {
                eq_hint(&mut env, l, r, *op == BinOp::Eq);
                eq_hint(&mut env, r, l, *op == BinOp::Eq);
            }
            walk_expr(c, &mut env, true);
        }
        walk_spine(&cl.body, &mut env);
    }

    let slot_filter = |slot: &ParamSlot| match slot {
        ParamSlot::Var(v) => env.get(v).cloned().unwrap_or(PoolFilter::All),
        ParamSlot::ConstNat(n) => PoolFilter::Exact(TxArg::Nat(*n)),
        ParamSlot::ConstActor(a) => PoolFilter::Exact(TxArg::Actor(a.clone())),
        ParamSlot::ConstToken(t) => PoolFilter::Exact(TxArg::Token(t.clone())),
    };
    cl.params
        .iter()
        .map(|p| p.slots().iter().map(|s| slot_filter(s)).collect())
        .collect()
}

/// Enumerate every deducible transaction within the bounds, in a fixed
/// total order: procedure signatures in source order, then lexicographic
/// argument order. Mempool transactions outside the synthesis window are
/// included verbatim.
pub fn candidate_transactions(
    kb: &KnowledgeBase,
    contract: &ContractDef,
    bounds: &Bounds,
) -> Vec<Candidate> {
    // Distinct (name, shape) signatures in source order, together with the
    // argument filters of every clause sharing the signature.
    let mut sigs: Vec<(String, Vec<ParamShape>, Vec<Vec<Vec<PoolFilter>>>)> = Vec::new();
    for cl in &contract.clauses {
        let filters = clause_filters(cl);
        // a clause with an unsatisfiable slot can never fire
        if filters.iter().flatten().any(|f| *f == PoolFilter::Nothing) {
            continue;
        }
        let sig = (cl.name.clone(), cl.shape());
        match sigs.iter_mut().find(|(n, sh, _)| *n == sig.0 && *sh == sig.1) {
            Some((_, _, fs)) => fs.push(filters),
            None => sigs.push((sig.0, sig.1, vec![filters])),
        }
    }

    let mut domain_actors: BTreeSet<ActorId> = bounds.candidate_actors.clone();
    for tx in &kb.mempool {
        domain_actors.extend(authorisers(tx));
        for arg in &tx.args {
            if let TxArg::Actor(a) = arg {
                domain_actors.insert(a.clone());
            }
        }
    }

    let tokens: Vec<TokenId> = contract.declared_tokens.iter().cloned().collect();

    // Deducible plain-argument atoms.
    let mut plain_pool: BTreeSet<TxArg> = BTreeSet::new();
    for n in 0..=bounds.max_amount {
        plain_pool.insert(TxArg::Nat(n));
    }
    for a in &domain_actors {
        plain_pool.insert(TxArg::Actor(a.clone()));
    }
    for t in &tokens {
        plain_pool.insert(TxArg::Token(t.clone()));
    }
    for owner in &domain_actors {
        for index in 0..bounds.nonces_per_actor {
            for v in &bounds.secret_values {
                let r = crate::lang::ast::NonceId { owner: owner.clone(), index };
                plain_pool.insert(TxArg::Commit(r.clone(), *v));
                plain_pool.insert(TxArg::Reveal(r, *v));
            }
        }
    }
    plain_pool.extend(kb.reusable.iter().cloned());
    let plain_pool: Vec<TxArg> = plain_pool.into_iter().filter(|a| kb.arg_deducible(a)).collect();

    // Deducible token inputs.
    let mut input_pool: Vec<TxArg> = Vec::new();
    for a in &domain_actors {
        if !kb.actors.contains(a) {
            continue;
        }
        for n in 0..=bounds.max_amount {
            for t in &tokens {
                input_pool.push(TxArg::TokenInput { actor: a.clone(), amount: n, token: t.clone() });
            }
        }
    }
    input_pool.sort();

    let mut out: Vec<(usize, Candidate)> = Vec::new();
    let mut crafted_contents: BTreeSet<(String, Vec<TxArg>)> = BTreeSet::new();
    for (si, (name, shape, clause_fs)) in sigs.iter().enumerate() {
        // A position admits an argument when some clause of the signature
        // admits it (a per-position over-approximation of the union).
        let admits = |pos: usize, arg: &TxArg| -> bool {
            clause_fs.iter().any(|fs| match arg {
                TxArg::TokenInput { actor, amount, token } => {
                    fs[pos][0].allows(&TxArg::Actor(actor.clone()))
                        && fs[pos][1].allows(&TxArg::Nat(*amount))
                        && fs[pos][2].allows(&TxArg::Token(token.clone()))
                }
                _ => fs[pos][0].allows(arg),
            })
        };
        let pools: Vec<Vec<TxArg>> = shape
            .iter()
            .enumerate()
            .map(|(pos, sh)| {
                let base = match sh {
                    ParamShape::Plain => &plain_pool,
                    ParamShape::TokenInput => &input_pool,
                };
                base.iter().filter(|a| admits(pos, a)).cloned().collect()
            })
            .collect();
        if pools.iter().any(|p| p.is_empty()) {
            continue; // no deducible instantiation of this signature
        }
        let mut args = vec![0usize; pools.len()];
        'outer: loop {
            let tuple: Vec<TxArg> = args.iter().zip(&pools).map(|(&i, p)| p[i].clone()).collect();
            crafted_contents.insert((name.clone(), tuple.clone()));
            out.push((
                si,
                Candidate {
                    content: Transaction { name: name.clone(), args: tuple, nonce: 0 },
                    avail: Avail::Crafted,
                },
            ));
            if pools.is_empty() {
                break;
            }
            // odometer increment
            let mut k = pools.len();
            loop {
                if k == 0 {
                    break 'outer;
                }
                k -= 1;
                args[k] += 1;
                if args[k] < pools[k].len() {
                    break;
                }
                args[k] = 0;
            }
        }
    }

    // Mempool transactions not coverable by synthesis are replayable verbatim.
    for tx in &kb.mempool {
        if crafted_contents.contains(&(tx.name.clone(), tx.args.clone())) {
            continue;
        }
        let si = sigs
            .iter()
            .position(|(n, sh, _)| {
                *n == tx.name && sh.len() == tx.args.len() && sh
                    .iter()
                    .zip(&tx.args)
                    .all(|(s, a)| *s == a.shape())
            })
            .unwrap_or(usize::MAX);
        out.push((
            si,
            Candidate {
                content: Transaction { name: tx.name.clone(), args: tx.args.clone(), nonce: 0 },
                avail: Avail::Verbatim(tx.nonce),
            },
        ));
    }

    out.sort_by(|(sa, ca), (sb, cb)| {
        sa.cmp(sb)
            .then_with(|| ca.content.name.cmp(&cb.content.name))
            .then_with(|| ca.content.args.cmp(&cb.content.args))
    });
    out.dedup_by(|(sa, ca), (sb, cb)| sa == sb && ca.content.same_content(&cb.content) && ca.avail == cb.avail);
    out.into_iter().map(|(_, c)| c).collect()
}

/// Public enumeration: every deducible transaction within the bounds, with
/// fresh nonces assigned so the results are immediately fireable.
pub fn enumerate_deducible(
    actors: &ActorSet,
    mempool: &[Transaction],
    contract: &ContractDef,
    bounds: &Bounds,
) -> Vec<Transaction> {
    let kb = KnowledgeBase::new(actors.clone(), mempool);
    candidate_transactions(&kb, contract, bounds)
        .into_iter()
        .enumerate()
        .map(|(i, c)| match c.avail {
            Avail::Verbatim(n) => Transaction { nonce: n, ..c.content },
            Avail::Crafted => Transaction { nonce: FRESH_NONCE_BASE + i as u64, ..c.content },
        })
        .collect()
}

/// Nonces at or above this base are reserved for synthesised transactions,
/// keeping them distinct from scenario-assigned nonces.
pub const FRESH_NONCE_BASE: u64 = 1 << 32;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::{parse_contract, parse_transaction};
    use std::collections::BTreeSet;

    fn actor(s: &str) -> ActorId {
        ActorId::new(s)
    }

    fn finite(names: &[&str]) -> ActorSet {
        ActorSet::finite(names.iter().map(|n| ActorId::new(*n)))
    }

    fn tx(s: &str, nonce: u64) -> Transaction {
        let tokens: BTreeSet<TokenId> = [TokenId::new("T")].into();
        let mut counter = nonce;
        parse_transaction(s, &tokens, &mut counter).unwrap()
    }

    #[test]
    fn actor_set_algebra_is_exact() {
        let ab = finite(&["A", "B"]);
        let not_a = finite(&["A"]).complement();
        assert!(not_a.contains(&actor("B")));
        assert!(!not_a.contains(&actor("A")));
        assert_eq!(ab.intersect(&not_a), finite(&["B"]));
        assert_eq!(
            not_a.union(&finite(&["A"])),
            ActorSet::universe()
        );
        assert!(finite(&["B"]).is_subset(&not_a));
        assert!(!not_a.is_subset(&ab));
        assert!(finite(&["A"]).complement().is_subset(&ActorSet::universe()));
        assert!(ActorSet::Cofinite([actor("A"), actor("B")].into())
            .is_subset(&not_a));
    }

    #[test]
    fn badhtlc_frontrun_deduction() {
        // mempool holds A's reveal; M can recombine the revealed secret with
        // their own token input, but cannot forge A's deposit.
        let mempool = [tx("reveal(A?0:T, rvl(A.0, 1))", 0)];
        let m = finite(&["M"]);
        assert!(can_deduce(&m, &mempool, &tx("reveal(M?0:T, rvl(A.0, 1))", 9)));
        assert!(can_deduce(&m, &mempool, &tx("reveal(A?0:T, rvl(A.0, 1))", 9))); // whole tx in mempool
        assert!(!can_deduce(&m, &mempool, &tx("reveal(A?0:T, rvl(A.0, 1), 0)", 9))); // different content
        assert!(!can_deduce(&m, &[], &tx("reveal(M?0:T, rvl(A.0, 1))", 9)));
        // a revealed nonce discloses the secret for any value
        assert!(can_deduce(&m, &mempool, &tx("reveal(M?0:T, rvl(A.0, 7))", 9)));
    }

    #[test]
    fn commits_replay_verbatim_but_do_not_reveal() {
        let mempool = [tx("commit(A?1:T, cmt(A.0, 1))", 0)];
        let m = finite(&["M"]);
        // the exact commitment argument can be replayed with M's deposit
        assert!(can_deduce(&m, &mempool, &tx("commit(M?1:T, cmt(A.0, 1))", 9)));
        // ... but the secret stays hidden: no reveal, no different commitment
        assert!(!can_deduce(&m, &mempool, &tx("reveal(rvl(A.0, 1))", 9)));
        assert!(!can_deduce(&m, &mempool, &tx("commit(M?1:T, cmt(A.0, 2))", 9)));
    }

    #[test]
    fn authorisers_examples() {
        assert!(authorisers(&tx("win()", 0)).is_empty());
        assert_eq!(
            authorisers(&tx("commit(A?1:T, B, cmt(A.0, 1))", 0)),
            [actor("A")].into()
        );
        assert_eq!(
            authorisers(&tx("f(A?1:T, rvl(B.0, 1), C)", 0)),
            [actor("A"), actor("B")].into()
        );
    }

    #[test]
    fn finite_causes() {
        let txs = [tx("commit(A?1:T, B, cmt(A.0, 1))", 0), tx("reveal(rvl(A.0, 1))", 1)];
        let auth = ActorSet::Finite(authorisers_set(&txs));
        for t in &txs {
            assert!(can_deduce(&auth, &[], t));
        }
    }

    #[test]
    fn enumeration_covers_own_and_mempool_moves() {
        let src = "tokens T; contract CoinPusher { pre x>0 play(a?x:T) { if #T>=100 then a!#T:T } }";
        let c = parse_contract(src, &BTreeSet::new()).unwrap();
        let mempool = [tx("play(A?1:T)", 0)];
        let not_a = finite(&["A"]).complement();
        let bounds = Bounds {
            max_amount: 100,
            candidate_actors: [actor("B")].into(),
            ..Bounds::default()
        };
        let txs = enumerate_deducible(&not_a, &mempool, &c, &bounds);
        // play(B?k:T) for every k <= 100, plus the mempool move
        for k in 0..=100 {
            assert!(
                txs.iter().any(|t| t.same_content(&tx(&format!("play(B?{k}:T)"), 0))),
                "missing play(B?{k}:T)"
            );
        }
        assert!(txs.iter().any(|t| *t == tx("play(A?1:T)", 0)));
        // crafted transactions carry fresh nonces
        assert!(txs
            .iter()
            .filter(|t| t.args.iter().all(|a| !matches!(a, TxArg::TokenInput { actor, .. } if *actor == actor_id_a())))
            .all(|t| t.nonce >= FRESH_NONCE_BASE));
    }

    fn actor_id_a() -> ActorId {
        ActorId::new("A")
    }

    #[test]
    fn enumeration_is_deterministic_and_ordered() {
        let src = "tokens T; contract C { f(a?x:T) {} g(y) {} }";
        let c = parse_contract(src, &BTreeSet::new()).unwrap();
        let bounds = Bounds {
            max_amount: 1,
            candidate_actors: [actor("M")].into(),
            ..Bounds::default()
        };
        let a = finite(&["M"]);
        let e1 = enumerate_deducible(&a, &[], &c, &bounds);
        let e2 = enumerate_deducible(&a, &[], &c, &bounds);
        assert_eq!(e1, e2);
        // f-signature candidates precede g-signature candidates
        let first_g = e1.iter().position(|t| t.name == "g").unwrap();
        assert!(e1[..first_g].iter().all(|t| t.name == "f"));
    }
}

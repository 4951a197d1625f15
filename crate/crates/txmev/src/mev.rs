//! Maximal extractable value and MEV-freedom.
//!
//! `mev` is the coalition's best bounded gain given the mempool, net of
//! what it could have gained on its own. The own-gain search is seeded with
//! every mempool-derived candidate the coalition can deduce privately, so
//! the difference is never negative and transactions deducible without the
//! mempool never count as extraction.
//!
//! The freedom check quantifies over attackers abstractly: any coalition
//! disjoint from the actors named by the state, the mempool or the contract
//! behaves identically up to renaming, so it suffices to test `k` fresh
//! representatives holding the cluster's combined wealth.

use std::collections::{BTreeMap, BTreeSet};

use crate::economics::{
    collect_value_actors, max_gain, max_gain_with_candidates, GainReport, PriceTable,
};
use crate::knowledge::{
    candidate_transactions, ActorSet, Avail, Bounds, KnowledgeBase,
};
use crate::lang::ast::{ActorId, ContractDef, Transaction, TxArg};
use crate::semantics::{BlockchainState, WalletState};

/// A bijective renaming of actors, the identity outside its domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Renaming {
    forward: BTreeMap<ActorId, ActorId>,
    backward: BTreeMap<ActorId, ActorId>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MevError {
    #[error("renaming is not a bijection")]
    NotABijection,
    #[error("representative {0} is not in the receiving coalition")]
    BadRepresentative(ActorId),
    #[error("receiving coalition is not a subset of the source coalition")]
    NotASubset,
}

impl Renaming {
    pub fn new(pairs: impl IntoIterator<Item = (ActorId, ActorId)>) -> Result<Self, MevError> {
        let mut forward = BTreeMap::new();
        let mut backward = BTreeMap::new();
        for (a, b) in pairs {
            if forward.insert(a.clone(), b.clone()).is_some()
                || backward.insert(b, a).is_some()
            {
                return Err(MevError::NotABijection);
            }
        }
        // A permutation must map its domain onto itself.
        let dom: BTreeSet<_> = forward.keys().collect();
        let rng: BTreeSet<_> = backward.keys().collect();
        if dom != rng {
            return Err(MevError::NotABijection);
        }
        Ok(Renaming { forward, backward })
    }

    pub fn apply(&self, a: &ActorId) -> ActorId {
        self.forward.get(a).cloned().unwrap_or_else(|| a.clone())
    }

    pub fn invert(&self, a: &ActorId) -> ActorId {
        self.backward.get(a).cloned().unwrap_or_else(|| a.clone())
    }

    pub fn apply_set(&self, s: &ActorSet) -> ActorSet {
        match s {
            ActorSet::Finite(m) => ActorSet::Finite(m.iter().map(|a| self.apply(a)).collect()),
            ActorSet::Cofinite(m) => ActorSet::Cofinite(m.iter().map(|a| self.apply(a)).collect()),
        }
    }
}

/// Rename wallets: the renamed state gives actor `ρ(A)` the wallet `A` had.
/// The contract state is untouched — renamings act on wallets only.
pub fn rename_state(state: &BlockchainState, rho: &Renaming) -> BlockchainState {
    let wallets = WalletState(
        state
            .wallets
            .0
            .iter()
            .map(|(a, w)| (rho.apply(a), w.clone()))
            .collect(),
    );
    BlockchainState { wallets, contract: state.contract.clone() }
}

/// Maximal extractable value of the coalition `set` from `mempool`.
pub fn mev(
    set: &ActorSet,
    state: &BlockchainState,
    contract: &ContractDef,
    mempool: &[Transaction],
    bounds: &Bounds,
    prices: &PriceTable,
) -> GainReport {
    let kb_pool = KnowledgeBase::new(set.clone(), mempool);
    let with_pool = max_gain(state, contract, &kb_pool, bounds, prices);

    // Own-gain search over the same window, seeded with every mempool-derived
    // candidate that is deducible without the mempool. This guarantees the
    // private candidate set is included in the mempool one, so mev >= 0.
    let kb_empty = KnowledgeBase::new(set.clone(), &[]);
    let eff = effective_bounds_like(set, state, mempool, bounds);
    let mut own = candidate_transactions(&kb_empty, contract, &eff);
    for cand in candidate_transactions(&kb_pool, contract, &eff) {
        let privately = kb_empty.can_deduce_tx(&cand.content);
        let already = own.iter().any(|c| c.content.same_content(&cand.content));
        if privately && !already {
            own.push(crate::knowledge::Candidate { content: cand.content, avail: Avail::Crafted });
        }
    }
    let without_pool = max_gain_with_candidates(state, contract, set, &own, &eff, prices);

    GainReport {
        value: with_pool.value - without_pool.value,
        witness: with_pool.witness,
        states_explored: with_pool.states_explored + without_pool.states_explored,
    }
}

// The same actor-domain augmentation `max_gain` performs, duplicated here so
// both searches of `mev` run over one window.
fn effective_bounds_like(
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

/// Actors that the state, the mempool or the contract name explicitly.
/// Everyone else is interchangeable with everyone else — the attacker
/// cluster is the complement of this excluded set.
pub fn excluded_actors(
    state: &BlockchainState,
    mempool: &[Transaction],
    contract: &ContractDef,
) -> BTreeSet<ActorId> {
    let mut out = contract.hardcoded_actors.clone();
    for tx in mempool {
        for arg in &tx.args {
            match arg {
                TxArg::Actor(a) => {
                    out.insert(a.clone());
                }
                TxArg::TokenInput { actor, .. } => {
                    out.insert(actor.clone());
                }
                TxArg::Commit(r, _) | TxArg::Reveal(r, _) => {
                    out.insert(r.owner.clone());
                }
                _ => {}
            }
        }
    }
    for v in state.contract.sigma.values() {
        collect_value_actors(v, &mut out);
    }
    out
}

/// The attacker cluster: all actors not pinned down by the state, the
/// mempool or the contract text. Always cofinite.
pub fn cluster_of(
    state: &BlockchainState,
    mempool: &[Transaction],
    contract: &ContractDef,
) -> ActorSet {
    ActorSet::Cofinite(excluded_actors(state, mempool, contract))
}

/// Move all tokens owned by coalition `from` onto `rep`, a member of the
/// sub-coalition `to ⊆ from`. Actors outside `from` are untouched.
pub fn redistribute(
    state: &BlockchainState,
    from: &ActorSet,
    to: &ActorSet,
    rep: &ActorId,
) -> Result<BlockchainState, MevError> {
    if !to.is_subset(from) {
        return Err(MevError::NotASubset);
    }
    if !to.contains(rep) {
        return Err(MevError::BadRepresentative(rep.clone()));
    }
    let mut wallets = WalletState::default();
    let mut pot: BTreeMap<crate::lang::ast::TokenId, u64> = BTreeMap::new();
    for (a, w) in &state.wallets.0 {
        if from.contains(a) {
            for (t, n) in w {
                *pot.entry(t.clone()).or_insert(0) += n;
            }
        } else {
            wallets.0.insert(a.clone(), w.clone());
        }
    }
    for (t, n) in pot {
        wallets.add(rep, &t, n);
    }
    Ok(BlockchainState { wallets, contract: state.contract.clone() })
}

/// Verify that `after` redistributes `before`'s wealth from coalition
/// `from` onto coalition `to`: outsiders untouched, per-token totals of the
/// two coalitions equal, contract state identical, and no tokens stranded
/// on `from \ to` or pre-existing on `to \ from`.
pub fn check_redistribution(
    before: &BlockchainState,
    after: &BlockchainState,
    from: &ActorSet,
    to: &ActorSet,
) -> bool {
    if before.contract != after.contract {
        return false;
    }
    let outside = from.union(to).complement();
    let owners: BTreeSet<&ActorId> = before.wallets.owners().chain(after.wallets.owners()).collect();
    let mut totals_before: BTreeMap<&crate::lang::ast::TokenId, u64> = BTreeMap::new();
    let mut totals_after: BTreeMap<&crate::lang::ast::TokenId, u64> = BTreeMap::new();
    for a in owners {
        let wb = before.wallets.0.get(a);
        let wa = after.wallets.0.get(a);
        if outside.contains(a) {
            if wb != wa {
                return false;
            }
            continue;
        }
        // tokens must leave `from \ to` entirely, and `to \ from` cannot
        // have held tokens beforehand (they would escape the decomposition)
        if from.contains(a) && !to.contains(a) && wa.is_some() {
            return false;
        }
        if to.contains(a) && !from.contains(a) && wb.is_some() {
            return false;
        }
        for (t, n) in wb.into_iter().flatten() {
            *totals_before.entry(t).or_insert(0) += n;
        }
        for (t, n) in wa.into_iter().flatten() {
            *totals_after.entry(t).or_insert(0) += n;
        }
    }
    totals_before == totals_after
}

/// Outcome of the MEV-freedom check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Some attacker coalition extracts `value > 0`; sound and replayable.
    AttackFound {
        representatives: Vec<ActorId>,
        redistributed: BlockchainState,
        value: i64,
        witness: Vec<Transaction>,
        states_explored: u64,
    },
    /// No attack exists within the bounds — inconclusive beyond them.
    NoAttackWithinBounds { bounds: Bounds, states_explored: u64 },
}

/// Deterministic fresh representative names `Z1, Z2, ...`, skipping any
/// name already in use.
fn fresh_representatives(
    k: usize,
    taken: &BTreeSet<ActorId>,
) -> Vec<ActorId> {
    let mut out = Vec::new();
    let mut i = 1usize;
    while out.len() < k {
        let cand = ActorId::new(format!("Z{i}"));
        if !taken.contains(&cand) {
            out.push(cand);
        }
        i += 1;
    }
    out
}

/// Is any attacker coalition able to extract value from `mempool`?
///
/// The check concentrates the whole cluster's wealth on `bounds.representatives`
/// fresh actors and runs the bounded MEV search for them. By the renaming
/// and redistribution closure properties, a positive result is a genuine
/// attack; a zero result only certifies the searched window.
pub fn mev_freedom_check(
    state: &BlockchainState,
    contract: &ContractDef,
    mempool: &[Transaction],
    bounds: &Bounds,
    prices: &PriceTable,
) -> Verdict {
    let excluded = excluded_actors(state, mempool, contract);
    let cluster = ActorSet::Cofinite(excluded.clone());
    let mut taken = excluded;
    taken.extend(state.wallets.owners().cloned());
    taken.extend(bounds.candidate_actors.iter().cloned());
    let reps = fresh_representatives(bounds.representatives.max(1), &taken);
    let rep_set = ActorSet::finite(reps.iter().cloned());
    let redistributed = redistribute(state, &cluster, &rep_set, &reps[0])
        .expect("fresh representatives always form a sub-coalition of the cluster");
    debug_assert!(check_redistribution(state, &redistributed, &cluster, &rep_set));

    let mut search_bounds = bounds.clone();
    search_bounds.candidate_actors.extend(reps.iter().cloned());
    let report = mev(&rep_set, &redistributed, contract, mempool, &search_bounds, prices);
    if report.value > 0 {
        Verdict::AttackFound {
            representatives: reps,
            redistributed,
            value: report.value,
            witness: report.witness,
            states_explored: report.states_explored,
        }
    } else {
        Verdict::NoAttackWithinBounds {
            bounds: search_bounds,
            states_explored: report.states_explored,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::desugar::desugar_constants;
    use crate::lang::parser::{parse_contract, parse_transaction};
    use std::collections::BTreeSet;

    fn actor(s: &str) -> ActorId {
        ActorId::new(s)
    }

    fn token(s: &str) -> crate::lang::ast::TokenId {
        crate::lang::ast::TokenId::new(s)
    }

    fn prices(ps: &[(&str, u64)]) -> PriceTable {
        PriceTable(ps.iter().map(|(t, p)| (token(t), *p)).collect())
    }

    fn finite(names: &[&str]) -> ActorSet {
        ActorSet::finite(names.iter().map(|n| ActorId::new(*n)))
    }

    fn setup(src: &str, wallets: &[(&str, &str, u64)]) -> (ContractDef, BlockchainState) {
        let c = desugar_constants(&parse_contract(src, &BTreeSet::new()).unwrap());
        let mut w = WalletState::default();
        for (a, t, n) in wallets {
            w.add(&actor(a), &token(t), *n);
        }
        (c.clone(), BlockchainState::initial(&c, w))
    }

    fn tx(c: &ContractDef, s: &str, nonce: u64) -> Transaction {
        let mut counter = nonce;
        parse_transaction(s, &c.declared_tokens, &mut counter).unwrap()
    }

    const COIN_PUSHER: &str =
        "tokens T; contract CoinPusher { pre x>0 play(a?x:T) { if #T>=100 then a!#T:T } }";

    #[test]
    fn coinpusher_mev_and_freedom() {
        let (c, s0) = setup(COIN_PUSHER, &[("A", "T", 1), ("B", "T", 100)]);
        let p = prices(&[("T", 1)]);
        let bounds = Bounds { max_depth: 2, max_amount: 100, ..Bounds::default() };
        let mempool = [tx(&c, "play(A?1:T)", 0)];
        let report = mev(&finite(&["B"]), &s0, &c, &mempool, &bounds, &p);
        assert_eq!(report.value, 1);

        // the cluster excludes only A; a fresh representative inherits B's 100:T
        match mev_freedom_check(&s0, &c, &mempool, &bounds, &p) {
            Verdict::AttackFound { value, representatives, redistributed, .. } => {
                assert_eq!(value, 1);
                assert_eq!(redistributed.wallets.get(&representatives[0], &token("T")), 100);
            }
            v => panic!("expected an attack, got {v:?}"),
        }
    }

    #[test]
    fn cluster_excludes_state_mempool_and_hardcoded_actors() {
        let src = r#"
            tokens T;
            contract C { pre x=0 f(a?x:T, b) { owner:=b } g(Oracle?0:T) {} }
        "#;
        let (c, mut s0) = setup(src, &[("W", "T", 3)]);
        s0.contract.sigma.insert("owner".into(), crate::semantics::Value::Actor(actor("O")));
        let mempool = [tx(&c, "f(A?0:T, B)", 0)];
        let cluster = cluster_of(&s0, &mempool, &c);
        for named in ["A", "B", "O", "Oracle"] {
            assert!(!cluster.contains(&actor(named)), "{named} should be excluded");
        }
        // wallet ownership alone does not pin an actor down
        assert!(cluster.contains(&actor("W")));
        assert!(cluster.contains(&actor("Z1")));
    }

    #[test]
    fn renaming_acts_on_wallets_only() {
        let (c, s0) = setup(COIN_PUSHER, &[("A", "T", 1), ("B", "T", 2)]);
        let rho = Renaming::new([(actor("A"), actor("B")), (actor("B"), actor("A"))]).unwrap();
        let s1 = rename_state(&s0, &rho);
        assert_eq!(s1.wallets.get(&actor("B"), &token("T")), 1);
        assert_eq!(s1.wallets.get(&actor("A"), &token("T")), 2);
        assert_eq!(s1.contract, s0.contract);
        assert_eq!(rename_state(&s1, &rho), s0);
        assert!(Renaming::new([(actor("A"), actor("B"))]).is_err());
        let _ = c;
    }

    #[test]
    fn redistribution_and_its_checker() {
        let (_, s0) = setup(COIN_PUSHER, &[("A", "T", 1), ("B", "T", 2), ("C", "T", 4)]);
        let cluster = finite(&["A"]).complement(); // everyone but A
        let reps = finite(&["Z1"]);
        let s1 = redistribute(&s0, &cluster, &reps, &actor("Z1")).unwrap();
        assert_eq!(s1.wallets.get(&actor("Z1"), &token("T")), 6);
        assert_eq!(s1.wallets.get(&actor("A"), &token("T")), 1);
        assert_eq!(s1.wallets.get(&actor("B"), &token("T")), 0);
        assert!(check_redistribution(&s0, &s1, &cluster, &reps));
        // tampering with an outsider or the totals breaks the check
        let mut bad = s1.clone();
        bad.wallets.add(&actor("A"), &token("T"), 1);
        assert!(!check_redistribution(&s0, &bad, &cluster, &reps));
        let mut bad = s1.clone();
        bad.wallets.sub(&actor("Z1"), &token("T"), 1);
        assert!(!check_redistribution(&s0, &bad, &cluster, &reps));
        // the representative must belong to the receiving coalition
        assert_eq!(
            redistribute(&s0, &cluster, &reps, &actor("B")).unwrap_err(),
            MevError::BadRepresentative(actor("B"))
        );
        assert_eq!(
            redistribute(&s0, &finite(&["B"]), &reps, &actor("Z1")).unwrap_err(),
            MevError::NotASubset
        );
    }

    #[test]
    fn mev_is_zero_when_the_coalition_authored_the_mempool() {
        let (c, s0) = setup(COIN_PUSHER, &[("B", "T", 100)]);
        let p = prices(&[("T", 1)]);
        let bounds = Bounds { max_depth: 2, max_amount: 100, ..Bounds::default() };
        let mempool = [tx(&c, "play(B?100:T)", 0)];
        let report = mev(&finite(&["B"]), &s0, &c, &mempool, &bounds, &p);
        assert_eq!(report.value, 0);
    }
}

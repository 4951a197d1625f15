//! TxScript interpreter and MEV analyser.
//!
//! The crate is organised bottom-up:
//!
//! * [`lang`] — lexer, parser, AST, desugaring and static checks for the
//!   TxScript contract language and its transaction syntax.
//! * [`semantics`] — values, blockchain states and the small-step execution
//!   relation (`fire` / `exec_sequence`) with full rollback on failure.
//! * [`knowledge`] — adversary knowledge: which transactions a coalition of
//!   actors can deduce from a mempool, and bounded enumeration thereof.
//! * [`economics`] — token prices, wealth, gain and the bounded maximal-gain
//!   search underlying all extractable-value queries.
//! * [`mev`] — maximal extractable value, attacker clusters, wallet
//!   redistribution and the MEV-freedom verdict.
//! * [`scenario`] — the line-oriented scenario file format used by the CLI
//!   and the test corpus.
//! * [`report`] — deterministic text/machine rendering of analysis results.

pub mod economics;
pub mod knowledge;
pub mod lang;
pub mod mev;
pub mod report;
pub mod scenario;
pub mod semantics;

pub use lang::ast::{ActorId, NonceId, TokenId, Transaction, TxArg};
pub use semantics::{BlockchainState, Value};

//! The TxScript language front end.

pub mod ast;
pub mod check;
pub mod desugar;
pub mod lexer;
pub mod parser;
pub mod pretty;

pub use ast::{ContractDef, Transaction};
pub use check::{check_wellformed, Diagnostic, Severity};
pub use desugar::desugar_constants;
pub use parser::{parse_contract, parse_transaction, ParseError};

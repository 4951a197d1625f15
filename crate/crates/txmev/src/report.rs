//! Deterministic rendering of analysis results.
//!
//! Every command builds a [`Report`] — an ordered list of key/value fields —
//! and renders it either as aligned human-readable text or as
//! `key: value` machine lines. Both forms carry identical values and are
//! byte-identical across runs: no timestamps, no hash-order iteration.

use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldValue {
    Text(String),
    Int(i64),
    Nat(u64),
    List(Vec<String>),
}

impl From<&str> for FieldValue {
    fn from(s: &str) -> Self {
        FieldValue::Text(s.to_string())
    }
}

impl From<String> for FieldValue {
    fn from(s: String) -> Self {
        FieldValue::Text(s)
    }
}

impl From<i64> for FieldValue {
    fn from(n: i64) -> Self {
        FieldValue::Int(n)
    }
}

impl From<u64> for FieldValue {
    fn from(n: u64) -> Self {
        FieldValue::Nat(n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub command: String,
    pub fields: Vec<(String, FieldValue)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report { command: command.into(), fields: Vec::new() }
    }

    pub fn field(mut self, key: impl Into<String>, value: impl Into<FieldValue>) -> Self {
        self.fields.push((key.into(), value.into()));
        self
    }

    pub fn list(mut self, key: impl Into<String>, items: Vec<String>) -> Self {
        self.fields.push((key.into(), FieldValue::List(items)));
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Machine => self.render_machine(),
            Format::Text => self.render_text(),
        }
    }

    fn render_machine(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        for (k, v) in &self.fields {
            match v {
                FieldValue::Text(s) => {
                    let _ = writeln!(out, "{k}: {s}");
                }
                FieldValue::Int(n) => {
                    let _ = writeln!(out, "{k}: {n}");
                }
                FieldValue::Nat(n) => {
                    let _ = writeln!(out, "{k}: {n}");
                }
                FieldValue::List(items) => {
                    let _ = writeln!(out, "{k}:");
                    for item in items {
                        let _ = writeln!(out, "- {item}");
                    }
                }
            }
        }
        out
    }

    fn render_text(&self) -> String {
        let width = self
            .fields
            .iter()
            .map(|(k, _)| k.len())
            .max()
            .unwrap_or(0)
            .max("command".len());
        let mut out = String::new();
        let _ = writeln!(out, "{:width$}  {}", "command", self.command);
        for (k, v) in &self.fields {
            match v {
                FieldValue::Text(s) => {
                    let _ = writeln!(out, "{k:width$}  {s}");
                }
                FieldValue::Int(n) => {
                    let _ = writeln!(out, "{k:width$}  {n}");
                }
                FieldValue::Nat(n) => {
                    let _ = writeln!(out, "{k:width$}  {n}");
                }
                FieldValue::List(items) if items.is_empty() => {
                    let _ = writeln!(out, "{k:width$}  (none)");
                }
                FieldValue::List(items) => {
                    let _ = writeln!(out, "{k:width$}  {}", items[0]);
                    for item in &items[1..] {
                        let _ = writeln!(out, "{:width$}  {item}", "");
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_formats_carry_the_same_values() {
        let r = Report::new("mev")
            .field("value", 1i64)
            .list("witness", vec!["play(A?1:T)@0".into(), "play(B?99:T)@1".into()]);
        let m = r.render(Format::Machine);
        let t = r.render(Format::Text);
        for needle in ["mev", "1", "play(A?1:T)@0", "play(B?99:T)@1"] {
            assert!(m.contains(needle), "machine missing {needle}");
            assert!(t.contains(needle), "text missing {needle}");
        }
        assert_eq!(m, r.render(Format::Machine), "rendering must be deterministic");
    }
}

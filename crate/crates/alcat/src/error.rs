//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Concept or ontology text failed to parse. `pos` is a byte offset into the input.
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    /// An identifier was used that the signature does not declare.
    #[error("undeclared {kind} '{name}' at byte {pos}")]
    Undeclared {
        kind: &'static str,
        name: String,
        pos: usize,
    },

    /// A signature was constructed that breaks its invariants.
    #[error("invalid signature: {0}")]
    Signature(String),

    /// A concept mentions a name the interpretation has no extension for.
    #[error("interpretation has no extension for {kind} '{name}'")]
    UnknownName { kind: &'static str, name: String },

    /// A query named an object that is not part of the category's universe.
    #[error("object not in universe: {0}")]
    ObjectNotInUniverse(String),

    /// A rule name passed to a rule mask was not recognized.
    #[error("unknown rule name '{0}'")]
    UnknownRule(String),

    /// A configured resource budget was exhausted before an answer was reached.
    #[error("budget exhausted: {0}")]
    Budget(String),

    /// Certificate extraction was asked for a satisfiable input.
    #[error("satisfiable, no certificate: {0}")]
    Satisfiable(String),

    /// A certificate or meta-tree was structurally unusable.
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

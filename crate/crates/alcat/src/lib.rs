//! ALC reasoning with two independent engines and a certificate bridge.
//!
//! The crate decides satisfiability of ALC concepts under a TBox two ways
//! and cross-checks the answers:
//!
//! * [`tableau`] runs a classical expansion calculus over meta-trees of
//!   labelled nodes, with structural blocking for termination.
//! * [`category`] builds a finite universe of syntax objects and saturates
//!   it with arrow rules until a fixed point; an arrow `c -> bot` refutes `c`.
//! * [`certificate`] extracts a checkable arrow derivation from a closed
//!   tableau and replays it inside a guided universe, tying the two engines
//!   together per instance.
//! * [`interp`] evaluates concepts in explicit finite interpretations and
//!   searches for bounded models, giving a third, brute-force opinion.
//! * [`harness`] generates seeded random instances and runs all of the
//!   above against each other, reporting any disagreement.
//! * [`syntax`] holds the concept grammar, parser, normal forms, and
//!   ontology files; [`cli`] wires everything into the `alcat` binary.
//!
//! Each capability has a runnable walkthrough under `examples/`:
//!
//! ```text
//! cargo run --example parse_roundtrip      # grammar, NNF, canonical forms
//! cargo run --example tableau_walkthrough  # expansion traces and verdicts
//! cargo run --example meeting_category     # the smallest saturation run
//! cargo run --example sublogics            # rule masks and what they lose
//! cargo run --example derived_arrows       # entailment via saturation
//! cargo run --example certificate_roundtrip# extract, verify, replay
//! cargo run --example bounded_models       # model search and evaluation
//! cargo run --example differential        # the cross-engine fuzz loop
//! ```

pub mod category;
pub mod certificate;
pub mod cli;
pub mod error;
pub mod harness;
pub mod interp;
pub mod syntax;
pub mod tableau;

pub use error::{Error, Result};
pub use syntax::{
    canonical_key, canonicalize, infer_signature, nnf, nnf_complement, parse_concept,
    parse_concept_loose, sub_closure, CanonicalKey, Concept, Gci, Ontology, Signature,
};

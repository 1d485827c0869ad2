//! Decision procedures for the KLM conditional logics C, CL, P and R.
//!
//! The crate has three layers:
//!
//! * [`syntax`] / [`parser`]: the formula AST, concrete syntax, per-logic
//!   language validation and the subformula closure;
//! * [`models`]: finite preferential / ranked / (loop-)cumulative structures,
//!   satisfaction, bounded model enumeration and the brute-force
//!   satisfiability oracle used to cross-check the provers;
//! * [`engine`]: the tableau engines — unlabelled set-based calculi for P, CL
//!   and C, and a labelled calculus for R — with countermodel extraction and
//!   closed-tableau traces.
//!
//! The library is `no_std` (with `alloc`); IO, JSON rendering and the CLI
//! live in the companion `klm-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod engine;
pub mod models;
pub mod parser;
pub mod syntax;

pub use engine::{decide, DecideOptions, Decision, Engine, Verdict};
pub use models::{oracle_sat, OracleAnswer};
pub use syntax::{Formula, KnowledgeBase, Logic};

//! A theorem-proving toolkit for propositional modal logic S5 built on
//! rooted hypersequents: a root sequent of arbitrary formulas plus a crown
//! of atomic-only components that stores atoms across modal rule
//! applications.
//!
//! The crate provides, in layers:
//!
//! * [`formula`] — the S5 formula language, parser and printer;
//! * [`hypersequent`] — multisets, crown components, rooted hypersequents
//!   and their single-formula interpretation;
//! * [`calculus`] — the inference rules as data, backward rule application
//!   and an independent proof checker;
//! * [`semantics`] — Kripke models and a brute-force validity oracle with
//!   countermodels;
//! * [`qnf`] — quasi-normal forms (modal subformulas treated as literals);
//! * [`search`] — terminating backward proof search;
//! * [`transform`] — admissible-rule transformations on proof trees
//!   (weakening, contraction, merge, modality stripping, cut elimination);
//! * [`hilbert`] — the axiomatic system and its translation into sequent
//!   proofs;
//! * [`cli`] — the command-line front end.

pub mod calculus;
pub mod cli;
pub mod formula;
pub mod hilbert;
pub mod hypersequent;
pub mod proof_io;
pub mod qnf;
pub mod search;
pub mod semantics;
pub mod transform;

pub use calculus::{Proof, RuleId, RuleInstance, Side};
pub use formula::{Formula, FormulaClass};
pub use hypersequent::{CrownComponent, FMultiset, RootedHypersequent};
pub use search::{SearchBudget, SearchVerdict};
pub use semantics::{KripkeModel, OracleVerdict};

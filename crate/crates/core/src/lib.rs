//! Word calculus for Dehn twist relators in surface mapping class groups.
//!
//! The crate is organized around the pipeline used to verify positive relator
//! constructions for Lefschetz fibrations:
//!
//! * [`word`] — twist letters, words, the word DSL, free reduction and the
//!   other purely combinatorial operations.
//! * [`homology`] — integral homology classes, the symplectic intersection
//!   form and transvection matrices.
//! * [`curve`] — curve tables (classes plus disjoint/unit declarations) and
//!   the homology action of words.
//! * [`relation`] — the relation catalog (braid, chain, lantern, star, ...)
//!   with their signature values, and per-genus relation registries.
//! * [`solver`] — recovers homology classes of figure-defined curves from
//!   local constraints by exhaustive search.
//! * [`rewrite`] — positional derivation scripts with signature ledgers.
//! * [`invariants`] — Euler characteristic, Smith normal form, H1 of a
//!   fibration, and the closed-form signature formulas.
//! * [`corpus`] — the data assets transcribing the source constructions and
//!   the end-to-end validation entry points.

pub mod corpus;
pub mod curve;
pub mod homology;
pub mod invariants;
pub mod relation;
pub mod rewrite;
pub mod solver;
pub mod word;

pub use curve::CurveTable;
pub use homology::{HomologyClass, SymplecticMatrix};
pub use invariants::{AbelianGroup, FibrationInvariants};
pub use relation::{Registry, RelationInstance, RelationKind};
pub use rewrite::{Derivation, SignatureLedger};
pub use word::{CurveName, DefinitionTable, Sign, TwistLetter, Word};

//! Rewriting engine and analysis toolkit for infinitary combinatory
//! reduction systems over rational terms.
//!
//! The crate represents possibly infinite terms in their rational fragment
//! (finitely many distinct subtrees) with explicit fixed-point binders, and
//! provides on top of that: parsing and printing, alpha equivalence and the
//! depth ultrametric, higher-order pattern matching and rewriting, residual
//! tracking and complete developments, detection of hypercollapsing
//! subterms, and the confluence-modulo analyses built from those pieces.

pub mod alpha;
pub mod chains;
mod cursor;
mod display;
mod graph;
pub mod hc;
pub mod matching;
pub mod parse;
pub mod props;
pub mod position;
pub mod rewrite;
pub mod rules;
pub mod signature;
pub mod term;
pub mod unify;
pub mod valuation;

pub use display::TermDisplay;

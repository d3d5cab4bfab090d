//! Intersection types with `->` and `&` and no top element.
//!
//! - [`syntax`]: expressions, parsing, rendering, positions, polarity.
//! - [`rewrite`]: the rewrite rules, normal forms, and a bounded
//!   conversion oracle.
//! - [`factors`]: strictly positive unrollings ending in an atom.
//! - [`decide`]: polynomial-time `⊆` and `~` by factor matching.
//! - [`model`]: the finite models `F(n)`.
//! - [`gen`]: random and exhaustive expression generators.
//! - [`selftest`]: the desk-scale acceptance checks.

pub mod decide;
pub mod error;
pub mod factors;
pub mod gen;
pub mod model;
pub mod rewrite;
pub mod selftest;
pub mod syntax;

pub use decide::{equiv, subseteq, subtype_matrix, Decider, SubtypeMatrix};
pub use error::{Error, ParseError, Result};
pub use factors::{factor_to_expr, factors, Factor};
pub use model::{build_model, satisfies_eq, stack_of_twos, Model};
pub use rewrite::{
    apply, convertible_bounded, dept_normal_form, dist_normal_form, redexes, slat_canonical,
    Rule, RuleKind, Trace, Verdict,
};
pub use syntax::{parse, render, Atom, Expr, Format, Polarity, Position, Step};

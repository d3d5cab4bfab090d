//! Intersection-type expressions.
//!
//! An [`Expr`] is a finite binary tree with atoms at the leaves and either
//! `->` or `&` at every internal vertex. Structural equality is syntactic
//! equality; every equality modulo the theory lives in [`crate::rewrite`]
//! and [`crate::decide`].
//!
//! Occurrences are addressed by [`Position`]s, root-to-node step sequences.
//! The `ebb` of an occurrence counts the arrow vertices on the path from the
//! root down to it, *including the occurrence itself when it is an arrow*,
//! so `c -> d` has ebb 1 in `c -> d`. The dept rule and the finite models
//! depend on this convention; an off-by-one here silently changes both.

mod parse;
mod render;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError};

pub use parse::parse;
pub use render::{render, Format};

/// Name of the distinguished atom used as the truncation placeholder.
pub const AT: &str = "@";

/// An atom name: `@` or a lowercase-initial identifier.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: &str) -> Result<Atom, Error> {
        if is_atom_name(name) {
            Ok(Atom(Arc::from(name)))
        } else {
            Err(Error::InvalidAtom(name.to_string()))
        }
    }

    /// The distinguished atom `@`.
    pub fn at() -> Atom {
        Atom(Arc::from(AT))
    }

    pub fn is_at(&self) -> bool {
        &*self.0 == AT
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_atom_name(name: &str) -> bool {
    if name == AT {
        return true;
    }
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// An intersection-type expression.
///
/// Children are reference counted so clones are cheap; sharing is never
/// observable through the API.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Atom(Atom),
    Arrow(Arc<Expr>, Arc<Expr>),
    Meet(Arc<Expr>, Arc<Expr>),
}

impl Expr {
    /// Builds an atom, panicking on an invalid name. Use [`Atom::new`] for
    /// untrusted input.
    pub fn atom(name: &str) -> Expr {
        Expr::Atom(Atom::new(name).expect("invalid atom name"))
    }

    pub fn at() -> Expr {
        Expr::Atom(Atom::at())
    }

    pub fn arrow(source: Expr, target: Expr) -> Expr {
        Expr::Arrow(Arc::new(source), Arc::new(target))
    }

    pub fn meet(left: Expr, right: Expr) -> Expr {
        Expr::Meet(Arc::new(left), Arc::new(right))
    }

    /// Left-nested meet of a nonempty sequence; `None` when empty.
    pub fn meet_all<I: IntoIterator<Item = Expr>>(items: I) -> Option<Expr> {
        items.into_iter().reduce(Expr::meet)
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Expr::Atom(_))
    }

    pub fn is_arrow(&self) -> bool {
        matches!(self, Expr::Arrow(..))
    }

    pub fn is_meet(&self) -> bool {
        matches!(self, Expr::Meet(..))
    }

    /// True for the single atom `@`.
    pub fn is_at(&self) -> bool {
        matches!(self, Expr::Atom(a) if a.is_at())
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Expr::Atom(a) => Some(a),
            _ => None,
        }
    }

    /// Number of vertices of the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Atom(_) => 1,
            Expr::Arrow(a, b) | Expr::Meet(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Number of atom occurrences other than `@`.
    pub fn non_at_atoms(&self) -> usize {
        match self {
            Expr::Atom(a) => usize::from(!a.is_at()),
            Expr::Arrow(a, b) | Expr::Meet(a, b) => a.non_at_atoms() + b.non_at_atoms(),
        }
    }

    /// Distinct atoms in order of first occurrence.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<Atom>) {
        match self {
            Expr::Atom(a) => {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
            Expr::Arrow(a, b) | Expr::Meet(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// True when the tree is built from atoms and meets only.
    pub fn is_meet_of_atoms(&self) -> bool {
        match self {
            Expr::Atom(_) => true,
            Expr::Meet(a, b) => a.is_meet_of_atoms() && b.is_meet_of_atoms(),
            Expr::Arrow(..) => false,
        }
    }

    /// Operands of the maximal meet rooted here, left to right. A non-meet
    /// yields itself.
    pub fn conjuncts(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        self.collect_conjuncts(&mut out);
        out
    }

    fn collect_conjuncts<'a>(&'a self, out: &mut Vec<&'a Expr>) {
        match self {
            Expr::Meet(a, b) => {
                a.collect_conjuncts(out);
                b.collect_conjuncts(out);
            }
            other => out.push(other),
        }
    }

    pub fn child(&self, step: Step) -> Option<&Expr> {
        match (self, step) {
            (Expr::Arrow(a, _), Step::ArrowSource) => Some(a),
            (Expr::Arrow(_, b), Step::ArrowTarget) => Some(b),
            (Expr::Meet(a, _), Step::MeetLeft) => Some(a),
            (Expr::Meet(_, b), Step::MeetRight) => Some(b),
            _ => None,
        }
    }

    /// The subexpression at `pos`, if the position is valid.
    pub fn get(&self, pos: &Position) -> Option<&Expr> {
        pos.steps()
            .iter()
            .try_fold(self, |node, &step| node.child(step))
    }

    pub fn at_position(&self, pos: &Position) -> Result<&Expr, Error> {
        self.get(pos)
            .ok_or_else(|| Error::InvalidPosition(pos.clone()))
    }

    /// Returns a copy with the occurrence at `pos` replaced by `with`.
    pub fn replace_at(&self, pos: &Position, with: Expr) -> Result<Expr, Error> {
        self.replace_steps(pos.steps(), with)
            .ok_or_else(|| Error::InvalidPosition(pos.clone()))
    }

    fn replace_steps(&self, steps: &[Step], with: Expr) -> Option<Expr> {
        let Some((&first, rest)) = steps.split_first() else {
            return Some(with);
        };
        match (self, first) {
            (Expr::Arrow(a, b), Step::ArrowSource) => {
                Some(Expr::Arrow(Arc::new(a.replace_steps(rest, with)?), b.clone()))
            }
            (Expr::Arrow(a, b), Step::ArrowTarget) => {
                Some(Expr::Arrow(a.clone(), Arc::new(b.replace_steps(rest, with)?)))
            }
            (Expr::Meet(a, b), Step::MeetLeft) => {
                Some(Expr::Meet(Arc::new(a.replace_steps(rest, with)?), b.clone()))
            }
            (Expr::Meet(a, b), Step::MeetRight) => {
                Some(Expr::Meet(a.clone(), Arc::new(b.replace_steps(rest, with)?)))
            }
            _ => None,
        }
    }

    /// All occurrences in depth-first preorder. Item 0 is the whole
    /// expression and every enclosing occurrence precedes its parts.
    pub fn subexpressions(&self) -> Vec<(Position, &Expr)> {
        let mut out = Vec::with_capacity(self.size());
        let mut stack = vec![(Position::root(), self)];
        while let Some((pos, node)) = stack.pop() {
            match node {
                Expr::Atom(_) => {}
                Expr::Arrow(a, b) => {
                    stack.push((pos.child(Step::ArrowTarget), b));
                    stack.push((pos.child(Step::ArrowSource), a));
                }
                Expr::Meet(a, b) => {
                    stack.push((pos.child(Step::MeetRight), b));
                    stack.push((pos.child(Step::MeetLeft), a));
                }
            }
            out.push((pos, node));
        }
        out
    }

    /// Preorder nodes without positions; same order as [`Expr::subexpressions`].
    pub fn preorder(&self) -> Vec<&Expr> {
        let mut out = Vec::with_capacity(self.size());
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            if let Expr::Arrow(a, b) | Expr::Meet(a, b) = node {
                stack.push(b);
                stack.push(a);
            }
            out.push(node);
        }
        out
    }

    /// Count of arrow vertices from the root down to `pos`, counting the
    /// vertex at `pos` when it is itself an arrow.
    pub fn ebb(&self, pos: &Position) -> Result<usize, Error> {
        let mut node = self;
        let mut count = usize::from(node.is_arrow());
        for &step in pos.steps() {
            node = node
                .child(step)
                .ok_or_else(|| Error::InvalidPosition(pos.clone()))?;
            count += usize::from(node.is_arrow());
        }
        Ok(count)
    }

    /// Maximum ebb over all occurrences; 0 iff there is no arrow.
    pub fn arrow_depth(&self) -> usize {
        match self {
            Expr::Atom(_) => 0,
            Expr::Meet(a, b) => a.arrow_depth().max(b.arrow_depth()),
            Expr::Arrow(a, b) => 1 + a.arrow_depth().max(b.arrow_depth()),
        }
    }

    pub fn polarity(&self, pos: &Position) -> Result<Polarity, Error> {
        self.at_position(pos)?;
        Ok(pos.polarity())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self, Format::Ascii))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

impl FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// One step from a vertex to one of its children.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Step {
    #[serde(rename = "source")]
    ArrowSource,
    #[serde(rename = "target")]
    ArrowTarget,
    #[serde(rename = "left")]
    MeetLeft,
    #[serde(rename = "right")]
    MeetRight,
}

/// A root-to-node path. The empty position is the whole expression.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Position(Vec<Step>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// Same as [`Position::is_root`].
    pub fn is_empty(&self) -> bool {
        self.is_root()
    }

    pub fn child(&self, step: Step) -> Position {
        let mut steps = Vec::with_capacity(self.0.len() + 1);
        steps.extend_from_slice(&self.0);
        steps.push(step);
        Position(steps)
    }

    pub fn push(&mut self, step: Step) {
        self.0.push(step);
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Polarity of whatever occurrence this path leads to.
    pub fn polarity(&self) -> Polarity {
        self.0.iter().fold(Polarity::StrictlyPositive, |p, &step| {
            if step == Step::ArrowSource {
                p.flip()
            } else {
                p
            }
        })
    }
}

impl From<Vec<Step>> for Position {
    fn from(steps: Vec<Step>) -> Self {
        Position(steps)
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let names: Vec<&str> = self
            .0
            .iter()
            .map(|s| match s {
                Step::ArrowSource => "src",
                Step::ArrowTarget => "tgt",
                Step::MeetLeft => "l",
                Step::MeetRight => "r",
            })
            .collect();
        f.write_str(&names.join("."))
    }
}

/// Polarity of an occurrence. Strict positivity refines positivity: a
/// strictly positive occurrence is also positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Negative,
    Positive,
    StrictlyPositive,
}

impl Polarity {
    pub fn is_positive(self) -> bool {
        self != Polarity::Negative
    }

    /// Polarity after descending into an arrow source.
    fn flip(self) -> Polarity {
        match self {
            Polarity::Negative => Polarity::Positive,
            Polarity::Positive | Polarity::StrictlyPositive => Polarity::Negative,
        }
    }
}

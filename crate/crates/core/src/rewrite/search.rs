//! Bounded search for conversions under every rule except `dept`.
//!
//! States are kept in `slat`-canonical form, which absorbs `asso`, `comm`
//! and `idem` in both directions. The remaining moves are `dist` and
//! `absp` forwards (the latter with witnesses from a finite pool) and their
//! inverses taken modulo `slat`:
//!
//! - `(A -> B) & (A -> C)` to `A -> (B & C)`, optionally keeping one of the
//!   two arrows (an `idem` copy is split off first);
//! - dropping `X -> B` from a meet that also holds `A -> B` where the
//!   operands of `X` strictly include those of `A`.
//!
//! Every move is a composite of rule steps, so a `Confirmed` verdict is
//! sound. `Unknown` says nothing.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashSet, VecDeque};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::normal::canonical_with_text;
use crate::syntax::Expr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Verdict {
    Confirmed,
    Unknown,
}

impl Verdict {
    pub fn is_confirmed(self) -> bool {
        self == Verdict::Confirmed
    }
}

/// States are identified by a 128-bit hash of their canonical rendering.
type Fingerprint = u128;

fn fingerprint(text: &str) -> Fingerprint {
    let mut lo = DefaultHasher::new();
    0u8.hash(&mut lo);
    text.hash(&mut lo);
    let mut hi = DefaultHasher::new();
    1u8.hash(&mut hi);
    text.hash(&mut hi);
    (u128::from(hi.finish()) << 64) | u128::from(lo.finish())
}

/// Distinct `slat`-canonical subexpressions of `a` and `b`: the default
/// witness pool for `absp`.
pub fn default_witnesses(a: &Expr, b: &Expr) -> Vec<Expr> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for node in a.preorder().into_iter().chain(b.preorder()) {
        let (canon, text) = canonical_with_text(node);
        if seen.insert(text) {
            out.push(canon);
        }
    }
    out
}

/// Breadth-first exploration state for one side of the search.
struct Frontier {
    visited: HashSet<Fingerprint>,
    queue: VecDeque<Expr>,
    expanded: usize,
    budget: usize,
}

impl Frontier {
    fn new(start: &Expr, budget: usize) -> (Frontier, Fingerprint) {
        let (canon, text) = canonical_with_text(start);
        let fp = fingerprint(&text);
        let mut visited = HashSet::new();
        visited.insert(fp);
        let mut queue = VecDeque::new();
        queue.push_back(canon);
        (
            Frontier {
                visited,
                queue,
                expanded: 0,
                budget,
            },
            fp,
        )
    }

    fn exhausted(&self) -> bool {
        self.expanded >= self.budget || self.queue.is_empty()
    }

    /// Expands one state; returns the fingerprints discovered for the
    /// first time.
    fn expand_one(&mut self, witnesses: &[Expr]) -> Vec<Fingerprint> {
        let Some(state) = self.queue.pop_front() else {
            return Vec::new();
        };
        self.expanded += 1;
        let mut moves = Vec::new();
        neighbours(&state, witnesses, &mut moves);
        let mut fresh = Vec::new();
        for next in moves {
            let (canon, text) = canonical_with_text(&next);
            let fp = fingerprint(&text);
            if self.visited.insert(fp) {
                fresh.push(fp);
                // States past the remaining budget would never be expanded.
                if self.queue.len() < self.budget - self.expanded {
                    self.queue.push_back(canon);
                }
            }
        }
        fresh
    }
}

/// The set of states discovered from one start within a budget.
pub struct ConversionBall {
    visited: HashSet<Fingerprint>,
    pub expanded: usize,
}

impl ConversionBall {
    pub fn len(&self) -> usize {
        self.visited.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visited.is_empty()
    }

    pub fn contains(&self, e: &Expr) -> bool {
        self.visited
            .contains(&fingerprint(&canonical_with_text(e).1))
    }

    pub fn intersects(&self, other: &ConversionBall) -> bool {
        let (small, large) = if self.visited.len() <= other.visited.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.visited.iter().any(|fp| large.visited.contains(fp))
    }
}

/// Explores from `start` for up to `budget` expansions.
///
/// Exploration from one side never depends on the other, so
/// `convertible_bounded(a, b, k, w)` is `Confirmed` exactly when
/// `explore(a, k, w)` and `explore(b, k, w)` intersect.
pub fn explore(start: &Expr, budget: usize, witnesses: &[Expr]) -> ConversionBall {
    let witnesses = canonical_pool(witnesses);
    let (mut side, _) = Frontier::new(start, budget);
    while !side.exhausted() {
        side.expand_one(&witnesses);
    }
    ConversionBall {
        visited: side.visited,
        expanded: side.expanded,
    }
}

fn canonical_pool(witnesses: &[Expr]) -> Vec<Expr> {
    let mut seen = HashSet::new();
    witnesses
        .iter()
        .map(canonical_with_text)
        .filter(|(_, text)| seen.insert(text.clone()))
        .map(|(e, _)| e)
        .collect()
}

/// Searches from both `a` and `b`, up to `budget` expansions per side,
/// for a common state. `Confirmed` implies `a` and `b` are congruent.
pub fn convertible_bounded(a: &Expr, b: &Expr, budget: usize, witnesses: &[Expr]) -> Verdict {
    let witnesses = canonical_pool(witnesses);
    let (mut left, left_start) = Frontier::new(a, budget);
    let (mut right, right_start) = Frontier::new(b, budget);
    if left_start == right_start {
        return Verdict::Confirmed;
    }
    while !(left.exhausted() && right.exhausted()) {
        if !left.exhausted() {
            let fresh = left.expand_one(&witnesses);
            if fresh.iter().any(|fp| right.visited.contains(fp)) {
                return Verdict::Confirmed;
            }
        }
        if !right.exhausted() {
            let fresh = right.expand_one(&witnesses);
            if fresh.iter().any(|fp| left.visited.contains(fp)) {
                return Verdict::Confirmed;
            }
        }
    }
    Verdict::Unknown
}

/// One-move successors of a canonical state (not yet re-canonicalized).
fn neighbours(e: &Expr, witnesses: &[Expr], out: &mut Vec<Expr>) {
    match e {
        Expr::Atom(_) => {}
        Expr::Arrow(source, target) => {
            if let Expr::Meet(b, c) = &**target {
                out.push(Expr::meet(
                    Expr::Arrow(source.clone(), b.clone()),
                    Expr::Arrow(source.clone(), c.clone()),
                ));
            }
            for w in witnesses {
                out.push(Expr::meet(
                    e.clone(),
                    Expr::Arrow(Arc::new(Expr::meet((**source).clone(), w.clone())), target.clone()),
                ));
            }
            let mut inner = Vec::new();
            neighbours(source, witnesses, &mut inner);
            out.extend(
                inner
                    .drain(..)
                    .map(|s| Expr::Arrow(Arc::new(s), target.clone())),
            );
            neighbours(target, witnesses, &mut inner);
            out.extend(
                inner
                    .drain(..)
                    .map(|t| Expr::Arrow(source.clone(), Arc::new(t))),
            );
        }
        Expr::Meet(..) => meet_neighbours(e, witnesses, out),
    }
}

fn meet_neighbours(e: &Expr, witnesses: &[Expr], out: &mut Vec<Expr>) {
    let parts: Vec<&Expr> = e.conjuncts();
    let rebuild = |skip: &[usize], extra: Vec<Expr>| -> Expr {
        let kept = parts
            .iter()
            .enumerate()
            .filter(|(i, _)| !skip.contains(i))
            .map(|(_, p)| (*p).clone());
        Expr::meet_all(kept.chain(extra)).expect("a rebuilt meet is nonempty")
    };

    // Moves inside one operand.
    let mut inner = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        neighbours(part, witnesses, &mut inner);
        for replacement in inner.drain(..) {
            out.push(rebuild(&[i], vec![replacement]));
        }
    }

    for i in 0..parts.len() {
        for j in 0..parts.len() {
            if i == j {
                continue;
            }
            let (Expr::Arrow(s1, t1), Expr::Arrow(s2, t2)) = (parts[i], parts[j]) else {
                continue;
            };
            // Inverse dist, for each unordered pair once.
            if i < j && s1 == s2 {
                let merged = Expr::Arrow(s1.clone(), Arc::new(Expr::Meet(t1.clone(), t2.clone())));
                out.push(rebuild(&[i, j], vec![merged.clone()]));
                out.push(rebuild(&[j], vec![merged.clone()]));
                out.push(rebuild(&[i], vec![merged]));
            }
            // Inverse absp: parts[j] = (A & C) -> B is absorbed by parts[i] = A -> B.
            if t1 == t2 && strictly_extends(s2, s1) {
                out.push(rebuild(&[j], Vec::new()));
            }
        }
    }
}

/// Operands of canonical meet `wide` strictly include those of `narrow`.
fn strictly_extends(wide: &Expr, narrow: &Expr) -> bool {
    let wide = wide.conjuncts();
    let narrow = narrow.conjuncts();
    wide.len() > narrow.len() && narrow.iter().all(|n| wide.contains(n))
}

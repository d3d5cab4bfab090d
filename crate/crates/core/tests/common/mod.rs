#![allow(dead_code)]

use bcd::gen::{atom_set, random_expr};
use bcd::{Atom, Expr};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn e(s: &str) -> Expr {
    s.parse().unwrap_or_else(|err| panic!("{s}: {err}"))
}

/// Expressions with up to `max_nodes` vertices over the first `atoms`
/// atoms of `@, p, q, ...`, shrinking towards smaller sizes.
pub fn expr(max_nodes: usize, atoms: usize) -> impl Strategy<Value = Expr> {
    let atoms: Vec<Atom> = atom_set(atoms);
    (1..=max_nodes.max(1), any::<u64>()).prop_map(move |(nodes, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_expr(&mut rng, nodes, &atoms)
    })
}

/// Structurally recursive expressions, for tests that benefit from
/// structural shrinking.
pub fn tree(atoms: usize) -> impl Strategy<Value = Expr> {
    let leaf = proptest::sample::select(atom_set(atoms)).prop_map(Expr::Atom);
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::arrow(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::meet(a, b)),
        ]
    })
}

/// An expression together with one of its positions.
pub fn expr_and_position(
    max_nodes: usize,
    atoms: usize,
) -> impl Strategy<Value = (Expr, bcd::Position)> {
    expr(max_nodes, atoms).prop_flat_map(|e| {
        let n = e.size();
        (Just(e), 0..n).prop_map(|(e, i)| {
            let pos = e.subexpressions()[i].0.clone();
            (e, pos)
        })
    })
}

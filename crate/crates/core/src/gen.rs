//! Expression generators for tests, benchmarks and the self-test.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Atom, Expr};

/// A random tree with exactly `nodes` vertices (rounded down to odd).
///
/// The split point between left and right subtrees is uniform, which
/// gives trees of logarithmic expected height.
pub fn random_expr<R: Rng + ?Sized>(rng: &mut R, nodes: usize, atoms: &[Atom]) -> Expr {
    assert!(!atoms.is_empty(), "need at least one atom");
    let nodes = if nodes.is_multiple_of(2) { nodes.saturating_sub(1) } else { nodes }.max(1);
    build(rng, nodes, atoms)
}

fn build<R: Rng + ?Sized>(rng: &mut R, nodes: usize, atoms: &[Atom]) -> Expr {
    if nodes == 1 {
        return Expr::Atom(atoms.choose(rng).expect("nonempty").clone());
    }
    // Both subtrees have an odd number of vertices.
    let left = 2 * rng.random_range(0..(nodes - 1) / 2) + 1;
    let right = nodes - 1 - left;
    let l = build(rng, left, atoms);
    let r = build(rng, right, atoms);
    if rng.random_bool(0.5) {
        Expr::arrow(l, r)
    } else {
        Expr::meet(l, r)
    }
}

/// [`random_expr`] driven by a ChaCha stream seeded with `seed`.
pub fn seeded_expr(seed: u64, nodes: usize, atoms: &[Atom]) -> Expr {
    random_expr(&mut ChaCha8Rng::seed_from_u64(seed), nodes, atoms)
}

/// A random tree with at most `max_nodes` vertices.
pub fn random_expr_up_to<R: Rng + ?Sized>(rng: &mut R, max_nodes: usize, atoms: &[Atom]) -> Expr {
    let nodes = rng.random_range(1..=max_nodes.max(1));
    random_expr(rng, nodes, atoms)
}

/// Every expression over `atoms` with at most `max_nodes` vertices, by
/// increasing size.
pub fn enumerate_exprs(atoms: &[Atom], max_nodes: usize) -> Vec<Expr> {
    // by_size[k] holds the trees with 2k + 1 vertices.
    let mut by_size: Vec<Vec<Expr>> = Vec::new();
    let mut size = 1;
    while size <= max_nodes {
        let level = if size == 1 {
            atoms.iter().cloned().map(Expr::Atom).collect()
        } else {
            let mut level = Vec::new();
            for op in 0..2 {
                for left in (1..size - 1).step_by(2) {
                    let right = size - 1 - left;
                    for l in &by_size[left / 2] {
                        for r in &by_size[right / 2] {
                            level.push(if op == 0 {
                                Expr::arrow(l.clone(), r.clone())
                            } else {
                                Expr::meet(l.clone(), r.clone())
                            });
                        }
                    }
                }
            }
            level
        };
        by_size.push(level);
        size += 2;
    }
    by_size.into_iter().flatten().collect()
}

/// Atoms named `@`, `p`, `q`, ... (the first `count` of them).
pub fn atom_set(count: usize) -> Vec<Atom> {
    const NAMES: [&str; 8] = ["@", "p", "q", "r", "s", "t", "u", "v"];
    NAMES[..count.min(NAMES.len())]
        .iter()
        .map(|n| Atom::new(n).expect("valid atom"))
        .collect()
}

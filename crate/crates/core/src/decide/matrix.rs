use std::collections::HashMap;

use crate::syntax::{Atom, Expr};

/// Pairwise `⊆` over the occurrences of one root, numbered in depth-first
/// preorder. Entry `(i, j)` is `exprs[i] ⊆ exprs[j]`.
#[derive(Clone, Debug)]
pub struct SubtypeMatrix {
    pub exprs: Vec<Expr>,
    bits: Vec<bool>,
}

impl SubtypeMatrix {
    pub fn len(&self) -> usize {
        self.exprs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exprs.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.exprs.len() + j]
    }

    pub fn rows(&self) -> Vec<Vec<bool>> {
        let n = self.exprs.len();
        self.bits.chunks(n.max(1)).map(|r| r.to_vec()).collect()
    }
}

/// A factor over occurrence indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct OccurrenceFactor {
    pub head: u32,
    pub args: Vec<usize>,
}

/// Factors of every occurrence, sorted by `(head, arity)`. Arguments are
/// occurrence indices, always greater than the index of the occurrence
/// whose factor they belong to.
pub(crate) fn occurrence_factors(nodes: &[&Expr]) -> Vec<Vec<OccurrenceFactor>> {
    let n = nodes.len();
    let mut children = vec![(0usize, 0usize); n];
    // Preorder: the left child follows its parent; the right child follows
    // the left subtree.
    let mut sizes = vec![1usize; n];
    for i in (0..n).rev() {
        if !nodes[i].is_atom() {
            let left = i + 1;
            let right = left + sizes[left];
            children[i] = (left, right);
            sizes[i] = 1 + sizes[left] + sizes[right];
        }
    }

    let mut atom_ids: HashMap<&Atom, u32> = HashMap::new();
    let mut out: Vec<Vec<OccurrenceFactor>> = vec![Vec::new(); n];
    for i in (0..n).rev() {
        let (l, r) = children[i];
        let list = match nodes[i] {
            Expr::Atom(a) => {
                let next = atom_ids.len() as u32;
                let head = *atom_ids.entry(a).or_insert(next);
                vec![OccurrenceFactor {
                    head,
                    args: Vec::new(),
                }]
            }
            Expr::Meet(..) => {
                let mut v = out[l].clone();
                v.extend(out[r].iter().cloned());
                v.sort_by_key(|f| (f.head, f.args.len()));
                v
            }
            Expr::Arrow(..) => out[r]
                .iter()
                .map(|f| {
                    let mut args = Vec::with_capacity(f.args.len() + 1);
                    args.push(l);
                    args.extend_from_slice(&f.args);
                    OccurrenceFactor { head: f.head, args }
                })
                .collect(),
        };
        out[i] = list;
    }
    out
}

/// Fills the matrix in decreasing order of `i + j`. Deciding `(i, j)`
/// consults only pairs of factor arguments, whose index sum is larger, so
/// every entry it reads is already final.
pub fn subtype_matrix(root: &Expr) -> SubtypeMatrix {
    let nodes = root.preorder();
    let n = nodes.len();
    let factors = occurrence_factors(&nodes);
    let mut bits = vec![false; n * n];

    for sum in (0..=2 * (n - 1)).rev() {
        let lo = sum.saturating_sub(n - 1);
        let hi = sum.min(n - 1);
        for i in lo..=hi {
            let j = sum - i;
            bits[i * n + j] = entry(&factors[i], &factors[j], &bits, n);
        }
    }

    SubtypeMatrix {
        exprs: nodes.into_iter().cloned().collect(),
        bits,
    }
}

/// Every factor of the larger side must be matched by a factor of the
/// smaller side with the same head and arity and contravariantly related
/// arguments.
fn entry(sub: &[OccurrenceFactor], sup: &[OccurrenceFactor], bits: &[bool], n: usize) -> bool {
    sup.iter().all(|g| {
        let key = (g.head, g.args.len());
        let start = sub.partition_point(|f| (f.head, f.args.len()) < key);
        sub[start..]
            .iter()
            .take_while(|f| (f.head, f.args.len()) == key)
            .any(|f| {
                g.args
                    .iter()
                    .zip(&f.args)
                    .all(|(&b, &a)| bits[b * n + a])
            })
    })
}

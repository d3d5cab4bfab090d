//! The finite models `F(n)`: expressions modulo the congruence generated by
//! the rules together with `dept` at depth `n`.
//!
//! The carrier is enumerated level by level. Level 0 primes are the atoms;
//! level `k` primes are the atoms plus every `a -> b` with `a`, `b` in the
//! level `k - 1` carrier. Each level's candidates are the meets of
//! nonempty prime subsets (binary-counter order), deduplicated up to `~`
//! keeping the first. Arrows are interpreted by truncating at depth `n`.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::decide::{equiv, Decider, NodeId};
use crate::error::{Error, Result};
use crate::rewrite::{dept_normal_form, slat_canonical};
use crate::syntax::{Atom, Expr};

/// `s(0, m) = m`, `s(n + 1, m) = 2^s(n, m)`.
pub fn stack_of_twos(n: u32, m: u64) -> Result<u64> {
    (0..n).try_fold(m, |acc, _| {
        u32::try_from(acc)
            .ok()
            .and_then(|exp| 2u64.checked_pow(exp))
            .ok_or_else(|| Error::Overflow(format!("s({n}, {m})")))
    })
}

/// A value of the stack-of-twos function with its arguments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StackOfTwos {
    pub n: u32,
    pub m: u64,
    pub value: u64,
}

impl StackOfTwos {
    pub fn new(n: u32, m: u64) -> Result<StackOfTwos> {
        Ok(StackOfTwos {
            n,
            m,
            value: stack_of_twos(n, m)?,
        })
    }

    /// The carrier-size bound `s(n + 1, m + n)` for `m` atoms at depth `n`.
    pub fn carrier_bound(atoms: usize, depth: usize) -> Result<StackOfTwos> {
        StackOfTwos::new(depth as u32 + 1, (atoms + depth) as u64)
    }
}

/// Caps on carrier enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_atoms: usize,
    pub max_depth: usize,
    /// Largest number of meet candidates enumerated at one level.
    pub max_candidates: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_atoms: 2,
            max_depth: 1,
            max_candidates: 4096,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Model {
    pub atoms: Vec<Atom>,
    pub depth: usize,
    pub carrier: Vec<Expr>,
    pub meet_table: Vec<Vec<usize>>,
    pub arrow_table: Vec<Vec<usize>>,
    #[serde(skip)]
    atom_index: HashMap<Atom, usize>,
}

impl Model {
    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    /// `x ⊆ y` in the table order: `x = x & y`.
    pub fn le(&self, x: usize, y: usize) -> bool {
        self.meet_table[x][y] == x
    }

    pub fn atom_index(&self, atom: &Atom) -> Option<usize> {
        self.atom_index.get(atom).copied()
    }

    /// Carrier index of the class of `e`, folding through the tables.
    pub fn eval(&self, e: &Expr) -> Result<usize> {
        Ok(match e {
            Expr::Atom(a) => self
                .atom_index(a)
                .ok_or_else(|| Error::UnknownAtom(a.name().to_string()))?,
            Expr::Meet(l, r) => self.meet_table[self.eval(l)?][self.eval(r)?],
            Expr::Arrow(l, r) => self.arrow_table[self.eval(l)?][self.eval(r)?],
        })
    }

    /// Carrier index of the representative `~` to the depth-`n` truncation
    /// of `e`, found without the tables.
    pub fn representative_of(&self, e: &Expr) -> Result<usize> {
        for a in e.atoms() {
            if self.atom_index(&a).is_none() {
                return Err(Error::UnknownAtom(a.name().to_string()));
            }
        }
        let truncated = dept_normal_form(e, self.depth);
        self.carrier
            .iter()
            .position(|c| equiv(c, &truncated))
            .ok_or_else(|| Error::LimitExceeded(format!("no representative for {truncated}")))
    }

    pub fn bound(&self) -> Result<StackOfTwos> {
        StackOfTwos::carrier_bound(self.atoms.len(), self.depth)
    }
}

/// Builds `F(n)` over `atoms` under the default [`Limits`].
pub fn build_model(atoms: &[Atom], n: usize) -> Result<Model> {
    build_model_with(atoms, n, Limits::default())
}

pub fn build_model_with(atoms: &[Atom], n: usize, limits: Limits) -> Result<Model> {
    let mut atoms: Vec<Atom> = atoms.to_vec();
    atoms.sort();
    atoms.dedup();
    if !atoms.iter().any(Atom::is_at) {
        return Err(Error::MissingAtAtom);
    }
    if atoms.len() > limits.max_atoms {
        return Err(Error::LimitExceeded(format!(
            "{} atoms (cap {})",
            atoms.len(),
            limits.max_atoms
        )));
    }
    if n > limits.max_depth {
        return Err(Error::LimitExceeded(format!(
            "depth {n} (cap {})",
            limits.max_depth
        )));
    }

    let mut classes = Classes::default();
    let mut carrier: Vec<NodeId> = Vec::new();
    for level in 0..=n {
        let mut primes: Vec<Expr> = atoms.iter().cloned().map(Expr::Atom).collect();
        let previous: Vec<Expr> = carrier.iter().map(|&id| classes.decider.expr(id)).collect();
        if level > 0 {
            for a in &previous {
                for b in &previous {
                    primes.push(Expr::arrow(a.clone(), b.clone()));
                }
            }
        }
        let count = 1u128
            .checked_shl(primes.len() as u32)
            .map(|c| c - 1)
            .filter(|&c| c <= limits.max_candidates as u128)
            .ok_or_else(|| {
                Error::LimitExceeded(format!(
                    "2^{} - 1 candidates at level {level} (cap {})",
                    primes.len(),
                    limits.max_candidates
                ))
            })?;

        classes.reset();
        carrier.clear();
        for mask in 1..=count {
            let members = primes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, p)| p.clone());
            let candidate = slat_canonical(&Expr::meet_all(members).expect("mask is nonzero"));
            let id = classes.decider.insert(&candidate);
            if classes.lookup(id).is_none() {
                classes.add(id, carrier.len());
                carrier.push(id);
            }
        }
    }

    let exprs: Vec<Expr> = carrier.iter().map(|&id| classes.decider.expr(id)).collect();
    let size = exprs.len();
    let mut meet_table = vec![vec![0; size]; size];
    let mut arrow_table = vec![vec![0; size]; size];
    for i in 0..size {
        for j in 0..size {
            let meet = Expr::meet(exprs[i].clone(), exprs[j].clone());
            meet_table[i][j] = classes.find(&meet)?;
            let arrow = dept_normal_form(&Expr::arrow(exprs[i].clone(), exprs[j].clone()), n);
            arrow_table[i][j] = classes.find(&arrow)?;
        }
    }
    let mut atom_index = HashMap::new();
    for a in &atoms {
        atom_index.insert(a.clone(), classes.find(&Expr::Atom(a.clone()))?);
    }

    Ok(Model {
        atoms,
        depth: n,
        carrier: exprs,
        meet_table,
        arrow_table,
        atom_index,
    })
}

/// Head atoms with arities: the coarse shape of an expression's factors.
type Signature = BTreeSet<(Atom, usize)>;

/// Representatives bucketed by factor signature, which congruent
/// expressions share.
#[derive(Default)]
struct Classes {
    decider: Decider,
    buckets: HashMap<Signature, Vec<(NodeId, usize)>>,
}

impl Classes {
    fn reset(&mut self) {
        self.buckets.clear();
    }

    fn add(&mut self, id: NodeId, index: usize) {
        let sig = self.decider.signature(id);
        self.buckets.entry(sig).or_default().push((id, index));
    }

    fn lookup(&mut self, id: NodeId) -> Option<usize> {
        let sig = self.decider.signature(id);
        let bucket = self.buckets.get(&sig)?.clone();
        bucket
            .into_iter()
            .find(|&(rep, _)| self.decider.equiv_ids(rep, id))
            .map(|(_, index)| index)
    }

    fn find(&mut self, e: &Expr) -> Result<usize> {
        let id = self.decider.insert(e);
        self.lookup(id)
            .ok_or_else(|| Error::LimitExceeded(format!("no representative for {e}")))
    }
}

/// `F(n) ⊨ a = b`, decided as `~` between the depth-`n` truncations.
pub fn satisfies_eq(n: usize, a: &Expr, b: &Expr) -> bool {
    let mut d = Decider::new();
    d.equiv(&dept_normal_form(a, n), &dept_normal_form(b, n))
}

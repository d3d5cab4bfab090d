//! Deciding `⊆` and `~` by factor matching.
//!
//! `a ⊆ b` holds iff every factor `(B1, ..., Bt; p)` of `b` is matched by
//! some factor `(A1, ..., At; p)` of `a` with the same head and arity and
//! `Bi ⊆ Ai` for every `i` (arguments compare contravariantly). Factor
//! arguments are proper subexpressions, so the recursion is well founded;
//! memoizing it on pairs of subexpressions makes it polynomial.
//!
//! [`Decider`] interns expressions so structurally equal subterms share a
//! memo entry. [`subtype_matrix`] is a second, table-filling implementation
//! over the occurrences of one root.

mod matrix;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::syntax::{Atom, Expr};

pub(crate) use matrix::occurrence_factors;
pub use matrix::{subtype_matrix, SubtypeMatrix};

pub type NodeId = u32;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Atom(u32),
    Arrow(NodeId, NodeId),
    Meet(NodeId, NodeId),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct FactorIds {
    head: u32,
    args: Box<[NodeId]>,
}

impl FactorIds {
    fn key(&self) -> (u32, usize) {
        (self.head, self.args.len())
    }
}

/// An interning arena with a memo table for `⊆`.
///
/// Answers never depend on what was asked before; the memo only caches
/// results for structurally equal subterms.
#[derive(Default)]
pub struct Decider {
    nodes: Vec<Node>,
    index: HashMap<Node, NodeId>,
    atoms: HashMap<Atom, u32>,
    atom_names: Vec<Atom>,
    factors: Vec<Option<Arc<[FactorIds]>>>,
    memo: HashMap<(NodeId, NodeId), bool>,
}

impl Decider {
    pub fn new() -> Decider {
        Decider::default()
    }

    /// Interns `e`, returning its node id.
    pub fn insert(&mut self, e: &Expr) -> NodeId {
        // Post-order with an explicit stack so deep trees are fine.
        enum Visit<'a> {
            Enter(&'a Expr),
            Exit(&'a Expr),
        }
        let mut stack = vec![Visit::Enter(e)];
        let mut done: Vec<NodeId> = Vec::new();
        while let Some(visit) = stack.pop() {
            match visit {
                Visit::Enter(node) => match node {
                    Expr::Atom(a) => {
                        let atom = self.atom_id(a);
                        done.push(self.intern(Node::Atom(atom)));
                    }
                    Expr::Arrow(l, r) | Expr::Meet(l, r) => {
                        stack.push(Visit::Exit(node));
                        stack.push(Visit::Enter(r));
                        stack.push(Visit::Enter(l));
                    }
                },
                Visit::Exit(node) => {
                    let r = done.pop().expect("right child interned");
                    let l = done.pop().expect("left child interned");
                    let key = if node.is_arrow() {
                        Node::Arrow(l, r)
                    } else {
                        Node::Meet(l, r)
                    };
                    done.push(self.intern(key));
                }
            }
        }
        done.pop().expect("root interned")
    }

    fn atom_id(&mut self, a: &Atom) -> u32 {
        if let Some(&id) = self.atoms.get(a) {
            return id;
        }
        let id = self.atom_names.len() as u32;
        self.atom_names.push(a.clone());
        self.atoms.insert(a.clone(), id);
        id
    }

    fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node);
        self.factors.push(None);
        self.index.insert(node, id);
        id
    }

    /// Number of distinct interned subterms.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Rebuilds the expression for an interned id.
    pub fn expr(&self, id: NodeId) -> Expr {
        match self.nodes[id as usize] {
            Node::Atom(a) => Expr::Atom(self.atom_names[a as usize].clone()),
            Node::Arrow(l, r) => Expr::arrow(self.expr(l), self.expr(r)),
            Node::Meet(l, r) => Expr::meet(self.expr(l), self.expr(r)),
        }
    }

    /// Factors of an interned node, deduplicated and sorted by head then
    /// arity.
    fn factors_of(&mut self, id: NodeId) -> Arc<[FactorIds]> {
        if let Some(f) = &self.factors[id as usize] {
            return f.clone();
        }
        let mut list: Vec<FactorIds> = match self.nodes[id as usize] {
            Node::Atom(a) => vec![FactorIds {
                head: a,
                args: Box::new([]),
            }],
            Node::Meet(l, r) => {
                let mut v = self.factors_of(l).to_vec();
                v.extend(self.factors_of(r).iter().cloned());
                v
            }
            Node::Arrow(s, t) => self
                .factors_of(t)
                .iter()
                .map(|f| {
                    let mut args = Vec::with_capacity(f.args.len() + 1);
                    args.push(s);
                    args.extend_from_slice(&f.args);
                    FactorIds {
                        head: f.head,
                        args: args.into_boxed_slice(),
                    }
                })
                .collect(),
        };
        list.sort_by(|x, y| x.key().cmp(&y.key()).then_with(|| x.args.cmp(&y.args)));
        list.dedup();
        let shared: Arc<[FactorIds]> = list.into();
        self.factors[id as usize] = Some(shared.clone());
        shared
    }

    /// `(head, arity)` of every factor. Equal for congruent expressions.
    pub fn signature(&mut self, id: NodeId) -> BTreeSet<(Atom, usize)> {
        self.factors_of(id)
            .iter()
            .map(|f| (self.atom_names[f.head as usize].clone(), f.args.len()))
            .collect()
    }

    /// `sub ⊆ sup` on interned ids.
    pub fn subseteq_ids(&mut self, sub: NodeId, sup: NodeId) -> bool {
        if sub == sup {
            return true;
        }
        if let Some(&known) = self.memo.get(&(sub, sup)) {
            return known;
        }
        let sub_factors = self.factors_of(sub);
        let sup_factors = self.factors_of(sup);
        let holds = sup_factors
            .iter()
            .all(|g| self.find_match(&sub_factors, g).is_some());
        self.memo.insert((sub, sup), holds);
        holds
    }

    /// Index in `candidates` of a factor matching the obligation `g`.
    fn find_match(&mut self, candidates: &[FactorIds], g: &FactorIds) -> Option<usize> {
        let key = g.key();
        let start = candidates.partition_point(|f| f.key() < key);
        (start..candidates.len())
            .take_while(|&i| candidates[i].key() == key)
            .find(|&i| {
                let f = &candidates[i];
                g.args
                    .iter()
                    .zip(f.args.iter())
                    .all(|(&b, &a)| self.subseteq_ids(b, a))
            })
    }

    pub fn subseteq(&mut self, a: &Expr, b: &Expr) -> bool {
        let a = self.insert(a);
        let b = self.insert(b);
        self.subseteq_ids(a, b)
    }

    pub fn equiv_ids(&mut self, a: NodeId, b: NodeId) -> bool {
        self.subseteq_ids(a, b) && self.subseteq_ids(b, a)
    }

    pub fn equiv(&mut self, a: &Expr, b: &Expr) -> bool {
        let a = self.insert(a);
        let b = self.insert(b);
        self.equiv_ids(a, b)
    }

    fn factor_text(&self, f: &FactorIds) -> String {
        let args: Vec<Expr> = f.args.iter().map(|&a| self.expr(a)).collect();
        crate::factors::factor_to_expr(&crate::factors::Factor {
            args,
            head: self.atom_names[f.head as usize].clone(),
        })
        .to_string()
    }

    fn explain_ids(&mut self, sub: NodeId, sup: NodeId) -> Explanation {
        let holds = self.subseteq_ids(sub, sup);
        let sub_factors = self.factors_of(sub);
        let sup_factors = self.factors_of(sup);
        let mut obligations = Vec::new();
        for g in sup_factors.iter() {
            let matched = self.find_match(&sub_factors, g);
            let obligation = match matched {
                Some(i) => {
                    let f = &sub_factors[i];
                    Obligation {
                        factor: self.factor_text(g),
                        matched_by: Some(self.factor_text(f)),
                        arguments: g
                            .args
                            .iter()
                            .zip(f.args.iter())
                            .map(|(&b, &a)| self.explain_ids(b, a))
                            .collect(),
                        rejected: Vec::new(),
                    }
                }
                None => {
                    let key = g.key();
                    let rejected = sub_factors
                        .iter()
                        .filter(|f| f.key() == key)
                        .map(|f| {
                            let failing = g
                                .args
                                .iter()
                                .zip(f.args.iter())
                                .find(|&(&b, &a)| !self.subseteq_ids(b, a))
                                .map(|(&b, &a)| (b, a))
                                .expect("a rejected candidate has a failing argument");
                            Rejection {
                                factor: self.factor_text(f),
                                because: self.explain_ids(failing.0, failing.1),
                            }
                        })
                        .collect();
                    Obligation {
                        factor: self.factor_text(g),
                        matched_by: None,
                        arguments: Vec::new(),
                        rejected,
                    }
                }
            };
            let failed = obligation.matched_by.is_none();
            obligations.push(obligation);
            if failed {
                break;
            }
        }
        Explanation {
            sub: self.expr(sub).to_string(),
            sup: self.expr(sup).to_string(),
            holds,
            obligations,
        }
    }
}

/// The factor-matching derivation behind one `⊆` query. When the query
/// fails, the obligations stop at the first unmatched factor.
#[derive(Clone, Debug, Serialize)]
pub struct Explanation {
    pub sub: String,
    pub sup: String,
    pub holds: bool,
    pub obligations: Vec<Obligation>,
}

/// One factor of the right-hand side and how it was (or was not) matched.
#[derive(Clone, Debug, Serialize)]
pub struct Obligation {
    pub factor: String,
    pub matched_by: Option<String>,
    /// Contravariant argument checks `Bi ⊆ Ai` for the matching factor.
    pub arguments: Vec<Explanation>,
    /// Same-head, same-arity candidates and a failing argument for each.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rejected: Vec<Rejection>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Rejection {
    pub factor: String,
    pub because: Explanation,
}

/// `a ⊆ b`.
pub fn subseteq(a: &Expr, b: &Expr) -> bool {
    Decider::new().subseteq(a, b)
}

/// `a ~ b`, i.e. `a ⊆ b` and `b ⊆ a`.
pub fn equiv(a: &Expr, b: &Expr) -> bool {
    Decider::new().equiv(a, b)
}

/// The factor-matching tree for `a ⊆ b`.
pub fn explain(a: &Expr, b: &Expr) -> Explanation {
    let mut d = Decider::new();
    let a = d.insert(a);
    let b = d.insert(b);
    d.explain_ids(a, b)
}

//! The rewrite rules of the equational presentation, their restricted
//! forms, terminating normalizers, and a bounded conversion oracle.
//!
//! | rule      | left-hand side      | right-hand side                  |
//! |-----------|---------------------|----------------------------------|
//! | `asso`    | `A & (B & C)`       | `(A & B) & C`                    |
//! | `asso_inv`| `(A & B) & C`       | `A & (B & C)`                    |
//! | `comm`    | `A & B`             | `B & A`                          |
//! | `idem`    | `A`                 | `A & A`                          |
//! | `absp`    | `A -> B`            | `(A -> B) & ((A & C) -> B)`      |
//! | `dist`    | `A -> (B & C)`      | `(A -> B) & (A -> C)`            |
//! | `dept`    | `B` at ebb `> n`    | `@`                              |
//!
//! `absp` carries its `C` as a witness and `dept` its depth parameter `n`.

mod normal;
mod search;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax::{Expr, Position, Step};

pub use normal::{
    dept_normal_form, dist_normal_form, reduce_to_normal_form, slat_canonical, Terminating,
};
pub use search::{
    convertible_bounded, default_witnesses, explore, ConversionBall, Verdict,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Asso,
    AssoInv,
    Comm,
    Idem,
    Absp,
    Dist,
    Dept,
}

impl RuleKind {
    pub const ALL: [RuleKind; 7] = [
        RuleKind::Asso,
        RuleKind::AssoInv,
        RuleKind::Comm,
        RuleKind::Idem,
        RuleKind::Absp,
        RuleKind::Dist,
        RuleKind::Dept,
    ];

    /// Every rule except `dept`; together they generate the congruence.
    pub const REDO: [RuleKind; 6] = [
        RuleKind::Asso,
        RuleKind::AssoInv,
        RuleKind::Comm,
        RuleKind::Idem,
        RuleKind::Absp,
        RuleKind::Dist,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::Asso => "asso",
            RuleKind::AssoInv => "asso_inv",
            RuleKind::Comm => "comm",
            RuleKind::Idem => "idem",
            RuleKind::Absp => "absp",
            RuleKind::Dist => "dist",
            RuleKind::Dept => "dept",
        }
    }

    /// The semilattice rules, whose closure is `slat`.
    pub fn is_slat(self) -> bool {
        matches!(
            self,
            RuleKind::Asso | RuleKind::AssoInv | RuleKind::Comm | RuleKind::Idem
        )
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Depth parameter of `dept`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Depth {
    Finite(usize),
    /// `dept` at infinite depth has no redexes.
    Infinite,
}

impl Serialize for Depth {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Depth::Finite(n) => s.serialize_u64(*n as u64),
            Depth::Infinite => s.serialize_str("infinity"),
        }
    }
}

impl<'de> Deserialize<'de> for Depth {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(Depth::Finite(n as usize)),
            Raw::Word(w) if w == "infinity" => Ok(Depth::Infinite),
            Raw::Word(w) => Err(serde::de::Error::custom(format!("bad depth `{w}`"))),
        }
    }
}

/// A rule together with the parameters it needs: the depth for `dept`,
/// the witness `C` for `absp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub kind: RuleKind,
    pub depth: Option<Depth>,
    pub witness: Option<Expr>,
}

impl Rule {
    pub fn new(kind: RuleKind) -> Rule {
        Rule {
            kind,
            depth: None,
            witness: None,
        }
    }

    pub fn absp(witness: Expr) -> Rule {
        Rule {
            kind: RuleKind::Absp,
            depth: None,
            witness: Some(witness),
        }
    }

    pub fn dept(depth: usize) -> Rule {
        Rule {
            kind: RuleKind::Dept,
            depth: Some(Depth::Finite(depth)),
            witness: None,
        }
    }

    pub fn dept_infinite() -> Rule {
        Rule {
            kind: RuleKind::Dept,
            depth: Some(Depth::Infinite),
            witness: None,
        }
    }

    fn require_witness(&self) -> Result<&Expr> {
        self.witness.as_ref().ok_or(Error::MissingParameter {
            rule: "absp",
            parameter: "witness",
        })
    }

    fn require_depth(&self) -> Result<Depth> {
        self.depth.ok_or(Error::MissingParameter {
            rule: "dept",
            parameter: "depth",
        })
    }

    fn check_parameters(&self) -> Result<()> {
        match self.kind {
            RuleKind::Absp => self.require_witness().map(|_| ()),
            RuleKind::Dept => self.require_depth().map(|_| ()),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, &self.witness, self.depth) {
            (RuleKind::Absp, Some(c), _) => write!(f, "absp[{c}]"),
            (RuleKind::Dept, _, Some(Depth::Finite(n))) => write!(f, "dept[{n}]"),
            (RuleKind::Dept, _, Some(Depth::Infinite)) => write!(f, "dept[infinity]"),
            (kind, _, _) => f.write_str(kind.name()),
        }
    }
}

/// Does the left-hand side of `kind` match `node`, ignoring context?
fn matches_locally(kind: RuleKind, node: &Expr, restricted: bool) -> bool {
    match (kind, node) {
        (RuleKind::Asso, Expr::Meet(_, r)) => r.is_meet(),
        (RuleKind::AssoInv, Expr::Meet(l, _)) => l.is_meet(),
        (RuleKind::Comm, Expr::Meet(l, r)) => !restricted || (!l.is_meet() && !r.is_meet()),
        (RuleKind::Idem, node) => !restricted || node.is_atom(),
        (RuleKind::Absp, Expr::Arrow(..)) => true,
        (RuleKind::Dist, Expr::Arrow(_, t)) => t.is_meet(),
        _ => false,
    }
}

/// Restricted dept redexes: intersections of atoms (a lone non-`@` atom
/// included) and `@ -> @`.
fn dept_restricted_shape(node: &Expr) -> bool {
    match node {
        Expr::Atom(a) => !a.is_at(),
        Expr::Meet(..) => node.is_meet_of_atoms(),
        Expr::Arrow(s, t) => s.is_at() && t.is_at(),
    }
}

/// All positions where `rule` applies, in depth-first preorder.
///
/// With `restricted`, `idem` is confined to atoms, `comm` to meets of two
/// non-meets, and `dept` to intersections of atoms and `@ -> @`. `dept`
/// never matches an occurrence that already is the atom `@`.
pub fn redexes(e: &Expr, rule: &Rule, restricted: bool) -> Result<Vec<Position>> {
    rule.check_parameters()?;
    let depth = match rule.kind {
        RuleKind::Dept => match rule.require_depth()? {
            Depth::Finite(n) => Some(n),
            Depth::Infinite => return Ok(Vec::new()),
        },
        _ => None,
    };
    let mut walk = RedexWalk {
        kind: rule.kind,
        depth,
        restricted,
        path: Vec::new(),
        out: Vec::new(),
    };
    walk.visit(e, 0);
    Ok(walk.out)
}

struct RedexWalk {
    kind: RuleKind,
    /// Set for `dept` only.
    depth: Option<usize>,
    restricted: bool,
    path: Vec<Step>,
    out: Vec<Position>,
}

impl RedexWalk {
    fn visit(&mut self, node: &Expr, parent_ebb: usize) {
        let ebb = parent_ebb + usize::from(node.is_arrow());
        let hit = match self.depth {
            Some(n) => {
                ebb > n && !node.is_at() && (!self.restricted || dept_restricted_shape(node))
            }
            None => matches_locally(self.kind, node, self.restricted),
        };
        if hit {
            self.out.push(Position::from(self.path.clone()));
        }
        let (steps, l, r) = match node {
            Expr::Atom(_) => return,
            Expr::Arrow(a, b) => ([Step::ArrowSource, Step::ArrowTarget], a, b),
            Expr::Meet(a, b) => ([Step::MeetLeft, Step::MeetRight], a, b),
        };
        for (step, child) in steps.into_iter().zip([l, r]) {
            self.path.push(step);
            self.visit(child, ebb);
            self.path.pop();
        }
    }
}

/// Is `pos` an (unrestricted) redex of `rule` in `e`?
pub fn is_redex(e: &Expr, rule: &Rule, pos: &Position) -> Result<bool> {
    rule.check_parameters()?;
    let node = e.at_position(pos)?;
    if rule.kind == RuleKind::Dept {
        return Ok(match rule.require_depth()? {
            Depth::Infinite => false,
            Depth::Finite(n) => !node.is_at() && e.ebb(pos)? > n,
        });
    }
    Ok(matches_locally(rule.kind, node, false))
}

/// Rewrites exactly the occurrence at `pos` by one step of `rule`.
pub fn apply(e: &Expr, rule: &Rule, pos: &Position) -> Result<Expr> {
    if !is_redex(e, rule, pos)? {
        return Err(Error::NotARedex {
            rule: rule.kind.name(),
            position: pos.clone(),
        });
    }
    let node = e.at_position(pos)?;
    let replacement = contract(node, rule)?;
    e.replace_at(pos, replacement)
}

/// Right-hand side for a node already known to match.
fn contract(node: &Expr, rule: &Rule) -> Result<Expr> {
    Ok(match (rule.kind, node) {
        (RuleKind::Asso, Expr::Meet(a, bc)) => match &**bc {
            Expr::Meet(b, c) => Expr::Meet(
                Expr::Meet(a.clone(), b.clone()).into(),
                c.clone(),
            ),
            _ => unreachable!("checked by matches_locally"),
        },
        (RuleKind::AssoInv, Expr::Meet(ab, c)) => match &**ab {
            Expr::Meet(a, b) => Expr::Meet(
                a.clone(),
                Expr::Meet(b.clone(), c.clone()).into(),
            ),
            _ => unreachable!("checked by matches_locally"),
        },
        (RuleKind::Comm, Expr::Meet(a, b)) => Expr::Meet(b.clone(), a.clone()),
        (RuleKind::Idem, node) => Expr::meet(node.clone(), node.clone()),
        (RuleKind::Absp, Expr::Arrow(a, b)) => {
            let c = rule.require_witness()?.clone();
            Expr::meet(
                node.clone(),
                Expr::Arrow(Expr::Meet(a.clone(), c.into()).into(), b.clone()),
            )
        }
        (RuleKind::Dist, Expr::Arrow(a, bc)) => match &**bc {
            Expr::Meet(b, c) => Expr::meet(
                Expr::Arrow(a.clone(), b.clone()),
                Expr::Arrow(a.clone(), c.clone()),
            ),
            _ => unreachable!("checked by matches_locally"),
        },
        (RuleKind::Dept, _) => Expr::at(),
        _ => unreachable!("checked by matches_locally"),
    })
}

/// One recorded rewrite step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: Rule,
    pub position: Position,
    pub result: Expr,
}

/// A recorded reduction sequence. Each step's result is the previous
/// expression rewritten once by the step's rule at the step's position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub start: Expr,
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn new(start: Expr) -> Trace {
        Trace {
            start,
            steps: Vec::new(),
        }
    }

    pub fn current(&self) -> &Expr {
        self.steps.last().map_or(&self.start, |s| &s.result)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Applies `rule` at `pos` to the current expression and records it.
    pub fn step(&mut self, rule: Rule, pos: Position) -> Result<&Expr> {
        let result = apply(self.current(), &rule, &pos)?;
        self.steps.push(TraceStep {
            rule,
            position: pos,
            result,
        });
        Ok(self.current())
    }

    /// Re-derives every step and checks it against the recorded result.
    pub fn verify(&self) -> Result<()> {
        let mut current = &self.start;
        for step in &self.steps {
            let expected = apply(current, &step.rule, &step.position)?;
            if expected != step.result {
                return Err(Error::NotARedex {
                    rule: step.rule.kind.name(),
                    position: step.position.clone(),
                });
            }
            current = &step.result;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serialization is infallible")
    }
}

#[derive(Serialize, Deserialize)]
struct StepRepr {
    rule: RuleKind,
    pos: Position,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness: Option<Expr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    depth: Option<Depth>,
    result: Expr,
}

#[derive(Serialize, Deserialize)]
struct TraceRepr {
    start: Expr,
    steps: Vec<StepRepr>,
}

impl Serialize for Trace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TraceRepr {
            start: self.start.clone(),
            steps: self
                .steps
                .iter()
                .map(|st| StepRepr {
                    rule: st.rule.kind,
                    pos: st.position.clone(),
                    witness: st.rule.witness.clone(),
                    depth: st.rule.depth,
                    result: st.result.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Trace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = TraceRepr::deserialize(d)?;
        Ok(Trace {
            start: repr.start,
            steps: repr
                .steps
                .into_iter()
                .map(|st| TraceStep {
                    rule: Rule {
                        kind: st.rule,
                        depth: st.depth,
                        witness: st.witness,
                    },
                    position: st.pos,
                    result: st.result,
                })
                .collect(),
        })
    }
}

//! Factors: the strictly positive unrollings `A1 -> (... (At -> p) ...)`
//! of an expression, with `p` an atom.
//!
//! ```text
//! factors(p)        = { p }
//! factors(E' & E'') = factors(E') ∪ factors(E'')
//! factors(E' -> E'') = { E' -> F | F in factors(E'') }
//! ```
//!
//! `@` is an ordinary head here.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::{Atom, Expr, Position, Step};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub args: Vec<Expr>,
    pub head: Atom,
}

impl Factor {
    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn to_expr(&self) -> Expr {
        factor_to_expr(self)
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

impl fmt::Debug for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(|a| a.to_string()).collect();
        write!(f, "({}; {})", args.join(", "), self.head)
    }
}

/// Every strictly positive atom occurrence together with the factor it
/// heads, in preorder. Duplicates are kept.
pub fn factor_occurrences(e: &Expr) -> Vec<(Position, Factor)> {
    let mut out = Vec::new();
    let mut args = Vec::new();
    walk(e, Position::root(), &mut args, &mut out);
    out
}

fn walk(e: &Expr, pos: Position, args: &mut Vec<Expr>, out: &mut Vec<(Position, Factor)>) {
    match e {
        Expr::Atom(a) => out.push((
            pos,
            Factor {
                args: args.clone(),
                head: a.clone(),
            },
        )),
        Expr::Meet(l, r) => {
            walk(l, pos.child(Step::MeetLeft), args, out);
            walk(r, pos.child(Step::MeetRight), args, out);
        }
        Expr::Arrow(s, t) => {
            args.push((**s).clone());
            walk(t, pos.child(Step::ArrowTarget), args, out);
            args.pop();
        }
    }
}

/// The set of factors of `e`, in order of first occurrence.
pub fn factors(e: &Expr) -> Vec<Factor> {
    let mut seen = HashSet::new();
    factor_occurrences(e)
        .into_iter()
        .map(|(_, f)| f)
        .filter(|f| seen.insert(f.clone()))
        .collect()
}

/// Rebuilds `args[0] -> (args[1] -> (... -> head))`.
pub fn factor_to_expr(f: &Factor) -> Expr {
    f.args
        .iter()
        .rev()
        .fold(Expr::Atom(f.head.clone()), |acc, arg| {
            Expr::arrow(arg.clone(), acc)
        })
}

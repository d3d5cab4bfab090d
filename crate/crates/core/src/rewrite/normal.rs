use std::sync::Arc;

use super::{apply, redexes, Rule, RuleKind};
use crate::error::Result;
use crate::syntax::{Expr, Position};

/// Normal form under `dist`: no arrow has a meet as its target.
///
/// `dist` has no critical pairs, so every strategy reaches this same tree;
/// this computes it bottom-up.
pub fn dist_normal_form(e: &Expr) -> Expr {
    match e {
        Expr::Atom(_) => e.clone(),
        Expr::Meet(a, b) => Expr::meet(dist_normal_form(a), dist_normal_form(b)),
        Expr::Arrow(a, b) => {
            let source = Arc::new(dist_normal_form(a));
            distribute(&source, &dist_normal_form(b))
        }
    }
}

fn distribute(source: &Arc<Expr>, target: &Expr) -> Expr {
    match target {
        Expr::Meet(b, c) => Expr::meet(distribute(source, b), distribute(source, c)),
        other => Expr::Arrow(source.clone(), Arc::new(other.clone())),
    }
}

/// Normal form under `dept` at depth `n`: each maximal occurrence at ebb
/// greater than `n` is replaced by `@`.
///
/// Occurrences at ebb `> n` form whole subtrees, so truncating at the
/// outermost ones is reachable by `dept` steps and leaves no redex.
pub fn dept_normal_form(e: &Expr, n: usize) -> Expr {
    truncate(e, 0, n)
}

fn truncate(e: &Expr, parent_ebb: usize, n: usize) -> Expr {
    let ebb = parent_ebb + usize::from(e.is_arrow());
    if ebb > n {
        return Expr::at();
    }
    match e {
        Expr::Atom(_) => e.clone(),
        Expr::Arrow(a, b) => Expr::arrow(truncate(a, ebb, n), truncate(b, ebb, n)),
        Expr::Meet(a, b) => Expr::meet(truncate(a, ebb, n), truncate(b, ebb, n)),
    }
}

/// Canonical representative of the `slat` class of `e` (associativity,
/// commutativity and idempotence of `&`).
///
/// Each maximal meet is flattened, its operands canonicalized, sorted by
/// their ASCII rendering, deduplicated, and re-nested to the left. Arrow
/// sources and targets are canonicalized recursively.
pub fn slat_canonical(e: &Expr) -> Expr {
    canonical_with_text(e).0
}

/// The canonical form together with its ASCII rendering, which doubles as
/// the sort key so each node is rendered once.
pub(crate) fn canonical_with_text(e: &Expr) -> (Expr, String) {
    match e {
        Expr::Atom(a) => (e.clone(), a.name().to_string()),
        Expr::Arrow(a, b) => {
            let (source, source_text) = canonical_with_text(a);
            let (target, target_text) = canonical_with_text(b);
            let text = if source.is_arrow() {
                format!("({source_text}) -> {target_text}")
            } else {
                format!("{source_text} -> {target_text}")
            };
            (Expr::arrow(source, target), text)
        }
        Expr::Meet(..) => {
            let mut parts: Vec<(Expr, String)> =
                e.conjuncts().into_iter().map(canonical_with_text).collect();
            parts.sort_by(|x, y| x.1.cmp(&y.1));
            parts.dedup_by(|x, y| x.1 == y.1);
            if parts.len() == 1 {
                return parts.pop().expect("one part");
            }
            let text = parts
                .iter()
                .map(|(part, part_text)| {
                    if part.is_arrow() {
                        format!("({part_text})")
                    } else {
                        part_text.clone()
                    }
                })
                .collect::<Vec<_>>()
                .join(" & ");
            let expr = Expr::meet_all(parts.into_iter().map(|(p, _)| p))
                .expect("a meet has at least two conjuncts");
            (expr, text)
        }
    }
}

/// The two rules whose reductions always terminate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terminating {
    Dist,
    Dept(usize),
}

impl Terminating {
    pub fn rule(self) -> Rule {
        match self {
            Terminating::Dist => Rule::new(RuleKind::Dist),
            Terminating::Dept(n) => Rule::dept(n),
        }
    }
}

/// Reduces `e` step by step until no redex is left, letting `strategy`
/// pick which of the current redexes (given in preorder) to contract.
/// Returns the normal form and the number of steps taken.
pub fn reduce_to_normal_form<F>(
    e: &Expr,
    which: Terminating,
    restricted: bool,
    mut strategy: F,
) -> Result<(Expr, usize)>
where
    F: FnMut(&Expr, &[Position]) -> usize,
{
    let rule = which.rule();
    let mut current = e.clone();
    let mut steps = 0;
    loop {
        let found = redexes(&current, &rule, restricted)?;
        if found.is_empty() {
            return Ok((current, steps));
        }
        let pick = strategy(&current, &found).min(found.len() - 1);
        current = apply(&current, &rule, &found[pick])?;
        steps += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{render, Format};

    fn e(s: &str) -> Expr {
        s.parse().unwrap()
    }

    #[test]
    fn dist_examples() {
        assert_eq!(dist_normal_form(&e("a -> b & c")), e("(a -> b) & (a -> c)"));
        assert_eq!(dist_normal_form(&e("p & q")), e("p & q"));
        let got = dist_normal_form(&e("a -> b & (c & d)"));
        assert_eq!(
            slat_canonical(&got),
            slat_canonical(&e("(a -> b) & ((a -> c) & (a -> d))"))
        );
        // Sources are normalized too.
        assert_eq!(
            dist_normal_form(&e("(x -> y & z) -> w")),
            e("(x -> y) & (x -> z) -> w")
        );
    }

    #[test]
    fn dept_examples() {
        assert_eq!(dept_normal_form(&e("p & q"), 0), e("p & q"));
        assert_eq!(dept_normal_form(&e("a -> b"), 0), e("@"));
        assert_eq!(dept_normal_form(&e("a -> b -> c"), 1), e("a -> @"));
        assert_eq!(dept_normal_form(&e("p & (a -> b)"), 0), e("p & @"));
        assert_eq!(dept_normal_form(&e("(a -> b) -> c"), 1), e("@ -> c"));
    }

    #[test]
    fn slat_examples() {
        assert_eq!(slat_canonical(&e("(b & a) & b")), e("a & b"));
        assert_eq!(slat_canonical(&e("a -> b")), e("a -> b"));
        assert_eq!(slat_canonical(&e("(a & b) & (a & b)")), e("a & b"));
        assert_eq!(
            slat_canonical(&e("(q & p) -> (c -> d) & b & b")),
            e("p & q -> b & (c -> d)")
        );
    }

    #[test]
    fn canonical_text_matches_render() {
        for s in [
            "(b & a) & b",
            "(q & p) -> (c -> d) & b & b",
            "((a -> b) -> c) & @ & (x & (y -> z))",
            "@ -> (q -> p) & (q -> p)",
            "((a -> b) & (a -> b)) -> c",
        ] {
            let (c, text) = canonical_with_text(&e(s));
            assert_eq!(text, render(&c, Format::Ascii));
        }
    }

    #[test]
    fn stepwise_reduction_reaches_the_fast_normal_form() {
        let x = e("(x -> y & z) -> (a & (b -> c & d))");
        let (nf, steps) =
            reduce_to_normal_form(&x, Terminating::Dist, false, |_, r| r.len() - 1).unwrap();
        assert_eq!(nf, dist_normal_form(&x));
        assert!(steps > 0);
        let (nf, _) = reduce_to_normal_form(&x, Terminating::Dept(1), true, |_, _| 0).unwrap();
        assert_eq!(nf, dept_normal_form(&x, 1));
    }
}

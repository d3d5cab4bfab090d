mod common;

use bcd::decide::explain;
use bcd::gen::atom_set;
use bcd::{
    apply, build_model, equiv, redexes, satisfies_eq, subseteq, subtype_matrix, Decider, Expr,
    Rule, RuleKind,
};
use common::{e, expr};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn subseteq_examples() {
    assert!(subseteq(&e("a & b"), &e("a")));
    assert!(subseteq(&e("(c -> a) & (c -> b)"), &e("c -> a & b")));
    assert!(subseteq(&e("a -> b"), &e("a & c -> b")));
    assert!(!subseteq(&e("a & c -> b"), &e("a -> b")));
    assert!(!subseteq(&e("p"), &e("q")));
}

#[test]
fn equiv_examples() {
    assert!(equiv(&e("c -> a & b"), &e("(c -> a) & (c -> b)")));
    assert!(equiv(&e("a"), &e("a & a")));
    assert!(!equiv(&e("a -> b"), &e("b -> a")));
}

#[test]
fn arity_must_match() {
    // Same head, different arity.
    assert!(!subseteq(&e("p"), &e("a -> p")));
    assert!(!subseteq(&e("a -> p"), &e("p")));
    assert!(!subseteq(&e("a -> b -> p"), &e("a -> p")));
}

#[test]
fn refuted_inclusion_has_a_countermodel() {
    // Over the model atoms: (@ & p) -> @ is not below @ -> @, and F(1)
    // separates the two sides of the failed equivalence.
    let weak = e("@ & p -> @");
    let strong = e("@ -> @");
    assert!(subseteq(&strong, &weak));
    assert!(!subseteq(&weak, &strong));
    let both = Expr::meet(weak.clone(), strong.clone());
    assert!(!satisfies_eq(1, &weak, &both));
    let model = build_model(&atom_set(2), 1).unwrap();
    let (x, y) = (model.eval(&weak).unwrap(), model.eval(&strong).unwrap());
    assert!(model.le(y, x));
    assert!(!model.le(x, y));
}

#[test]
fn explanation_mirrors_the_verdict() {
    let yes = explain(&e("(c -> a) & (c -> b)"), &e("c -> a & b"));
    assert!(yes.holds);
    assert_eq!(yes.obligations.len(), 2);
    assert!(yes.obligations.iter().all(|o| o.matched_by.is_some()));

    let no = explain(&e("a & c -> b"), &e("a -> b"));
    assert!(!no.holds);
    let last = no.obligations.last().unwrap();
    assert!(last.matched_by.is_none());
    assert!(!last.rejected.is_empty());

    let json = serde_json::to_value(&no).unwrap();
    assert_eq!(json["holds"], false);
    assert!(json["obligations"].is_array());
}

#[test]
fn matrix_examples() {
    assert_eq!(subtype_matrix(&e("p")).rows(), vec![vec![true]]);
    let m = subtype_matrix(&e("a & b"));
    assert_eq!(m.exprs, vec![e("a & b"), e("a"), e("b")]);
    assert!(m.get(0, 1));
    assert!(!m.get(1, 0));
}

#[test]
fn deciders_are_shareable_across_threads() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<Expr>();
    assert_send_sync::<Decider>();
    let pairs: Vec<(Expr, Expr, bool)> = vec![
        (e("a & b"), e("a"), true),
        (e("a"), e("a & b"), false),
        (e("(c -> a) & (c -> b)"), e("c -> a & b"), true),
        (e("a & c -> b"), e("a -> b"), false),
    ];
    std::thread::scope(|s| {
        for _ in 0..4 {
            s.spawn(|| {
                for (a, b, expected) in &pairs {
                    assert_eq!(subseteq(a, b), *expected);
                }
            });
        }
    });
}

#[test]
fn one_decider_answers_like_fresh_ones() {
    let mut shared = Decider::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let atoms = atom_set(3);
    for _ in 0..300 {
        let a = bcd::gen::random_expr_up_to(&mut rng, 15, &atoms);
        let b = bcd::gen::random_expr_up_to(&mut rng, 15, &atoms);
        assert_eq!(shared.subseteq(&a, &b), subseteq(&a, &b), "{a} ⊆ {b}");
    }
}

/// A random expression congruent to `x`, reached by `steps` rule
/// applications other than `dept`.
fn congruent(x: &Expr, seed: u64, steps: usize) -> Expr {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<Expr> = x.preorder().into_iter().cloned().collect();
    let mut current = x.clone();
    for _ in 0..steps {
        let kind = RuleKind::REDO[rng.random_range(0..RuleKind::REDO.len())];
        let rule = if kind == RuleKind::Absp {
            Rule::absp(pool[rng.random_range(0..pool.len())].clone())
        } else {
            Rule::new(kind)
        };
        let found = redexes(&current, &rule, true).unwrap();
        if !found.is_empty() {
            current = apply(&current, &rule, &found[rng.random_range(0..found.len())]).unwrap();
        }
    }
    current
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn reflexive(a in expr(40, 3)) {
        prop_assert!(subseteq(&a, &a));
    }

    #[test]
    fn meets_are_lower_bounds(a in expr(20, 3), b in expr(20, 3)) {
        let m = Expr::meet(a.clone(), b.clone());
        prop_assert!(subseteq(&m, &a));
        prop_assert!(subseteq(&m, &b));
    }

    #[test]
    fn transitive_on_small_triples(a in expr(7, 2), b in expr(7, 2), c in expr(7, 2)) {
        if subseteq(&a, &b) && subseteq(&b, &c) {
            prop_assert!(subseteq(&a, &c));
        }
    }

    #[test]
    fn meets_are_greatest(a in expr(7, 2), b in expr(7, 2), c in expr(7, 2)) {
        if subseteq(&c, &a) && subseteq(&c, &b) {
            prop_assert!(subseteq(&c, &Expr::meet(a, b)));
        }
    }

    #[test]
    fn congruence(a in expr(15, 3), c in expr(10, 3), seed: u64) {
        let b = congruent(&a, seed, 4);
        prop_assert!(equiv(&a, &b));
        prop_assert!(equiv(&Expr::meet(a.clone(), c.clone()), &Expr::meet(b.clone(), c.clone())));
        prop_assert!(equiv(&Expr::arrow(c.clone(), a.clone()), &Expr::arrow(c.clone(), b.clone())));
        prop_assert!(equiv(&Expr::arrow(a, c.clone()), &Expr::arrow(b, c)));
    }

    #[test]
    fn equivalence_is_mutual_inclusion(a in expr(9, 2), b in expr(9, 2)) {
        let mut d = Decider::new();
        prop_assert_eq!(d.equiv(&a, &b), d.subseteq(&a, &b) && d.subseteq(&b, &a));
        prop_assert_eq!(explain(&a, &b).holds, d.subseteq(&a, &b));
    }

    #[test]
    fn matrix_is_a_preorder_matching_the_recursion(root in expr(50, 3)) {
        let m = subtype_matrix(&root);
        let n = m.len();
        prop_assert_eq!(n, root.size());
        let mut d = Decider::new();
        for i in 0..n {
            prop_assert!(m.get(i, i));
            for j in 0..n {
                prop_assert_eq!(m.get(i, j), d.subseteq(&m.exprs[i], &m.exprs[j]));
                if m.get(i, j) {
                    for k in 0..n {
                        prop_assert!(!m.get(j, k) || m.get(i, k));
                    }
                }
            }
        }
    }
}

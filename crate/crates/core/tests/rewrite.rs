mod common;

use bcd::rewrite::{default_witnesses, reduce_to_normal_form, Depth, Terminating};
use bcd::{
    apply, convertible_bounded, dept_normal_form, dist_normal_form, equiv, redexes,
    satisfies_eq, slat_canonical, Error, Expr, Position, Rule, RuleKind, Step, Trace, Verdict,
};
use common::{e, expr};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pos(steps: &[Step]) -> Position {
    Position::from(steps.to_vec())
}

#[test]
fn redex_examples() {
    let asso = Rule::new(RuleKind::Asso);
    assert_eq!(redexes(&e("a & (b & c)"), &asso, false).unwrap(), vec![Position::root()]);
    assert!(redexes(&e("p"), &Rule::new(RuleKind::Dist), false).unwrap().is_empty());
    assert_eq!(
        redexes(&e("a -> @ -> @"), &Rule::dept(1), true).unwrap(),
        vec![pos(&[Step::ArrowTarget])]
    );
}

#[test]
fn missing_parameters_are_errors() {
    let absp = Rule::new(RuleKind::Absp);
    assert!(matches!(
        redexes(&e("a -> b"), &absp, false),
        Err(Error::MissingParameter { .. })
    ));
    let dept = Rule::new(RuleKind::Dept);
    assert!(matches!(
        apply(&e("a -> b"), &dept, &Position::root()),
        Err(Error::MissingParameter { .. })
    ));
}

#[test]
fn restricted_redexes() {
    let x = e("(a -> b) & (c & d)");
    let idem = Rule::new(RuleKind::Idem);
    assert_eq!(redexes(&x, &idem, false).unwrap().len(), x.size());
    let atoms_only = redexes(&x, &idem, true).unwrap();
    assert_eq!(atoms_only.len(), 4);
    assert!(atoms_only.iter().all(|p| x.get(p).unwrap().is_atom()));

    // comm: the root meet has a meet operand, the inner one does not.
    let comm = Rule::new(RuleKind::Comm);
    assert_eq!(redexes(&x, &comm, false).unwrap().len(), 2);
    assert_eq!(redexes(&x, &comm, true).unwrap(), vec![pos(&[Step::MeetRight])]);

    // dept: meets of atoms, non-@ atoms and @ -> @ only, never @ itself.
    let y = e("a -> (b & c) & (@ -> @) & (b -> c) & @");
    let restricted = redexes(&y, &Rule::dept(0), true).unwrap();
    for p in &restricted {
        let node = y.get(p).unwrap();
        assert!(!node.is_at());
        assert!(node.is_meet_of_atoms() || node == &e("@ -> @"), "{node}");
    }
    let unrestricted = redexes(&y, &Rule::dept(0), false).unwrap();
    assert!(unrestricted.contains(&Position::root()));
    assert!(!restricted.contains(&Position::root()));
}

#[test]
fn dept_at_infinity_is_trivial() {
    let x = e("((a -> b) -> c) -> d");
    assert!(redexes(&x, &Rule::dept_infinite(), false).unwrap().is_empty());
    assert!(apply(&x, &Rule::dept_infinite(), &Position::root()).is_err());
}

#[test]
fn apply_examples() {
    assert_eq!(
        apply(&e("a -> b & c"), &Rule::new(RuleKind::Dist), &Position::root()).unwrap(),
        e("(a -> b) & (a -> c)")
    );
    assert_eq!(
        apply(&e("a -> b"), &Rule::absp(e("c")), &Position::root()).unwrap(),
        e("(a -> b) & (a & c -> b)")
    );
    assert_eq!(
        apply(&e("p"), &Rule::new(RuleKind::Idem), &Position::root()).unwrap(),
        e("p & p")
    );
    assert!(matches!(
        apply(&e("p"), &Rule::new(RuleKind::Dist), &Position::root()),
        Err(Error::NotARedex { .. })
    ));
}

#[test]
fn normal_form_examples() {
    assert_eq!(dist_normal_form(&e("a -> b & c")), e("(a -> b) & (a -> c)"));
    assert_eq!(dist_normal_form(&e("p & q")), e("p & q"));
    assert_eq!(
        slat_canonical(&dist_normal_form(&e("a -> b & (c & d)"))),
        slat_canonical(&e("(a -> b) & ((a -> c) & (a -> d))"))
    );
    assert_eq!(dept_normal_form(&e("p & q"), 0), e("p & q"));
    assert_eq!(dept_normal_form(&e("a -> b"), 0), e("@"));
    assert_eq!(dept_normal_form(&e("a -> b -> c"), 1), e("a -> @"));
    assert_eq!(slat_canonical(&e("(b & a) & b")), e("a & b"));
    assert_eq!(slat_canonical(&e("a -> b")), e("a -> b"));
    assert_eq!(slat_canonical(&e("(a & b) & (a & b)")), e("a & b"));
}

#[test]
fn oracle_examples() {
    let check = |a: &str, b: &str| {
        let (a, b) = (e(a), e(b));
        convertible_bounded(&a, &b, 2000, &default_witnesses(&a, &b))
    };
    assert_eq!(check("(c -> a) & (c -> b)", "c -> a & b"), Verdict::Confirmed);
    assert_eq!(check("a -> b", "(a -> b) & (a & c -> b)"), Verdict::Confirmed);
    assert_eq!(check("p", "q"), Verdict::Unknown);
    assert_eq!(check("a & c -> b", "a -> b"), Verdict::Unknown);
}

#[test]
fn trace_records_and_serializes() {
    let mut t = Trace::new(e("a -> b & c"));
    t.step(Rule::new(RuleKind::Dist), Position::root()).unwrap();
    t.step(Rule::absp(e("d")), pos(&[Step::MeetLeft])).unwrap();
    t.step(Rule::dept(0), pos(&[Step::MeetRight])).unwrap();
    assert_eq!(t.current(), &e("((a -> b) & (a & d -> b)) & @"));
    t.verify().unwrap();

    let json: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
    assert_eq!(json["steps"][0]["rule"], "dist");
    assert_eq!(json["steps"][0]["pos"], serde_json::json!([]));
    assert_eq!(json["steps"][1]["witness"], serde_json::json!({"atom": "d"}));
    assert_eq!(json["steps"][1]["pos"], serde_json::json!(["left"]));
    assert_eq!(json["steps"][2]["depth"], 0);
    let back: Trace = serde_json::from_value(json).unwrap();
    assert_eq!(back, t);

    let mut forged = t.clone();
    forged.steps[1].result = e("p");
    assert!(forged.verify().is_err());
    assert!(t.clone().step(Rule::new(RuleKind::Dist), Position::root()).is_err());
}

#[test]
fn depth_serializes_as_number_or_infinity() {
    assert_eq!(serde_json::to_string(&Depth::Finite(3)).unwrap(), "3");
    assert_eq!(serde_json::to_string(&Depth::Infinite).unwrap(), "\"infinity\"");
    let d: Depth = serde_json::from_str("\"infinity\"").unwrap();
    assert_eq!(d, Depth::Infinite);
}

fn no_dist_redex(x: &Expr) -> bool {
    x.preorder()
        .iter()
        .all(|n| !matches!(n, Expr::Arrow(_, t) if t.is_meet()))
}

/// A random rule instance other than `dept`, with an `absp` witness drawn
/// from the subexpressions of `x`.
fn random_redo_rule(rng: &mut ChaCha8Rng, x: &Expr) -> Rule {
    let kind = RuleKind::REDO[rng.random_range(0..RuleKind::REDO.len())];
    if kind == RuleKind::Absp {
        let subs = x.preorder();
        Rule::absp(subs[rng.random_range(0..subs.len())].clone())
    } else {
        Rule::new(kind)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn dist_normal_form_is_normal_and_stable(x in expr(80, 3)) {
        let nf = dist_normal_form(&x);
        prop_assert!(no_dist_redex(&nf));
        prop_assert_eq!(dist_normal_form(&nf), nf.clone());
        prop_assert!(equiv(&x, &nf));
    }

    #[test]
    fn dist_strategies_agree_modulo_slat(x in expr(60, 3), s1: u64, s2: u64) {
        let mut r1 = ChaCha8Rng::seed_from_u64(s1);
        let mut r2 = ChaCha8Rng::seed_from_u64(s2);
        let (a, _) = reduce_to_normal_form(&x, Terminating::Dist, false, |_, f| r1.random_range(0..f.len())).unwrap();
        let (b, _) = reduce_to_normal_form(&x, Terminating::Dist, false, |_, f| r2.random_range(0..f.len())).unwrap();
        prop_assert_eq!(slat_canonical(&a), slat_canonical(&b));
        prop_assert_eq!(slat_canonical(&a), slat_canonical(&dist_normal_form(&x)));
    }

    #[test]
    fn dist_runs_stay_under_the_step_bound(x in expr(200, 3), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, steps) = reduce_to_normal_form(&x, Terminating::Dist, false, |_, f| rng.random_range(0..f.len())).unwrap();
        prop_assert!(steps <= x.size() * x.size());
    }

    #[test]
    fn restricted_dept_steps_decrease_the_measure(x in expr(60, 3), n in 0usize..4, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rule = Rule::dept(n);
        let mut current = x.clone();
        loop {
            let found = redexes(&current, &rule, true).unwrap();
            if found.is_empty() {
                break;
            }
            let next = apply(&current, &rule, &found[rng.random_range(0..found.len())]).unwrap();
            let before = (current.size(), current.non_at_atoms());
            let after = (next.size(), next.non_at_atoms());
            prop_assert!(after < before, "{} -> {}", current, next);
            current = next;
        }
        // Restricted steps reach exactly the truncation.
        prop_assert_eq!(current, dept_normal_form(&x, n));
    }

    #[test]
    fn dept_normal_form_truncates_everything_deep(x in expr(80, 3), n in 0usize..4) {
        let nf = dept_normal_form(&x, n);
        prop_assert!(nf.arrow_depth() <= n);
        for (p, node) in nf.subexpressions() {
            if nf.ebb(&p).unwrap() > n {
                prop_assert!(node.is_at());
            }
        }
        prop_assert!(redexes(&nf, &Rule::dept(n), false).unwrap().is_empty());
        prop_assert_eq!(dept_normal_form(&nf, n), nf.clone());
    }

    #[test]
    fn slat_canonical_is_idempotent(x in expr(80, 3)) {
        let c = slat_canonical(&x);
        prop_assert_eq!(slat_canonical(&c), c.clone());
        prop_assert!(equiv(&x, &c));
    }

    #[test]
    fn slat_canonical_absorbs_semilattice_steps(x in expr(40, 3), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = slat_canonical(&x);
        for kind in [RuleKind::Asso, RuleKind::AssoInv, RuleKind::Comm, RuleKind::Idem] {
            let rule = Rule::new(kind);
            let found = redexes(&x, &rule, false).unwrap();
            if found.is_empty() {
                continue;
            }
            let y = apply(&x, &rule, &found[rng.random_range(0..found.len())]).unwrap();
            prop_assert_eq!(slat_canonical(&y), c.clone(), "{} by {}", x, kind);
        }
    }

    #[test]
    fn redo_steps_preserve_equivalence(x in expr(30, 3), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..6 {
            let rule = random_redo_rule(&mut rng, &x);
            for p in redexes(&x, &rule, false).unwrap() {
                let y = apply(&x, &rule, &p).unwrap();
                prop_assert!(equiv(&x, &y), "{} by {} at {:?}", x, rule, p);
            }
        }
    }

    #[test]
    fn dept_steps_hold_in_the_finite_model(x in expr(30, 3), n in 0usize..3) {
        let rule = Rule::dept(n);
        for p in redexes(&x, &rule, false).unwrap() {
            let y = apply(&x, &rule, &p).unwrap();
            prop_assert!(satisfies_eq(n, &x, &y), "{} at {:?}", x, p);
        }
    }

    #[test]
    fn oracle_confirmations_are_sound(a in expr(9, 2), b in expr(9, 2)) {
        // Unknown pairs exhaust the budget, so keep it small.
        let v = convertible_bounded(&a, &b, 40, &default_witnesses(&a, &b));
        if v.is_confirmed() {
            prop_assert!(equiv(&a, &b));
        }
    }

    #[test]
    fn single_steps_are_rejoined(x in expr(12, 3), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rule = random_redo_rule(&mut rng, &x);
        let found = redexes(&x, &rule, false).unwrap();
        prop_assume!(!found.is_empty());
        let y = apply(&x, &rule, &found[rng.random_range(0..found.len())]).unwrap();
        let v = convertible_bounded(&x, &y, 500, &default_witnesses(&x, &x));
        prop_assert_eq!(v, Verdict::Confirmed);
    }
}

mod common;

use bcd::{parse, render, Expr, Format, Polarity, Position, Step};
use common::{e, expr, expr_and_position, tree};
use proptest::prelude::*;

fn pos(steps: &[Step]) -> Position {
    Position::from(steps.to_vec())
}

#[test]
fn parse_examples() {
    assert_eq!(e("p"), Expr::atom("p"));
    assert_eq!(
        e("a -> b & c"),
        Expr::arrow(Expr::atom("a"), Expr::meet(Expr::atom("b"), Expr::atom("c")))
    );
    assert_eq!(
        e("(c->a) & (c->b)"),
        Expr::meet(
            Expr::arrow(Expr::atom("c"), Expr::atom("a")),
            Expr::arrow(Expr::atom("c"), Expr::atom("b"))
        )
    );
}

#[test]
fn arrows_nest_right_and_meets_nest_left() {
    assert_eq!(e("a -> b -> c"), e("a -> (b -> c)"));
    assert_eq!(e("a & b & c"), e("(a & b) & c"));
    assert_ne!(e("a & b & c"), e("a & (b & c)"));
    assert_eq!(e(" a&b->c "), e("(a & b) -> c"));
}

#[test]
fn parse_errors_carry_offsets() {
    let err = parse("a -> ").unwrap_err();
    assert_eq!(err.offset, 5);
    assert!(!err.expected.is_empty());
    assert!(parse("").is_err());
    assert!(parse("(a").is_err());
    assert!(parse("a b").is_err());
    assert!(parse("A").is_err());
    assert!(parse("a &").is_err());
}

#[test]
fn render_examples() {
    assert_eq!(render(&Expr::at(), Format::Ascii), "@");
    assert_eq!(render(&e("a -> (b & c)"), Format::Ascii), "a -> b & c");
    assert_eq!(
        render(&e("(c->a)&(c->b)"), Format::Ascii),
        "(c -> a) & (c -> b)"
    );
    assert_eq!(render(&e("(a -> b) -> c"), Format::Ascii), "(a -> b) -> c");
    assert_eq!(render(&e("a & (b & c)"), Format::Ascii), "a & (b & c)");
}

#[test]
fn json_ast() {
    let json = render(&e("a -> b & @"), Format::Json);
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(
        value,
        serde_json::json!({"arrow": [{"atom": "a"}, {"meet": [{"atom": "b"}, {"atom": "@"}]}]})
    );
    let back: Expr = serde_json::from_str(&json).unwrap();
    assert_eq!(back, e("a -> b & @"));
}

#[test]
fn subexpressions_examples() {
    let p = e("p");
    assert_eq!(p.subexpressions(), vec![(Position::root(), &p)]);

    let ab = e("a -> b");
    let subs = ab.subexpressions();
    assert_eq!(subs.len(), 3);
    assert_eq!(subs[0], (Position::root(), &ab));
    assert_eq!(subs[1], (pos(&[Step::ArrowSource]), &e("a")));
    assert_eq!(subs[2], (pos(&[Step::ArrowTarget]), &e("b")));

    let m = e("a & b");
    let subs = m.subexpressions();
    assert_eq!(subs.len(), 3);
    assert_eq!(subs[0].1, &m);
}

#[test]
fn ebb_examples() {
    assert_eq!(e("c -> d").ebb(&Position::root()).unwrap(), 1);
    assert_eq!(e("p").ebb(&Position::root()).unwrap(), 0);
    let x = e("a -> b & (c -> d)");
    let inner = pos(&[Step::ArrowTarget, Step::MeetRight]);
    assert_eq!(x.get(&inner), Some(&e("c -> d")));
    assert_eq!(x.ebb(&inner).unwrap(), 2);
    assert!(x.ebb(&pos(&[Step::MeetLeft])).is_err());
}

#[test]
fn arrow_depth_examples() {
    assert_eq!(e("p & q").arrow_depth(), 0);
    assert_eq!(e("c -> d").arrow_depth(), 1);
    assert_eq!(e("(a -> b) -> c").arrow_depth(), 2);
}

#[test]
fn polarity_examples() {
    let x = e("(a -> b) -> c");
    assert_eq!(x.polarity(&Position::root()).unwrap(), Polarity::StrictlyPositive);
    assert_eq!(
        e("a -> b").polarity(&pos(&[Step::ArrowSource])).unwrap(),
        Polarity::Negative
    );
    assert_eq!(
        x.polarity(&pos(&[Step::ArrowSource, Step::ArrowSource])).unwrap(),
        Polarity::Positive
    );
    assert!(x.polarity(&pos(&[Step::MeetLeft])).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn ascii_round_trip(x in expr(200, 4)) {
        let text = render(&x, Format::Ascii);
        prop_assert_eq!(parse(&text).unwrap(), x);
    }

    #[test]
    fn json_round_trip(x in tree(3)) {
        let json = render(&x, Format::Json);
        let back: Expr = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn preorder_lists_every_node_once_parents_first((x, p) in expr_and_position(60, 3)) {
        let subs = x.subexpressions();
        prop_assert_eq!(subs.len(), x.size());
        let index = subs.iter().position(|(q, _)| *q == p).unwrap();
        // Every proper prefix of a position comes earlier.
        for (j, (q, _)) in subs.iter().enumerate() {
            if q.is_prefix_of(&p) && *q != p {
                prop_assert!(j < index);
            }
        }
        prop_assert_eq!(subs[index].1, x.get(&p).unwrap());
    }

    #[test]
    fn strict_positivity_exactly_avoids_sources((x, p) in expr_and_position(60, 3)) {
        let polarity = x.polarity(&p).unwrap();
        let no_source = !p.steps().contains(&Step::ArrowSource);
        prop_assert_eq!(polarity == Polarity::StrictlyPositive, no_source);
        let sources = p.steps().iter().filter(|s| **s == Step::ArrowSource).count();
        prop_assert_eq!(polarity.is_positive(), sources % 2 == 0);
    }

    #[test]
    fn ebb_is_monotone_along_paths((x, p) in expr_and_position(60, 3)) {
        let ebb = x.ebb(&p).unwrap();
        let steps = p.steps();
        for k in 0..steps.len() {
            let prefix = Position::from(steps[..k].to_vec());
            prop_assert!(x.ebb(&prefix).unwrap() <= ebb);
        }
        prop_assert!(ebb <= x.arrow_depth());
    }

    #[test]
    fn arrow_depth_recursion(a in tree(3), b in tree(3)) {
        let m = a.arrow_depth().max(b.arrow_depth());
        prop_assert_eq!(Expr::meet(a.clone(), b.clone()).arrow_depth(), m);
        prop_assert_eq!(Expr::arrow(a, b).arrow_depth(), m + 1);
    }

    #[test]
    fn arrow_depth_is_max_ebb(x in expr(60, 3)) {
        let max = x
            .subexpressions()
            .iter()
            .map(|(p, _)| x.ebb(p).unwrap())
            .max()
            .unwrap();
        prop_assert_eq!(x.arrow_depth(), max);
    }
}

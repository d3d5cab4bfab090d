//! Desk-scale acceptance checks, shared by the `acceptance` test target
//! and `bcd selftest`.
//!
//! Every check is deterministic: randomness comes from a ChaCha stream
//! seeded per check, so a failure reproduces exactly.

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::decide::{occurrence_factors, subtype_matrix, Decider};
use crate::factors::{factors, Factor};
use crate::gen::{atom_set, enumerate_exprs, random_expr, random_expr_up_to};
use crate::model::{build_model, satisfies_eq, StackOfTwos};
use crate::rewrite::{
    apply, convertible_bounded, default_witnesses, dept_normal_form, explore, redexes,
    reduce_to_normal_form, slat_canonical, Rule, RuleKind, Terminating,
};
use crate::syntax::{Atom, Expr, Polarity, Position};

pub const DEFAULT_SEED: u64 = 0x5eed_bcd0;

/// Outcome of one acceptance check.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    /// Number of individual instances examined.
    pub checked: u64,
    pub failures: u64,
    pub seconds: f64,
    pub detail: String,
    /// The first failing instance, if any.
    pub counterexample: Option<String>,
}

impl Report {
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {:<28} checked={:<7} failures={:<3} {:>8.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.checked,
            self.failures,
            self.seconds,
            self.detail
        )
    }
}

type Check = fn(&mut ChaCha8Rng) -> Outcome;

/// Identifiers and names of every check, in order.
pub fn criteria() -> impl Iterator<Item = (u8, &'static str)> {
    CRITERIA.iter().map(|&(id, name, _)| (id, name))
}

const CRITERIA: [(u8, &str, Check); 11] = [
    (1, "law suite", law_suite),
    (2, "oracle equivalence", oracle_equivalence),
    (3, "finite model property", finite_model_property),
    (4, "carrier counts", carrier_counts),
    (5, "two-path model agreement", two_path_agreement),
    (6, "termination", termination),
    (7, "confluence", confluence),
    (8, "complete invariants", complete_invariants),
    (9, "conservation", conservation),
    (10, "scaling", scaling),
    (11, "matrix/recursion agreement", matrix_agreement),
];

/// Runs one check by id; `None` for an unknown id.
pub fn run(id: u8, seed: u64) -> Option<Report> {
    let &(id, name, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ u64::from(id).wrapping_mul(0x9e37_79b9));
    let start = Instant::now();
    let outcome = check(&mut rng);
    let elapsed = start.elapsed();
    let passed = outcome.failures == 0
        && outcome.checked > 0
        && outcome.time_limit.is_none_or(|limit| elapsed < limit);
    let mut detail = outcome.detail;
    if let Some(limit) = outcome.time_limit {
        detail = format!("{detail} (limit {}s)", limit.as_secs());
    }
    Some(Report {
        id,
        name,
        passed,
        checked: outcome.checked,
        failures: outcome.failures,
        seconds: elapsed.as_secs_f64(),
        detail,
        counterexample: outcome.counterexample,
    })
}

pub fn run_all(seed: u64) -> Vec<Report> {
    CRITERIA
        .iter()
        .filter_map(|c| run(c.0, seed))
        .collect()
}

#[derive(Default)]
struct Outcome {
    checked: u64,
    failures: u64,
    detail: String,
    counterexample: Option<String>,
    time_limit: Option<Duration>,
}

impl Outcome {
    fn new() -> Outcome {
        Outcome::default()
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(describe());
            }
        }
    }
}

// ---------------------------------------------------------------------
// 1. Laws of the preorder, meets and arrows.

const LAW_INSTANCES: usize = 1000;
const LAW_MAX_NODES: usize = 30;

/// A random `w` with `e ⊆ w`, built from the laws themselves.
fn weaken<R: Rng>(rng: &mut R, e: &Expr, atoms: &[Atom]) -> Expr {
    match e {
        Expr::Atom(_) => e.clone(),
        Expr::Meet(l, r) => match rng.random_range(0..4) {
            0 => weaken(rng, l, atoms),
            1 => weaken(rng, r, atoms),
            _ => Expr::meet(weaken(rng, l, atoms), weaken(rng, r, atoms)),
        },
        Expr::Arrow(s, t) => Expr::arrow(strengthen(rng, s, atoms), weaken(rng, t, atoms)),
    }
}

/// A random `s` with `s ⊆ e`.
fn strengthen<R: Rng>(rng: &mut R, e: &Expr, atoms: &[Atom]) -> Expr {
    let base = match e {
        Expr::Atom(_) => e.clone(),
        Expr::Meet(l, r) => Expr::meet(strengthen(rng, l, atoms), strengthen(rng, r, atoms)),
        Expr::Arrow(s, t) => match &**t {
            // Weak distributivity: (s -> a) & (s -> b) ⊆ s -> a & b.
            Expr::Meet(a, b) if rng.random_bool(0.25) => Expr::meet(
                Expr::arrow(weaken(rng, s, atoms), strengthen(rng, a, atoms)),
                Expr::arrow(weaken(rng, s, atoms), strengthen(rng, b, atoms)),
            ),
            _ => Expr::arrow(weaken(rng, s, atoms), strengthen(rng, t, atoms)),
        },
    };
    if rng.random_bool(0.25) {
        Expr::meet(base, random_expr_up_to(rng, 5, atoms))
    } else {
        base
    }
}

/// Draws from `sample` until every produced expression has at most
/// `LAW_MAX_NODES` vertices.
fn bounded<R: Rng, const N: usize>(
    rng: &mut R,
    mut sample: impl FnMut(&mut R) -> [Expr; N],
) -> [Expr; N] {
    loop {
        let drawn = sample(rng);
        if drawn.iter().all(|e| e.size() <= LAW_MAX_NODES) {
            return drawn;
        }
    }
}

fn law_suite(rng: &mut ChaCha8Rng) -> Outcome {
    let atoms = atom_set(3);
    let mut out = Outcome::new();
    out.time_limit = Some(Duration::from_secs(10));
    let mut d = Decider::new();
    let mut per_law = Vec::new();

    let mut law = |name: &'static str,
                   rng: &mut ChaCha8Rng,
                   out: &mut Outcome,
                   d: &mut Decider,
                   check: &mut dyn FnMut(&mut ChaCha8Rng, &mut Decider) -> Result<(), String>| {
        let before = out.failures;
        for _ in 0..LAW_INSTANCES {
            let result = check(rng, d);
            out.record(result.is_ok(), || {
                format!("{name}: {}", result.clone().unwrap_err())
            });
        }
        per_law.push((name, out.failures - before));
    };

    let small = |rng: &mut ChaCha8Rng, n: usize| random_expr_up_to(rng, n, &atoms);
    let a = &atoms;

    law("reflexivity", rng, &mut out, &mut d, &mut |rng, d| {
        let x = random_expr_up_to(rng, LAW_MAX_NODES, a);
        d.subseteq(&x, &x).then_some(()).ok_or(format!("{x}"))
    });
    law("transitivity", rng, &mut out, &mut d, &mut |rng, d| {
        let [x, y, z] = bounded(rng, |rng| {
            let z = small(rng, 9);
            let y = strengthen(rng, &z, a);
            let x = strengthen(rng, &y, a);
            [x, y, z]
        });
        let premises = d.subseteq(&x, &y) && d.subseteq(&y, &z);
        (premises && d.subseteq(&x, &z))
            .then_some(())
            .ok_or(format!("{x} ⊆ {y} ⊆ {z}"))
    });
    law("meet lower bounds", rng, &mut out, &mut d, &mut |rng, d| {
        let x = small(rng, 14);
        let y = small(rng, 15);
        let m = Expr::meet(x.clone(), y.clone());
        (d.subseteq(&m, &x) && d.subseteq(&m, &y))
            .then_some(())
            .ok_or(format!("{m}"))
    });
    law("meet greatest lower bound", rng, &mut out, &mut d, &mut |rng, d| {
        let [c, m] = bounded(rng, |rng| {
            let c = small(rng, 9);
            let x = weaken(rng, &c, a);
            let y = weaken(rng, &c, a);
            [c, Expr::meet(x, y)]
        });
        let Expr::Meet(x, y) = &m else { unreachable!() };
        let premises = d.subseteq(&c, x) && d.subseteq(&c, y);
        (premises && d.subseteq(&c, &m))
            .then_some(())
            .ok_or(format!("{c} ⊆ {m}"))
    });
    law("contravariance", rng, &mut out, &mut d, &mut |rng, d| {
        let [lhs, rhs] = bounded(rng, |rng| {
            let x = small(rng, 7);
            let c = strengthen(rng, &x, a);
            let y = small(rng, 7);
            let w = weaken(rng, &y, a);
            [Expr::arrow(x, y), Expr::arrow(c, w)]
        });
        let (Expr::Arrow(x, y), Expr::Arrow(c, w)) = (&lhs, &rhs) else {
            unreachable!()
        };
        let premises = d.subseteq(c, x) && d.subseteq(y, w);
        (premises && d.subseteq(&lhs, &rhs))
            .then_some(())
            .ok_or(format!("{lhs} ⊆ {rhs}"))
    });
    law("weak distributivity", rng, &mut out, &mut d, &mut |rng, d| {
        let [lhs, rhs] = bounded(rng, |rng| {
            let (x, y, c) = (small(rng, 7), small(rng, 7), small(rng, 7));
            [
                Expr::meet(Expr::arrow(c.clone(), x.clone()), Expr::arrow(c.clone(), y.clone())),
                Expr::arrow(c, Expr::meet(x, y)),
            ]
        });
        d.subseteq(&lhs, &rhs)
            .then_some(())
            .ok_or(format!("{lhs} ⊆ {rhs}"))
    });
    law("distributivity", rng, &mut out, &mut d, &mut |rng, d| {
        let [lhs, rhs] = bounded(rng, |rng| {
            let (x, y, c) = (small(rng, 7), small(rng, 7), small(rng, 7));
            [
                Expr::arrow(c.clone(), Expr::meet(x.clone(), y.clone())),
                Expr::meet(Expr::arrow(c.clone(), x), Expr::arrow(c, y)),
            ]
        });
        d.equiv(&lhs, &rhs)
            .then_some(())
            .ok_or(format!("{lhs} ~ {rhs}"))
    });
    law("absorption", rng, &mut out, &mut d, &mut |rng, d| {
        let [lhs, rhs] = bounded(rng, |rng| {
            let (x, y, c) = (small(rng, 7), small(rng, 7), small(rng, 7));
            [
                Expr::arrow(x.clone(), y.clone()),
                Expr::meet(
                    Expr::arrow(x.clone(), y.clone()),
                    Expr::arrow(Expr::meet(x, c), y),
                ),
            ]
        });
        d.equiv(&lhs, &rhs)
            .then_some(())
            .ok_or(format!("{lhs} ~ {rhs}"))
    });
    law("derived absorption", rng, &mut out, &mut d, &mut |rng, d| {
        let [lhs, rhs] = bounded(rng, |rng| {
            let (x, y, c) = (small(rng, 5), small(rng, 5), small(rng, 5));
            let xy = Expr::meet(x.clone(), y);
            [
                Expr::arrow(c.clone(), xy.clone()),
                Expr::meet(Expr::arrow(c.clone(), x), Expr::arrow(c, xy)),
            ]
        });
        d.equiv(&lhs, &rhs)
            .then_some(())
            .ok_or(format!("{lhs} ~ {rhs}"))
    });

    out.detail = format!(
        "{} laws x {LAW_INSTANCES} instances{}",
        per_law.len(),
        per_law
            .iter()
            .filter(|(_, f)| *f > 0)
            .map(|(n, f)| format!("; {n}: {f} failed"))
            .collect::<String>()
    );
    out
}

// ---------------------------------------------------------------------
// 2-3. The exhaustive universe over {@, p}.

pub const ORACLE_BUDGET: usize = 10_000;

fn universe() -> (Vec<Atom>, Vec<Expr>) {
    let atoms = atom_set(2);
    let exprs = enumerate_exprs(&atoms, 6);
    (atoms, exprs)
}

fn oracle_equivalence(rng: &mut ChaCha8Rng) -> Outcome {
    let (atoms, exprs) = universe();
    let mut out = Outcome::new();
    out.time_limit = Some(Duration::from_secs(300));
    let pool: Vec<Expr> = atoms.iter().cloned().map(Expr::Atom).collect();

    // One conversion ball per slat class; the oracle's verdict on a pair
    // is exactly whether the two balls meet.
    let mut class_of: HashMap<Expr, usize> = HashMap::new();
    let mut balls = Vec::new();
    let classes: Vec<usize> = exprs
        .iter()
        .map(|e| {
            let canon = slat_canonical(e);
            *class_of.entry(canon).or_insert_with_key(|c| {
                balls.push(explore(c, ORACLE_BUDGET, &pool));
                balls.len() - 1
            })
        })
        .collect();
    let n = classes.len();
    let mut met = vec![vec![false; balls.len()]; balls.len()];
    for i in 0..balls.len() {
        for j in i..balls.len() {
            let m = balls[i].intersects(&balls[j]);
            met[i][j] = m;
            met[j][i] = m;
        }
    }

    let mut d = Decider::new();
    let mut equiv_pairs = 0;
    let mut confirmed_pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let eq = d.equiv(&exprs[i], &exprs[j]);
            let confirmed = met[classes[i]][classes[j]];
            equiv_pairs += usize::from(eq);
            if confirmed {
                confirmed_pairs.push((i, j));
            }
            out.record(eq == confirmed, || {
                format!(
                    "{} vs {}: equiv={eq}, oracle={}",
                    exprs[i],
                    exprs[j],
                    if confirmed { "Confirmed" } else { "Unknown" }
                )
            });
        }
    }

    // Direct oracle calls agree with the ball verdicts: on every confirmed
    // pair and on a sample of the rest.
    let mut direct = 0;
    for &(i, j) in &confirmed_pairs {
        let v = convertible_bounded(&exprs[i], &exprs[j], ORACLE_BUDGET, &pool);
        direct += 1;
        out.record(v.is_confirmed(), || {
            format!("direct search missed {} ~ {}", exprs[i], exprs[j])
        });
    }
    for _ in 0..100 {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        let v = convertible_bounded(&exprs[i], &exprs[j], ORACLE_BUDGET, &pool);
        direct += 1;
        let expected = met[classes[i]][classes[j]];
        out.record(v.is_confirmed() == expected, || {
            format!("direct search disagrees on {} vs {}", exprs[i], exprs[j])
        });
    }

    let largest = balls.iter().map(|b| b.len()).max().unwrap_or(0);
    out.detail = format!(
        "{n} expressions, {} pairs, {equiv_pairs} equivalent, {} slat classes \
         (largest ball {largest}), {direct} direct searches",
        n * n,
        balls.len()
    );
    out
}

fn finite_model_property(_: &mut ChaCha8Rng) -> Outcome {
    const N: usize = 2;
    let (_, exprs) = universe();
    let mut out = Outcome::new();
    let mut d = Decider::new();
    let mut agreeing_true = 0;
    for a in &exprs {
        for b in &exprs {
            if a.arrow_depth().max(b.arrow_depth()) > N {
                continue;
            }
            let eq = d.equiv(a, b);
            let sat = satisfies_eq(N, a, b);
            agreeing_true += usize::from(eq && sat);
            out.record(eq == sat, || format!("{a} vs {b}: equiv={eq}, F({N})={sat}"));
        }
    }
    out.detail = format!("n={N}, {agreeing_true} pairs equal in both");
    out
}

// ---------------------------------------------------------------------
// 4-5. Finite models.

fn carrier_counts(_: &mut ChaCha8Rng) -> Outcome {
    let mut out = Outcome::new();
    let mut parts = Vec::new();
    for (count, n, expected) in [(2usize, 0usize, 3usize), (1, 1, 3)] {
        let atoms = atom_set(count);
        match build_model(&atoms, n).and_then(|m| {
            let bound = StackOfTwos::carrier_bound(count, n)?;
            Ok((m.len(), bound.value))
        }) {
            Ok((size, bound)) => {
                out.record(size == expected && size as u64 <= bound, || {
                    format!("|F({n})| over {count} atoms = {size}, expected {expected} <= {bound}")
                });
                parts.push(format!("|F({n})|@m={count} = {size} <= {bound}"));
            }
            Err(e) => out.record(false, || format!("F({n}) over {count} atoms: {e}")),
        }
    }
    out.detail = parts.join(", ");
    out
}

fn two_path_agreement(_: &mut ChaCha8Rng) -> Outcome {
    let mut out = Outcome::new();
    let mut parts = Vec::new();
    for (m, n) in [(1usize, 1usize), (2, 0), (2, 1)] {
        let atoms = atom_set(m);
        let model = match build_model(&atoms, n) {
            Ok(model) => model,
            Err(e) => {
                out.record(false, || format!("F({n}) over {m} atoms: {e}"));
                continue;
            }
        };
        let exprs = enumerate_exprs(&atoms, 7);
        let mut evals = Vec::with_capacity(exprs.len());
        for e in &exprs {
            let by_tables = model.eval(e);
            let by_truncation = model.representative_of(e);
            let ok = matches!((&by_tables, &by_truncation), (Ok(x), Ok(y)) if x == y);
            out.record(ok, || {
                format!("F({n}) over {m} atoms, {e}: tables {by_tables:?}, truncation {by_truncation:?}")
            });
            evals.push(by_tables.ok());
        }
        // The pairwise reading on the smaller expressions.
        let small: Vec<usize> = (0..exprs.len()).filter(|&i| exprs[i].size() <= 5).collect();
        for &i in &small {
            for &j in &small {
                let same = evals[i].is_some() && evals[i] == evals[j];
                let sat = satisfies_eq(n, &exprs[i], &exprs[j]);
                out.record(same == sat, || {
                    format!("F({n}) over {m} atoms: {} vs {}", exprs[i], exprs[j])
                });
            }
        }
        parts.push(format!("(m={m}, n={n}): {} exprs, carrier {}", exprs.len(), model.len()));
    }
    out.detail = parts.join("; ");
    out
}

// ---------------------------------------------------------------------
// 6. Termination.

const NORMALIZATIONS: usize = 10_000;

fn termination(rng: &mut ChaCha8Rng) -> Outcome {
    let atoms = atom_set(3);
    let mut out = Outcome::new();
    let mut worst = 0.0f64;
    let mut total_steps = 0usize;
    for i in 0..NORMALIZATIONS {
        let e = random_expr_up_to(rng, 200, &atoms);
        let size = e.size();
        let (which, restricted) = if i % 2 == 0 {
            (Terminating::Dist, false)
        } else {
            (Terminating::Dept(rng.random_range(0..4)), true)
        };
        let mut pick = ChaCha8Rng::seed_from_u64(rng.random());
        let result = reduce_to_normal_form(&e, which, restricted, |_, found| {
            pick.random_range(0..found.len())
        });
        match result {
            Ok((_, steps)) => {
                total_steps += steps;
                worst = worst.max(steps as f64 / (size * size) as f64);
                out.record(steps <= size * size, || {
                    format!("{which:?} took {steps} steps on {size} nodes: {e}")
                });
            }
            Err(err) => out.record(false, || format!("{which:?} on {e}: {err}")),
        }
    }
    out.detail = format!(
        "dist and dept alternating, {total_steps} steps, worst steps/nodes^2 = {worst:.3}"
    );
    out
}

// ---------------------------------------------------------------------
// 7-9. Random rewriting.

/// One random step of a rule other than `dept`, at an unrestricted redex
/// accepted by `keep`, with `absp` witnesses from `pool`.
fn random_redo_step<R: Rng>(
    rng: &mut R,
    e: &Expr,
    pool: &[Expr],
    keep: impl Fn(&Position) -> bool,
) -> Option<(Rule, Position, Expr)> {
    for _ in 0..32 {
        let kind = *RuleKind::REDO.choose(rng)?;
        let rule = if kind == RuleKind::Absp {
            Rule::absp(pool.choose(rng)?.clone())
        } else {
            Rule::new(kind)
        };
        let found: Vec<Position> = redexes(e, &rule, false)
            .ok()?
            .into_iter()
            .filter(|p| keep(p))
            .collect();
        if let Some(pos) = found.choose(rng) {
            let next = apply(e, &rule, pos).ok()?;
            return Some((rule, pos.clone(), next));
        }
    }
    None
}

fn walk<R: Rng>(rng: &mut R, start: &Expr, steps: usize, pool: &[Expr]) -> Expr {
    let mut current = start.clone();
    for _ in 0..steps {
        if let Some((_, _, next)) = random_redo_step(rng, &current, pool, |_| true) {
            current = next;
        }
    }
    current
}

pub const PEAK_BUDGET: usize = 2000;

fn confluence(rng: &mut ChaCha8Rng) -> Outcome {
    let atoms = atom_set(3);
    let mut out = Outcome::new();
    let mut nontrivial = 0;
    for _ in 0..1000 {
        let source = random_expr_up_to(rng, 12, &atoms);
        let pool = default_witnesses(&source, &source);
        let left_steps = rng.random_range(0..=4);
        let right_steps = rng.random_range(0..=4);
        let left = walk(rng, &source, left_steps, &pool);
        let right = walk(rng, &source, right_steps, &pool);
        nontrivial += usize::from(slat_canonical(&left) != slat_canonical(&right));
        let v = convertible_bounded(&left, &right, PEAK_BUDGET, &pool);
        out.record(v.is_confirmed(), || {
            format!("from {source}: {left} and {right} did not rejoin")
        });
    }
    out.detail = format!(
        "budget {PEAK_BUDGET}, {nontrivial} peaks with slat-distinct ends"
    );
    out
}

/// A factor with every argument in `slat`-canonical form.
fn canonical_factors(e: &Expr) -> HashSet<Factor> {
    factors(e)
        .into_iter()
        .map(|f| Factor {
            args: f.args.iter().map(slat_canonical).collect(),
            head: f.head,
        })
        .collect()
}

fn complete_invariants(rng: &mut ChaCha8Rng) -> Outcome {
    let atoms = atom_set(3);
    let mut out = Outcome::new();
    let mut by_rule: HashMap<RuleKind, (usize, usize)> = HashMap::new();
    while out.checked < 1000 {
        let before = random_expr_up_to(rng, 15, &atoms);
        let pool = default_witnesses(&before, &before);
        let strictly_positive = |p: &Position| p.polarity() == Polarity::StrictlyPositive;
        let Some((rule, pos, after)) = random_redo_step(rng, &before, &pool, strictly_positive)
        else {
            continue;
        };
        let old = canonical_factors(&before);
        let new = canonical_factors(&after);
        let mut ok = old.is_subset(&new);

        let extras: Vec<Expr> = after.preorder().into_iter().cloned().collect();
        let mut used_extra = false;
        for g in &new {
            let candidates = old
                .iter()
                .filter(|f| f.head == g.head && f.arity() == g.arity());
            let plain = candidates.clone().any(|f| f.args == g.args);
            let widened = !plain
                && candidates.clone().any(|f| {
                    f.args.iter().zip(&g.args).all(|(a, b)| {
                        a == b
                            || extras.iter().any(|d| {
                                slat_canonical(&Expr::meet(a.clone(), d.clone())) == *b
                            })
                    })
                });
            used_extra |= widened;
            ok &= plain || widened;
        }
        let entry = by_rule.entry(rule.kind).or_default();
        entry.0 += 1;
        entry.1 += usize::from(used_extra);
        out.record(ok, || format!("{rule} at {pos:?}: {before}  =>  {after}"));
    }
    let mut kinds: Vec<_> = by_rule.into_iter().collect();
    kinds.sort();
    out.detail = kinds
        .iter()
        .map(|(k, (n, extra))| format!("{k} {n} (nonempty D: {extra})"))
        .collect::<Vec<_>>()
        .join(", ");
    out
}

pub const CONSERVATION_BUDGET: usize = 2000;

fn conservation(rng: &mut ChaCha8Rng) -> Outcome {
    let atoms = atom_set(3);
    let mut out = Outcome::new();
    let mut with_dept = 0;
    while out.checked < 200 {
        // At depth 0 nothing can grow past the cut, so it is drawn rarely.
        let n = *[0, 1, 1, 2, 2].choose(rng).expect("nonempty");
        let a = random_expr_up_to(rng, 9, &atoms);
        if a.arrow_depth() > n || (n > 0 && a.arrow_depth() == 0) {
            continue;
        }
        let pool = default_witnesses(&a, &a);
        let dept = Rule::dept(n);
        let mut current = a.clone();
        let mut used_dept = false;
        for _ in 0..rng.random_range(1..=5) {
            let dept_sites = redexes(&current, &dept, false).unwrap_or_default();
            if !dept_sites.is_empty() && rng.random_bool(0.5) {
                let pos = dept_sites.choose(rng).expect("nonempty");
                current = apply(&current, &dept, pos).expect("listed redex");
                used_dept = true;
                continue;
            }
            // Absorbing a witness deeper than `n` gives `dept` something
            // to cut.
            let arrows = redexes(&current, &Rule::absp(Expr::at()), false).unwrap_or_default();
            if !arrows.is_empty() && rng.random_bool(0.5) {
                let deep = Expr::arrow(
                    random_expr_up_to(rng, 3, &atoms),
                    random_expr_up_to(rng, 3, &atoms),
                );
                let rule = Rule::absp(deep);
                let pos = arrows.choose(rng).expect("nonempty");
                current = apply(&current, &rule, pos).expect("listed redex");
            } else if let Some((_, _, next)) = random_redo_step(rng, &current, &pool, |_| true) {
                current = next;
            }
        }
        let b = dept_normal_form(&current, n);
        used_dept |= b != current;
        with_dept += usize::from(used_dept);
        let witnesses = default_witnesses(&a, &b);
        let v = convertible_bounded(&a, &b, CONSERVATION_BUDGET, &witnesses);
        out.record(v.is_confirmed(), || {
            format!("n={n}: {a} reached {b} but no dept-free conversion was found")
        });
    }
    out.detail = format!(
        "budget {CONSERVATION_BUDGET}, {with_dept} instances used dept"
    );
    out
}

// ---------------------------------------------------------------------
// 10-11. The matrix algorithm.

pub const SCALING_SIZES: [usize; 4] = [200, 400, 800, 1600];
pub const MAX_EXPONENT: f64 = 5.5;

/// Median wall time of `subtype_matrix` on `e` over a few runs.
pub fn time_matrix(e: &Expr) -> Duration {
    let mut times: Vec<Duration> = (0..3)
        .map(|_| {
            let start = Instant::now();
            let m = subtype_matrix(e);
            std::hint::black_box(m.len());
            start.elapsed()
        })
        .collect();
    times.sort();
    times[1]
}

/// Least-squares slope of `ln t` against `ln n`.
pub fn fitted_exponent(points: &[(usize, Duration)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let ys: Vec<f64> = points
        .iter()
        .map(|(_, t)| t.as_secs_f64().max(1e-9).ln())
        .collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn scaling(rng: &mut ChaCha8Rng) -> Outcome {
    let atoms = atom_set(3);
    let mut out = Outcome::new();
    let points: Vec<(usize, Duration)> = SCALING_SIZES
        .iter()
        .map(|&n| (n, time_matrix(&random_expr(rng, n + 1, &atoms))))
        .collect();
    let exponent = fitted_exponent(&points);
    out.record(exponent <= MAX_EXPONENT, || {
        format!("fitted exponent {exponent:.2} > {MAX_EXPONENT}")
    });

    let big = random_expr(rng, 1001, &atoms);
    let start = Instant::now();
    let m = subtype_matrix(&big);
    let thousand = start.elapsed();
    std::hint::black_box(m.len());
    out.record(thousand < Duration::from_secs(1), || {
        format!("1000-node instance took {thousand:?}")
    });

    out.detail = format!(
        "{} ; exponent {exponent:.2} (max {MAX_EXPONENT}); 1000 nodes in {:.3}s",
        points
            .iter()
            .map(|(n, t)| format!("{n}:{:.3}s", t.as_secs_f64()))
            .collect::<Vec<_>>()
            .join(" "),
        thousand.as_secs_f64()
    );
    out
}

fn matrix_agreement(rng: &mut ChaCha8Rng) -> Outcome {
    let atoms = atom_set(3);
    let mut out = Outcome::new();
    let mut entries = 0usize;
    for _ in 0..100 {
        let root = random_expr_up_to(rng, 80, &atoms);
        let m = subtype_matrix(&root);
        // Fill order relies on factor arguments following their owner.
        let nodes = root.preorder();
        let ordered = occurrence_factors(&nodes)
            .iter()
            .enumerate()
            .all(|(i, fs)| fs.iter().all(|f| f.args.iter().all(|&a| a > i)));
        out.record(ordered, || format!("factor argument precedes its owner in {root}"));

        let mut d = Decider::new();
        let mut first = None;
        for i in 0..m.len() {
            for j in 0..m.len() {
                entries += 1;
                if m.get(i, j) != d.subseteq(&m.exprs[i], &m.exprs[j]) && first.is_none() {
                    first = Some((i, j));
                }
            }
        }
        out.record(first.is_none(), || {
            let (i, j) = first.expect("set on failure");
            format!("entry ({i},{j}) of {root}: {} vs {}", m.exprs[i], m.exprs[j])
        });
    }
    out.detail = format!("{entries} entries compared");
    out
}

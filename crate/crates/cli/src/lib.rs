//! The `bcd` command line.
//!
//! Exit codes: 0 success or true, 1 decided false, 2 usage or parse error,
//! 3 resource limit. With `--json` every verb prints exactly one JSON object
//! on standard output; diagnostics always go to standard error.

use std::io::{BufRead, Write};

use bcd::decide::explain;
use bcd::gen::{atom_set, seeded_expr};
use bcd::model::StackOfTwos;
use bcd::selftest::{self, fitted_exponent, time_matrix};
use bcd::{
    build_model, dept_normal_form, dist_normal_form, factor_to_expr, factors, parse, render,
    satisfies_eq, slat_canonical, subseteq, Atom, Decider, Expr, Format,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "bcd", version, about = "Intersection types: normal forms, subtyping, finite models")]
struct Cli {
    /// Print a single JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse an expression and print it back with minimal parentheses.
    Parse { expr: String },
    /// Print a normal form.
    Nf {
        #[arg(long, value_enum)]
        kind: NfKind,
        /// Depth parameter, required for `--kind dept`.
        #[arg(long)]
        depth: Option<usize>,
        expr: String,
    },
    /// Print the factors of an expression, one per line.
    Factors { expr: String },
    /// Decide `A ⊆ B`; exits 0 when it holds and 1 when it does not.
    Le {
        a: String,
        b: String,
        /// Print the factor-matching derivation as JSON.
        #[arg(long)]
        explain: bool,
    },
    /// Decide `A ~ B`; exits 0 when it holds and 1 when it does not.
    Eq {
        a: String,
        b: String,
        /// Print the factor-matching derivations of both inclusions.
        #[arg(long)]
        explain: bool,
    },
    /// Decide whether `A = B` holds in the finite model F(N).
    Sat {
        #[arg(long)]
        depth: usize,
        a: String,
        b: String,
    },
    /// Build the finite model F(N) and report its size and bound.
    Model {
        /// Comma-separated atoms; must include `@`.
        #[arg(long, value_delimiter = ',', default_value = "@")]
        atoms: Vec<String>,
        #[arg(long)]
        depth: usize,
        /// Also print the carrier and the operation tables.
        #[arg(long)]
        tables: bool,
    },
    /// Time the subtype matrix on random expressions of the given sizes.
    Bench {
        /// Node counts to measure.
        #[arg(long, value_delimiter = ',', default_value = "200,400,800,1600")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Atoms used by the random expressions.
        #[arg(long, default_value_t = 3)]
        atoms: usize,
        /// Read newline-separated expressions from standard input instead.
        #[arg(long)]
        stdin: bool,
    },
    /// Run the desk-scale acceptance checks.
    Selftest {
        /// Run only these criteria (by number).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        #[arg(long, default_value_t = selftest::DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum NfKind {
    Dist,
    Dept,
    Slat,
}

/// Why a verb could not produce an answer.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Limit(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Limit(_) => EXIT_LIMIT,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Limit(m) => m,
        }
    }
}

impl From<bcd::Error> for Failure {
    fn from(e: bcd::Error) -> Self {
        if e.is_resource_limit() {
            Failure::Limit(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

/// A finished verb: its text and JSON renderings and its exit code.
struct Answer {
    text: String,
    json: Value,
    code: i32,
}

impl Answer {
    fn ok(text: String, json: Value) -> Answer {
        Answer {
            text,
            json,
            code: EXIT_TRUE,
        }
    }

    fn verdict(holds: bool, text: String, json: Value) -> Answer {
        Answer {
            text,
            json,
            code: if holds { EXIT_TRUE } else { EXIT_FALSE },
        }
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code. Output is written only once the verb has succeeded.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_TRUE
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli.command, stdin) {
        Ok(answer) => {
            let written = if cli.json {
                writeln!(out, "{}", answer.json)
            } else {
                write!(out, "{}", answer.text)
            };
            if written.is_err() {
                return EXIT_USAGE;
            }
            answer.code
        }
        Err(failure) => {
            let _ = if cli.json {
                let kind = if failure.code() == EXIT_LIMIT { "limit" } else { "usage" };
                writeln!(err, "{}", json!({"error": {"kind": kind, "message": failure.message()}}))
            } else {
                writeln!(err, "bcd: {}", failure.message())
            };
            failure.code()
        }
    }
}

fn expr(text: &str) -> Result<Expr, Failure> {
    parse(text).map_err(|e| Failure::Usage(format!("`{text}`: {e}")))
}

fn ast(e: &Expr) -> Value {
    serde_json::to_value(e).expect("expressions serialize")
}

fn execute(command: &Command, stdin: &mut dyn BufRead) -> Result<Answer, Failure> {
    match command {
        Command::Parse { expr: text } => {
            let e = expr(text)?;
            let ascii = render(&e, Format::Ascii);
            Ok(Answer::ok(
                format!("{ascii}\n"),
                json!({
                    "expr": ast(&e),
                    "ascii": ascii,
                    "size": e.size(),
                    "arrow_depth": e.arrow_depth(),
                }),
            ))
        }
        Command::Nf { kind, depth, expr: text } => {
            let e = expr(text)?;
            let result = match (kind, depth) {
                (NfKind::Dist, _) => dist_normal_form(&e),
                (NfKind::Slat, _) => slat_canonical(&e),
                (NfKind::Dept, Some(n)) => dept_normal_form(&e, *n),
                (NfKind::Dept, None) => {
                    return Err(Failure::Usage("--kind dept needs --depth".into()))
                }
            };
            let ascii = render(&result, Format::Ascii);
            let kind = match kind {
                NfKind::Dist => "dist",
                NfKind::Dept => "dept",
                NfKind::Slat => "slat",
            };
            Ok(Answer::ok(
                format!("{ascii}\n"),
                json!({"kind": kind, "depth": depth, "result": ast(&result), "ascii": ascii}),
            ))
        }
        Command::Factors { expr: text } => {
            let e = expr(text)?;
            let fs = factors(&e);
            let text: String = fs
                .iter()
                .map(|f| format!("{}\n", factor_to_expr(f)))
                .collect();
            Ok(Answer::ok(text, json!({ "factors": fs })))
        }
        Command::Le { a, b, explain: why } => {
            let (a, b) = (expr(a)?, expr(b)?);
            let holds = subseteq(&a, &b);
            let explanation = why.then(|| json!(explain(&a, &b)));
            Ok(verdict_answer("le", &a, &b, holds, explanation))
        }
        Command::Eq { a, b, explain: why } => {
            let (a, b) = (expr(a)?, expr(b)?);
            let holds = Decider::new().equiv(&a, &b);
            let explanation =
                why.then(|| json!({"forward": explain(&a, &b), "backward": explain(&b, &a)}));
            Ok(verdict_answer("eq", &a, &b, holds, explanation))
        }
        Command::Sat { depth, a, b } => {
            let (a, b) = (expr(a)?, expr(b)?);
            let holds = satisfies_eq(*depth, &a, &b);
            Ok(Answer::verdict(
                holds,
                format!("{holds}\n"),
                json!({"depth": depth, "a": ast(&a), "b": ast(&b), "holds": holds}),
            ))
        }
        Command::Model { atoms, depth, tables } => model(atoms, *depth, *tables),
        Command::Bench { sizes, seed, atoms, stdin: batch } => {
            let inputs: Vec<Expr> = if *batch {
                read_batch(stdin)?
            } else {
                if *atoms == 0 {
                    return Err(Failure::Usage("--atoms must be positive".into()));
                }
                let pool = atom_set(*atoms);
                sizes
                    .iter()
                    .enumerate()
                    .map(|(i, &n)| seeded_expr(seed.wrapping_add(i as u64), n + 1, &pool))
                    .collect()
            };
            Ok(bench(&inputs))
        }
        Command::Selftest { only, seed } => {
            let ids: Vec<u8> = if only.is_empty() {
                selftest::criteria().map(|(id, _)| id).collect()
            } else {
                only.clone()
            };
            let mut reports = Vec::new();
            for id in ids {
                let report = selftest::run(id, *seed)
                    .ok_or_else(|| Failure::Usage(format!("no criterion {id}")))?;
                reports.push(report);
            }
            let passed = reports.iter().all(|r| r.passed);
            let mut text = String::new();
            for r in &reports {
                text.push_str(&r.line());
                text.push('\n');
                if let Some(c) = &r.counterexample {
                    text.push_str(&format!("       first failure: {c}\n"));
                }
            }
            Ok(Answer::verdict(
                passed,
                text,
                json!({"passed": passed, "criteria": reports}),
            ))
        }
    }
}

fn verdict_answer(relation: &str, a: &Expr, b: &Expr, holds: bool, explanation: Option<Value>) -> Answer {
    let mut text = format!("{holds}\n");
    if let Some(x) = &explanation {
        text.push_str(&serde_json::to_string_pretty(x).expect("json"));
        text.push('\n');
    }
    let mut json = json!({"relation": relation, "a": ast(a), "b": ast(b), "holds": holds});
    if let Some(x) = explanation {
        json["explanation"] = x;
    }
    Answer::verdict(holds, text, json)
}

fn model(names: &[String], depth: usize, tables: bool) -> Result<Answer, Failure> {
    let atoms: Vec<Atom> = names
        .iter()
        .map(|n| Atom::new(n.trim()))
        .collect::<Result<_, _>>()?;
    let f = build_model(&atoms, depth)?;
    let bound = StackOfTwos::carrier_bound(f.atoms.len(), f.depth)?;
    let atom_names: Vec<&str> = f.atoms.iter().map(Atom::name).collect();
    let carrier: Vec<String> = f.carrier.iter().map(|c| c.to_string()).collect();

    let mut text = format!(
        "atoms: {}\ndepth: {}\ncarrier size: {}\nbound: s({}, {}) = {}\n",
        atom_names.join(", "),
        f.depth,
        f.len(),
        bound.n,
        bound.m,
        bound.value
    );
    let mut json = json!({
        "atoms": atom_names,
        "depth": f.depth,
        "size": f.len(),
        "bound": bound,
        "carrier": carrier,
    });
    if tables {
        text.push_str("carrier:\n");
        for (i, c) in carrier.iter().enumerate() {
            text.push_str(&format!("  {i}: {c}\n"));
        }
        for (name, table) in [("meet", &f.meet_table), ("arrow", &f.arrow_table)] {
            text.push_str(&format!("{name} table:\n"));
            for row in table.iter() {
                let cells: Vec<String> = row.iter().map(usize::to_string).collect();
                text.push_str(&format!("  {}\n", cells.join(" ")));
            }
        }
        json["meet_table"] = json!(f.meet_table);
        json["arrow_table"] = json!(f.arrow_table);
    }
    Ok(Answer::ok(text, json))
}

fn read_batch(stdin: &mut dyn BufRead) -> Result<Vec<Expr>, Failure> {
    let mut exprs = Vec::new();
    for (i, line) in stdin.lines().enumerate() {
        let line = line.map_err(|e| Failure::Usage(format!("reading input: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let e = parse(&line).map_err(|e| Failure::Usage(format!("line {}: {e}", i + 1)))?;
        exprs.push(e);
    }
    if exprs.is_empty() {
        return Err(Failure::Usage("no expressions on standard input".into()));
    }
    Ok(exprs)
}

fn bench(inputs: &[Expr]) -> Answer {
    let points: Vec<_> = inputs.iter().map(|e| (e.size(), time_matrix(e))).collect();
    let mut text = String::from("nodes\tseconds\n");
    for (n, t) in &points {
        text.push_str(&format!("{n}\t{:.6}\n", t.as_secs_f64()));
    }
    let distinct_sizes = {
        let mut s: Vec<usize> = points.iter().map(|p| p.0).collect();
        s.sort();
        s.dedup();
        s.len()
    };
    let exponent = (distinct_sizes >= 2).then(|| fitted_exponent(&points));
    if let Some(x) = exponent {
        text.push_str(&format!("fitted exponent: {x:.2}\n"));
    }
    let json_points: Vec<Value> = points
        .iter()
        .map(|(n, t)| json!({"nodes": n, "seconds": t.as_secs_f64()}))
        .collect();
    Answer::ok(text, json!({"points": json_points, "exponent": exponent}))
}

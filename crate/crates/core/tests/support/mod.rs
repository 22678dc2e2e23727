//! Generators and brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use patcov_core::refutability::SliceRule;
use patcov_core::runtime::{load_suite, run_suite, RunOptions, SuiteResult, TriState, Value};
use patcov_core::syntax::IntTy;
use patcov_core::types::{typed_pattern, TPat, Ty, TypeEnv, TypedProgram};
use patcov_core::{analyze, Analysis};
use rand::rngs::StdRng;
use rand::Rng;

/// Item declarations every generated pattern may refer to.
pub const ITEMS: &str = "enum Color { Red, Green, Blue }
enum Shape { Dot, Line(bool), Pair(Color, bool) }
struct P { a: bool, c: Color }";

/// Generated types stay small enough to enumerate.
pub const MAX_VALUES: u64 = 4096;
pub const MAX_SLICE_LEN: usize = 4;

#[derive(Clone, Debug)]
pub enum G {
    Bool,
    U8,
    Color,
    Shape,
    P,
    Opt(Box<G>),
    Tup(Vec<G>),
    Arr(Box<G>),
    Slice(Box<G>),
    Ref(Box<G>),
}

impl G {
    pub fn text(&self) -> String {
        match self {
            G::Bool => "bool".into(),
            G::U8 => "u8".into(),
            G::Color => "Color".into(),
            G::Shape => "Shape".into(),
            G::P => "P".into(),
            G::Opt(t) => format!("Option<{}>", t.text()),
            G::Tup(ts) => format!("({})", ts.iter().map(G::text).collect::<Vec<_>>().join(", ")),
            G::Arr(t) => format!("[{}; 2]", t.text()),
            G::Slice(t) => format!("&[{}]", t.text()),
            G::Ref(t) => format!("&{}", t.text()),
        }
    }

    pub fn card(&self) -> u64 {
        match self {
            G::Bool => 2,
            G::U8 => 256,
            G::Color => 3,
            G::Shape => 1 + 2 + 6,
            G::P => 6,
            G::Opt(t) => 1 + t.card(),
            G::Tup(ts) => ts.iter().map(G::card).product(),
            G::Arr(t) => t.card().pow(2),
            G::Slice(t) => (0..=MAX_SLICE_LEN as u32).map(|k| t.card().pow(k)).sum(),
            G::Ref(t) => t.card(),
        }
    }
}

fn gen_leaf(rng: &mut StdRng) -> G {
    match rng.random_range(0..5) {
        0 => G::Bool,
        1 => G::U8,
        2 => G::Color,
        3 => G::Shape,
        _ => G::P,
    }
}

fn gen_ty_at(rng: &mut StdRng, depth: u32) -> G {
    if depth == 0 || rng.random_bool(0.35) {
        return gen_leaf(rng);
    }
    match rng.random_range(0..5) {
        0 => G::Opt(Box::new(gen_ty_at(rng, depth - 1))),
        1 => G::Tup((0..rng.random_range(2..=3)).map(|_| gen_ty_at(rng, depth - 1)).collect()),
        2 => G::Arr(Box::new(gen_ty_at(rng, depth - 1))),
        3 => {
            let elem = match rng.random_range(0..3) {
                0 => G::Bool,
                1 => G::Color,
                _ => G::Opt(Box::new(G::Bool)),
            };
            G::Slice(Box::new(elem))
        }
        _ => G::Ref(Box::new(gen_ty_at(rng, depth - 1))),
    }
}

/// A random type with at most [`MAX_VALUES`] values.
pub fn gen_ty(rng: &mut StdRng) -> G {
    loop {
        let t = gen_ty_at(rng, 3);
        if t.card() <= MAX_VALUES {
            return t;
        }
    }
}

pub struct PatGen<'a> {
    pub rng: &'a mut StdRng,
    binds: u32,
}

impl<'a> PatGen<'a> {
    pub fn new(rng: &'a mut StdRng) -> Self {
        PatGen { rng, binds: 0 }
    }

    fn name(&mut self) -> String {
        self.binds += 1;
        format!("x{}", self.binds)
    }

    fn u8_pat(&mut self, slice_elem: bool) -> String {
        let a: u8 = self.rng.random();
        let b: u8 = self.rng.random();
        let (lo, hi) = (a.min(b), a.max(b));
        match self.rng.random_range(0..6) {
            0 | 1 => a.to_string(),
            2 => format!("{lo}..={hi}"),
            3 if lo < hi => format!("{lo}..{hi}"),
            4 if slice_elem => format!("({lo}..)"),
            4 => format!("{lo}.."),
            _ => format!("..={hi}"),
        }
    }

    /// A pattern for `t`. Or-alternatives bind nothing, so bindings are
    /// only generated outside of them.
    pub fn pat(&mut self, t: &G, depth: u32, in_or: bool, slice_elem: bool) -> String {
        let roll = self.rng.random_range(0..100);
        if roll < 12 {
            return "_".into();
        }
        if roll < 20 && !in_or {
            return self.name();
        }
        if roll < 25 && !in_or && depth > 0 {
            let n = self.name();
            return format!("{n} @ {}", self.pat(t, depth - 1, in_or, false));
        }
        if roll < 33 && depth > 0 {
            let a = self.pat(t, depth - 1, true, false);
            let b = self.pat(t, depth - 1, true, false);
            return format!("({a} | {b})");
        }
        let d = depth.saturating_sub(1);
        match t {
            G::Bool => (if self.rng.random() { "true" } else { "false" }).into(),
            G::U8 => self.u8_pat(slice_elem),
            G::Color => ["Color::Red", "Color::Green", "Color::Blue"][self.rng.random_range(0..3)].into(),
            G::Shape => match self.rng.random_range(0..4) {
                0 => "Shape::Dot".into(),
                1 => format!("Shape::Line({})", self.pat(&G::Bool, d, in_or, false)),
                2 => format!(
                    "Shape::Pair({}, {})",
                    self.pat(&G::Color, d, in_or, false),
                    self.pat(&G::Bool, d, in_or, false)
                ),
                _ => format!("Shape::Pair({}, ..)", self.pat(&G::Color, d, in_or, false)),
            },
            G::P => match self.rng.random_range(0..3) {
                0 => format!("P {{ a: {}, c: {} }}", self.pat(&G::Bool, d, in_or, false), self.pat(&G::Color, d, in_or, false)),
                1 => format!("P {{ c: {}, .. }}", self.pat(&G::Color, d, in_or, false)),
                _ => "P { .. }".into(),
            },
            G::Opt(inner) => {
                if self.rng.random_bool(0.3) {
                    "None".into()
                } else {
                    format!("Some({})", self.pat(inner, d, in_or, false))
                }
            }
            G::Tup(ts) => {
                let mut parts: Vec<String> = ts.iter().map(|x| self.pat(x, d, in_or, false)).collect();
                if self.rng.random_bool(0.25) {
                    let keep = self.rng.random_range(0..parts.len());
                    parts.truncate(keep);
                    parts.push("..".into());
                }
                format!("({})", parts.join(", "))
            }
            G::Arr(inner) => match self.rng.random_range(0..4) {
                0 => format!("[{}, {}]", self.pat(inner, d, in_or, true), self.pat(inner, d, in_or, true)),
                1 => format!("[{}, ..]", self.pat(inner, d, in_or, true)),
                2 => format!("[.., {}]", self.pat(inner, d, in_or, true)),
                _ => "[..]".into(),
            },
            G::Slice(inner) => {
                let k = self.rng.random_range(0..=3);
                let mut elems: Vec<String> = (0..k).map(|_| self.pat(inner, d, in_or, true)).collect();
                if self.rng.random_bool(0.5) {
                    let at = self.rng.random_range(0..=elems.len());
                    let rest = if !in_or && self.rng.random_bool(0.3) {
                        format!("{} @ ..", self.name())
                    } else {
                        "..".into()
                    };
                    elems.insert(at, rest);
                }
                let body = format!("[{}]", elems.join(", "));
                if self.rng.random_bool(0.5) {
                    format!("&{body}")
                } else {
                    body
                }
            }
            G::Ref(inner) => {
                let p = self.pat(inner, d, in_or, false);
                if self.rng.random_bool(0.5) && !p.contains(" @ ") && !p.contains('|') {
                    format!("&{p}")
                } else {
                    p
                }
            }
        }
    }
}

/// A well-typed random pattern with its program, or `None` when the
/// generated text is rejected (for example an empty range).
pub fn gen_pattern(rng: &mut StdRng) -> Option<(G, String, TypedProgram, TPat)> {
    let t = gen_ty(rng);
    let text = PatGen::new(rng).pat(&t, 3, false, false);
    let (tp, p) = typed_pattern(ITEMS, &t.text(), &text).ok()?;
    Some((t, text, tp, p))
}

/// Every value of an enumerable type, with slices up to [`MAX_SLICE_LEN`].
pub fn all_values(t: &Ty, env: &TypeEnv) -> Vec<Value> {
    let product = |tys: &[Ty]| -> Vec<Vec<Value>> {
        let mut acc: Vec<Vec<Value>> = vec![Vec::new()];
        for t in tys {
            let vs = all_values(t, env);
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    vs.iter().map(move |v| {
                        let mut p = prefix.clone();
                        p.push(v.clone());
                        p
                    })
                })
                .collect();
        }
        acc
    };
    match t {
        Ty::Bool => vec![Value::Bool(false), Value::Bool(true)],
        Ty::Int(IntTy::U8) => (0..=255).map(|n| Value::Int(IntTy::U8, n)).collect(),
        Ty::Int(IntTy::I8) => (-128..=127).map(|n| Value::Int(IntTy::I8, n)).collect(),
        Ty::Enum(e) => env
            .enum_info(*e)
            .variants
            .iter()
            .enumerate()
            .flat_map(|(i, v)| {
                product(&v.fields.tys).into_iter().map(move |fields| Value::Enum {
                    ty: *e,
                    variant: i as u32,
                    fields,
                })
            })
            .collect(),
        Ty::Struct(s) => product(&env.struct_info(*s).fields.tys)
            .into_iter()
            .map(|fields| Value::Struct { ty: *s, fields })
            .collect(),
        Ty::Tuple(ts) => product(ts).into_iter().map(Value::Tuple).collect(),
        Ty::Array(elem, n) => product(&vec![(**elem).clone(); *n as usize]).into_iter().map(Value::Seq).collect(),
        Ty::Slice(elem) => (0..=MAX_SLICE_LEN)
            .flat_map(|k| product(&vec![(**elem).clone(); k]))
            .map(Value::Seq)
            .collect(),
        Ty::Ref { inner, .. } => all_values(inner, env),
        other => panic!("type {other:?} is not enumerable"),
    }
}

/// Whether a typed pattern contains a slice pattern over a dynamically
/// sized slice.
pub fn has_dynamic_slice(p: &TPat) -> bool {
    let mut found = false;
    p.walk(&mut |n| {
        found |= matches!(n.kind, patcov_core::types::TPatKind::Slice { array_len: None, .. });
    });
    found
}

/// The pair rule written out literally: condition `i` flips, the outcome
/// flips, and every other condition evaluated in both vectors agrees.
pub fn naive_pair(i: usize, a: (&[TriState], bool), b: (&[TriState], bool)) -> bool {
    let (x, y) = (a.0, b.0);
    let flips = matches!(
        (x[i], y[i]),
        (TriState::True, TriState::False) | (TriState::False, TriState::True)
    );
    let others = (0..x.len()).filter(|&j| j != i).all(|j| {
        x[j] == TriState::NotEvaluated || y[j] == TriState::NotEvaluated || x[j] == y[j]
    });
    flips && a.1 != b.1 && others
}

/// Naive MC/DC over a set of observed vectors: both outcomes, and an
/// independence pair for every condition found by trying all pairs.
pub fn naive_mcdc(n: usize, vectors: &[(Vec<TriState>, bool)]) -> bool {
    let outcomes = vectors.iter().any(|v| v.1) && vectors.iter().any(|v| !v.1);
    outcomes
        && (0..n).all(|i| {
            vectors
                .iter()
                .any(|a| vectors.iter().any(|b| naive_pair(i, (&a.0, a.1), (&b.0, b.1))))
        })
}

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

pub fn corpus_file(name: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn analyze_corpus(name: &str, rule: SliceRule) -> Analysis {
    analyze(name, &corpus_file(name), rule).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Every corpus program paired with each of its suites (`prog.toml` and
/// `prog.*.toml`), sorted by file name.
pub fn corpus_suites() -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut entries: Vec<_> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.expect("entry").file_name().to_string_lossy().into_owned())
        .collect();
    entries.sort();
    for f in &entries {
        if let Some(stem) = f.strip_suffix(".toml") {
            let prog = format!("{}.rps", stem.split('.').next().unwrap_or(stem));
            out.push((prog, f.clone()));
        }
    }
    out
}

pub fn run_corpus_suite(a: &Analysis, suite: &str, parallel: bool) -> SuiteResult {
    let tests = load_suite(&corpus_file(suite), &a.source, &a.typed).unwrap_or_else(|e| panic!("{suite}: {e}"));
    run_suite(&a.typed, &a.decisions, &a.program_hash, &tests, RunOptions::default(), parallel)
}

/// Types several patterns as arms of one match on a value of type `ty`,
/// followed by a catch-all arm.
pub fn typed_arms(ty: &str, pats: &[String]) -> Option<(TypedProgram, Vec<TPat>)> {
    use patcov_core::syntax::visit::{walk_expr, Visitor};
    use patcov_core::syntax::{Expr, ExprKind, NodeId};
    let arms: String = pats.iter().map(|p| format!("        {p} => {{}}\n")).collect();
    let src = format!("{ITEMS}\nfn probe(x: {ty}) {{\n    match x {{\n{arms}        _ => {{}}\n    }}\n}}\n");
    let program = patcov_core::syntax::parse_program("arms.rps", &src).ok()?;
    let tp = patcov_core::types::check_program(program).ok()?;
    struct Arms(Vec<NodeId>);
    impl Visitor for Arms {
        fn visit_expr(&mut self, e: &Expr) {
            if let ExprKind::Match { arms, .. } = &e.kind {
                self.0.extend(arms.iter().map(|a| a.pat.id));
            }
            walk_expr(self, e);
        }
    }
    let mut v = Arms(Vec::new());
    patcov_core::syntax::visit::walk_program(&mut v, &tp.program);
    let typed = v.0[..pats.len()].iter().map(|id| tp.patterns[id].clone()).collect();
    Some((tp, typed))
}

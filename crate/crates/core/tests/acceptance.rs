//! Acceptance run: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always reach the output.

mod support;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use patcov_core::coverage::{check_mcdc, coverage_report, CoverageOptions, Criterion, ObligationKind};
use patcov_core::decisions::{ConditionKind, Origin};
use patcov_core::refutability::{classify, pattern_refutability, dump, Refutability, RefutabilityClass, SliceRule};
use patcov_core::runtime::{evaluate, pattern_matches, RunOptions, Trace, TriState, Value};
use patcov_core::types::denotation;
use patcov_core::{analyze, AnalysisError};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use support::*;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("worked examples", worked_examples),
        ("refutability oracle", refutability_oracle),
        ("denotation/matcher coherence", denotation_coherence),
        ("MC/DC vs all-pairs oracle", mcdc_oracle),
        ("metric subsumption", subsumption),
        ("const exemption", const_exemption),
        ("`?` desugaring equivalence", question_mark_equivalence),
        ("determinism and merge laws", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let t = start.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("criterion {} ({name}): PASS in {t:.2}s; {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL in {t:.2}s; {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 8 criteria passed");
}

fn worked_examples() -> Outcome {
    let start = Instant::now();
    let rule = SliceRule::Verbatim;

    let a = analyze_corpus("enum_match.rps", rule);
    let shape: Vec<_> = a.decisions.decisions.iter().map(|d| (d.conditions.len(), d.pruned)).collect();
    ensure!(shape == [(1, false), (2, false), (1, true)], "enum arms: {shape:?}");
    let arm2 = &a.typed.patterns[&a.decisions.decisions[1].node];
    let ann = classify(arm2, &a.typed.env, rule);
    let mut classes = Vec::new();
    arm2.walk(&mut |n| classes.push(ann.class(n)));
    use RefutabilityClass::*;
    ensure!(
        classes == [DirectlyRefutable, IndirectlyRefutable, DirectlyRefutable],
        "Passenger(n @ ..=8) classes: {classes:?}"
    );

    let a = analyze_corpus("complex_pattern.rps", rule);
    ensure!(a.decisions.decisions.len() == 1, "complex pattern decisions");
    let d = &a.decisions.decisions[0];
    ensure!(d.conditions.len() == 5, "complex pattern has {} conditions", d.conditions.len());
    ensure!(
        matches!(d.conditions[0].kind, ConditionKind::SliceLenCheck { len: 3, at_least: false }),
        "length check first"
    );
    let root = &a.typed.patterns[&d.node];
    let tree = dump(&classify(root, &a.typed.env, rule), &a.typed.env);
    let kinds: Vec<&str> = tree.lines().map(|l| l.trim_start().split(' ').next().unwrap_or("")).collect();
    ensure!(
        kinds == ["Reference", "Slice", "TupleStruct", "Identifier", "Path", "TupleStruct", "Range"],
        "tree shape {kinds:?}"
    );

    let src = corpus_file("non_exhaustive.rps");
    match analyze("non_exhaustive.rps", &src, rule) {
        Err(AnalysisError::Type(e)) => ensure!(e.witness.as_deref() == Some("1"), "witness {:?}", e.witness),
        other => return Err(format!("non-exhaustive match accepted: {:?}", other.map(|_| ()))),
    }

    let a = analyze_corpus("nested_if.rps", rule);
    let ds = &a.decisions.decisions;
    ensure!(ds.len() == 2, "nested if decisions: {}", ds.len());
    ensure!(
        ds[0].conditions.len() == 1
            && matches!(ds[0].conditions[0].kind, ConditionKind::NestedDecisionResult { decision: 1 }),
        "nested if is hoisted"
    );

    let a = analyze_corpus("match_in_if.rps", rule);
    let ds = &a.decisions.decisions;
    ensure!(
        ds.len() == 2
            && matches!(ds[0].conditions[0].kind, ConditionKind::NestedDecisionResult { .. })
            && ds[1].origin == Origin::MatchArm
            && ds[1].conditions.len() == 2,
        "match in if: {:?}",
        ds.iter().map(|d| (d.origin, d.conditions.len())).collect::<Vec<_>>()
    );

    let a = analyze_corpus("question_mark.rps", rule);
    let qm: Vec<_> = a.decisions.decisions.iter().filter(|d| d.origin == Origin::QuestionMark).collect();
    ensure!(
        qm.len() == 2 && qm[0].arm == Some(0) && qm[1].arm == Some(1) && qm[1].pruned,
        "`?` becomes a two-arm match"
    );

    let took = start.elapsed();
    ensure!(took < Duration::from_secs(1), "took {took:?}");
    Ok("5 conditions in the complex pattern, witness 1, hoisted nested decisions".into())
}

struct Sample {
    text: String,
    tp: patcov_core::types::TypedProgram,
    p: patcov_core::types::TPat,
    values: Vec<Value>,
}

fn samples(n: usize, seed: u64) -> Vec<Sample> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        if let Some((_, text, tp, p)) = gen_pattern(&mut rng) {
            let values = all_values(&p.ty, &tp.env);
            out.push(Sample { text, tp, p, values });
        }
    }
    out
}

fn refutability_oracle() -> Outcome {
    let corpus = samples(600, 0x5eed);
    let mut corrected_bad = Vec::new();
    let mut verbatim_slice = 0;
    let mut verbatim_other = Vec::new();
    let mut irrefutable = 0;
    for s in &corpus {
        let all_match = s.values.iter().all(|v| pattern_matches(&s.p, v));
        irrefutable += all_match as usize;
        let says = |rule| pattern_refutability(&classify(&s.p, &s.tp.env, rule)) == Refutability::Irrefutable;
        if says(SliceRule::Corrected) != all_match {
            corrected_bad.push(s.text.clone());
        }
        if says(SliceRule::Verbatim) != all_match {
            if has_dynamic_slice(&s.p) && says(SliceRule::Corrected) == all_match {
                verbatim_slice += 1;
            } else {
                verbatim_other.push(s.text.clone());
            }
        }
    }
    ensure!(corrected_bad.is_empty(), "corrected mode disagrees on {corrected_bad:?}");
    ensure!(verbatim_other.is_empty(), "verbatim disagreements outside the slice rule: {verbatim_other:?}");
    ensure!(irrefutable > 0 && irrefutable < corpus.len(), "degenerate corpus");
    Ok(format!(
        "{} patterns ({irrefutable} irrefutable), 0 corrected disagreements, {verbatim_slice} verbatim slice-rule deviations",
        corpus.len()
    ))
}

fn denotation_coherence() -> Outcome {
    let corpus = samples(600, 0x5eed);
    let mut checked = 0usize;
    for s in &corpus {
        let den = denotation(&s.p, &s.tp.env);
        for v in &s.values {
            checked += 1;
            ensure!(
                den.contains(v) == pattern_matches(&s.p, v),
                "`{}` on {}: denotation {} matcher {}",
                s.text,
                v.show(&s.tp.env),
                den.contains(v),
                pattern_matches(&s.p, v)
            );
        }
    }
    Ok(format!("{} patterns, {checked} values, 0 disagreements", corpus.len()))
}

/// A random boolean expression over `c0..cn` (each used once, left to
/// right) and its short-circuit evaluator.
enum B {
    Leaf(usize, bool),
    Not(Box<B>),
    And(Box<B>, Box<B>),
    Or(Box<B>, Box<B>),
}

fn gen_bool(rng: &mut StdRng, n: usize, next: &mut usize) -> B {
    if n == 1 {
        *next += 1;
        return B::Leaf(*next - 1, rng.random_bool(0.2));
    }
    let left = rng.random_range(1..n);
    let l = gen_bool(rng, left, next);
    let r = gen_bool(rng, n - left, next);
    let node = if rng.random() {
        B::And(Box::new(l), Box::new(r))
    } else {
        B::Or(Box::new(l), Box::new(r))
    };
    if rng.random_bool(0.15) {
        B::Not(Box::new(node))
    } else {
        node
    }
}

impl B {
    fn text(&self) -> String {
        match self {
            B::Leaf(i, neg) => format!("{}c{i}", if *neg { "!" } else { "" }),
            B::Not(x) => format!("!({})", x.text()),
            B::And(a, b) => format!("({} && {})", a.text(), b.text()),
            B::Or(a, b) => format!("({} || {})", a.text(), b.text()),
        }
    }

    fn eval(&self, inputs: &[bool], out: &mut [TriState]) -> bool {
        match self {
            B::Leaf(i, neg) => {
                let v = inputs[*i] != *neg;
                out[*i] = TriState::from_bool(v);
                v
            }
            B::Not(x) => !x.eval(inputs, out),
            B::And(a, b) => a.eval(inputs, out) && b.eval(inputs, out),
            B::Or(a, b) => a.eval(inputs, out) || b.eval(inputs, out),
        }
    }
}

fn mcdc_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xdc);
    let opts = CoverageOptions::default();
    let mut satisfied = 0;
    for round in 0..200 {
        let n = rng.random_range(2..=8);
        let b = gen_bool(&mut rng, n, &mut 0);
        let params: Vec<String> = (0..n).map(|i| format!("c{i}: bool")).collect();
        let src = format!("fn f({}) -> bool {{ {} }}", params.join(", "), b.text());
        let a = analyze("d.rps", &src, SliceRule::Verbatim).map_err(|e| format!("{src}: {e}"))?;
        ensure!(a.decisions.decisions.len() == 1, "{src}: one decision expected");
        ensure!(a.decisions.decisions[0].conditions.len() == n, "{src}: {n} conditions expected");

        // Small sets make unsatisfied verdicts common; large ones make
        // satisfied ones common.
        let k = match round % 3 {
            0 => rng.random_range(0..=n),
            1 => rng.random_range(n..=2 * n + 2),
            _ => rng.random_range(0..=1usize << n),
        };
        let mut trace = Trace::new(a.program_hash.clone());
        let mut expected = Vec::new();
        for t in 0..k {
            let inputs: Vec<bool> = (0..n).map(|_| rng.random()).collect();
            let mut conds = vec![TriState::NotEvaluated; n];
            let outcome = b.eval(&inputs, &mut conds);
            let args = inputs.iter().map(|&x| Value::Bool(x)).collect();
            let ex = evaluate(&a.typed, &a.decisions, &a.program_hash, "f", args, t as u32, RunOptions::default());
            ensure!(ex.result == Ok(Value::Bool(outcome)), "{src}: wrong result");
            ensure!(
                ex.trace.vectors.len() == 1 && ex.trace.vectors[0].conds == conds && ex.trace.vectors[0].outcome == outcome,
                "{src}: recorded vector differs from short-circuit evaluation"
            );
            expected.push((conds, outcome));
            trace = trace.merge(ex.trace).map_err(|e| e.to_string())?;
        }
        let r = check_mcdc(&a, &trace, opts).map_err(|e| e.to_string())?;
        let oracle = naive_mcdc(n, &expected);
        ensure!(r.verdicts.mcdc == oracle, "{src} with {k} vectors: checker {} oracle {oracle}", r.verdicts.mcdc);
        for c in &r.decisions[0].conditions {
            if let Some(p) = &c.pair {
                let find = |v| trace.vectors.iter().find(|x| x.id() == v).expect("paired vector");
                let (x, y) = (find(p.when_true), find(p.when_false));
                ensure!(naive_pair(c.index, (&x.conds, x.outcome), (&y.conds, y.outcome)), "{src}: bogus pair");
            }
        }
        satisfied += oracle as usize;
    }

    let a = analyze("ab.rps", "fn f(a: bool, b: bool) -> bool { a && b }", SliceRule::Verbatim).map_err(|e| e.to_string())?;
    let mut trace = Trace::new(a.program_hash.clone());
    for (t, (x, y)) in [(true, true), (true, false), (false, true)].into_iter().enumerate() {
        let ex = evaluate(&a.typed, &a.decisions, &a.program_hash, "f", vec![Value::Bool(x), Value::Bool(y)], t as u32, RunOptions::default());
        trace = trace.merge(ex.trace).map_err(|e| e.to_string())?;
    }
    let r = check_mcdc(&a, &trace, opts).map_err(|e| e.to_string())?;
    ensure!(r.satisfied, "{{TT, TF, F-}} not satisfied");
    let show = |v| patcov_core::runtime::show_conds(&trace.vectors.iter().find(|x| x.id() == v).unwrap().conds);
    let pairs: Vec<(String, String)> = r.decisions[0]
        .conditions
        .iter()
        .map(|c| c.pair.as_ref().map_or(Default::default(), |p| (show(p.when_true), show(p.when_false))))
        .collect();
    ensure!(
        pairs == [("TT".into(), "F-".into()), ("TT".into(), "TF".into())],
        "a && b pairs {pairs:?}"
    );
    Ok(format!("200 decisions ({satisfied} satisfied), 0 disagreements; a && b pairs a:(TT,F-) b:(TT,TF)"))
}

fn subsumption() -> Outcome {
    let mut mcdc_met = 0;
    let mut checked = 0;
    for (prog, suite) in corpus_suites() {
        let a = analyze_corpus(&prog, SliceRule::Verbatim);
        let run = run_corpus_suite(&a, &suite, true);
        for strict_arms in [false, true] {
            let r = coverage_report(&a, &run.trace, Criterion::Mcdc, CoverageOptions { strict_arms }).map_err(|e| e.to_string())?;
            checked += 1;
            if r.verdicts.mcdc {
                mcdc_met += 1;
                ensure!(r.verdicts.decision && r.verdicts.statement, "{suite}: MC/DC without DC or statement coverage");
                ensure!(
                    r.decisions.iter().filter(|d| !d.excluded).all(|d| d.both_outcomes()),
                    "{suite}: MC/DC without both outcomes"
                );
            }
            if r.verdicts.decision {
                ensure!(r.verdicts.statement, "{suite}: DC without statement coverage");
            }
        }
    }
    ensure!(mcdc_met > 0, "no corpus suite meets MC/DC");
    Ok(format!("{checked} program/suite/mode combinations, {mcdc_met} meet MC/DC, all also meet DC and statement"))
}

fn const_exemption() -> Outcome {
    let report = |prog: &str, suite: &str| {
        let a = analyze_corpus(prog, SliceRule::Verbatim);
        let run = run_corpus_suite(&a, suite, true);
        check_mcdc(&a, &run.trace, CoverageOptions::default()).expect("fresh trace")
    };
    let c = report("debug_const.rps", "debug_const.toml");
    ensure!(c.satisfied, "const DEBUG suite does not meet MC/DC");
    ensure!(c.decisions[0].conditions[0].const_exempt, "DEBUG not exempt");
    let s = report("debug_static.rps", "debug_static.toml");
    ensure!(!s.satisfied, "static DEBUG suite meets MC/DC");
    ensure!(
        s.obligations.iter().any(|o| matches!(
            o.kind,
            ObligationKind::Independence { decision: 0, condition: 0 } | ObligationKind::ConditionValue { decision: 0, condition: 0, .. }
        )),
        "no DEBUG obligation"
    );
    Ok("const DEBUG exempt and satisfied; static DEBUG leaves a condition obligation".into())
}

fn question_mark_equivalence() -> Outcome {
    let a = analyze_corpus("question_mark_fixtures.rps", SliceRule::Verbatim);
    let tests = patcov_core::runtime::load_suite(&corpus_file("question_mark_fixtures.toml"), &a.source, &a.typed)
        .map_err(|e| e.to_string())?;
    let run = run_corpus_suite(&a, "question_mark_fixtures.toml", true);
    let mut results = BTreeMap::new();
    for (t, o) in tests.iter().zip(&run.outcomes) {
        results.insert(t.name.clone(), (o.result.clone(), o.output.clone()));
    }
    let mut compared = 0;
    for (name, r) in &results {
        if let Some(rest) = name.strip_prefix('q') {
            let twin = results.get(&format!("d{rest}")).ok_or(format!("no twin run for {name}"))?;
            ensure!(r == twin, "{name}: {:?} vs {:?}", r, twin);
            compared += 1;
        }
    }

    let report = check_mcdc(&a, &run.trace, CoverageOptions::default()).map_err(|e| e.to_string())?;
    let mut fixtures = 0;
    for n in 1..=20 {
        let (q, d) = (format!("q{n:02}"), format!("d{n:02}"));
        let shape = |f: &str, origin: Origin| {
            let mut v: Vec<_> = report
                .decisions
                .iter()
                .filter(|x| x.function == f && x.origin == origin)
                .map(|x| (x.arm, x.conditions.len(), x.pruned))
                .collect();
            v.sort();
            v
        };
        let qm = shape(&q, Origin::QuestionMark);
        ensure!(!qm.is_empty() && qm.len() % 2 == 0, "{q}: `?` decisions {qm:?}");
        ensure!(
            qm.iter().filter(|x| x.0 == Some(0)).count() == qm.len() / 2 && qm.iter().filter(|x| x.0 == Some(1)).count() == qm.len() / 2,
            "{q}: `?` is not a two-arm decision"
        );
        let mut q_all = qm.clone();
        q_all.extend(shape(&q, Origin::MatchArm));
        q_all.sort();
        ensure!(q_all == shape(&d, Origin::MatchArm), "{q} and {d} decisions differ");
        let exits = |f: &str| report.functions.iter().find(|x| x.name == f).map(|x| x.exits.clone()).unwrap_or_default();
        let (qe, de) = (exits(&q), exits(&d));
        let from_qm = qe.iter().filter(|e| e.site.from_question_mark).count();
        ensure!(from_qm == qm.len() / 2, "{q}: {from_qm} `?` exits for {} `?`", qm.len() / 2);
        ensure!(qe.len() == de.len(), "{q} has {} exits, {d} has {}", qe.len(), de.len());
        fixtures += 1;
    }
    ensure!(report.satisfied, "fixture suite does not meet MC/DC");
    Ok(format!("{fixtures} fixtures, {compared} runs equal to their twins, one extra exit and a two-arm decision per `?`"))
}

fn determinism() -> Outcome {
    let mut suites = 0;
    for (prog, suite) in corpus_suites() {
        let a = analyze_corpus(&prog, SliceRule::Verbatim);
        let first = run_corpus_suite(&a, &suite, true).trace.to_jsonl();
        let again = run_corpus_suite(&a, &suite, true).trace.to_jsonl();
        let sequential = run_corpus_suite(&a, &suite, false).trace.to_jsonl();
        ensure!(first == again, "{suite}: repeated runs differ");
        ensure!(first == sequential, "{suite}: parallel and sequential merges differ");

        // Per-test traces merged in a shuffled order and grouped
        // differently give the same trace.
        let tests = patcov_core::runtime::load_suite(&corpus_file(&suite), &a.source, &a.typed).map_err(|e| e.to_string())?;
        let mut parts: Vec<Trace> = tests
            .iter()
            .enumerate()
            .map(|(i, t)| evaluate(&a.typed, &a.decisions, &a.program_hash, &t.entry, t.args.clone(), i as u32, RunOptions::default()).trace)
            .collect();
        let mut rng = StdRng::seed_from_u64(suites);
        for i in (1..parts.len()).rev() {
            parts.swap(i, rng.random_range(0..=i));
        }
        let mid = parts.len() / 2;
        let right = parts.split_off(mid);
        let merge_all = |ts: Vec<Trace>| ts.into_iter().fold(Trace::new(a.program_hash.clone()), |x, y| x.merge(y).unwrap());
        let grouped = merge_all(parts).merge(merge_all(right)).map_err(|e| e.to_string())?;
        ensure!(grouped.to_jsonl() == first, "{suite}: regrouped merge differs");
        let parsed = Trace::from_jsonl(&first).map_err(|e| e.to_string())?;
        ensure!(parsed.to_jsonl() == first, "{suite}: trace does not round-trip");
        suites += 1;
    }
    Ok(format!("{suites} corpus suites: byte-identical reruns, parallel = sequential, merge order irrelevant"))
}

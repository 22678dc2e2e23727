use super::*;
use crate::refutability::SliceRule;
use crate::{analyze, Analysis};

fn analysis(src: &str) -> Analysis {
    analyze("t.rps", src, SliceRule::Verbatim).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

fn run(a: &Analysis, entry: &str, args: &[&str]) -> Execution {
    let manifest = format!(
        "[[test]]\nentry = \"{entry}\"\nargs = [{}]\n",
        args.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
    );
    let tests = load_suite(&manifest, &a.source, &a.typed).unwrap_or_else(|e| panic!("{e}"));
    evaluate(&a.typed, &a.decisions, &a.program_hash, entry, tests[0].args.clone(), 0, RunOptions::default())
}

fn vectors(t: &Trace) -> Vec<(u32, String, bool)> {
    t.vectors.iter().map(|v| (v.decision, show_conds(&v.conds), v.outcome)).collect()
}

const PERSON: &str = "
enum Person { Crew, Passenger(u16) }
fn seat(person: Person) {
    match person {
        Person::Crew => print(\"crew member\"),
        Person::Passenger(n @ ..=8) => print(\"vip, seat \", n),
        Person::Passenger(n) => print(\"passenger, seat \", n),
    }
}";

#[test]
fn passenger_three_takes_the_vip_arm() {
    let a = analysis(PERSON);
    let ex = run(&a, "seat", &["Person::Passenger(3)"]);
    assert_eq!(ex.output, "vip, seat 3\n");
    assert_eq!(vectors(&ex.trace), vec![(0, "F".into(), false), (1, "TT".into(), true)]);
}

#[test]
fn complex_slice_matches_with_all_conditions_true() {
    let a = analysis(
        "fn first(values: &[Option<i32>]) {
            if let [Some(first), None, Some(1..)] = values {
                print(\"First value is \", first);
            }
        }",
    );
    let ex = run(&a, "first", &["&[Some(1), None, Some(2)]"]);
    assert_eq!(ex.output, "First value is 1\n");
    assert_eq!(vectors(&ex.trace), vec![(0, "TTTTT".into(), true)]);
    let ex = run(&a, "first", &["&[Some(1), Some(3), Some(2)]"]);
    assert_eq!(vectors(&ex.trace), vec![(0, "TTF--".into(), false)]);
    let ex = run(&a, "first", &["&[]"]);
    assert_eq!(vectors(&ex.trace), vec![(0, "F----".into(), false)]);
}

#[test]
fn short_circuit_skips_the_call() {
    let a = analysis(
        "fn f() -> bool { print(\"called\"); true }
        fn g() -> u8 { if false && f() { 1 } else { 0 } }",
    );
    let ex = run(&a, "g", &[]);
    assert_eq!(ex.result, Ok(Value::Int(crate::syntax::IntTy::U8, 0)));
    assert_eq!(ex.output, "");
    assert_eq!(vectors(&ex.trace), vec![(0, "F-".into(), false)]);
    assert!(!ex.trace.entries.contains("f"));
}

#[test]
fn nested_decision_is_recorded_before_its_parent() {
    let a = analysis(
        "fn f(foo: i32) {
            if if foo > 10 { \"large\" } else { \"small\" } == \"large\" {
                print(\"foo is big\");
            }
        }",
    );
    let ex = run(&a, "f", &["11"]);
    assert_eq!(ex.output, "foo is big\n");
    assert_eq!(vectors(&ex.trace), vec![(1, "T".into(), true), (0, "T".into(), true)]);
}

#[test]
fn guard_is_evaluated_only_after_the_pattern_matches() {
    let a = analysis(
        "fn f(x: Option<u8>) -> u8 {
            match x { Some(v) if v > 3 => 1, Some(_) => 2, None => 3 }
        }",
    );
    let ex = run(&a, "f", &["None"]);
    assert_eq!(ex.result.unwrap().as_int(), Some(3));
    let ids: Vec<_> = ex.trace.vectors.iter().map(|v| v.decision).collect();
    let guard = a.decisions.decisions.iter().find(|d| d.origin == crate::decisions::Origin::Guard).unwrap().id;
    assert!(!ids.contains(&guard));
    let ex = run(&a, "f", &["Some(2)"]);
    assert_eq!(ex.result.unwrap().as_int(), Some(2));
    assert!(ex.trace.vectors.iter().any(|v| v.decision == guard && !v.outcome));
}

#[test]
fn question_mark_returns_early() {
    let a = analysis(
        "fn add(a: Option<u8>, b: Option<u8>) -> Option<u8> { let x = a?; let y = b?; Some(x + y) }",
    );
    let ex = run(&a, "add", &["Some(1)", "Some(2)"]);
    assert_eq!(ex.result.unwrap().show(&a.typed.env), "Some(3)");
    let ex = run(&a, "add", &["Some(1)", "None"]);
    assert_eq!(ex.result.unwrap().show(&a.typed.env), "None");
    assert_eq!(ex.trace.exits.len(), 1);
    assert!(ex.trace.exits.iter().all(|e| e.node.is_some()));
}

#[test]
fn overflow_is_a_runtime_error() {
    let a = analysis("fn f(x: u8) -> u8 { x + 200 }");
    let ex = run(&a, "f", &["100"]);
    assert_eq!(ex.result.unwrap_err().kind, RuntimeErrorKind::Overflow);
}

#[test]
fn fuel_bounds_infinite_loops() {
    let a = analysis("fn f() { while true { } }");
    let ex = evaluate(&a.typed, &a.decisions, "", "f", vec![], 0, RunOptions { fuel: 1000 });
    assert_eq!(ex.result.unwrap_err().kind, RuntimeErrorKind::OutOfFuel);
}

#[test]
fn panic_carries_its_message() {
    let a = analysis("fn f() -> u8 { panic(\"boom\") }");
    let e = run(&a, "f", &[]).result.unwrap_err();
    assert_eq!((e.kind, e.message.as_str()), (RuntimeErrorKind::Panic, "boom"));
}

#[test]
fn recursion_and_mutation() {
    let a = analysis(
        "fn fact(n: u32) -> u32 { if n == 0 { 1 } else { n * fact(n - 1) } }
        fn sum(xs: &[u32]) -> u32 { let mut i: u32 = 0; let mut s: u32 = 0; while i < xs.len() { s += xs[i]; i += 1; } s }
        fn deep(n: u32) -> u32 { if n == 0 { 0 } else { deep(n - 1) } }",
    );
    assert_eq!(run(&a, "fact", &["10"]).result.unwrap().as_int(), Some(3628800));
    assert_eq!(run(&a, "sum", &["&[1, 2, 3, 4]"]).result.unwrap().as_int(), Some(10));
    assert_eq!(run(&a, "deep", &["1500"]).result.unwrap().as_int(), Some(0));
    assert_eq!(run(&a, "deep", &["5000"]).result.unwrap_err().kind, RuntimeErrorKind::StackOverflow);
}

#[test]
fn structs_fields_and_statics() {
    let a = analysis(
        "struct P { x: i32, y: i32 }
        static mut COUNT: u32 = 0;
        fn f(p: P) -> i32 { COUNT += 1; let mut q = p; q.y = 7; let t = (q.x, q.y); t.0 + t.1 }",
    );
    assert_eq!(run(&a, "f", &["P { x: 1, y: 2 }"]).result.unwrap().as_int(), Some(8));
}

#[test]
fn person_suite_covers_every_arm() {
    let a = analysis(PERSON);
    let manifest = r#"
        entry = "seat"
        [[test]]
        name = "crew"
        args = ["Person::Crew"]
        output = "crew member\n"
        [[test]]
        name = "vip"
        args = ["Person::Passenger(3)"]
        [[test]]
        name = "passenger"
        args = ["Person::Passenger(9)"]
        output = "passenger, seat 9\n"
    "#;
    let tests = load_suite(manifest, &a.source, &a.typed).unwrap();
    let r = run_suite(&a.typed, &a.decisions, &a.program_hash, &tests, RunOptions::default(), true);
    assert!(r.outcomes.iter().all(|o| o.passed), "{:?}", r.outcomes);
    for d in 0..2 {
        let seen: std::collections::BTreeSet<bool> = r.trace.vectors_of(d).map(|v| v.outcome).collect();
        assert_eq!(seen.len(), 2, "decision {d}");
    }
    let seq = run_suite(&a.typed, &a.decisions, &a.program_hash, &tests, RunOptions::default(), false);
    assert_eq!(seq.trace.to_jsonl(), r.trace.to_jsonl());
}

#[test]
fn failing_expectation_is_reported_but_still_covers() {
    let a = analysis("fn f(x: u8) -> u8 { if x > 1 { 1 } else { 0 } }");
    let tests = load_suite("[[test]]\nentry = \"f\"\nargs = [\"5\"]\nexpect = \"0\"\n", &a.source, &a.typed).unwrap();
    let r = run_suite(&a.typed, &a.decisions, &a.program_hash, &tests, RunOptions::default(), false);
    assert!(!r.outcomes[0].passed);
    assert_eq!(r.trace.vectors.len(), 1);
}

#[test]
fn empty_suite_gives_an_empty_trace() {
    let a = analysis("fn f() {}");
    let tests = load_suite("", &a.source, &a.typed).unwrap();
    let r = run_suite(&a.typed, &a.decisions, &a.program_hash, &tests, RunOptions::default(), true);
    assert!(r.trace.vectors.is_empty() && r.trace.statements.is_empty() && r.trace.entries.is_empty());
}

#[test]
fn bad_arguments_are_rejected() {
    let a = analysis("fn f(x: u8) -> u8 { x }");
    assert!(load_suite("[[test]]\nentry = \"f\"\nargs = [\"true\"]\n", &a.source, &a.typed).is_err());
    assert!(load_suite("[[test]]\nentry = \"g\"\n", &a.source, &a.typed).is_err());
    assert!(load_suite("[[test]]\nentry = \"f\"\n", &a.source, &a.typed).is_err());
}

use super::*;
use crate::refutability::SliceRule;
use crate::runtime::{load_suite, run_suite, RunOptions};
use crate::{analyze, Analysis};

fn analysis(src: &str) -> Analysis {
    analyze("t.rps", src, SliceRule::Verbatim).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

fn trace_of(a: &Analysis, manifest: &str) -> Trace {
    let tests = load_suite(manifest, &a.source, &a.typed).unwrap();
    run_suite(&a.typed, &a.decisions, &a.program_hash, &tests, RunOptions::default(), false).trace
}

fn synthetic(a: &Analysis, decision: DecisionId, vectors: &[(&str, bool)]) -> Trace {
    let mut t = Trace::new(a.program_hash.clone());
    for (seq, (conds, outcome)) in vectors.iter().enumerate() {
        t.vectors.push(EvaluationVector {
            test: 0,
            seq: seq as u32,
            decision,
            conds: conds
                .chars()
                .map(|c| match c {
                    'T' => TriState::True,
                    'F' => TriState::False,
                    _ => TriState::NotEvaluated,
                })
                .collect(),
            outcome: *outcome,
        });
    }
    t
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

fn person_suite(args: &[&str]) -> String {
    let mut m = String::from("entry = \"seat\"\n");
    for a in args {
        m.push_str(&format!("[[test]]\nargs = [{a:?}]\n"));
    }
    m
}

#[test]
fn person_three_tests_meet_mcdc() {
    let a = analysis(PERSON);
    let t = trace_of(&a, &person_suite(&["Person::Crew", "Person::Passenger(3)", "Person::Passenger(9)"]));
    let r = check_mcdc(&a, &t, CoverageOptions::default()).unwrap();
    assert!(r.satisfied, "{}", render_text(&r, &a.source));
    assert!(r.verdicts.statement && r.verdicts.decision);
    assert_eq!(r.summary.decisions, Tally { covered: 2, total: 2 });
    // Arm 1's discriminant test, and arm 2's range; arm 2's discriminant
    // cannot fail once arm 1 has failed.
    assert_eq!(r.summary.independence, Tally { covered: 2, total: 2 });
    let arm2 = &r.decisions[1].conditions[0];
    assert_eq!(arm2.fixed_in_context, Some(true));
    assert!(!arm2.obligated && arm2.shown());
    assert!(r.decisions[2].excluded);
}

#[test]
fn strict_arms_reinstate_context_fixed_conditions() {
    let a = analysis(PERSON);
    let t = trace_of(&a, &person_suite(&["Person::Crew", "Person::Passenger(3)", "Person::Passenger(9)"]));
    let r = check_mcdc(&a, &t, CoverageOptions { strict_arms: true }).unwrap();
    assert!(!r.satisfied);
    assert!(r.decisions[1].conditions[0].obligated);
    assert!(r.obligations.iter().any(|o| o.kind == ObligationKind::Independence { decision: 1, condition: 0 }
        && o.suggestion == Some(Suggestion::Infeasible)));
}

#[test]
fn person_crew_only_falls_short() {
    let a = analysis(PERSON);
    let t = trace_of(&a, &person_suite(&["Person::Crew"]));
    let r = check_mcdc(&a, &t, CoverageOptions::default()).unwrap();
    assert!(!r.satisfied);
    assert!(!r.verdicts.statement);
    assert!(r
        .obligations
        .iter()
        .any(|o| o.kind == ObligationKind::Outcome { decision: 0, outcome: false }));
    let text = render_text(&r, &a.source);
    assert!(text.contains("Person::Passenger(n @ ..=8)"), "{text}");
}

#[test]
fn empty_trace_covers_nothing() {
    let a = analysis(PERSON);
    let s = check_statement_coverage(&a, &Trace::default()).unwrap();
    assert!(!s.is_empty() && s.iter().all(|s| !s.covered));
}

#[test]
fn one_arm_leaves_the_other_bodies_uncovered() {
    let a = analysis(PERSON);
    let t = trace_of(&a, &person_suite(&["Person::Passenger(3)"]));
    let s = check_statement_coverage(&a, &t).unwrap();
    let uncovered: Vec<_> = s.iter().filter(|s| !s.covered).map(|s| s.site.span.start.line).collect();
    assert_eq!(uncovered, vec![5, 7]);
}

const AND: &str = "fn f(a: bool, b: bool) -> bool { a && b }";
const OR: &str = "fn f(a: bool, b: bool) -> bool { a || b }";

fn mcdc_of(src: &str, vectors: &[(&str, bool)]) -> CoverageReport {
    let a = analysis(src);
    let mut t = synthetic(&a, 0, vectors);
    t.entries.insert("f".into());
    t.exits.insert(ExitPoint {
        function: "f".into(),
        node: None,
    });
    t.statements = statement_sites(&a.typed).iter().map(|s| s.node).collect();
    check_mcdc(&a, &t, CoverageOptions::default()).unwrap()
}

#[test]
fn and_minimal_set() {
    let r = mcdc_of(AND, &[("TT", true), ("TF", false), ("F-", false)]);
    assert!(r.satisfied);
    let pairs: Vec<_> = r.decisions[0]
        .conditions
        .iter()
        .map(|c| c.pair.map(|p| (p.when_true.seq, p.when_false.seq)))
        .collect();
    assert_eq!(pairs, vec![Some((0, 2)), Some((0, 1))]);
}

#[test]
fn or_minimal_set() {
    assert!(mcdc_of(OR, &[("FF", false), ("FT", true), ("T-", true)]).satisfied);
}

#[test]
fn and_missing_tf_suggests_tf() {
    let r = mcdc_of(AND, &[("TT", true), ("FT", false)]);
    assert!(!r.satisfied);
    let o = r
        .obligations
        .iter()
        .find(|o| o.kind == ObligationKind::Independence { decision: 0, condition: 1 })
        .expect("b lacks independence");
    assert_eq!(o.suggestion, Some(Suggestion::Vectors { vectors: vec!["TF".into()] }));
    assert!(!r.obligations.iter().any(|o| o.kind == ObligationKind::Independence { decision: 0, condition: 0 }));
}

#[test]
fn covered_decision_has_no_suggestions() {
    let r = mcdc_of(AND, &[("TT", true), ("TF", false), ("F-", false)]);
    assert!(r.obligations.is_empty());
}

#[test]
fn stale_traces_are_rejected() {
    let a = analysis(AND);
    let t = Trace::new("0000");
    assert!(matches!(check_mcdc(&a, &t, CoverageOptions::default()), Err(CoverageError::StaleTrace { .. })));
}

#[test]
fn strict_arms_make_the_pruned_arm_infeasible() {
    let a = analysis(PERSON);
    let t = trace_of(&a, &person_suite(&["Person::Crew", "Person::Passenger(3)", "Person::Passenger(9)"]));
    let r = check_mcdc(&a, &t, CoverageOptions { strict_arms: true }).unwrap();
    assert!(!r.satisfied);
    let o = r
        .obligations
        .iter()
        .find(|o| o.kind == ObligationKind::Outcome { decision: 2, outcome: false })
        .expect("pruned arm never false");
    assert_eq!(o.suggestion, Some(Suggestion::Infeasible));
}

#[test]
fn pattern_suggestions_respect_dependencies() {
    // The inner range test runs only after the discriminant passes.
    let a = analysis("fn f(x: Option<u8>) -> u8 { match x { Some(1..=5) => 1, _ => 0 } }");
    let t = trace_of(&a, "[[test]]\nentry = \"f\"\nargs = [\"Some(3)\"]\n");
    let r = check_mcdc(&a, &t, CoverageOptions::default()).unwrap();
    let sugg: Vec<_> = r.obligations.iter().filter_map(|o| o.suggestion.clone()).collect();
    assert!(sugg.contains(&Suggestion::Vectors { vectors: vec!["F-".into()] }), "{sugg:?}");
    assert!(sugg.contains(&Suggestion::Vectors { vectors: vec!["TF".into()] }), "{sugg:?}");
}

#[test]
fn wide_decisions_are_not_searched() {
    let names: Vec<String> = (0..17).map(|i| format!("a{i}")).collect();
    let src = format!(
        "fn f({}) -> bool {{ {} }}",
        names.iter().map(|n| format!("{n}: bool")).collect::<Vec<_>>().join(", "),
        names.join(" && ")
    );
    let r = mcdc_of(&src, &[]);
    assert!(r
        .obligations
        .iter()
        .any(|o| o.suggestion == Some(Suggestion::TooManyConditions { conditions: 17 })));
}

#[test]
fn debug_const_is_exempt_and_static_is_not() {
    let body = "fn f(x: i32) -> u8 { if DEBUG && x > 0 { 1 } else { 0 } }";
    let suite = "entry = \"f\"\n[[test]]\nargs = [\"1\"]\n[[test]]\nargs = [\"0\"]\n";
    let a = analysis(&format!("const DEBUG: bool = true;\n{body}"));
    let r = check_mcdc(&a, &trace_of(&a, suite), CoverageOptions::default()).unwrap();
    assert!(r.satisfied, "{}", render_text(&r, &a.source));
    let a = analysis(&format!("static DEBUG: bool = true;\n{body}"));
    let r = check_mcdc(&a, &trace_of(&a, suite), CoverageOptions::default()).unwrap();
    assert!(!r.satisfied);
    assert!(r
        .obligations
        .iter()
        .any(|o| o.kind == ObligationKind::Independence { decision: 0, condition: 0 }));
}

#[test]
fn question_mark_adds_an_exit_and_a_decision() {
    let a = analysis("fn f(v: Option<u8>) -> Option<u8> { let x = v?; Some(x) }");
    let exits = exit_sites(&a.typed);
    assert_eq!(exits.len(), 2);
    assert!(exits[0].from_question_mark);
    let t = trace_of(&a, "entry = \"f\"\n[[test]]\nargs = [\"Some(1)\"]\n");
    let r = check_mcdc(&a, &t, CoverageOptions::default()).unwrap();
    assert!(!r.satisfied);
    assert!(r.obligations.iter().any(|o| matches!(o.kind, ObligationKind::Exit { node: Some(_), .. })));
    let t = trace_of(&a, "entry = \"f\"\n[[test]]\nargs = [\"Some(1)\"]\n[[test]]\nargs = [\"None\"]\n");
    let r = check_mcdc(&a, &t, CoverageOptions::default()).unwrap();
    assert!(r.satisfied, "{}", render_text(&r, &a.source));
}

#[test]
fn requested_criterion_filters_obligations() {
    let a = analysis(PERSON);
    let t = trace_of(&a, &person_suite(&["Person::Crew", "Person::Passenger(3)", "Person::Passenger(9)"]));
    let r = coverage_report(&a, &t, Criterion::Statement, CoverageOptions::default()).unwrap();
    assert!(r.satisfied && r.obligations.is_empty());
}

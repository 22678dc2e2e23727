use super::*;
use crate::refutability::SliceRule;
use crate::syntax::parse_program;
use crate::types::{check_program, TypedProgram};

fn typed(src: &str) -> TypedProgram {
    let p = parse_program("t.rps", src).unwrap_or_else(|e| panic!("{e}\n{src}"));
    check_program(p).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

fn decisions(src: &str) -> DecisionSet {
    let tp = desugar_question_mark(typed(src));
    let ds = extract_decisions(&tp, SliceRule::Verbatim);
    apply_const_exemption(ds, &tp)
}

fn kinds(d: &Decision) -> Vec<String> {
    d.conditions.iter().map(|c| c.kind.describe()).collect()
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
fn complex_slice_has_five_conditions_in_plan_order() {
    let ds = decisions(
        "fn f(values: &[Option<i32>]) {
            if let [Some(first), None, Some(1..)] = values { print(first); }
        }",
    );
    assert_eq!(ds.decisions.len(), 1);
    let d = &ds.decisions[0];
    assert_eq!(d.origin, Origin::IfLet);
    let k = kinds(d);
    assert_eq!(k.len(), 5, "{k:?}");
    assert!(matches!(d.conditions[0].kind, ConditionKind::SliceLenCheck { len: 3, at_least: false }));
    assert!(matches!(&d.conditions[1].kind, ConditionKind::DiscriminantCheck { variant, .. } if variant == "Some"));
    assert!(matches!(&d.conditions[2].kind, ConditionKind::DiscriminantCheck { variant, .. } if variant == "None"));
    assert!(matches!(&d.conditions[3].kind, ConditionKind::DiscriminantCheck { variant, .. } if variant == "Some"));
    assert!(matches!(d.conditions[4].kind, ConditionKind::RangeMembership { .. }));
    assert_eq!(d.structure, Structure::And((0..5).map(Structure::Cond).collect()));
}

#[test]
fn person_arms_and_pruning() {
    let ds = decisions(PERSON);
    assert_eq!(ds.decisions.len(), 3);
    let arms: Vec<_> = ds.decisions.iter().map(|d| (d.arm, d.conditions.len(), d.pruned)).collect();
    assert_eq!(arms, vec![(Some(0), 1, false), (Some(1), 2, false), (Some(2), 1, true)]);
    assert_eq!(ds.decisions[1].structure, Structure::And(vec![Structure::Cond(0), Structure::Cond(1)]));
}

#[test]
fn option_arms_prune_the_last() {
    let tp = typed("fn f(x: Option<u8>) -> u8 { match x { Some(v) => v, None => 0 } }");
    let ds = extract_decisions(&tp, SliceRule::Verbatim);
    let pruned: Vec<_> = ds.decisions.iter().map(|d| d.pruned).collect();
    assert_eq!(pruned, vec![false, true]);
}

#[test]
fn guarded_arm_is_never_pruned_and_guard_is_its_own_decision() {
    let ds = decisions(
        "fn f(x: Option<u8>, y: bool) -> u8 {
            match x { Some(v) if y => v, Some(v) => v, None => 0 }
        }",
    );
    let shape: Vec<_> = ds.decisions.iter().map(|d| (d.origin, d.pruned)).collect();
    assert_eq!(
        shape,
        vec![
            (Origin::MatchArm, false),
            (Origin::Guard, false),
            (Origin::MatchArm, false),
            (Origin::MatchArm, true),
        ]
    );
}

#[test]
fn negation_of_a_single_condition_is_folded_into_it() {
    let ds = decisions("fn f(a: bool, b: bool, c: bool) -> bool { !a && !(b || c) }");
    let d = &ds.decisions[0];
    assert_eq!(kinds(d), vec!["!a", "b", "c"]);
    assert_eq!(d.structure.render(), "c0 && !(c1 || c2)");
}

#[test]
fn if_assigned_to_a_variable_is_one_decision() {
    let ds = decisions(
        "fn f(bar: i32) -> &str {
            let foo = if bar > 10 { \"large\" } else { \"small\" };
            foo
        }",
    );
    assert_eq!(ds.decisions.len(), 1);
    assert_eq!(kinds(&ds.decisions[0]), vec!["bar > 10"]);
}

#[test]
fn nested_if_is_hoisted() {
    let ds = decisions(
        "fn f(foo: i32) {
            if if foo > 10 { \"large\" } else { \"small\" } == \"large\" {
                print(\"foo is big\");
            }
        }",
    );
    assert_eq!(ds.decisions.len(), 2);
    let outer = &ds.decisions[0];
    assert_eq!(outer.conditions.len(), 1);
    assert_eq!(outer.conditions[0].kind, ConditionKind::NestedDecisionResult { decision: 1 });
    assert_eq!(kinds(&ds.decisions[1]), vec!["foo > 10"]);
}

#[test]
fn match_in_if_condition_is_hoisted() {
    let ds = decisions(
        "fn f() {
            let value = Some(10);
            if match value { Some(1..) => true, _ => false } {
                print(\"number is large than 1\");
            }
        }",
    );
    assert_eq!(ds.decisions.len(), 2);
    let outer = &ds.decisions[0];
    assert_eq!(outer.origin, Origin::BooleanExpr);
    assert_eq!(outer.conditions.len(), 1);
    assert!(matches!(outer.conditions[0].kind, ConditionKind::NestedDecisionResult { .. }));
    let inner = &ds.decisions[1];
    assert_eq!(inner.origin, Origin::MatchArm);
    assert_eq!(inner.conditions.len(), 2);
}

#[test]
fn straight_line_code_has_no_decisions() {
    assert!(decisions("fn f(a: i32, b: i32) -> i32 { a * 2 + b }").decisions.is_empty());
}

#[test]
fn standalone_boolean_operators_form_a_decision() {
    let ds = decisions("fn f(a: bool, b: bool, c: bool) -> bool { let r = a && !(b || c); r }");
    assert_eq!(ds.decisions.len(), 1);
    let d = &ds.decisions[0];
    assert_eq!(kinds(d), vec!["a", "b", "c"]);
    assert_eq!(d.structure.render(), "c0 && !(c1 || c2)");
}

#[test]
fn single_boolean_without_operators_outside_a_branch_is_not_a_decision() {
    assert!(decisions("fn f(a: i32) -> bool { a > 0 }").decisions.is_empty());
}

#[test]
fn question_mark_desugars_to_the_listing_shape() {
    let tp = desugar_question_mark(typed(
        "fn f(value: Option<u8>) -> Option<u8> { let v = value?; Some(v) }",
    ));
    let text = crate::syntax::pretty::program(&tp.program);
    assert!(
        text.contains("match value {") && text.contains("Some(inner) => inner,") && text.contains("None => return None,"),
        "{text}"
    );
    let ds = extract_decisions(&tp, SliceRule::Verbatim);
    let origins: Vec<_> = ds.decisions.iter().map(|d| (d.origin, d.pruned)).collect();
    assert_eq!(origins, vec![(Origin::QuestionMark, false), (Origin::QuestionMark, true)]);
}

#[test]
fn question_mark_on_result_returns_err() {
    let tp = desugar_question_mark(typed(
        "fn f(value: Result<u8, u8>) -> Result<u8, u8> { let v = value?; Ok(v) }",
    ));
    let text = crate::syntax::pretty::program(&tp.program);
    assert!(text.contains("Ok(inner) => inner,") && text.contains("Err(e) => return Err(e),"), "{text}");
}

#[test]
fn program_without_question_mark_is_unchanged() {
    let tp = typed("fn f(a: u8) -> u8 { a }");
    let before = crate::syntax::pretty::program(&tp.program);
    assert_eq!(crate::syntax::pretty::program(&desugar_question_mark(tp).program), before);
}

#[test]
fn const_conditions_are_exempt_but_statics_are_not() {
    let ds = decisions(
        "const DEBUG: bool = false;
        static S: i32 = 1;
        fn f(x: i32) {
            if DEBUG && x > 0 { print(\"a\"); }
            if S > 0 && x > 0 { print(\"b\"); }
        }",
    );
    let flags: Vec<Vec<bool>> = ds
        .decisions
        .iter()
        .map(|d| d.conditions.iter().map(|c| c.const_exempt).collect())
        .collect();
    assert_eq!(flags, vec![vec![true, false], vec![false, false]]);
}

#[test]
fn exemption_leaves_structure_alone() {
    let src = "const LIMIT: i32 = 3; fn f(x: i32) -> bool { LIMIT > 2 || x > LIMIT }";
    let tp = typed(src);
    let plain = extract_decisions(&tp, SliceRule::Verbatim);
    let exempt = apply_const_exemption(plain.clone(), &tp);
    for (a, b) in plain.decisions.iter().zip(&exempt.decisions) {
        assert_eq!(a.structure, b.structure);
        assert_eq!(kinds(a), kinds(b));
    }
    assert!(exempt.decisions[0].conditions[0].const_exempt);
    assert!(!exempt.decisions[0].conditions[1].const_exempt);
}

#[test]
fn or_patterns_become_disjunctions() {
    let ds = decisions("fn f(x: u8) -> u8 { match x { 1 | 2 => 0, _ => 1 } }");
    assert_eq!(ds.decisions[0].structure, Structure::Or(vec![Structure::Cond(0), Structure::Cond(1)]));
}

#[test]
fn let_else_is_a_decision() {
    let ds = decisions("fn f(x: Option<u8>) -> u8 { let Some(v) = x else { return 0; }; v }");
    assert_eq!(ds.decisions.len(), 1);
    assert_eq!(ds.decisions[0].origin, Origin::LetElse);
}

#[test]
fn structure_serializes_as_nested_arrays() {
    let s = Structure::and(vec![Structure::Cond(0), Structure::or(vec![Structure::Cond(1), Structure::Cond(2)])]);
    assert_eq!(serde_json::to_string(&s).unwrap(), r#"["and",0,["or",1,2]]"#);
}

#[test]
fn three_valued_structure_evaluation() {
    let s = Structure::and(vec![Structure::Cond(0), Structure::Cond(1)]);
    assert_eq!(s.eval(&[Some(false), None]), Some(false));
    assert_eq!(s.eval(&[Some(true), None]), None);
    assert_eq!(s.eval(&[Some(true), Some(true)]), Some(true));
}

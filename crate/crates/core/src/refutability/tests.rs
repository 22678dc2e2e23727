use super::*;
use crate::types::typed_pattern;
use RefutabilityClass::*;

fn classes(items: &str, ty: &str, pat: &str, rule: SliceRule) -> (AnnotatedPattern, TypeEnv) {
    let (tp, p) = typed_pattern(items, ty, pat).unwrap_or_else(|e| panic!("{e}"));
    (classify(&p, &tp.env, rule), tp.env)
}

/// Classes in pre-order, skipping implicit reference nodes.
fn preorder(items: &str, ty: &str, pat: &str) -> Vec<RefutabilityClass> {
    let (a, _) = classes(items, ty, pat, SliceRule::Verbatim);
    let mut out = Vec::new();
    a.pattern.walk(&mut |n| {
        if !n.implicit {
            out.push(a.class(n));
        }
    });
    out
}

#[test]
fn worked_examples() {
    assert_eq!(preorder("", "i32", "_"), [Irrefutable]);
    assert_eq!(preorder("", "i32", "1"), [DirectlyRefutable]);
    assert_eq!(preorder("", "u8", "0..=255"), [Irrefutable]);
    assert_eq!(preorder("", "i32", "0..=255"), [DirectlyRefutable]);
    assert_eq!(preorder("", "Option<i32>", "Some(0)"), [DirectlyRefutable, DirectlyRefutable]);
    assert_eq!(preorder("", "(i32, i32)", "(a, 1)"), [IndirectlyRefutable, Irrefutable, DirectlyRefutable]);
    assert_eq!(preorder("enum E { A, B }", "E", "E::A | E::B"), [Irrefutable, DirectlyRefutable, DirectlyRefutable]);
}

#[test]
fn identifier_and_reference_rules() {
    assert_eq!(preorder("", "u8", "x"), [Irrefutable]);
    assert_eq!(preorder("", "u8", "x @ 1..=3"), [IndirectlyRefutable, DirectlyRefutable]);
    assert_eq!(preorder("", "u8", "x @ _"), [Irrefutable, Irrefutable]);
    assert_eq!(preorder("", "&Option<u8>", "&Some(_)"), [IndirectlyRefutable, DirectlyRefutable, Irrefutable]);
    assert_eq!(preorder("", "&u8", "&(0..=5)"), [IndirectlyRefutable, IndirectlyRefutable, DirectlyRefutable]);
    assert_eq!(preorder("", "&u8", "&(0..=255)"), [Irrefutable, Irrefutable, Irrefutable]);
}

#[test]
fn struct_rules_depend_on_variant_count() {
    let items = "struct P { x: u8, y: bool } enum One { V(u8) } enum Two { A { v: u8 }, B }";
    assert_eq!(preorder(items, "P", "P { x: 1, .. }"), [IndirectlyRefutable, DirectlyRefutable]);
    assert_eq!(preorder(items, "P", "P { x, y }"), [Irrefutable, Irrefutable, Irrefutable]);
    assert_eq!(preorder(items, "One", "One::V(n)"), [Irrefutable, Irrefutable]);
    assert_eq!(preorder(items, "One", "One::V(3)"), [IndirectlyRefutable, DirectlyRefutable]);
    assert_eq!(preorder(items, "Two", "Two::A { v }"), [DirectlyRefutable, Irrefutable]);
    assert_eq!(preorder(items, "Two", "Two::B"), [DirectlyRefutable]);
}

#[test]
fn path_rules() {
    let items = "const K: u8 = 3; const U: () = (); struct S; enum Solo { Only }";
    assert_eq!(preorder(items, "u8", "K"), [DirectlyRefutable]);
    // Constants are directly refutable even when their type has one value.
    assert_eq!(preorder(items, "()", "U"), [DirectlyRefutable]);
    assert_eq!(preorder(items, "S", "S"), [Irrefutable]);
    assert_eq!(preorder(items, "Solo", "Solo::Only"), [Irrefutable]);
}

#[test]
fn or_rules() {
    assert_eq!(preorder("", "bool", "true | false"), [Irrefutable, DirectlyRefutable, DirectlyRefutable]);
    assert_eq!(preorder("", "u8", "1 | 2"), [IndirectlyRefutable, DirectlyRefutable, DirectlyRefutable]);
    assert_eq!(preorder("", "u8", "1 | _"), [Irrefutable, DirectlyRefutable, Irrefutable]);
    assert_eq!(
        preorder("", "(bool, u8)", "(true, _) | (false, _)"),
        [Irrefutable, IndirectlyRefutable, DirectlyRefutable, Irrefutable, IndirectlyRefutable, DirectlyRefutable, Irrefutable]
    );
}

#[test]
fn grouped_is_transparent() {
    assert_eq!(preorder("", "u8", "(1)"), [IndirectlyRefutable, DirectlyRefutable]);
    assert_eq!(preorder("", "u8", "(_)"), [Irrefutable, Irrefutable]);
}

#[test]
fn slice_rules() {
    assert_eq!(preorder("", "[u8; 2]", "[a, _]"), [Irrefutable, Irrefutable, Irrefutable]);
    assert_eq!(preorder("", "[u8; 2]", "[1, ..]"), [IndirectlyRefutable, DirectlyRefutable, Irrefutable]);
    // The verbatim rule calls `[..]` directly refutable; the corrected rule does not.
    let (v, _) = classes("", "&[u8]", "[..]", SliceRule::Verbatim);
    let (c, _) = classes("", "&[u8]", "[..]", SliceRule::Corrected);
    let inner = |a: &AnnotatedPattern| a.class(a.pattern.children()[0]);
    assert_eq!(inner(&v), DirectlyRefutable);
    assert_eq!(inner(&c), Irrefutable);
    assert_eq!(pattern_refutability(&v), Refutability::Refutable);
    assert_eq!(pattern_refutability(&c), Refutability::Irrefutable);
    // With a range child the verbatim rule falls through to the child rule.
    let (v, _) = classes("", "&[u8]", "[0..=9]", SliceRule::Verbatim);
    assert_eq!(inner(&v), IndirectlyRefutable);
    let (c, _) = classes("", "&[u8]", "[0..=9]", SliceRule::Corrected);
    assert_eq!(inner(&c), DirectlyRefutable);
}

#[test]
fn complex_slice_decomposition() {
    let (a, env) = classes("", "&[Option<i32>]", "[Some(var), Some(2..=8), rest @ ..]", SliceRule::Verbatim);
    assert_eq!(pattern_refutability(&a), Refutability::Refutable);
    let text = dump(&a, &env);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8, "{text}");
    assert!(lines[0].starts_with("Reference (implicit)"), "{text}");
    assert!(lines[1].starts_with("  Slice `[Some(var), Some(2..=8), rest @ ..]`: directly refutable"), "{text}");
    assert!(lines[2].starts_with("    TupleStruct `Some(var)`: directly refutable"), "{text}");
    assert!(lines[3].starts_with("      Identifier `var`: irrefutable"), "{text}");
    assert!(lines[5].starts_with("      Range `2..=8`: directly refutable"), "{text}");
    assert!(lines[7].starts_with("      Rest `..`: irrefutable"), "{text}");
}

#[test]
fn tuple_pattern_is_irrefutable() {
    let (a, _) = classes("", "(u8, bool)", "(x, _)", SliceRule::Verbatim);
    assert_eq!(pattern_refutability(&a), Refutability::Irrefutable);
}

use super::*;

fn check(src: &str) -> TResult<TypedProgram> {
    let p = parse_program("t.rps", src).unwrap_or_else(|e| panic!("{e}\n{src}"));
    check_program(p)
}

fn ok(src: &str) -> TypedProgram {
    check(src).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

fn err(src: &str) -> TypeError {
    match check(src) {
        Ok(_) => panic!("expected a type error:\n{src}"),
        Err(e) => e,
    }
}

#[test]
fn non_exhaustive_integer_match_reports_one() {
    let e = err("fn f(number: u8) {
        match number {
            0 => print(\"zero\"),
            2.. => print(\"large number\"),
        }
    }");
    assert_eq!(e.kind, TypeErrorKind::NonExhaustive);
    assert_eq!(e.witness.as_deref(), Some("1"));
}

#[test]
fn let_binding_is_an_identifier_pattern() {
    let tp = ok("fn f() { let x = 42; }");
    let p = tp.patterns.values().next().unwrap();
    assert_eq!(p.kind_name(), "Identifier");
    assert_eq!(p.ty, Ty::Int(IntTy::I32));
}

#[test]
fn person_match_is_exhaustive() {
    ok("enum Person { Crew, Passenger(u16) }
    fn f() {
        let person = Person::Passenger(3);
        match person {
            Person::Crew => print(\"crew member\"),
            Person::Passenger(n @ ..=8) => print(\"vip, seat \", n),
            Person::Passenger(n) => print(\"passenger, seat \", n)
        }
    }");
}

#[test]
fn guarded_arm_does_not_count() {
    let e = err("fn f(x: Option<u8>, c: bool) -> u8 {
        match x { Some(5) => 1, None if c => 2 }
    }");
    assert_eq!(e.witness.as_deref(), Some("Some(0)"));
    ok("fn f(x: Option<u8>) -> u8 { match x { Some(_) => 1, None => 2 } }");
}

#[test]
fn complex_slice_pattern_types_with_match_ergonomics() {
    let tp = ok("fn f() {
        let values: &[Option<i32>] = &[Some(1), None, Some(2)];
        if let [Some(first), None, Some(1..)] = values {
            print(\"First value is \", first);
        }
    }");
    let root = tp
        .patterns
        .values()
        .find(|p| p.implicit)
        .expect("implicit reference inserted");
    let TPatKind::Reference { inner, .. } = &root.kind else { panic!() };
    assert_eq!(inner.kind_name(), "Slice");
    let bindings = root.bindings();
    assert_eq!(bindings.len(), 1);
    assert_eq!(bindings[0].0, "first");
    assert!(matches!(bindings[0].1, Ty::Ref { .. }));
}

#[test]
fn name_refs_resolve_by_meaning() {
    let tp = ok("const LIMIT: u8 = 10;
    struct Unit;
    fn f(x: u8, u: Unit, o: Option<u8>) {
        match x { LIMIT => {}, y => {} }
        match u { Unit => {} }
        match o { None => {}, Some(v) => {} }
    }");
    let kinds: Vec<&str> = {
        let mut ps: Vec<_> = tp.patterns.iter().collect();
        ps.sort_by_key(|(id, _)| **id);
        ps.into_iter().map(|(_, p)| match &p.kind {
            TPatKind::Const { .. } => "const",
            TPatKind::UnitStruct(_) => "unit-struct",
            TPatKind::UnitVariant(..) => "unit-variant",
            TPatKind::Binding { .. } => "binding",
            _ => "other",
        }).collect()
    };
    assert_eq!(kinds, ["const", "binding", "unit-struct", "unit-variant", "other"]);
}

#[test]
fn refutable_let_is_rejected() {
    let e = err("fn f(x: Option<u8>) { let Some(y) = x; }");
    assert_eq!(e.kind, TypeErrorKind::RefutableLet);
    ok("fn f(x: Option<u8>) -> u8 { let Some(y) = x else { return 0; }; y }");
    let e = err("fn f(x: Option<u8>) -> u8 { let Some(y) = x else { 0 }; y }");
    assert_eq!(e.kind, TypeErrorKind::Invalid);
}

#[test]
fn question_mark_receivers() {
    ok("fn f(x: Option<u8>) -> Option<u8> { let y = x?; Some(y) }");
    ok("fn f(x: Result<u8, bool>) -> Result<u8, bool> { Ok(x?) }");
    assert_eq!(err("fn f(x: u8) -> Option<u8> { x? }").kind, TypeErrorKind::InvalidTry);
    assert_eq!(err("fn f(x: Option<u8>) -> u8 { x? }").kind, TypeErrorKind::InvalidTry);
    assert_eq!(
        err("fn f(x: Result<u8, bool>) -> Result<u8, u8> { Ok(x?) }").kind,
        TypeErrorKind::InvalidTry
    );
}

#[test]
fn unknown_names() {
    assert_eq!(err("fn f() -> u8 { y }").kind, TypeErrorKind::UnknownName);
    assert_eq!(err("fn f(x: Foo) {}").kind, TypeErrorKind::UnknownName);
}

#[test]
fn mismatches() {
    assert_eq!(err("fn f() -> u8 { true }").kind, TypeErrorKind::Mismatch);
    assert_eq!(err("fn f(x: u8) { match x { true => {} _ => {} } }").kind, TypeErrorKind::Mismatch);
    assert_eq!(err("fn f(x: (u8, u8)) { let (a, b, c) = x; }").kind, TypeErrorKind::Mismatch);
}

#[test]
fn integer_literals_take_the_expected_type() {
    ok("fn f(x: u8) -> bool { 1 + x > 200 }");
    ok("fn f() -> i8 { -128 }");
    err("fn f() -> i8 { 128 }");
    err("fn f() -> u8 { -1 }");
    ok("fn f(x: i8) { match x { -128..=-1 => {} 0.. => {} } }");
}

#[test]
fn consts_evaluate_and_detect_cycles() {
    let tp = ok("const A: i32 = B * 2; const B: i32 = 21; const D: bool = A == 42 && true;");
    assert_eq!(tp.env.consts["A"].value, Value::Int(IntTy::I32, 42));
    assert_eq!(tp.env.consts["D"].value, Value::Bool(true));
    err("const A: i32 = B; const B: i32 = A;");
    err("const A: u8 = 200 + 100;");
}

#[test]
fn statics_are_not_patterns() {
    err("static S: u8 = 1; fn f(x: u8) { match x { S => {} _ => {} } }");
}

#[test]
fn assignment_requires_mutability() {
    ok("static mut C: u8 = 0; fn f() { let mut x = 1; x = 2; x += 1; C += 1; }");
    err("fn f() { let x = 1; x = 2; }");
    err("static C: u8 = 0; fn f() { C = 1; }");
}

#[test]
fn or_patterns_must_bind_alike() {
    ok("fn f(x: (u8, u8)) -> u8 { match x { (a, 0) | (0, a) => a, _ => 0 } }");
    err("fn f(x: (u8, u8)) -> u8 { match x { (a, 0) | (0, b) => a, _ => 0 } }");
}

#[test]
fn recursive_types_are_rejected() {
    err("enum List { Nil, Cons(u8, List) }");
}

#[test]
fn if_without_else_is_unit() {
    err("fn f(c: bool) -> u8 { if c { 1 } }");
    ok("fn f(c: bool) -> u8 { if c { return 1; } 0 }");
}

#[test]
fn arrays_coerce_to_slices() {
    ok("fn g(xs: &[u8]) -> u32 { xs.len() } fn f() -> u32 { g(&[1, 2, 3]) }");
    ok("fn f(xs: [u8; 3]) -> u8 { match xs { [a, ..] => a } }");
    err("fn f(xs: [u8; 3]) -> u8 { match xs { [a, b] => a } }");
}

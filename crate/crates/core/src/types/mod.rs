//! Name resolution, type checking and exact value spaces.

pub mod check;
pub mod consteval;
pub mod env;
pub mod exhaustive;
pub mod space;
pub mod tpat;
pub mod ty;

pub use check::{check_program, Res, TypeError, TypeErrorKind, TypedProgram};
pub use env::{
    Builtin, ConstInfo, EnumInfo, FieldShape, FieldsInfo, FnSig, StaticInfo, StructInfo,
    TypeEnv, VariantInfo,
};
pub use space::{lift, slice_len_space, value_space_of, IntervalSet, ProductSpace, SliceSpace, Space, Step, StrSet};
pub use tpat::{denotation, Ctor, TPat, TPatKind};
pub use ty::{EnumId, StructId, Ty};

/// Types `pat` against a value of type `ty` inside a program made of
/// `items` plus a probe function. Convenient for tests and tooling that
/// reason about a single pattern.
pub fn typed_pattern(items: &str, ty: &str, pat: &str) -> Result<(TypedProgram, TPat), String> {
    let src = format!("{items}\nfn __probe(x: {ty}) {{\n    match x {{\n        {pat} => {{}}\n        _ => {{}}\n    }}\n}}\n");
    let program = crate::syntax::parse_program("probe.rps", &src).map_err(|e| e.to_string())?;
    struct FirstArm(Option<crate::syntax::NodeId>);
    impl crate::syntax::visit::Visitor for FirstArm {
        fn visit_expr(&mut self, e: &crate::syntax::Expr) {
            if let crate::syntax::ExprKind::Match { arms, .. } = &e.kind {
                self.0.get_or_insert(arms[0].pat.id);
            }
            crate::syntax::visit::walk_expr(self, e);
        }
    }
    let mut first = FirstArm(None);
    let probe = program.functions().last().expect("probe function");
    crate::syntax::visit::Visitor::visit_block(&mut first, &probe.body);
    let id = first.0.expect("probe match");
    let typed = check_program(program).map_err(|e| e.to_string())?;
    let p = typed.patterns[&id].clone();
    Ok((typed, p))
}

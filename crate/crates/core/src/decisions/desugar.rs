//! Rewrites `e?` into the two-arm match it stands for.

use crate::syntax::visit::{walk_expr_mut, VisitorMut};
use crate::syntax::*;
use crate::types::{Builtin, Ctor, Res, TPat, TPatKind, Ty, TypedProgram};

/// Replaces every `?` by a match with a success arm yielding the payload and
/// a failure arm returning early. The match keeps the id of the `?`
/// expression and every inserted node carries its span.
pub fn desugar_question_mark(mut tp: TypedProgram) -> TypedProgram {
    let mut items = std::mem::take(&mut tp.program.items);
    for item in &mut items {
        if let ItemKind::Fn(f) = &mut item.kind {
            let ret = tp.env.fns[&f.name.name].ret.clone();
            let mut d = Desugar { tp: &mut tp, ret };
            d.visit_block(&mut f.body);
        }
    }
    tp.program.items = items;
    tp
}

struct Desugar<'a> {
    tp: &'a mut TypedProgram,
    ret: Ty,
}

impl Desugar<'_> {
    fn id(&mut self) -> NodeId {
        self.tp.program.fresh_id()
    }

    fn path_expr(&mut self, name: &str, span: SourceSpan, ty: Ty, res: Res) -> Expr {
        let e = Expr {
            id: self.id(),
            span,
            kind: ExprKind::Path(single_path(name, span)),
        };
        self.tp.expr_types.insert(e.id, ty);
        self.tp.res.insert(e.id, res);
        e
    }

    /// `Variant(name)` as source pattern and typed pattern.
    fn ctor_pattern(&mut self, variant: &str, ctor: Ctor, ty: &Ty, binding: &str, bty: &Ty, span: SourceSpan) -> Pattern {
        let inner = Pattern {
            id: self.id(),
            span,
            kind: PatternKind::NameRef(Ident {
                name: binding.into(),
                span,
            }),
        };
        let p = Pattern {
            id: self.id(),
            span,
            kind: PatternKind::TupleStruct {
                path: single_path(variant, span),
                elems: vec![inner.clone()],
            },
        };
        let tb = TPat {
            id: inner.id,
            span,
            ty: bty.clone(),
            kind: TPatKind::Binding {
                name: binding.into(),
                by_ref: false,
                mutable: false,
                binding_ty: bty.clone(),
                sub: None,
            },
            implicit: false,
        };
        let t = TPat {
            id: p.id,
            span,
            ty: ty.clone(),
            kind: TPatKind::TupleStruct {
                ctor,
                elems: vec![tb],
            },
            implicit: false,
        };
        self.tp.patterns.insert(p.id, t);
        p
    }

    fn rewrite(&mut self, e: &mut Expr) {
        let ExprKind::Try(inner) = &mut e.kind else { return };
        let span = e.span;
        let scrutinee = std::mem::replace(
            &mut **inner,
            Expr {
                id: 0,
                span,
                kind: ExprKind::Tuple(Vec::new()),
            },
        );
        let Ty::Enum(en) = self.tp.expr_types[&scrutinee.id].clone() else {
            unreachable!("checked `?` receiver")
        };
        let Ty::Enum(ret_en) = self.ret.clone() else {
            unreachable!("checked `?` return type")
        };
        let info = self.tp.env.enum_info(en).clone();
        let sty = Ty::Enum(en);
        let payload = info.variants[0].fields.tys[0].clone();
        let ok_name = info.variants[0].name.clone();
        let fail_name = info.variants[1].name.clone();

        let success = {
            let pat = self.ctor_pattern(&ok_name, Ctor::Variant(en, 0), &sty, "inner", &payload, span);
            let body = self.path_expr("inner", span, payload.clone(), Res::Local);
            Arm { pat, guard: None, body, span }
        };
        let failure = match info.builtin {
            Some(Builtin::Option) => {
                let pat = Pattern {
                    id: self.id(),
                    span,
                    kind: PatternKind::Path(single_path(&fail_name, span)),
                };
                self.tp.patterns.insert(
                    pat.id,
                    TPat {
                        id: pat.id,
                        span,
                        ty: sty.clone(),
                        kind: TPatKind::UnitVariant(en, 1),
                        implicit: false,
                    },
                );
                let none = self.path_expr(&fail_name, span, self.ret.clone(), Res::Ctor(Ctor::Variant(ret_en, 1)));
                let body = self.ret_expr(none, span);
                Arm { pat, guard: None, body, span }
            }
            _ => {
                let err_ty = info.variants[1].fields.tys[0].clone();
                let pat = self.ctor_pattern(&fail_name, Ctor::Variant(en, 1), &sty, "e", &err_ty, span);
                let callee = self.path_expr(&fail_name, span, self.ret.clone(), Res::Ctor(Ctor::Variant(ret_en, 1)));
                let arg = self.path_expr("e", span, err_ty, Res::Local);
                let call = Expr {
                    id: self.id(),
                    span,
                    kind: ExprKind::Call {
                        callee: Box::new(callee),
                        args: vec![arg],
                    },
                };
                self.tp.expr_types.insert(call.id, self.ret.clone());
                let body = self.ret_expr(call, span);
                Arm { pat, guard: None, body, span }
            }
        };
        e.kind = ExprKind::Match {
            scrutinee: Box::new(scrutinee),
            arms: vec![success, failure],
            source: MatchSource::QuestionMark,
        };
    }

    fn ret_expr(&mut self, value: Expr, span: SourceSpan) -> Expr {
        let e = Expr {
            id: self.id(),
            span,
            kind: ExprKind::Return(Some(Box::new(value)), ReturnSource::QuestionMark),
        };
        self.tp.expr_types.insert(e.id, Ty::Never);
        e
    }
}

impl VisitorMut for Desugar<'_> {
    fn visit_expr(&mut self, e: &mut Expr) {
        walk_expr_mut(self, e);
        self.rewrite(e);
    }
}

fn single_path(name: &str, span: SourceSpan) -> Path {
    Path {
        segments: vec![Ident {
            name: name.into(),
            span,
        }],
        span,
    }
}

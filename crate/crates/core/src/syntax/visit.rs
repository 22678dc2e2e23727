//! Generic AST traversals. Override a hook and call the matching `walk_*`
//! function to keep descending.

use super::ast::*;
use super::span::SourceSpan;

pub trait Visitor {
    fn visit_expr(&mut self, e: &Expr) {
        walk_expr(self, e);
    }
    fn visit_pattern(&mut self, p: &Pattern) {
        walk_pattern(self, p);
    }
    fn visit_block(&mut self, b: &Block) {
        walk_block(self, b);
    }
    fn visit_stmt(&mut self, s: &Stmt) {
        walk_stmt(self, s);
    }
}

pub fn walk_program<V: Visitor + ?Sized>(v: &mut V, p: &Program) {
    for item in &p.items {
        match &item.kind {
            ItemKind::Const(c) => v.visit_expr(&c.value),
            ItemKind::Static(s) => v.visit_expr(&s.value),
            ItemKind::Fn(f) => v.visit_block(&f.body),
            ItemKind::Enum(_) | ItemKind::Struct(_) => {}
        }
    }
}

pub fn walk_block<V: Visitor + ?Sized>(v: &mut V, b: &Block) {
    for s in &b.stmts {
        v.visit_stmt(s);
    }
    if let Some(t) = &b.tail {
        v.visit_expr(t);
    }
}

pub fn walk_stmt<V: Visitor + ?Sized>(v: &mut V, s: &Stmt) {
    match &s.kind {
        StmtKind::Let { pat, init, els, .. } => {
            v.visit_expr(init);
            v.visit_pattern(pat);
            if let Some(b) = els {
                v.visit_block(b);
            }
        }
        StmtKind::Expr { expr, .. } => v.visit_expr(expr),
        StmtKind::Assign { target, value, .. } => {
            v.visit_expr(target);
            v.visit_expr(value);
        }
    }
}

pub fn walk_expr<V: Visitor + ?Sized>(v: &mut V, e: &Expr) {
    match &e.kind {
        ExprKind::Lit(_) | ExprKind::Path(_) => {}
        ExprKind::Unary(_, x)
        | ExprKind::Ref { expr: x, .. }
        | ExprKind::Cast(x, _)
        | ExprKind::Paren(x)
        | ExprKind::Field(x, _)
        | ExprKind::Try(x) => v.visit_expr(x),
        ExprKind::Binary(_, a, b) | ExprKind::Index(a, b) => {
            v.visit_expr(a);
            v.visit_expr(b);
        }
        ExprKind::Tuple(xs) | ExprKind::Array(xs) => xs.iter().for_each(|x| v.visit_expr(x)),
        ExprKind::StructLit { fields, .. } => fields.iter().for_each(|(_, x)| v.visit_expr(x)),
        ExprKind::Call { callee, args } => {
            v.visit_expr(callee);
            args.iter().for_each(|x| v.visit_expr(x));
        }
        ExprKind::MethodCall { receiver, args, .. } => {
            v.visit_expr(receiver);
            args.iter().for_each(|x| v.visit_expr(x));
        }
        ExprKind::Block(b) => v.visit_block(b),
        ExprKind::If { cond, then, els } => {
            v.visit_expr(cond);
            v.visit_block(then);
            if let Some(x) = els {
                v.visit_expr(x);
            }
        }
        ExprKind::IfLet {
            pat,
            scrutinee,
            then,
            els,
        } => {
            v.visit_expr(scrutinee);
            v.visit_pattern(pat);
            v.visit_block(then);
            if let Some(x) = els {
                v.visit_expr(x);
            }
        }
        ExprKind::Match {
            scrutinee, arms, ..
        } => {
            v.visit_expr(scrutinee);
            for arm in arms {
                v.visit_pattern(&arm.pat);
                if let Some(g) = &arm.guard {
                    v.visit_expr(g);
                }
                v.visit_expr(&arm.body);
            }
        }
        ExprKind::While { cond, body } => {
            v.visit_expr(cond);
            v.visit_block(body);
        }
        ExprKind::Return(x, _) => {
            if let Some(x) = x {
                v.visit_expr(x);
            }
        }
    }
}

pub fn walk_pattern<V: Visitor + ?Sized>(v: &mut V, p: &Pattern) {
    for c in p.children() {
        v.visit_pattern(c);
    }
}

/// Mutable traversal; every span and node id is offered to the hooks.
pub trait VisitorMut {
    fn visit_expr(&mut self, e: &mut Expr) {
        walk_expr_mut(self, e);
    }
    fn visit_pattern(&mut self, p: &mut Pattern) {
        walk_pattern_mut(self, p);
    }
    fn visit_block(&mut self, b: &mut Block) {
        walk_block_mut(self, b);
    }
    fn visit_stmt(&mut self, s: &mut Stmt) {
        walk_stmt_mut(self, s);
    }
    fn visit_span(&mut self, _s: &mut SourceSpan) {}
    fn visit_id(&mut self, _id: &mut NodeId) {}
}

pub fn walk_program_mut<V: VisitorMut + ?Sized>(v: &mut V, p: &mut Program) {
    for item in &mut p.items {
        v.visit_id(&mut item.id);
        v.visit_span(&mut item.span);
        match &mut item.kind {
            ItemKind::Enum(e) => {
                ident_mut(v, &mut e.name);
                for var in &mut e.variants {
                    ident_mut(v, &mut var.name);
                    v.visit_span(&mut var.span);
                    fields_mut(v, &mut var.fields);
                }
            }
            ItemKind::Struct(s) => {
                ident_mut(v, &mut s.name);
                fields_mut(v, &mut s.fields);
            }
            ItemKind::Const(c) => {
                ident_mut(v, &mut c.name);
                type_mut(v, &mut c.ty);
                v.visit_expr(&mut c.value);
            }
            ItemKind::Static(s) => {
                ident_mut(v, &mut s.name);
                type_mut(v, &mut s.ty);
                v.visit_expr(&mut s.value);
            }
            ItemKind::Fn(f) => {
                ident_mut(v, &mut f.name);
                v.visit_span(&mut f.span);
                for p in &mut f.params {
                    ident_mut(v, &mut p.name);
                    type_mut(v, &mut p.ty);
                }
                if let Some(t) = &mut f.ret {
                    type_mut(v, t);
                }
                v.visit_block(&mut f.body);
            }
        }
    }
}

fn ident_mut<V: VisitorMut + ?Sized>(v: &mut V, i: &mut Ident) {
    v.visit_span(&mut i.span);
}

fn path_mut<V: VisitorMut + ?Sized>(v: &mut V, p: &mut Path) {
    v.visit_span(&mut p.span);
    for s in &mut p.segments {
        ident_mut(v, s);
    }
}

fn fields_mut<V: VisitorMut + ?Sized>(v: &mut V, f: &mut Fields) {
    match f {
        Fields::Unit => {}
        Fields::Tuple(ts) => ts.iter_mut().for_each(|t| type_mut(v, t)),
        Fields::Named(ns) => {
            for (n, t) in ns {
                ident_mut(v, n);
                type_mut(v, t);
            }
        }
    }
}

fn type_mut<V: VisitorMut + ?Sized>(v: &mut V, t: &mut TypeExpr) {
    v.visit_span(&mut t.span);
    match &mut t.kind {
        TypeExprKind::Path(p, args) => {
            path_mut(v, p);
            args.iter_mut().for_each(|a| type_mut(v, a));
        }
        TypeExprKind::Tuple(ts) => ts.iter_mut().for_each(|a| type_mut(v, a)),
        TypeExprKind::Array(e, _) | TypeExprKind::Slice(e) => type_mut(v, e),
        TypeExprKind::Ref { inner, .. } => type_mut(v, inner),
    }
}

pub fn walk_block_mut<V: VisitorMut + ?Sized>(v: &mut V, b: &mut Block) {
    v.visit_id(&mut b.id);
    v.visit_span(&mut b.span);
    for s in &mut b.stmts {
        v.visit_stmt(s);
    }
    if let Some(t) = &mut b.tail {
        v.visit_expr(t);
    }
}

pub fn walk_stmt_mut<V: VisitorMut + ?Sized>(v: &mut V, s: &mut Stmt) {
    v.visit_id(&mut s.id);
    v.visit_span(&mut s.span);
    match &mut s.kind {
        StmtKind::Let { pat, ty, init, els } => {
            v.visit_pattern(pat);
            if let Some(t) = ty {
                type_mut(v, t);
            }
            v.visit_expr(init);
            if let Some(b) = els {
                v.visit_block(b);
            }
        }
        StmtKind::Expr { expr, .. } => v.visit_expr(expr),
        StmtKind::Assign { target, value, .. } => {
            v.visit_expr(target);
            v.visit_expr(value);
        }
    }
}

pub fn walk_expr_mut<V: VisitorMut + ?Sized>(v: &mut V, e: &mut Expr) {
    v.visit_id(&mut e.id);
    v.visit_span(&mut e.span);
    match &mut e.kind {
        ExprKind::Lit(_) => {}
        ExprKind::Path(p) => path_mut(v, p),
        ExprKind::Cast(x, t) => {
            v.visit_expr(x);
            type_mut(v, t);
        }
        ExprKind::Field(x, f) => {
            v.visit_expr(x);
            match f {
                FieldName::Named(i) => ident_mut(v, i),
                FieldName::Index(_, s) => v.visit_span(s),
            }
        }
        ExprKind::Unary(_, x) | ExprKind::Ref { expr: x, .. } | ExprKind::Paren(x) | ExprKind::Try(x) => {
            v.visit_expr(x)
        }
        ExprKind::Binary(_, a, b) | ExprKind::Index(a, b) => {
            v.visit_expr(a);
            v.visit_expr(b);
        }
        ExprKind::Tuple(xs) | ExprKind::Array(xs) => xs.iter_mut().for_each(|x| v.visit_expr(x)),
        ExprKind::StructLit { path, fields } => {
            path_mut(v, path);
            for (n, x) in fields {
                ident_mut(v, n);
                v.visit_expr(x);
            }
        }
        ExprKind::Call { callee, args } => {
            v.visit_expr(callee);
            args.iter_mut().for_each(|x| v.visit_expr(x));
        }
        ExprKind::MethodCall {
            receiver,
            method,
            args,
        } => {
            v.visit_expr(receiver);
            ident_mut(v, method);
            args.iter_mut().for_each(|x| v.visit_expr(x));
        }
        ExprKind::Block(b) => v.visit_block(b),
        ExprKind::If { cond, then, els } => {
            v.visit_expr(cond);
            v.visit_block(then);
            if let Some(x) = els {
                v.visit_expr(x);
            }
        }
        ExprKind::IfLet {
            pat,
            scrutinee,
            then,
            els,
        } => {
            v.visit_pattern(pat);
            v.visit_expr(scrutinee);
            v.visit_block(then);
            if let Some(x) = els {
                v.visit_expr(x);
            }
        }
        ExprKind::Match {
            scrutinee, arms, ..
        } => {
            v.visit_expr(scrutinee);
            for arm in arms {
                v.visit_span(&mut arm.span);
                v.visit_pattern(&mut arm.pat);
                if let Some(g) = &mut arm.guard {
                    v.visit_expr(g);
                }
                v.visit_expr(&mut arm.body);
            }
        }
        ExprKind::While { cond, body } => {
            v.visit_expr(cond);
            v.visit_block(body);
        }
        ExprKind::Return(x, _) => {
            if let Some(x) = x {
                v.visit_expr(x);
            }
        }
    }
}

fn bound_mut<V: VisitorMut + ?Sized>(v: &mut V, b: &mut Option<RangeBound>) {
    if let Some(RangeBound::Path(p)) = b {
        path_mut(v, p);
    }
}

pub fn walk_pattern_mut<V: VisitorMut + ?Sized>(v: &mut V, p: &mut Pattern) {
    v.visit_id(&mut p.id);
    v.visit_span(&mut p.span);
    match &mut p.kind {
        PatternKind::Literal(_) | PatternKind::Wildcard | PatternKind::Rest => {}
        PatternKind::NameRef(i) => ident_mut(v, i),
        PatternKind::Path(path) => path_mut(v, path),
        PatternKind::Ident { name, sub, .. } => {
            ident_mut(v, name);
            if let Some(s) = sub {
                v.visit_pattern(s);
            }
        }
        PatternKind::Range { lo, hi, .. } => {
            bound_mut(v, lo);
            bound_mut(v, hi);
        }
        PatternKind::Reference { inner, .. } | PatternKind::Grouped(inner) => v.visit_pattern(inner),
        PatternKind::Struct { path, fields, .. } => {
            path_mut(v, path);
            for f in fields {
                ident_mut(v, &mut f.name);
                v.visit_pattern(&mut f.pat);
            }
        }
        PatternKind::TupleStruct { path, elems } => {
            path_mut(v, path);
            elems.iter_mut().for_each(|x| v.visit_pattern(x));
        }
        PatternKind::Tuple(elems) | PatternKind::Slice(elems) | PatternKind::Or(elems) => {
            elems.iter_mut().for_each(|x| v.visit_pattern(x))
        }
    }
}

/// Resets every span and id, so that two trees can be compared for shape.
pub fn erase_positions(p: &mut Program) {
    walk_program_mut(&mut Eraser, p);
    p.next_id = 0;
}

pub fn erase_pattern_positions(p: &mut Pattern) {
    Eraser.visit_pattern(p);
}

struct Eraser;

impl VisitorMut for Eraser {
    fn visit_span(&mut self, s: &mut SourceSpan) {
        *s = SourceSpan::DUMMY;
    }
    fn visit_id(&mut self, id: &mut NodeId) {
        *id = 0;
    }
}

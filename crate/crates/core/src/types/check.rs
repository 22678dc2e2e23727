//! Name resolution and type checking.
//!
//! The checker is bidirectional in a small way: an expected type flows into
//! literals, constructors and blocks, which is enough to type integer
//! literals and `None` without an inference engine.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use super::consteval::eval_const;
use super::env::{
    ConstInfo, EnumInfo, FieldShape, FieldsInfo, FnSig, StaticInfo, StructInfo, TypeEnv,
    VariantInfo,
};
use super::exhaustive::check_exhaustive;
use super::space::is_top;
use super::tpat::{denotation, Ctor, TPat, TPatKind};
use super::ty::{EnumId, Ty};
use crate::runtime::Value;
use crate::syntax::visit::{walk_pattern, Visitor};
use crate::syntax::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeErrorKind {
    Mismatch,
    UnknownName,
    NonExhaustive,
    InvalidTry,
    RefutableLet,
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct TypeError {
    pub span: SourceSpan,
    pub kind: TypeErrorKind,
    pub message: String,
    /// An unmatched value, for non-exhaustive matches.
    pub witness: Option<String>,
}

impl TypeError {
    fn new(span: SourceSpan, kind: TypeErrorKind, message: impl Into<String>) -> Self {
        TypeError {
            span,
            kind,
            message: message.into(),
            witness: None,
        }
    }
}

type TResult<T> = Result<T, TypeError>;

fn invalid(span: SourceSpan, msg: impl Into<String>) -> TypeError {
    TypeError::new(span, TypeErrorKind::Invalid, msg)
}

fn unknown(span: SourceSpan, msg: impl Into<String>) -> TypeError {
    TypeError::new(span, TypeErrorKind::UnknownName, msg)
}

/// What a path expression refers to.
#[derive(Clone, Debug, PartialEq)]
pub enum Res {
    Local,
    Const(String),
    Static(String),
    Fn(String),
    Ctor(Ctor),
    Print,
    Panic,
}

#[derive(Clone, Debug)]
pub struct TypedProgram {
    pub program: Program,
    pub env: TypeEnv,
    pub expr_types: HashMap<NodeId, Ty>,
    /// Typed pattern trees keyed by the id of the source root pattern.
    pub patterns: HashMap<NodeId, TPat>,
    /// Resolution of path expressions, call callees and struct literals.
    pub res: HashMap<NodeId, Res>,
}

impl TypedProgram {
    pub fn ty(&self, e: &Expr) -> &Ty {
        &self.expr_types[&e.id]
    }

    pub fn pattern(&self, p: &Pattern) -> &TPat {
        &self.patterns[&p.id]
    }
}

#[derive(Clone, Debug)]
struct Local {
    ty: Ty,
    mutable: bool,
}

struct Checker {
    env: TypeEnv,
    expr_types: HashMap<NodeId, Ty>,
    patterns: HashMap<NodeId, TPat>,
    res: HashMap<NodeId, Res>,
    const_tys: HashMap<String, Ty>,
    static_tys: HashMap<String, (Ty, bool)>,
    scopes: Vec<HashMap<String, Local>>,
    ret: Option<Ty>,
    next_id: NodeId,
}

/// Type checks a parsed program, resolving every name and verifying that
/// every `match` is exhaustive.
pub fn check_program(program: Program) -> TResult<TypedProgram> {
    let mut c = Checker {
        env: TypeEnv::default(),
        expr_types: HashMap::new(),
        patterns: HashMap::new(),
        res: HashMap::new(),
        const_tys: HashMap::new(),
        static_tys: HashMap::new(),
        scopes: Vec::new(),
        ret: None,
        next_id: program.next_id,
    };
    c.collect_types(&program)?;
    c.resolve_fields(&program)?;
    c.reject_recursive(&program)?;
    c.env.slice_width = slice_width(&program);
    c.check_consts(&program)?;
    c.check_statics(&program)?;
    c.collect_fns(&program)?;
    for f in program.functions() {
        c.check_fn(f)?;
    }
    let mut program = program;
    program.next_id = c.next_id;
    Ok(TypedProgram {
        program,
        env: c.env,
        expr_types: c.expr_types,
        patterns: c.patterns,
        res: c.res,
    })
}

/// Widest slice pattern, counted without rest elements.
fn slice_width(p: &Program) -> usize {
    struct W(usize);
    impl Visitor for W {
        fn visit_pattern(&mut self, p: &Pattern) {
            if let PatternKind::Slice(elems) = &p.kind {
                let n = elems.iter().filter(|e| !is_rest_like(e)).count();
                self.0 = self.0.max(n);
            }
            walk_pattern(self, p);
        }
    }
    let mut w = W(0);
    crate::syntax::visit::walk_program(&mut w, p);
    w.0
}

fn is_rest_like(p: &Pattern) -> bool {
    match &p.kind {
        PatternKind::Rest => true,
        PatternKind::Ident { sub: Some(s), .. } => is_rest_like(s),
        _ => false,
    }
}

/// Integer literal whose type is still open.
fn is_untyped_int(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Lit(Lit::Int { suffix: None, .. }) => true,
        ExprKind::Unary(UnOp::Neg, x) | ExprKind::Paren(x) => is_untyped_int(x),
        _ => false,
    }
}

fn const_type_allowed(t: &Ty) -> bool {
    match t {
        Ty::Bool | Ty::Char | Ty::Int(_) => true,
        Ty::Ref { inner, .. } => matches!(**inner, Ty::Str),
        t => t.is_unit(),
    }
}

impl Checker {
    fn fresh_id(&mut self) -> NodeId {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    // ---- items ----

    fn collect_types(&mut self, p: &Program) -> TResult<()> {
        for item in &p.items {
            match &item.kind {
                ItemKind::Enum(e) => {
                    if e.variants.is_empty() {
                        return Err(invalid(e.name.span, "enums must have at least one variant"));
                    }
                    self.env.add_enum(EnumInfo {
                        name: e.name.name.clone(),
                        variants: Vec::new(),
                        builtin: None,
                    });
                }
                ItemKind::Struct(s) => {
                    self.env.add_struct(StructInfo {
                        name: s.name.name.clone(),
                        fields: FieldsInfo::unit(),
                    });
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn fields(&mut self, f: &Fields) -> TResult<FieldsInfo> {
        Ok(match f {
            Fields::Unit => FieldsInfo::unit(),
            Fields::Tuple(ts) => {
                let tys = ts.iter().map(|t| self.resolve_ty(t)).collect::<TResult<_>>()?;
                FieldsInfo::tuple(tys)
            }
            Fields::Named(fs) => {
                let mut names = Vec::new();
                let mut tys = Vec::new();
                for (n, t) in fs {
                    if names.contains(&n.name) {
                        return Err(invalid(n.span, format!("field `{}` is declared twice", n.name)));
                    }
                    names.push(n.name.clone());
                    tys.push(self.resolve_ty(t)?);
                }
                FieldsInfo {
                    shape: FieldShape::Named,
                    names,
                    tys,
                }
            }
        })
    }

    fn resolve_fields(&mut self, p: &Program) -> TResult<()> {
        for item in &p.items {
            match &item.kind {
                ItemKind::Enum(e) => {
                    let mut variants = Vec::new();
                    for v in &e.variants {
                        variants.push(VariantInfo {
                            name: v.name.name.clone(),
                            fields: self.fields(&v.fields)?,
                        });
                    }
                    let id = self.env.enum_by_name(&e.name.name).expect("collected");
                    self.env.enums[id.0 as usize].variants = variants;
                }
                ItemKind::Struct(s) => {
                    let fields = self.fields(&s.fields)?;
                    let id = self.env.struct_by_name(&s.name.name).expect("collected");
                    self.env.structs[id.0 as usize].fields = fields;
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn reject_recursive(&self, p: &Program) -> TResult<()> {
        fn visit(env: &TypeEnv, t: &Ty, stack: &mut Vec<Ty>) -> bool {
            let next: Vec<Ty> = match t {
                Ty::Enum(e) => {
                    let info = env.enum_info(*e);
                    info.variants.iter().flat_map(|v| v.fields.tys.clone()).collect()
                }
                Ty::Struct(s) => env.struct_info(*s).fields.tys.clone(),
                Ty::Tuple(ts) => ts.clone(),
                Ty::Array(e, _) | Ty::Slice(e) | Ty::Ref { inner: e, .. } => vec![(**e).clone()],
                _ => return true,
            };
            if stack.contains(t) {
                return false;
            }
            stack.push(t.clone());
            let ok = next.iter().all(|n| visit(env, n, stack));
            stack.pop();
            ok
        }
        for item in &p.items {
            let (name, ty) = match &item.kind {
                ItemKind::Enum(e) => (&e.name, Ty::Enum(self.env.enum_by_name(&e.name.name).unwrap())),
                ItemKind::Struct(s) => (&s.name, Ty::Struct(self.env.struct_by_name(&s.name.name).unwrap())),
                _ => continue,
            };
            if !visit(&self.env, &ty, &mut Vec::new()) {
                return Err(invalid(name.span, format!("recursive type `{}` has infinite size", name.name)));
            }
        }
        Ok(())
    }

    fn resolve_ty(&mut self, t: &TypeExpr) -> TResult<Ty> {
        Ok(match &t.kind {
            TypeExprKind::Tuple(ts) => Ty::Tuple(ts.iter().map(|t| self.resolve_ty(t)).collect::<TResult<_>>()?),
            TypeExprKind::Array(e, n) => Ty::Array(Box::new(self.resolve_ty(e)?), *n),
            TypeExprKind::Slice(e) => Ty::Slice(Box::new(self.resolve_ty(e)?)),
            TypeExprKind::Ref { mutable, inner } => Ty::Ref {
                mutable: *mutable,
                inner: Box::new(self.resolve_ty(inner)?),
            },
            TypeExprKind::Path(path, args) => {
                let name = path.joined();
                let args: Vec<Ty> = args.iter().map(|a| self.resolve_ty(a)).collect::<TResult<_>>()?;
                let arity = |n: usize| -> TResult<()> {
                    if args.len() == n {
                        Ok(())
                    } else {
                        Err(invalid(t.span, format!("`{name}` expects {n} type argument(s), found {}", args.len())))
                    }
                };
                match name.as_str() {
                    "Option" if !args.is_empty() => {
                        arity(1)?;
                        Ty::Enum(self.env.option_of(args[0].clone()))
                    }
                    "Result" if !args.is_empty() => {
                        arity(2)?;
                        Ty::Enum(self.env.result_of(args[0].clone(), args[1].clone()))
                    }
                    _ => {
                        arity(0)?;
                        match name.as_str() {
                            "bool" => Ty::Bool,
                            "char" => Ty::Char,
                            "str" => Ty::Str,
                            n => {
                                if let Some(i) = IntTy::from_name(n) {
                                    Ty::Int(i)
                                } else if let Some(e) = self.env.enum_by_name(n) {
                                    Ty::Enum(e)
                                } else if let Some(s) = self.env.struct_by_name(n) {
                                    Ty::Struct(s)
                                } else {
                                    return Err(unknown(t.span, format!("cannot find type `{n}`")));
                                }
                            }
                        }
                    }
                }
            }
        })
    }

    fn check_consts(&mut self, p: &Program) -> TResult<()> {
        let mut defs: BTreeMap<String, (&ConstDef, Ty)> = BTreeMap::new();
        for item in &p.items {
            if let ItemKind::Const(c) = &item.kind {
                let ty = self.resolve_ty(&c.ty)?;
                if !const_type_allowed(&ty) {
                    return Err(invalid(c.ty.span, "constants must have a scalar, `&str` or unit type"));
                }
                self.const_tys.insert(c.name.name.clone(), ty.clone());
                defs.insert(c.name.name.clone(), (c, ty));
            }
        }
        for (c, ty) in defs.values() {
            self.check_expr_as(&c.value, ty)?;
        }
        let mut done: HashMap<String, Value> = HashMap::new();
        for name in defs.keys() {
            let mut visiting = Vec::new();
            self.eval_named_const(name, &defs, &mut done, &mut visiting)?;
        }
        for (name, (c, ty)) in &defs {
            self.env.consts.insert(
                name.clone(),
                ConstInfo {
                    ty: ty.clone(),
                    value: done[name].clone(),
                    span: c.name.span,
                },
            );
        }
        Ok(())
    }

    fn eval_named_const(
        &self,
        name: &str,
        defs: &BTreeMap<String, (&ConstDef, Ty)>,
        done: &mut HashMap<String, Value>,
        visiting: &mut Vec<String>,
    ) -> TResult<Value> {
        if let Some(v) = done.get(name) {
            return Ok(v.clone());
        }
        let (c, _) = defs[name];
        if visiting.iter().any(|v| v == name) {
            return Err(invalid(c.name.span, format!("cycle detected when evaluating constant `{name}`")));
        }
        visiting.push(name.to_string());
        let mut pending: Option<TypeError> = None;
        let result = {
            let mut lookup = |n: &str| -> Result<Value, String> {
                if !defs.contains_key(n) {
                    return Err(format!("`{n}` is not a constant"));
                }
                match self.eval_named_const(n, defs, done, visiting) {
                    Ok(v) => Ok(v),
                    Err(e) => {
                        let msg = e.message.clone();
                        pending = Some(e);
                        Err(msg)
                    }
                }
            };
            eval_const(&c.value, &self.expr_types, &mut lookup)
        };
        if let Some(e) = pending {
            return Err(e);
        }
        let v = result.map_err(|m| invalid(c.value.span, m))?;
        visiting.pop();
        done.insert(name.to_string(), v.clone());
        Ok(v)
    }

    fn check_statics(&mut self, p: &Program) -> TResult<()> {
        for item in &p.items {
            if let ItemKind::Static(s) = &item.kind {
                let ty = self.resolve_ty(&s.ty)?;
                if !const_type_allowed(&ty) {
                    return Err(invalid(s.ty.span, "statics must have a scalar, `&str` or unit type"));
                }
                self.check_expr_as(&s.value, &ty)?;
                let consts = &self.env.consts;
                let mut lookup = |n: &str| -> Result<Value, String> {
                    consts
                        .get(n)
                        .map(|c| c.value.clone())
                        .ok_or_else(|| format!("`{n}` is not a constant"))
                };
                let init = eval_const(&s.value, &self.expr_types, &mut lookup)
                    .map_err(|m| invalid(s.value.span, m))?;
                self.static_tys.insert(s.name.name.clone(), (ty.clone(), s.mutable));
                self.env.statics.insert(
                    s.name.name.clone(),
                    StaticInfo {
                        ty,
                        init,
                        mutable: s.mutable,
                        span: s.name.span,
                    },
                );
            }
        }
        Ok(())
    }

    fn collect_fns(&mut self, p: &Program) -> TResult<()> {
        for f in p.functions() {
            let mut params = Vec::new();
            let mut seen = HashSet::new();
            for prm in &f.params {
                if !seen.insert(prm.name.name.as_str()) {
                    return Err(invalid(prm.name.span, format!("parameter `{}` is bound twice", prm.name.name)));
                }
                params.push(self.resolve_ty(&prm.ty)?);
            }
            let ret = match &f.ret {
                Some(t) => self.resolve_ty(t)?,
                None => Ty::unit(),
            };
            self.env.fns.insert(
                f.name.name.clone(),
                FnSig {
                    params,
                    ret,
                    span: f.name.span,
                },
            );
        }
        Ok(())
    }

    fn check_fn(&mut self, f: &FnDef) -> TResult<()> {
        let sig = self.env.fns[&f.name.name].clone();
        let mut scope = HashMap::new();
        for (prm, ty) in f.params.iter().zip(&sig.params) {
            scope.insert(
                prm.name.name.clone(),
                Local {
                    ty: ty.clone(),
                    mutable: prm.mutable,
                },
            );
        }
        self.scopes = vec![scope];
        self.ret = Some(sig.ret.clone());
        let t = self.block(&f.body, Some(&sig.ret))?;
        self.expect_compat(&t, &sig.ret, f.body.tail.as_ref().map_or(f.body.span, |e| e.span))?;
        self.scopes.clear();
        self.ret = None;
        Ok(())
    }

    // ---- type relations ----

    fn compat(&self, found: &Ty, want: &Ty) -> bool {
        if *found == Ty::Never {
            return true;
        }
        match (found.peel(), want.peel()) {
            (Ty::Array(a, n), Ty::Array(b, m)) => n == m && self.compat(a, b),
            (Ty::Array(a, _), Ty::Slice(b)) | (Ty::Slice(a), Ty::Slice(b)) => self.compat(a, b),
            (Ty::Tuple(a), Ty::Tuple(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| self.compat(x, y))
            }
            (Ty::Never, _) => true,
            (x, y) => x == y,
        }
    }

    fn mismatch(&self, found: &Ty, want: &Ty, span: SourceSpan) -> TypeError {
        TypeError::new(
            span,
            TypeErrorKind::Mismatch,
            format!("mismatched types: expected `{}`, found `{}`", self.env.show(want), self.env.show(found)),
        )
    }

    fn expect_compat(&self, found: &Ty, want: &Ty, span: SourceSpan) -> TResult<()> {
        if self.compat(found, want) {
            Ok(())
        } else {
            Err(self.mismatch(found, want, span))
        }
    }

    /// Least type of two branches.
    fn join(&self, a: Ty, b: Ty, span: SourceSpan) -> TResult<Ty> {
        if a == Ty::Never {
            return Ok(b);
        }
        self.expect_compat(&b, &a, span)?;
        Ok(a)
    }

    // ---- scopes ----

    fn lookup_local(&self, name: &str) -> Option<&Local> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    fn with_scope<T>(&mut self, f: impl FnOnce(&mut Self) -> TResult<T>) -> TResult<T> {
        self.scopes.push(HashMap::new());
        let r = f(self);
        self.scopes.pop();
        r
    }

    fn bind(&mut self, bindings: Vec<(String, Local)>) {
        let scope = self.scopes.last_mut().expect("inside a scope");
        for (n, l) in bindings {
            scope.insert(n, l);
        }
    }

    // ---- expressions ----

    fn check_expr_as(&mut self, e: &Expr, want: &Ty) -> TResult<Ty> {
        let t = self.expr(e, Some(want))?;
        self.expect_compat(&t, want, e.span)?;
        Ok(t)
    }

    fn record(&mut self, e: &Expr, t: Ty) -> Ty {
        self.expr_types.insert(e.id, t.clone());
        t
    }

    fn expr(&mut self, e: &Expr, expected: Option<&Ty>) -> TResult<Ty> {
        let t = self.expr_inner(e, expected)?;
        Ok(self.record(e, t))
    }

    fn int_lit_ty(&self, suffix: Option<IntTy>, expected: Option<&Ty>, span: SourceSpan) -> TResult<IntTy> {
        let want = expected.and_then(|t| t.int());
        match (suffix, want) {
            (Some(s), Some(w)) if s != w => Err(self.mismatch(&Ty::Int(s), &Ty::Int(w), span)),
            (Some(s), _) => Ok(s),
            (None, Some(w)) => Ok(w),
            (None, None) => Ok(IntTy::I32),
        }
    }

    fn expr_inner(&mut self, e: &Expr, expected: Option<&Ty>) -> TResult<Ty> {
        match &e.kind {
            ExprKind::Lit(l) => Ok(match l {
                Lit::Bool(_) => Ty::Bool,
                Lit::Char(_) => Ty::Char,
                Lit::Str(_) => Ty::reference(Ty::Str),
                Lit::Int { value, suffix } => {
                    let t = self.int_lit_ty(*suffix, expected, e.span)?;
                    if *value > t.max_value() as u64 {
                        return Err(invalid(e.span, format!("literal out of range for `{}`", t.name())));
                    }
                    Ty::Int(t)
                }
            }),
            ExprKind::Paren(x) => self.expr(x, expected),
            ExprKind::Path(p) => self.path_expr(e, p, expected),
            ExprKind::Unary(op, x) => self.unary(e, *op, x, expected),
            ExprKind::Ref { mutable, expr } => {
                let inner_want = match expected {
                    Some(Ty::Ref { inner, .. }) => Some(&**inner),
                    _ => None,
                };
                let t = self.expr(expr, inner_want)?;
                Ok(Ty::Ref {
                    mutable: *mutable,
                    inner: Box::new(t),
                })
            }
            ExprKind::Binary(op, a, b) => self.binary(*op, a, b, expected, e.span),
            ExprKind::Cast(x, t) => {
                let target = self.resolve_ty(t)?;
                let src = self.expr(x, None)?;
                let ok = match (src.peel(), &target) {
                    (Ty::Int(_) | Ty::Bool | Ty::Char, Ty::Int(_)) => true,
                    (Ty::Int(IntTy::U8), Ty::Char) => true,
                    _ => false,
                };
                if !ok {
                    return Err(invalid(
                        e.span,
                        format!("cannot cast `{}` as `{}`", self.env.show(&src), self.env.show(&target)),
                    ));
                }
                Ok(target)
            }
            ExprKind::Tuple(xs) => {
                let wants: Vec<Option<Ty>> = match expected.map(Ty::peel) {
                    Some(Ty::Tuple(ts)) if ts.len() == xs.len() => ts.iter().cloned().map(Some).collect(),
                    _ => vec![None; xs.len()],
                };
                let mut tys = Vec::new();
                for (x, w) in xs.iter().zip(&wants) {
                    tys.push(self.expr(x, w.as_ref())?);
                }
                Ok(Ty::Tuple(tys))
            }
            ExprKind::Array(xs) => {
                let mut elem = expected.and_then(|t| t.elem()).cloned();
                for x in xs {
                    let t = self.expr(x, elem.as_ref())?;
                    match &elem {
                        Some(w) => self.expect_compat(&t, w, x.span)?,
                        None => elem = Some(t),
                    }
                }
                match elem {
                    Some(t) => Ok(Ty::Array(Box::new(t), xs.len() as u64)),
                    None => Err(invalid(e.span, "cannot infer the element type of an empty array")),
                }
            }
            ExprKind::StructLit { path, fields } => self.struct_lit(e, path, fields, expected),
            ExprKind::Call { callee, args } => self.call(callee, args, expected, e.span),
            ExprKind::MethodCall { receiver, method, args } => {
                let t = self.expr(receiver, None)?;
                if method.name != "len" || !args.is_empty() {
                    return Err(unknown(method.span, format!("no method `{}` with {} argument(s)", method.name, args.len())));
                }
                if !matches!(t.peel(), Ty::Array(..) | Ty::Slice(_) | Ty::Str) {
                    return Err(invalid(method.span, format!("no method `len` on `{}`", self.env.show(&t))));
                }
                Ok(Ty::Int(IntTy::U32))
            }
            ExprKind::Field(x, name) => {
                let t = self.expr(x, None)?;
                let fields = match t.peel() {
                    Ty::Struct(s) => self.env.struct_info(*s).fields.clone(),
                    Ty::Tuple(ts) => FieldsInfo::tuple(ts.clone()),
                    _ => return Err(invalid(e.span, format!("`{}` has no fields", self.env.show(&t)))),
                };
                let key = match name {
                    FieldName::Named(n) => n.name.clone(),
                    FieldName::Index(i, _) => i.to_string(),
                };
                match fields.index_of(&key) {
                    Some(i) if fields.shape != FieldShape::Unit => Ok(fields.tys[i].clone()),
                    _ => Err(unknown(e.span, format!("no field `{key}` on `{}`", self.env.show(&t)))),
                }
            }
            ExprKind::Index(x, i) => {
                let t = self.expr(x, None)?;
                let ti = self.expr(i, None)?;
                if ti.int().is_none() {
                    return Err(invalid(i.span, "index must be an integer"));
                }
                t.elem()
                    .cloned()
                    .ok_or_else(|| invalid(e.span, format!("cannot index into `{}`", self.env.show(&t))))
            }
            ExprKind::Block(b) => self.block(b, expected),
            ExprKind::If { cond, then, els } => {
                self.check_expr_as(cond, &Ty::Bool)?;
                self.branches(then, els.as_deref(), expected, e.span)
            }
            ExprKind::IfLet { pat, scrutinee, then, els } => {
                let st = self.expr(scrutinee, None)?;
                let t_then = self.with_scope(|c| {
                    let mut bs = Vec::new();
                    let tp = c.root_pattern(pat, &st, &mut bs)?;
                    let _ = tp;
                    c.bind(bs);
                    c.block(then, expected)
                })?;
                self.else_branch(t_then, els.as_deref(), expected, e.span)
            }
            ExprKind::Match { scrutinee, arms, .. } => self.match_expr(scrutinee, arms, expected, e.span),
            ExprKind::While { cond, body } => {
                self.check_expr_as(cond, &Ty::Bool)?;
                let t = self.block(body, Some(&Ty::unit()))?;
                self.expect_compat(&t, &Ty::unit(), body.span)?;
                Ok(Ty::unit())
            }
            ExprKind::Return(v, _) => {
                let ret = self
                    .ret
                    .clone()
                    .ok_or_else(|| invalid(e.span, "`return` outside of a function"))?;
                match v {
                    Some(v) => {
                        self.check_expr_as(v, &ret)?;
                    }
                    None => self.expect_compat(&Ty::unit(), &ret, e.span)?,
                }
                Ok(Ty::Never)
            }
            ExprKind::Try(x) => self.try_expr(x, e.span),
        }
    }

    fn branches(&mut self, then: &Block, els: Option<&Expr>, expected: Option<&Ty>, span: SourceSpan) -> TResult<Ty> {
        let want = if els.is_none() { Some(Ty::unit()) } else { expected.cloned() };
        let t_then = self.with_scope(|c| c.block(then, want.as_ref()))?;
        self.else_branch(t_then, els, expected, span)
    }

    fn else_branch(&mut self, t_then: Ty, els: Option<&Expr>, expected: Option<&Ty>, span: SourceSpan) -> TResult<Ty> {
        match els {
            None => {
                self.expect_compat(&t_then, &Ty::unit(), span)
                    .map_err(|_| invalid(span, "`if` without `else` must have type `()`"))?;
                Ok(Ty::unit())
            }
            Some(x) => {
                let want = if t_then == Ty::Never { expected.cloned() } else { Some(t_then.clone()) };
                let t_else = self.expr(x, want.as_ref())?;
                self.join(t_then, t_else, x.span)
            }
        }
    }

    fn unary(&mut self, e: &Expr, op: UnOp, x: &Expr, expected: Option<&Ty>) -> TResult<Ty> {
        match op {
            UnOp::Not => {
                self.check_expr_as(x, &Ty::Bool)?;
                Ok(Ty::Bool)
            }
            UnOp::Deref => {
                let t = self.expr(x, expected.map(|t| Ty::reference(t.clone())).as_ref())?;
                match t {
                    Ty::Ref { inner, .. } => Ok(*inner),
                    t => Err(invalid(e.span, format!("type `{}` cannot be dereferenced", self.env.show(&t)))),
                }
            }
            UnOp::Neg => {
                if let ExprKind::Lit(Lit::Int { value, suffix }) = &x.kind {
                    let t = self.int_lit_ty(*suffix, expected, e.span)?;
                    if !t.signed() {
                        return Err(invalid(e.span, format!("cannot negate a value of type `{}`", t.name())));
                    }
                    if -(*value as i128) < t.min_value() as i128 {
                        return Err(invalid(e.span, format!("literal out of range for `{}`", t.name())));
                    }
                    self.record(x, Ty::Int(t));
                    return Ok(Ty::Int(t));
                }
                let t = self.expr(x, expected)?;
                match t.int() {
                    Some(i) if i.signed() => Ok(Ty::Int(i)),
                    _ => Err(invalid(e.span, format!("cannot negate a value of type `{}`", self.env.show(&t)))),
                }
            }
        }
    }

    /// Types both operands, letting an untyped literal take the other
    /// operand's type.
    fn operands(&mut self, a: &Expr, b: &Expr, want: Option<&Ty>) -> TResult<(Ty, Ty)> {
        if is_untyped_int(a) && !is_untyped_int(b) {
            let tb = self.expr(b, want)?;
            let ta = self.expr(a, Some(tb.peel()))?;
            Ok((ta, tb))
        } else {
            let ta = self.expr(a, want)?;
            let tb = self.expr(b, Some(ta.peel()))?;
            Ok((ta, tb))
        }
    }

    fn binary(&mut self, op: BinOp, a: &Expr, b: &Expr, expected: Option<&Ty>, span: SourceSpan) -> TResult<Ty> {
        if op.is_logical() {
            self.check_expr_as(a, &Ty::Bool)?;
            self.check_expr_as(b, &Ty::Bool)?;
            return Ok(Ty::Bool);
        }
        if op.is_comparison() {
            let (ta, tb) = self.operands(a, b, None)?;
            if !self.compat(&tb, &ta) && !self.compat(&ta, &tb) {
                return Err(self.mismatch(&tb, &ta, b.span));
            }
            if !matches!(op, BinOp::Eq | BinOp::Ne)
                && !matches!(ta.peel(), Ty::Int(_) | Ty::Char | Ty::Bool | Ty::Str | Ty::Never)
            {
                return Err(invalid(span, format!("`{}` cannot be ordered", self.env.show(&ta))));
            }
            return Ok(Ty::Bool);
        }
        let want = expected.filter(|t| t.int().is_some());
        let (ta, tb) = self.operands(a, b, want)?;
        let ia = ta.int().ok_or_else(|| invalid(a.span, format!("cannot apply `{}` to `{}`", op.symbol(), self.env.show(&ta))));
        if ta == Ty::Never {
            return Ok(tb);
        }
        let ia = ia?;
        if tb != Ty::Never && tb.int() != Some(ia) {
            return Err(self.mismatch(&tb, &Ty::Int(ia), b.span));
        }
        Ok(Ty::Int(ia))
    }

    fn path_expr(&mut self, e: &Expr, p: &Path, expected: Option<&Ty>) -> TResult<Ty> {
        if p.is_single() {
            let name = &p.segments[0].name;
            if let Some(l) = self.lookup_local(name) {
                let t = l.ty.clone();
                self.res.insert(e.id, Res::Local);
                return Ok(t);
            }
            if let Some(t) = self.const_tys.get(name) {
                let t = t.clone();
                self.res.insert(e.id, Res::Const(name.clone()));
                return Ok(t);
            }
            if let Some((t, _)) = self.static_tys.get(name) {
                let t = t.clone();
                self.res.insert(e.id, Res::Static(name.clone()));
                return Ok(t);
            }
            if self.env.fns.contains_key(name) {
                return Err(invalid(e.span, format!("function `{name}` can only be called")));
            }
        }
        let (ctor, ty) = self.resolve_ctor(p, expected)?;
        let fields = super::tpat::ctor_fields(ctor, &self.env);
        if !fields.is_empty() {
            return Err(invalid(e.span, format!("`{}` expects arguments", p.joined())));
        }
        let shape = self.ctor_shape(ctor);
        if shape != FieldShape::Unit {
            return Err(invalid(e.span, format!("`{}` is not a unit constructor", p.joined())));
        }
        self.res.insert(e.id, Res::Ctor(ctor));
        Ok(ty)
    }

    fn ctor_shape(&self, ctor: Ctor) -> FieldShape {
        match ctor {
            Ctor::Variant(e, v) => self.env.variant(e, v).fields.shape,
            Ctor::Struct(s) => self.env.struct_info(s).fields.shape,
        }
    }

    /// Resolves a path to a struct or enum variant. Built-in variants take
    /// their enum from the expected type.
    fn resolve_ctor(&mut self, p: &Path, expected: Option<&Ty>) -> TResult<(Ctor, Ty)> {
        let segs: Vec<&str> = p.segments.iter().map(|s| s.name.as_str()).collect();
        let builtin = |c: &Self, variant: &str| -> Option<EnumId> {
            match expected.map(Ty::peel) {
                Some(Ty::Enum(e)) => {
                    let info = c.env.enum_info(*e);
                    (info.is_builtin() && info.variant_index(variant).is_some()).then_some(*e)
                }
                _ => None,
            }
        };
        let variant_of = |c: &Self, e: EnumId, v: &str| -> TResult<(Ctor, Ty)> {
            let i = c
                .env
                .enum_info(e)
                .variant_index(v)
                .ok_or_else(|| unknown(p.span, format!("no variant named `{v}`")))?;
            Ok((Ctor::Variant(e, i), Ty::Enum(e)))
        };
        match segs.as_slice() {
            [name] => {
                if let Some(s) = self.env.struct_by_name(name) {
                    return Ok((Ctor::Struct(s), Ty::Struct(s)));
                }
                if matches!(*name, "Some" | "None" | "Ok" | "Err") {
                    if let Some(e) = builtin(self, name) {
                        return variant_of(self, e, name);
                    }
                    return Err(invalid(
                        p.span,
                        format!("cannot infer the type of `{name}`; add a type annotation"),
                    ));
                }
                Err(unknown(p.span, format!("cannot find value `{name}` in this scope")))
            }
            [en, v] => {
                if let Some(e) = self.env.enum_by_name(en) {
                    return variant_of(self, e, v);
                }
                if (*en == "Option" && matches!(*v, "Some" | "None")) || (*en == "Result" && matches!(*v, "Ok" | "Err")) {
                    if let Some(e) = builtin(self, v) {
                        return variant_of(self, e, v);
                    }
                    return Err(invalid(p.span, format!("cannot infer the type of `{}`", p.joined())));
                }
                Err(unknown(p.span, format!("cannot find `{}`", p.joined())))
            }
            _ => Err(unknown(p.span, format!("cannot find `{}`", p.joined()))),
        }
    }

    fn call(&mut self, callee: &Expr, args: &[Expr], expected: Option<&Ty>, span: SourceSpan) -> TResult<Ty> {
        let ExprKind::Path(p) = &callee.kind else {
            return Err(invalid(callee.span, "only named functions and constructors can be called"));
        };
        if p.is_single() {
            let name = p.segments[0].name.as_str();
            if self.lookup_local(name).is_some() {
                return Err(invalid(callee.span, format!("`{name}` is not a function")));
            }
            if let Some(sig) = self.env.fns.get(name).cloned() {
                if sig.params.len() != args.len() {
                    return Err(invalid(
                        span,
                        format!("`{name}` takes {} argument(s) but {} were supplied", sig.params.len(), args.len()),
                    ));
                }
                for (a, t) in args.iter().zip(&sig.params) {
                    self.check_expr_as(a, t)?;
                }
                self.res.insert(callee.id, Res::Fn(name.to_string()));
                self.record(callee, Ty::unit());
                return Ok(sig.ret);
            }
            if name == "print" {
                for a in args {
                    self.expr(a, None)?;
                }
                self.res.insert(callee.id, Res::Print);
                self.record(callee, Ty::unit());
                return Ok(Ty::unit());
            }
            if name == "panic" {
                if args.len() > 1 {
                    return Err(invalid(span, "`panic` takes at most one argument"));
                }
                for a in args {
                    self.expr(a, None)?;
                }
                self.res.insert(callee.id, Res::Panic);
                self.record(callee, Ty::unit());
                return Ok(Ty::Never);
            }
        }
        // `Some(x)` without an expected type takes its type from `x`.
        let inferred;
        let expected = match (expected.map(Ty::peel), p.last().name.as_str(), args) {
            (e, "Some", [x]) if !matches!(e, Some(Ty::Enum(_))) && (p.is_single() || p.segments[0].name == "Option") => {
                let t = self.expr(x, None)?;
                inferred = Ty::Enum(self.env.option_of(t));
                Some(&inferred)
            }
            (e, ..) => e,
        };
        let (ctor, ty) = self.resolve_ctor(p, expected)?;
        if self.ctor_shape(ctor) != FieldShape::Tuple {
            return Err(invalid(callee.span, format!("`{}` is not a tuple constructor", p.joined())));
        }
        let fields = super::tpat::ctor_fields(ctor, &self.env).to_vec();
        if fields.len() != args.len() {
            return Err(invalid(
                span,
                format!("`{}` takes {} field(s) but {} were supplied", p.joined(), fields.len(), args.len()),
            ));
        }
        for (a, t) in args.iter().zip(&fields) {
            self.check_expr_as(a, t)?;
        }
        self.res.insert(callee.id, Res::Ctor(ctor));
        self.record(callee, ty.clone());
        Ok(ty)
    }

    fn struct_lit(&mut self, e: &Expr, path: &Path, fields: &[(Ident, Expr)], expected: Option<&Ty>) -> TResult<Ty> {
        let (ctor, ty) = self.resolve_ctor(path, expected)?;
        let info = match ctor {
            Ctor::Variant(en, v) => self.env.variant(en, v).fields.clone(),
            Ctor::Struct(s) => self.env.struct_info(s).fields.clone(),
        };
        if info.shape != FieldShape::Named {
            return Err(invalid(path.span, format!("`{}` has no named fields", path.joined())));
        }
        let mut seen = vec![false; info.tys.len()];
        for (name, x) in fields {
            let i = info
                .index_of(&name.name)
                .ok_or_else(|| unknown(name.span, format!("no field `{}` on `{}`", name.name, path.joined())))?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(invalid(name.span, format!("field `{}` specified more than once", name.name)));
            }
            self.check_expr_as(x, &info.tys[i])?;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(invalid(e.span, format!("missing field `{}` in initializer", info.names[i])));
        }
        self.res.insert(e.id, Res::Ctor(ctor));
        Ok(ty)
    }

    fn try_expr(&mut self, x: &Expr, span: SourceSpan) -> TResult<Ty> {
        let t = self.expr(x, None)?;
        let bad = |_: &Self, msg: String| TypeError::new(span, TypeErrorKind::InvalidTry, msg);
        let Ty::Enum(e) = &t else {
            return Err(bad(self, format!("the `?` operator cannot be applied to type `{}`", self.env.show(&t))));
        };
        let info = self.env.enum_info(*e).clone();
        let ret = self.ret.clone().unwrap_or(Ty::unit());
        let ret_info = match &ret {
            Ty::Enum(r) => Some(self.env.enum_info(*r).clone()),
            _ => None,
        };
        use super::env::Builtin;
        match (info.builtin, ret_info.as_ref().and_then(|r| r.builtin)) {
            (Some(Builtin::Option), Some(Builtin::Option)) => Ok(info.variants[0].fields.tys[0].clone()),
            (Some(Builtin::Result), Some(Builtin::Result)) => {
                let err = &info.variants[1].fields.tys[0];
                let ret_err = &ret_info.unwrap().variants[1].fields.tys[0];
                if err != ret_err {
                    return Err(bad(
                        self,
                        format!(
                            "`?` couldn't convert the error: expected `{}`, found `{}`",
                            self.env.show(ret_err),
                            self.env.show(err)
                        ),
                    ));
                }
                Ok(info.variants[0].fields.tys[0].clone())
            }
            (Some(_), _) => Err(bad(
                self,
                format!(
                    "the `?` operator on `{}` needs a function returning `{}`",
                    info.name,
                    if info.builtin == Some(Builtin::Option) { "Option" } else { "Result" }
                ),
            )),
            (None, _) => Err(bad(self, format!("the `?` operator cannot be applied to type `{}`", info.name))),
        }
    }

    fn match_expr(&mut self, scrutinee: &Expr, arms: &[Arm], expected: Option<&Ty>, span: SourceSpan) -> TResult<Ty> {
        let st = self.expr(scrutinee, None)?;
        let mut result = Ty::Never;
        let mut want = expected.cloned();
        for arm in arms {
            let t = self.with_scope(|c| {
                let mut bs = Vec::new();
                c.root_pattern(&arm.pat, &st, &mut bs)?;
                c.bind(bs);
                if let Some(g) = &arm.guard {
                    c.check_expr_as(g, &Ty::Bool)?;
                }
                c.expr(&arm.body, want.as_ref())
            })?;
            result = self.join(result, t, arm.body.span)?;
            if result != Ty::Never {
                want = Some(result.clone());
            }
        }
        let typed: Vec<(&TPat, bool)> = arms
            .iter()
            .map(|a| (&self.patterns[&a.pat.id], a.guard.is_some()))
            .collect();
        if let Err(w) = check_exhaustive(&typed, &st, &self.env) {
            let shown = w.show(&self.env);
            let mut err = TypeError::new(
                span,
                TypeErrorKind::NonExhaustive,
                format!("non-exhaustive patterns: `{shown}` not covered"),
            );
            err.witness = Some(shown);
            return Err(err);
        }
        Ok(result)
    }

    fn block(&mut self, b: &Block, expected: Option<&Ty>) -> TResult<Ty> {
        self.with_scope(|c| {
            let mut diverges = false;
            for s in &b.stmts {
                diverges |= c.stmt(s)?;
            }
            match &b.tail {
                Some(t) => c.expr(t, expected),
                None if diverges => Ok(Ty::Never),
                None => Ok(Ty::unit()),
            }
        })
    }

    /// Checks a statement; returns whether it always diverges.
    fn stmt(&mut self, s: &Stmt) -> TResult<bool> {
        match &s.kind {
            StmtKind::Let { pat, ty, init, els } => {
                let declared = ty.as_ref().map(|t| self.resolve_ty(t)).transpose()?;
                let ti = match &declared {
                    Some(d) => self.check_expr_as(init, d)?,
                    None => self.expr(init, None)?,
                };
                let st = declared.unwrap_or(ti.clone());
                let mut bs = Vec::new();
                let tp = self.root_pattern(pat, &st, &mut bs)?;
                match els {
                    None => {
                        if !is_top(&denotation(&tp, &self.env), &tp.ty, &self.env) {
                            let w = value_not_matched(&tp, &self.env).unwrap_or_default();
                            let mut err = TypeError::new(
                                pat.span,
                                TypeErrorKind::RefutableLet,
                                format!("refutable pattern in local binding: `{w}` not covered; use `let ... else`"),
                            );
                            err.witness = Some(w);
                            return Err(err);
                        }
                    }
                    Some(b) => {
                        let t = self.block(b, None)?;
                        if t != Ty::Never {
                            return Err(invalid(b.span, "`else` clause of `let...else` does not diverge"));
                        }
                    }
                }
                self.bind(bs);
                Ok(ti == Ty::Never)
            }
            StmtKind::Expr { expr, semi } => {
                let t = if !*semi && expr.kind.is_block_like() {
                    let t = self.expr(expr, Some(&Ty::unit()))?;
                    self.expect_compat(&t, &Ty::unit(), expr.span)?;
                    t
                } else {
                    self.expr(expr, None)?
                };
                Ok(t == Ty::Never)
            }
            StmtKind::Assign { target, op, value } => {
                let tt = self.place(target)?;
                if *op != AssignOp::Assign && tt.int().is_none() {
                    return Err(invalid(target.span, format!("compound assignment to `{}`", self.env.show(&tt))));
                }
                self.check_expr_as(value, &tt)?;
                Ok(false)
            }
        }
    }

    /// Types an assignment target and checks that it is mutable.
    fn place(&mut self, e: &Expr) -> TResult<Ty> {
        fn root_mutable(c: &Checker, e: &Expr) -> Option<bool> {
            match &e.kind {
                ExprKind::Path(p) if p.is_single() => {
                    let n = &p.segments[0].name;
                    if let Some(l) = c.lookup_local(n) {
                        Some(l.mutable)
                    } else {
                        c.static_tys.get(n).map(|(_, m)| *m)
                    }
                }
                ExprKind::Field(x, _) | ExprKind::Index(x, _) | ExprKind::Paren(x) => {
                    if matches!(e.kind, ExprKind::Field(..) | ExprKind::Index(..)) {
                        if let ExprKind::Path(p) = &x.kind {
                            if p.is_single() && c.static_tys.contains_key(&p.segments[0].name)
                                && c.lookup_local(&p.segments[0].name).is_none()
                            {
                                return None;
                            }
                        }
                    }
                    root_mutable(c, x)
                }
                _ => None,
            }
        }
        match root_mutable(self, e) {
            None => Err(invalid(e.span, "invalid left-hand side of assignment")),
            Some(false) => Err(invalid(e.span, "cannot assign twice to an immutable variable")),
            Some(true) => {
                let t = self.expr(e, None)?;
                if matches!(t, Ty::Ref { .. }) {
                    return Err(invalid(e.span, "assignment through a reference is not supported"));
                }
                Ok(t)
            }
        }
    }

    // ---- patterns ----

    /// Types a root pattern and records it. Bindings are collected, not yet
    /// added to the scope.
    fn root_pattern(&mut self, p: &Pattern, ty: &Ty, bs: &mut Vec<(String, Local)>) -> TResult<TPat> {
        let tp = self.pat(p, ty, false, bs)?;
        self.patterns.insert(p.id, tp.clone());
        Ok(tp)
    }

    fn add_binding(&self, bs: &mut Vec<(String, Local)>, name: &Ident, l: Local) -> TResult<()> {
        if bs.iter().any(|(n, _)| *n == name.name) {
            return Err(invalid(name.span, format!("identifier `{}` is bound more than once in the same pattern", name.name)));
        }
        bs.push((name.name.clone(), l));
        Ok(())
    }

    /// Meaning of a bare identifier in pattern position.
    fn name_ref(&self, name: &str, expected: &Ty) -> NameMeaning {
        if let Some(c) = self.env.consts.get(name) {
            return NameMeaning::Const(c.ty.clone(), c.value.clone());
        }
        if self.static_tys.contains_key(name) {
            return NameMeaning::Static;
        }
        if let Some(s) = self.env.struct_by_name(name) {
            if self.env.struct_info(s).fields.shape == FieldShape::Unit {
                return NameMeaning::UnitStruct(s);
            }
        }
        if name == "None" {
            if let Ty::Enum(e) = expected.peel() {
                let info = self.env.enum_info(*e);
                if info.is_builtin() {
                    if let Some(v) = info.variant_index("None") {
                        return NameMeaning::UnitVariant(*e, v);
                    }
                }
            }
        }
        NameMeaning::Binding
    }

    /// Whether match ergonomics inserts a dereference before `p`.
    fn auto_deref(&self, p: &Pattern, expected: &Ty) -> bool {
        let Ty::Ref { inner, .. } = expected else { return false };
        match &p.kind {
            PatternKind::Ident { .. }
            | PatternKind::Wildcard
            | PatternKind::Rest
            | PatternKind::Reference { .. }
            | PatternKind::Grouped(_)
            | PatternKind::Or(_) => false,
            PatternKind::Literal(PatLit::Str(_)) => **inner != Ty::Str,
            PatternKind::NameRef(n) => match self.name_ref(&n.name, expected) {
                NameMeaning::Binding => false,
                NameMeaning::Const(t, _) => t != *expected,
                _ => true,
            },
            _ => true,
        }
    }

    fn pat(&mut self, p: &Pattern, expected: &Ty, ref_mode: bool, bs: &mut Vec<(String, Local)>) -> TResult<TPat> {
        if self.auto_deref(p, expected) {
            let Ty::Ref { mutable, inner } = expected else { unreachable!() };
            let inner_pat = self.pat(p, inner, true, bs)?;
            return Ok(TPat {
                id: self.fresh_id(),
                span: p.span,
                ty: expected.clone(),
                kind: TPatKind::Reference {
                    mutable: *mutable,
                    inner: Box::new(inner_pat),
                },
                implicit: true,
            });
        }
        let mk = |kind: TPatKind| TPat {
            id: p.id,
            span: p.span,
            ty: expected.clone(),
            kind,
            implicit: false,
        };
        let mismatch = |c: &Self, what: &str| {
            TypeError::new(
                p.span,
                TypeErrorKind::Mismatch,
                format!("mismatched types: expected `{}`, found {what}", c.env.show(expected)),
            )
        };
        match &p.kind {
            PatternKind::Literal(l) => {
                let v = self.pat_lit(l, expected, p.span)?;
                Ok(mk(TPatKind::Literal(v)))
            }
            PatternKind::Ident { name, by_ref, mutable, sub } => {
                let binding_ty = if *by_ref || ref_mode { Ty::reference(expected.clone()) } else { expected.clone() };
                let sub = match sub {
                    Some(s) if is_rest_like(s) => {
                        return Err(invalid(p.span, "`name @ ..` is only allowed directly inside a slice pattern"))
                    }
                    Some(s) => Some(Box::new(self.pat(s, expected, ref_mode, bs)?)),
                    None => None,
                };
                self.add_binding(bs, name, Local { ty: binding_ty.clone(), mutable: *mutable })?;
                Ok(mk(TPatKind::Binding {
                    name: name.name.clone(),
                    by_ref: *by_ref,
                    mutable: *mutable,
                    binding_ty,
                    sub,
                }))
            }
            PatternKind::NameRef(name) => match self.name_ref(&name.name, expected) {
                NameMeaning::Binding => {
                    let binding_ty = if ref_mode { Ty::reference(expected.clone()) } else { expected.clone() };
                    self.add_binding(bs, name, Local { ty: binding_ty.clone(), mutable: false })?;
                    Ok(mk(TPatKind::Binding {
                        name: name.name.clone(),
                        by_ref: false,
                        mutable: false,
                        binding_ty,
                        sub: None,
                    }))
                }
                m => self.path_meaning(m, &name.name, expected, p),
            },
            PatternKind::Path(path) => {
                if path.is_single() {
                    let n = &path.segments[0].name;
                    let m = self.name_ref(n, expected);
                    if m != NameMeaning::Binding {
                        return self.path_meaning(m, n, expected, p);
                    }
                }
                let (ctor, ty) = self.resolve_ctor(path, Some(expected))?;
                if !self.compat(&ty, expected) || matches!(expected, Ty::Ref { .. }) {
                    return Err(mismatch(self, &format!("`{}`", path.joined())));
                }
                if self.ctor_shape(ctor) != FieldShape::Unit {
                    return Err(invalid(p.span, format!("expected unit struct or unit variant, found `{}`", path.joined())));
                }
                Ok(mk(match ctor {
                    Ctor::Variant(e, v) => TPatKind::UnitVariant(e, v),
                    Ctor::Struct(s) => TPatKind::UnitStruct(s),
                }))
            }
            PatternKind::Wildcard => Ok(mk(TPatKind::Wildcard)),
            PatternKind::Rest => Err(invalid(p.span, "`..` patterns are not allowed here")),
            PatternKind::Range { lo, hi, inclusive } => {
                let (min, max) = match expected {
                    Ty::Int(i) => (i.min_value(), i.max_value()),
                    Ty::Char => (0, char::MAX as i64),
                    _ => return Err(mismatch(self, "a range pattern")),
                };
                let lo_v = match lo {
                    Some(b) => self.range_bound(b, expected, p.span)?,
                    None => min,
                };
                let hi_v = match hi {
                    Some(b) => self.range_bound(b, expected, p.span)?,
                    None => max,
                };
                let hi_v = if *inclusive || hi.is_none() { hi_v } else { hi_v - 1 };
                if lo_v > hi_v {
                    return Err(invalid(p.span, "lower range bound must be less than or equal to upper"));
                }
                Ok(mk(TPatKind::Range {
                    lo: lo_v,
                    hi: hi_v,
                    text: pretty::pattern(p),
                }))
            }
            PatternKind::Reference { mutable, inner } => {
                let Ty::Ref { inner: it, .. } = expected else {
                    return Err(mismatch(self, "`&_`"));
                };
                let inner = self.pat(inner, it, false, bs)?;
                Ok(mk(TPatKind::Reference {
                    mutable: *mutable,
                    inner: Box::new(inner),
                }))
            }
            PatternKind::Struct { path, fields, has_rest } => {
                let ctor = self.pattern_ctor(path, expected, p)?;
                let info = match ctor {
                    Ctor::Variant(e, v) => self.env.variant(e, v).fields.clone(),
                    Ctor::Struct(s) => self.env.struct_info(s).fields.clone(),
                };
                if info.shape == FieldShape::Unit && !fields.is_empty() {
                    return Err(invalid(p.span, format!("`{}` has no fields", path.joined())));
                }
                let mut seen = vec![false; info.tys.len()];
                let mut out = Vec::new();
                for f in fields {
                    let key = f.name.name.as_str();
                    let i = info
                        .index_of(key)
                        .filter(|_| info.shape != FieldShape::Unit)
                        .ok_or_else(|| unknown(f.name.span, format!("no field `{key}` on `{}`", path.joined())))?;
                    if std::mem::replace(&mut seen[i], true) {
                        return Err(invalid(f.name.span, format!("field `{key}` bound more than once")));
                    }
                    out.push((i, self.pat(&f.pat, &info.tys[i], ref_mode, bs)?));
                }
                if !*has_rest {
                    if let Some(i) = seen.iter().position(|s| !s) {
                        return Err(invalid(p.span, format!("pattern does not mention field `{}`", info.names[i])));
                    }
                }
                Ok(mk(TPatKind::Struct {
                    ctor,
                    fields: out,
                    has_rest: *has_rest,
                }))
            }
            PatternKind::TupleStruct { path, elems } => {
                let ctor = self.pattern_ctor(path, expected, p)?;
                if self.ctor_shape(ctor) != FieldShape::Tuple {
                    return Err(invalid(p.span, format!("`{}` is not a tuple struct or tuple variant", path.joined())));
                }
                let tys = super::tpat::ctor_fields(ctor, &self.env).to_vec();
                let elems = self.positional(elems, &tys, ref_mode, bs, p.span)?;
                Ok(mk(TPatKind::TupleStruct { ctor, elems }))
            }
            PatternKind::Tuple(elems) => {
                let Ty::Tuple(tys) = expected else {
                    return Err(mismatch(self, "a tuple"));
                };
                let tys = tys.clone();
                let elems = self.positional(elems, &tys, ref_mode, bs, p.span)?;
                Ok(mk(TPatKind::Tuple(elems)))
            }
            PatternKind::Grouped(inner) => {
                let inner = self.pat(inner, expected, ref_mode, bs)?;
                Ok(mk(TPatKind::Grouped(Box::new(inner))))
            }
            PatternKind::Slice(elems) => self.slice_pat(p, elems, expected, ref_mode, bs),
            PatternKind::Or(alts) => {
                let mut out = Vec::new();
                let mut first: Option<Vec<(String, Local)>> = None;
                for a in alts {
                    let mut abs = Vec::new();
                    out.push(self.pat(a, expected, ref_mode, &mut abs)?);
                    abs.sort_by(|x, y| x.0.cmp(&y.0));
                    match &first {
                        None => first = Some(abs),
                        Some(f) => {
                            let same = f.len() == abs.len()
                                && f.iter().zip(&abs).all(|(x, y)| x.0 == y.0 && x.1.ty == y.1.ty);
                            if !same {
                                return Err(invalid(a.span, "every alternative of an or-pattern must bind the same variables with the same types"));
                            }
                        }
                    }
                }
                for (n, l) in first.unwrap_or_default() {
                    if bs.iter().any(|(m, _)| *m == n) {
                        return Err(invalid(p.span, format!("identifier `{n}` is bound more than once in the same pattern")));
                    }
                    bs.push((n, l));
                }
                Ok(mk(TPatKind::Or(out)))
            }
        }
    }

    fn path_meaning(&mut self, m: NameMeaning, name: &str, expected: &Ty, p: &Pattern) -> TResult<TPat> {
        let kind = match m {
            NameMeaning::Const(t, v) => {
                if t != *expected && !(t.peel() == expected.peel() && !matches!(expected, Ty::Ref { .. })) {
                    return Err(self.mismatch(&t, expected, p.span));
                }
                TPatKind::Const { name: name.to_string(), value: v }
            }
            NameMeaning::Static => {
                return Err(invalid(p.span, format!("statics cannot be referenced in patterns: `{name}`")))
            }
            NameMeaning::UnitStruct(s) => {
                if *expected != Ty::Struct(s) {
                    return Err(self.mismatch(&Ty::Struct(s), expected, p.span));
                }
                TPatKind::UnitStruct(s)
            }
            NameMeaning::UnitVariant(e, v) => TPatKind::UnitVariant(e, v),
            NameMeaning::Binding => unreachable!("handled by the caller"),
        };
        Ok(TPat {
            id: p.id,
            span: p.span,
            ty: expected.clone(),
            kind,
            implicit: false,
        })
    }

    fn pattern_ctor(&mut self, path: &Path, expected: &Ty, p: &Pattern) -> TResult<Ctor> {
        let (ctor, ty) = self.resolve_ctor(path, Some(expected))?;
        if ty != *expected {
            return Err(TypeError::new(
                p.span,
                TypeErrorKind::Mismatch,
                format!("mismatched types: expected `{}`, found `{}`", self.env.show(expected), self.env.show(&ty)),
            ));
        }
        Ok(ctor)
    }

    fn positional(
        &mut self,
        elems: &[Pattern],
        tys: &[Ty],
        ref_mode: bool,
        bs: &mut Vec<(String, Local)>,
        span: SourceSpan,
    ) -> TResult<Vec<TPat>> {
        let rests: Vec<usize> = elems.iter().enumerate().filter(|(_, e)| is_rest_like(e)).map(|(i, _)| i).collect();
        if rests.len() > 1 {
            return Err(invalid(span, "`..` can only be used once per pattern"));
        }
        if let Some(&r) = rests.first() {
            if !matches!(elems[r].kind, PatternKind::Rest) {
                return Err(invalid(elems[r].span, "`name @ ..` is only allowed in slice patterns"));
            }
        }
        let fixed = elems.len() - rests.len();
        if (rests.is_empty() && fixed != tys.len()) || fixed > tys.len() {
            return Err(TypeError::new(
                span,
                TypeErrorKind::Mismatch,
                format!("this pattern has {fixed} field(s), but the corresponding type has {}", tys.len()),
            ));
        }
        let mut out = Vec::new();
        let mut pos = 0;
        for e in elems {
            if is_rest_like(e) {
                out.push(TPat {
                    id: e.id,
                    span: e.span,
                    ty: Ty::unit(),
                    kind: TPatKind::Rest,
                    implicit: false,
                });
                pos += tys.len() - fixed;
            } else {
                out.push(self.pat(e, &tys[pos], ref_mode, bs)?);
                pos += 1;
            }
        }
        Ok(out)
    }

    fn slice_pat(
        &mut self,
        p: &Pattern,
        elems: &[Pattern],
        expected: &Ty,
        ref_mode: bool,
        bs: &mut Vec<(String, Local)>,
    ) -> TResult<TPat> {
        let (elem, array_len) = match expected {
            Ty::Array(e, n) => ((**e).clone(), Some(*n)),
            Ty::Slice(e) => ((**e).clone(), None),
            _ => {
                return Err(TypeError::new(
                    p.span,
                    TypeErrorKind::Mismatch,
                    format!("expected an array or slice, found `{}`", self.env.show(expected)),
                ))
            }
        };
        let fixed = elems.iter().filter(|e| !is_rest_like(e)).count();
        let has_rest = fixed < elems.len();
        if let Some(n) = array_len {
            if (!has_rest && fixed as u64 != n) || fixed as u64 > n {
                return Err(TypeError::new(
                    p.span,
                    TypeErrorKind::Mismatch,
                    format!("pattern requires {fixed} element(s) but the array has {n}"),
                ));
            }
        }
        let rest_ty = match array_len {
            Some(n) => Ty::Array(Box::new(elem.clone()), n - fixed as u64),
            None => Ty::Slice(Box::new(elem.clone())),
        };
        let mut out = Vec::new();
        for e in elems {
            if is_rest_like(e) {
                out.push(self.rest_elem(e, &rest_ty, ref_mode, bs)?);
            } else {
                out.push(self.pat(e, &elem, ref_mode, bs)?);
            }
        }
        Ok(TPat {
            id: p.id,
            span: p.span,
            ty: expected.clone(),
            kind: TPatKind::Slice { elems: out, array_len },
            implicit: false,
        })
    }

    fn rest_elem(&mut self, e: &Pattern, rest_ty: &Ty, ref_mode: bool, bs: &mut Vec<(String, Local)>) -> TResult<TPat> {
        match &e.kind {
            PatternKind::Rest => Ok(TPat {
                id: e.id,
                span: e.span,
                ty: rest_ty.clone(),
                kind: TPatKind::Rest,
                implicit: false,
            }),
            PatternKind::Ident { name, by_ref, mutable, sub: Some(sub) } => {
                let inner = self.rest_elem(sub, rest_ty, ref_mode, bs)?;
                let binding_ty = if *by_ref || ref_mode { Ty::reference(rest_ty.clone()) } else { rest_ty.clone() };
                self.add_binding(bs, name, Local { ty: binding_ty.clone(), mutable: *mutable })?;
                Ok(TPat {
                    id: e.id,
                    span: e.span,
                    ty: rest_ty.clone(),
                    kind: TPatKind::Binding {
                        name: name.name.clone(),
                        by_ref: *by_ref,
                        mutable: *mutable,
                        binding_ty,
                        sub: Some(Box::new(inner)),
                    },
                    implicit: false,
                })
            }
            _ => unreachable!("not rest-like"),
        }
    }

    fn pat_lit(&self, l: &PatLit, expected: &Ty, span: SourceSpan) -> TResult<Value> {
        let bad = |what: &str| {
            TypeError::new(
                span,
                TypeErrorKind::Mismatch,
                format!("mismatched types: expected `{}`, found {what}", self.env.show(expected)),
            )
        };
        match (l, expected) {
            (PatLit::Bool(b), Ty::Bool) => Ok(Value::Bool(*b)),
            (PatLit::Char(c), Ty::Char) => Ok(Value::Char(*c)),
            (PatLit::Str(s), Ty::Str) => Ok(Value::Str(s.clone())),
            (PatLit::Str(s), Ty::Ref { inner, .. }) if **inner == Ty::Str => Ok(Value::Str(s.clone())),
            (PatLit::Int { negative, value, suffix }, Ty::Int(t)) => {
                if suffix.is_some_and(|s| s != *t) {
                    return Err(bad(&format!("`{}`", suffix.unwrap().name())));
                }
                let v = if *negative { -(*value as i128) } else { *value as i128 };
                if !t.signed() && *negative {
                    return Err(invalid(span, format!("cannot negate a value of type `{}`", t.name())));
                }
                if v < t.min_value() as i128 || v > t.max_value() as i128 {
                    return Err(invalid(span, format!("literal out of range for `{}`", t.name())));
                }
                Ok(Value::Int(*t, v as i64))
            }
            (PatLit::Bool(_), _) => Err(bad("`bool`")),
            (PatLit::Char(_), _) => Err(bad("`char`")),
            (PatLit::Str(_), _) => Err(bad("`&str`")),
            (PatLit::Int { .. }, _) => Err(bad("an integer")),
        }
    }

    fn range_bound(&self, b: &RangeBound, expected: &Ty, span: SourceSpan) -> TResult<i64> {
        let v = match b {
            RangeBound::Lit(l) => self.pat_lit(l, expected, span)?,
            RangeBound::Path(p) => {
                let c = (p.is_single())
                    .then(|| self.env.consts.get(&p.segments[0].name))
                    .flatten()
                    .ok_or_else(|| unknown(p.span, format!("cannot find constant `{}`", p.joined())))?;
                if c.ty != *expected {
                    return Err(self.mismatch(&c.ty, expected, p.span));
                }
                c.value.clone()
            }
        };
        v.as_ordinal().ok_or_else(|| invalid(span, "range bounds must be integers or chars"))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum NameMeaning {
    Binding,
    Const(Ty, Value),
    Static,
    UnitStruct(super::ty::StructId),
    UnitVariant(EnumId, u32),
}

/// A value the pattern does not match, rendered for diagnostics.
fn value_not_matched(p: &TPat, env: &TypeEnv) -> Option<String> {
    let rest = super::space::value_space_of(&p.ty, env).subtract(&denotation(p, env));
    rest.witness(&p.ty, env).map(|v| v.show(env))
}

#[cfg(test)]
#[path = "check_tests.rs"]
mod tests;

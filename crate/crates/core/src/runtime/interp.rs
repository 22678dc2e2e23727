//! A tree-walking interpreter that records an evaluation vector on every
//! decision visit.

use std::collections::HashMap;

use thiserror::Error;

use super::trace::{EvaluationVector, ExitPoint, Trace, TriState};
use super::value::Value;
use crate::decisions::{Decision, DecisionSet, Origin};
use crate::syntax::*;
use crate::types::consteval::{cast, compare, int_binop};
use crate::types::{Builtin, Ctor, FieldsInfo, Res, TPat, TPatKind, Ty, TypeEnv, TypedProgram};

pub const DEFAULT_FUEL: u64 = 10_000_000;
const MAX_DEPTH: usize = 2_000;
const STACK_SIZE: usize = 256 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuntimeErrorKind {
    Overflow,
    OutOfFuel,
    Panic,
    IndexOutOfBounds,
    StackOverflow,
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Eq, Error, serde::Serialize)]
#[error("{span}: {message}")]
pub struct RuntimeError {
    pub kind: RuntimeErrorKind,
    pub span: SourceSpan,
    pub message: String,
}

impl RuntimeError {
    fn new(kind: RuntimeErrorKind, span: SourceSpan, message: impl Into<String>) -> Self {
        RuntimeError {
            kind,
            span,
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Upper bound on evaluation steps per test.
    pub fuel: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { fuel: DEFAULT_FUEL }
    }
}

impl RunOptions {
    /// Reads `MCDC_FUEL`, falling back to the default when unset or invalid.
    pub fn from_env() -> Self {
        let fuel = std::env::var("MCDC_FUEL")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_FUEL);
        RunOptions { fuel }
    }
}

/// Result of running one entry function.
#[derive(Clone, Debug)]
pub struct Execution {
    pub result: Result<Value, RuntimeError>,
    /// Everything passed to `print`.
    pub output: String,
    pub trace: Trace,
}

/// Calls `entry` with `args`. `test` tags the recorded vectors.
pub fn evaluate(
    tp: &TypedProgram,
    ds: &DecisionSet,
    program_hash: &str,
    entry: &str,
    args: Vec<Value>,
    test: u32,
    opts: RunOptions,
) -> Execution {
    let run = || {
        let mut it = Interpreter::new(tp, ds, test, opts.fuel);
        it.trace.program_hash = program_hash.to_string();
        let result = match it.fns.get(entry) {
            None => Err(RuntimeError::new(
                RuntimeErrorKind::Invalid,
                SourceSpan::DUMMY,
                format!("no function `{entry}`"),
            )),
            Some(f) if f.params.len() != args.len() => Err(RuntimeError::new(
                RuntimeErrorKind::Invalid,
                f.span,
                format!("`{entry}` takes {} arguments, {} given", f.params.len(), args.len()),
            )),
            Some(_) => it.call(entry, args, SourceSpan::DUMMY),
        };
        Execution {
            result,
            output: it.output,
            trace: it.trace,
        }
    };
    // Deep recursion in the subject program needs a deep host stack.
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(STACK_SIZE)
            .spawn_scoped(s, run)
            .expect("spawn interpreter thread")
            .join()
            .expect("interpreter thread panicked")
    })
}

/// Matches a value against a typed pattern, reporting each test that is
/// performed, in order, to `on_test`. Bindings are appended to `binds`.
pub fn match_pattern(
    p: &TPat,
    v: &Value,
    on_test: &mut dyn FnMut(NodeId, bool),
    binds: &mut Vec<(String, Value)>,
) -> bool {
    let mut test = |ok: bool| {
        on_test(p.id, ok);
        ok
    };
    match &p.kind {
        TPatKind::Wildcard | TPatKind::Rest => true,
        TPatKind::Literal(l) => test(l == v),
        TPatKind::Const { value, .. } => test(value == v),
        TPatKind::Range { lo, hi, .. } => test(v.as_ordinal().is_some_and(|x| *lo <= x && x <= *hi)),
        TPatKind::UnitVariant(_, i) => test(matches!(v, Value::Enum { variant, .. } if variant == i)),
        TPatKind::UnitStruct(_) => true,
        TPatKind::Binding { name, sub, .. } => {
            if let Some(s) = sub {
                if !match_pattern(s, v, on_test, binds) {
                    return false;
                }
            }
            binds.push((name.clone(), v.clone()));
            true
        }
        TPatKind::Reference { inner, .. } | TPatKind::Grouped(inner) => match_pattern(inner, v, on_test, binds),
        TPatKind::Struct { ctor, fields, .. } => {
            let Some(vals) = ctor_fields(*ctor, v, &mut test) else { return false };
            fields.iter().all(|(i, fp)| match_pattern(fp, &vals[*i], on_test, binds))
        }
        TPatKind::TupleStruct { ctor, elems } => {
            let Some(vals) = ctor_fields(*ctor, v, &mut test) else { return false };
            match_positional(elems, vals, on_test, binds)
        }
        TPatKind::Tuple(elems) => match v {
            Value::Tuple(vals) => match_positional(elems, vals, on_test, binds),
            _ => false,
        },
        TPatKind::Slice { elems, array_len } => {
            let Value::Seq(vals) = v else { return false };
            let fixed = elems.iter().filter(|e| !e.is_rest_like()).count();
            let has_rest = fixed < elems.len();
            if array_len.is_none() {
                let ok = if has_rest { vals.len() >= fixed } else { vals.len() == fixed };
                if !test(ok) {
                    return false;
                }
            } else if vals.len() != fixed && !has_rest {
                return false;
            }
            let n = vals.len();
            let mut i = 0;
            let suffix = elems.iter().rev().take_while(|e| !e.is_rest_like()).count();
            for e in elems {
                if e.is_rest_like() {
                    let middle = Value::Seq(vals[i..n - suffix].to_vec());
                    if !match_pattern(e, &middle, on_test, binds) {
                        return false;
                    }
                    i = n - suffix;
                    continue;
                }
                if !match_pattern(e, &vals[i], on_test, binds) {
                    return false;
                }
                i += 1;
            }
            true
        }
        TPatKind::Or(alts) => {
            let mark = binds.len();
            for a in alts {
                if match_pattern(a, v, on_test, binds) {
                    return true;
                }
                binds.truncate(mark);
            }
            false
        }
    }
}

/// Field values of `v` if it was built by `ctor`, running the
/// discriminant test for variants.
fn ctor_fields<'v>(ctor: Ctor, v: &'v Value, test: &mut dyn FnMut(bool) -> bool) -> Option<&'v [Value]> {
    match (ctor, v) {
        (Ctor::Variant(_, i), Value::Enum { variant, fields, .. }) => test(*variant == i).then_some(&fields[..]),
        (Ctor::Struct(_), Value::Struct { fields, .. }) => Some(fields),
        _ => None,
    }
}

fn match_positional(
    elems: &[TPat],
    vals: &[Value],
    on_test: &mut dyn FnMut(NodeId, bool),
    binds: &mut Vec<(String, Value)>,
) -> bool {
    crate::types::tpat::positions(elems, vals.len())
        .into_iter()
        .all(|(i, e)| match_pattern(e, &vals[i], on_test, binds))
}

/// Whether the pattern matches, without recording anything.
pub fn pattern_matches(p: &TPat, v: &Value) -> bool {
    match_pattern(p, v, &mut |_, _| {}, &mut Vec::new())
}

/// `print` output: strings and chars print raw, everything else in source
/// syntax.
pub fn display(v: &Value, env: &TypeEnv) -> String {
    match v {
        Value::Str(s) => s.clone(),
        Value::Char(c) => c.to_string(),
        _ => v.show(env),
    }
}

enum Unwind {
    Return(Value),
    Error(RuntimeError),
}

impl From<RuntimeError> for Unwind {
    fn from(e: RuntimeError) -> Self {
        Unwind::Error(e)
    }
}

type Eval<T> = Result<T, Unwind>;

struct Frame<'a> {
    function: &'a str,
    ret: Ty,
    scopes: Vec<Vec<(String, Value)>>,
}

struct Interpreter<'a> {
    tp: &'a TypedProgram,
    ds: &'a DecisionSet,
    fns: HashMap<&'a str, &'a FnDef>,
    statics: HashMap<String, Value>,
    frames: Vec<Frame<'a>>,
    fuel: u64,
    test: u32,
    seq: u32,
    trace: Trace,
    output: String,
}

enum Access {
    Field(usize),
    Index(i64, SourceSpan),
}

impl<'a> Interpreter<'a> {
    fn new(tp: &'a TypedProgram, ds: &'a DecisionSet, test: u32, fuel: u64) -> Self {
        Interpreter {
            tp,
            ds,
            fns: tp.program.functions().map(|f| (f.name.name.as_str(), f)).collect(),
            statics: tp.env.statics.iter().map(|(k, s)| (k.clone(), s.init.clone())).collect(),
            frames: Vec::new(),
            fuel,
            test,
            seq: 0,
            trace: Trace::default(),
            output: String::new(),
        }
    }

    fn env(&self) -> &'a TypeEnv {
        &self.tp.env
    }

    fn ty(&self, e: &Expr) -> &'a Ty {
        self.tp.ty(e)
    }

    fn step(&mut self, span: SourceSpan) -> Eval<()> {
        if self.fuel == 0 {
            return Err(RuntimeError::new(RuntimeErrorKind::OutOfFuel, span, "out of fuel").into());
        }
        self.fuel -= 1;
        Ok(())
    }

    fn frame(&mut self) -> &mut Frame<'a> {
        self.frames.last_mut().expect("inside a function")
    }

    fn lookup(&self, name: &str, span: SourceSpan) -> Eval<Value> {
        let f = self.frames.last().expect("inside a function");
        for scope in f.scopes.iter().rev() {
            if let Some((_, v)) = scope.iter().rev().find(|(n, _)| n == name) {
                return Ok(v.clone());
            }
        }
        Err(RuntimeError::new(RuntimeErrorKind::Invalid, span, format!("unbound `{name}`")).into())
    }

    fn bind_all(&mut self, binds: Vec<(String, Value)>) {
        self.frame().scopes.last_mut().expect("scope").extend(binds);
    }

    fn call(&mut self, name: &str, args: Vec<Value>, span: SourceSpan) -> Result<Value, RuntimeError> {
        if self.frames.len() >= MAX_DEPTH {
            return Err(RuntimeError::new(RuntimeErrorKind::StackOverflow, span, "call depth limit reached"));
        }
        let f: &'a FnDef = self.fns[name];
        let ret = self.env().fns[name].ret.clone();
        let params = f.params.iter().map(|p| p.name.name.clone()).zip(args).collect();
        self.frames.push(Frame {
            function: &f.name.name,
            ret,
            scopes: vec![params],
        });
        self.trace.entries.insert(name.to_string());
        let r = self.block(&f.body);
        self.frames.pop();
        match r {
            Ok(v) => {
                self.trace.exits.insert(ExitPoint {
                    function: name.to_string(),
                    node: None,
                });
                Ok(v)
            }
            Err(Unwind::Return(v)) => Ok(v),
            Err(Unwind::Error(e)) => Err(e),
        }
    }

    fn block(&mut self, b: &Block) -> Eval<Value> {
        self.frame().scopes.push(Vec::new());
        let r = self.block_inner(b);
        self.frame().scopes.pop();
        r
    }

    fn block_inner(&mut self, b: &Block) -> Eval<Value> {
        for s in &b.stmts {
            self.step(s.span)?;
            self.trace.statements.insert(s.id);
            self.stmt(s)?;
        }
        match &b.tail {
            Some(t) => {
                self.trace.statements.insert(t.id);
                self.expr(t)
            }
            None => Ok(Value::UNIT),
        }
    }

    fn stmt(&mut self, s: &Stmt) -> Eval<()> {
        match &s.kind {
            StmtKind::Let { pat, init, els, .. } => {
                let v = self.expr(init)?;
                match self.match_recorded(pat, &v) {
                    Some(binds) => self.bind_all(binds),
                    None => {
                        let els = els.as_ref().expect("refutable let has an else block");
                        self.block(els)?;
                        return Err(RuntimeError::new(
                            RuntimeErrorKind::Invalid,
                            els.span,
                            "`let else` block did not diverge",
                        )
                        .into());
                    }
                }
            }
            StmtKind::Expr { expr, .. } => {
                self.expr(expr)?;
            }
            StmtKind::Assign { target, op, value } => {
                let v = self.expr(value)?;
                let ty = self.ty(target).int();
                let span = s.span;
                self.assign(target, move |slot| {
                    *slot = match op {
                        AssignOp::Assign => v,
                        AssignOp::Add | AssignOp::Sub => {
                            let bop = if *op == AssignOp::Add { BinOp::Add } else { BinOp::Sub };
                            let (Some(t), Some(a), Some(b)) = (ty, slot.as_int(), v.as_int()) else {
                                return Err(RuntimeError::new(RuntimeErrorKind::Invalid, span, "compound assignment to a non-integer"));
                            };
                            let r = int_binop(bop, t, a, b)
                                .map_err(|m| RuntimeError::new(RuntimeErrorKind::Overflow, span, m))?;
                            Value::Int(t, r)
                        }
                    };
                    Ok(())
                })?;
            }
        }
        Ok(())
    }

    fn assign(&mut self, target: &Expr, f: impl FnOnce(&mut Value) -> Result<(), RuntimeError>) -> Eval<()> {
        let mut path = Vec::new();
        let mut e = target;
        let root = loop {
            match &e.kind {
                ExprKind::Paren(x) => e = x,
                ExprKind::Field(x, name) => {
                    path.push(Access::Field(self.field_index(x, name)));
                    e = x;
                }
                ExprKind::Index(x, i) => {
                    let iv = self.expr(i)?.as_int().unwrap_or(-1);
                    path.push(Access::Index(iv, i.span));
                    e = x;
                }
                ExprKind::Path(p) if p.is_single() => break &p.segments[0].name,
                _ => {
                    return Err(RuntimeError::new(RuntimeErrorKind::Invalid, e.span, "not assignable").into());
                }
            }
        };
        path.reverse();
        let is_static = matches!(self.tp.res.get(&e.id), Some(Res::Static(_)));
        let mut slot: &mut Value = if is_static {
            self.statics.get_mut(root.as_str())
        } else {
            let f = self.frames.last_mut().expect("inside a function");
            f.scopes
                .iter_mut()
                .rev()
                .find_map(|s| s.iter_mut().rev().find(|(n, _)| n == root).map(|(_, v)| v))
        }
        .ok_or_else(|| RuntimeError::new(RuntimeErrorKind::Invalid, target.span, format!("unbound `{root}`")))?;
        for a in path {
            slot = match (a, slot) {
                (Access::Field(i), Value::Struct { fields, .. } | Value::Tuple(fields)) => &mut fields[i],
                (Access::Index(i, span), Value::Seq(xs)) => {
                    let n = xs.len();
                    xs.get_mut(usize::try_from(i).unwrap_or(usize::MAX)).ok_or_else(|| {
                        RuntimeError::new(
                            RuntimeErrorKind::IndexOutOfBounds,
                            span,
                            format!("index out of bounds: the len is {n} but the index is {i}"),
                        )
                    })?
                }
                _ => return Err(RuntimeError::new(RuntimeErrorKind::Invalid, target.span, "not assignable").into()),
            };
        }
        f(slot).map_err(Unwind::Error)
    }

    fn field_index(&self, x: &Expr, name: &FieldName) -> usize {
        match name {
            FieldName::Index(i, _) => *i as usize,
            FieldName::Named(n) => match self.ty(x).peel() {
                Ty::Struct(s) => self.env().struct_info(*s).fields.index_of(&n.name).expect("checked field"),
                _ => unreachable!("named field on a non-struct"),
            },
        }
    }

    /// Matches `v` against a source pattern, recording a vector if the
    /// pattern is a decision. Returns the bindings on success.
    fn match_recorded(&mut self, pat: &Pattern, v: &Value) -> Option<Vec<(String, Value)>> {
        let tpat = self.tp.pattern(pat);
        let decision = self.ds.for_node(pat.id);
        let mut conds = vec![TriState::NotEvaluated; decision.map_or(0, |d| d.conditions.len())];
        let mut binds = Vec::new();
        let ok = match_pattern(
            tpat,
            v,
            &mut |node, r| {
                if let Some(i) = decision.and_then(|d| d.condition_of(node)) {
                    conds[i] = TriState::from_bool(r);
                }
            },
            &mut binds,
        );
        if let Some(d) = decision {
            self.record(d, conds, ok);
        }
        ok.then_some(binds)
    }

    fn record(&mut self, d: &Decision, conds: Vec<TriState>, outcome: bool) {
        debug_assert_eq!(
            d.structure.eval(&conds.iter().map(|c| c.as_bool()).collect::<Vec<_>>()),
            Some(outcome),
            "vector does not determine the outcome of decision {}",
            d.id
        );
        self.trace.vectors.push(EvaluationVector {
            test: self.test,
            seq: self.seq,
            decision: d.id,
            conds,
            outcome,
        });
        self.seq += 1;
    }

    fn expr(&mut self, e: &Expr) -> Eval<Value> {
        if let Some(d) = self.ds.for_node(e.id) {
            if d.node == e.id && matches!(d.origin, Origin::BooleanExpr | Origin::Guard) {
                let mut conds = vec![TriState::NotEvaluated; d.conditions.len()];
                let out = self.bool_tree(e, d, &mut conds)?;
                self.record(d, conds, out);
                return Ok(Value::Bool(out));
            }
        }
        self.plain(e)
    }

    fn bool_tree(&mut self, e: &Expr, d: &Decision, conds: &mut [TriState]) -> Eval<bool> {
        if let Some(i) = d.condition_of(e.id) {
            let v = self.plain(e)?.as_bool().unwrap_or(false);
            conds[i] = TriState::from_bool(v);
            return Ok(v);
        }
        match &e.kind {
            ExprKind::Paren(x) => self.bool_tree(x, d, conds),
            ExprKind::Unary(UnOp::Not, x) => Ok(!self.bool_tree(x, d, conds)?),
            ExprKind::Binary(op @ (BinOp::And | BinOp::Or), a, b) => {
                let l = self.bool_tree(a, d, conds)?;
                if l == (*op == BinOp::Or) {
                    return Ok(l);
                }
                self.bool_tree(b, d, conds)
            }
            _ => Ok(self.plain(e)?.as_bool().unwrap_or(false)),
        }
    }

    fn err<T>(&self, kind: RuntimeErrorKind, span: SourceSpan, msg: impl Into<String>) -> Eval<T> {
        Err(RuntimeError::new(kind, span, msg).into())
    }

    fn bool(&mut self, e: &Expr) -> Eval<bool> {
        let v = self.expr(e)?;
        match v.as_bool() {
            Some(b) => Ok(b),
            None => self.err(RuntimeErrorKind::Invalid, e.span, "expected a boolean"),
        }
    }

    fn plain(&mut self, e: &Expr) -> Eval<Value> {
        self.step(e.span)?;
        match &e.kind {
            ExprKind::Lit(l) => Ok(match l {
                Lit::Bool(b) => Value::Bool(*b),
                Lit::Char(c) => Value::Char(*c),
                Lit::Str(s) => Value::Str(s.clone()),
                Lit::Int { value, .. } => {
                    let t = self.ty(e).int().expect("typed integer literal");
                    if *value > t.max_value() as u64 {
                        return self.err(RuntimeErrorKind::Overflow, e.span, format!("literal out of range for {}", t.name()));
                    }
                    Value::Int(t, *value as i64)
                }
            }),
            ExprKind::Path(p) => self.path(e, p),
            ExprKind::Unary(op, x) => match op {
                UnOp::Deref => self.expr(x),
                UnOp::Not => Ok(Value::Bool(!self.bool(x)?)),
                UnOp::Neg => {
                    let t = self.ty(e).int().expect("typed negation");
                    if let ExprKind::Lit(Lit::Int { value, .. }) = &x.kind {
                        let v = -(*value as i64);
                        return if t.contains(v) {
                            Ok(Value::Int(t, v))
                        } else {
                            self.err(RuntimeErrorKind::Overflow, e.span, format!("literal out of range for {}", t.name()))
                        };
                    }
                    let v = self.expr(x)?.as_int().unwrap_or(0);
                    match int_binop(BinOp::Sub, t, 0, v) {
                        Ok(r) => Ok(Value::Int(t, r)),
                        Err(m) => self.err(RuntimeErrorKind::Overflow, e.span, m),
                    }
                }
            },
            ExprKind::Ref { expr, .. } => self.expr(expr),
            ExprKind::Binary(op, a, b) => {
                if op.is_logical() {
                    let l = self.bool(a)?;
                    if l == (*op == BinOp::Or) {
                        return Ok(Value::Bool(l));
                    }
                    return Ok(Value::Bool(self.bool(b)?));
                }
                let va = self.expr(a)?;
                let vb = self.expr(b)?;
                if op.is_comparison() {
                    return Ok(Value::Bool(compare(*op, &va, &vb)));
                }
                let t = self.ty(e).int().expect("typed arithmetic");
                let (Some(x), Some(y)) = (va.as_int(), vb.as_int()) else {
                    return self.err(RuntimeErrorKind::Invalid, e.span, "arithmetic on a non-integer");
                };
                match int_binop(*op, t, x, y) {
                    Ok(r) => Ok(Value::Int(t, r)),
                    Err(m) => self.err(RuntimeErrorKind::Overflow, e.span, m),
                }
            }
            ExprKind::Cast(x, _) => {
                let v = self.expr(x)?;
                match cast(&v, self.ty(e)) {
                    Ok(v) => Ok(v),
                    Err(m) => self.err(RuntimeErrorKind::Invalid, e.span, m),
                }
            }
            ExprKind::Paren(x) => self.expr(x),
            ExprKind::Tuple(xs) => Ok(Value::Tuple(self.exprs(xs)?)),
            ExprKind::Array(xs) => Ok(Value::Seq(self.exprs(xs)?)),
            ExprKind::StructLit { fields, .. } => {
                let Some(Res::Ctor(ctor)) = self.tp.res.get(&e.id) else {
                    return self.err(RuntimeErrorKind::Invalid, e.span, "unresolved struct literal");
                };
                let info = fields_info(*ctor, self.env());
                let mut vals = vec![Value::UNIT; info.tys.len()];
                for (name, x) in fields {
                    let i = info.index_of(&name.name).expect("checked field");
                    vals[i] = self.expr(x)?;
                }
                Ok(construct(*ctor, vals))
            }
            ExprKind::Call { callee, args } => {
                let vals = self.exprs(args)?;
                match self.tp.res.get(&callee.id).cloned() {
                    Some(Res::Fn(name)) => self.call(&name, vals, e.span).map_err(Unwind::Error),
                    Some(Res::Ctor(c)) => Ok(construct(c, vals)),
                    Some(Res::Print) => {
                        for v in &vals {
                            self.output.push_str(&display(v, self.env()));
                        }
                        self.output.push('\n');
                        Ok(Value::UNIT)
                    }
                    Some(Res::Panic) => {
                        let msg = vals.first().map_or_else(|| "explicit panic".to_string(), |v| display(v, self.env()));
                        self.err(RuntimeErrorKind::Panic, e.span, msg)
                    }
                    _ => self.err(RuntimeErrorKind::Invalid, callee.span, "not callable"),
                }
            }
            ExprKind::MethodCall { receiver, method, .. } => {
                let v = self.expr(receiver)?;
                match (method.name.as_str(), &v) {
                    ("len", Value::Seq(xs)) => Ok(Value::Int(IntTy::U32, xs.len() as i64)),
                    ("len", Value::Str(s)) => Ok(Value::Int(IntTy::U32, s.len() as i64)),
                    _ => self.err(RuntimeErrorKind::Invalid, e.span, format!("no method `{}`", method.name)),
                }
            }
            ExprKind::Field(x, name) => {
                let i = self.field_index(x, name);
                match self.expr(x)? {
                    Value::Struct { mut fields, .. } | Value::Tuple(mut fields) => Ok(fields.swap_remove(i)),
                    _ => self.err(RuntimeErrorKind::Invalid, e.span, "field access on a non-struct"),
                }
            }
            ExprKind::Index(x, i) => {
                let v = self.expr(x)?;
                let iv = self.expr(i)?.as_int().unwrap_or(-1);
                match v {
                    Value::Seq(mut xs) => {
                        let n = xs.len();
                        match usize::try_from(iv) {
                            Ok(k) if k < n => Ok(xs.swap_remove(k)),
                            _ => self.err(
                                RuntimeErrorKind::IndexOutOfBounds,
                                e.span,
                                format!("index out of bounds: the len is {n} but the index is {iv}"),
                            ),
                        }
                    }
                    _ => self.err(RuntimeErrorKind::Invalid, e.span, "indexing a non-sequence"),
                }
            }
            ExprKind::Block(b) => self.block(b),
            ExprKind::If { cond, then, els } => {
                if self.bool(cond)? {
                    self.block(then)
                } else if let Some(x) = els {
                    self.expr(x)
                } else {
                    Ok(Value::UNIT)
                }
            }
            ExprKind::IfLet { pat, scrutinee, then, els } => {
                let v = self.expr(scrutinee)?;
                match self.match_recorded(pat, &v) {
                    Some(binds) => {
                        self.frame().scopes.push(binds);
                        let r = self.block(then);
                        self.frame().scopes.pop();
                        r
                    }
                    None => match els {
                        Some(x) => self.expr(x),
                        None => Ok(Value::UNIT),
                    },
                }
            }
            ExprKind::Match { scrutinee, arms, .. } => {
                let v = self.expr(scrutinee)?;
                for arm in arms {
                    let Some(binds) = self.match_recorded(&arm.pat, &v) else { continue };
                    self.frame().scopes.push(binds);
                    let r = self.arm(arm);
                    self.frame().scopes.pop();
                    if let Some(r) = r? {
                        return Ok(r);
                    }
                }
                self.err(RuntimeErrorKind::Invalid, e.span, "no arm matched")
            }
            ExprKind::While { cond, body } => {
                while self.bool(cond)? {
                    self.block(body)?;
                }
                Ok(Value::UNIT)
            }
            ExprKind::Return(x, _) => {
                let v = match x {
                    Some(x) => self.expr(x)?,
                    None => Value::UNIT,
                };
                self.exit(e.id);
                Err(Unwind::Return(v))
            }
            ExprKind::Try(x) => {
                let v = self.expr(x)?;
                let Value::Enum { ty, variant, mut fields } = v else {
                    return self.err(RuntimeErrorKind::Invalid, e.span, "`?` on a non-enum");
                };
                if variant == 0 {
                    return Ok(fields.swap_remove(0));
                }
                let Ty::Enum(ret) = self.frames.last().expect("inside a function").ret.clone() else {
                    return self.err(RuntimeErrorKind::Invalid, e.span, "`?` outside an option or result function");
                };
                let out = match self.env().enum_info(ty).builtin {
                    Some(Builtin::Result) => Value::Enum { ty: ret, variant: 1, fields },
                    _ => Value::Enum { ty: ret, variant: 1, fields: Vec::new() },
                };
                self.exit(e.id);
                Err(Unwind::Return(out))
            }
        }
    }

    /// Runs a matched arm: the guard, then the body. `None` when the guard
    /// rejects the arm.
    fn arm(&mut self, arm: &Arm) -> Eval<Option<Value>> {
        if let Some(g) = &arm.guard {
            if !self.bool(g)? {
                return Ok(None);
            }
        }
        self.trace.statements.insert(arm.body.id);
        self.expr(&arm.body).map(Some)
    }

    fn exit(&mut self, node: NodeId) {
        let function = self.frames.last().expect("inside a function").function.to_string();
        self.trace.exits.insert(ExitPoint {
            function,
            node: Some(node),
        });
    }

    fn exprs(&mut self, xs: &[Expr]) -> Eval<Vec<Value>> {
        xs.iter().map(|x| self.expr(x)).collect()
    }

    fn path(&mut self, e: &Expr, p: &Path) -> Eval<Value> {
        match self.tp.res.get(&e.id) {
            Some(Res::Const(n)) => Ok(self.env().consts[n].value.clone()),
            Some(Res::Static(n)) => Ok(self.statics[n].clone()),
            Some(Res::Ctor(c)) => Ok(construct(*c, Vec::new())),
            Some(Res::Local) | None if p.is_single() => self.lookup(&p.segments[0].name, e.span),
            _ => self.err(RuntimeErrorKind::Invalid, e.span, "not a value"),
        }
    }
}

fn fields_info(ctor: Ctor, env: &TypeEnv) -> &FieldsInfo {
    match ctor {
        Ctor::Variant(e, v) => &env.variant(e, v).fields,
        Ctor::Struct(s) => &env.struct_info(s).fields,
    }
}

fn construct(ctor: Ctor, fields: Vec<Value>) -> Value {
    match ctor {
        Ctor::Variant(ty, variant) => Value::Enum { ty, variant, fields },
        Ctor::Struct(ty) => Value::Struct { ty, fields },
    }
}

//! Walks a typed program and collects every decision.

use std::collections::HashMap;

use super::lower::lower_pattern;
use super::{Condition, ConditionKind, Decision, DecisionId, DecisionSet, Origin, Structure};
use crate::refutability::{classify, SliceRule};
use crate::syntax::*;
use crate::types::exhaustive::remaining_spaces;
use crate::types::{denotation, Res, TPat, Ty, TypeEnv, TypedProgram};

/// Collects pattern decisions (match arms, `if let`, `let else`), boolean
/// decisions (conditions of `if` and `while`, guards, and any other boolean
/// expression with `&&` or `||`), hoisting decisions nested inside
/// conditions. Constness is not decided here; see [`apply_const_exemption`].
pub fn extract_decisions(tp: &TypedProgram, rule: SliceRule) -> DecisionSet {
    let mut x = Extractor {
        tp,
        rule,
        decisions: Vec::new(),
        function: String::new(),
    };
    for f in tp.program.functions() {
        x.function = f.name.name.clone();
        x.block(&f.body);
    }
    let mut decisions: Vec<Decision> = x.decisions.into_iter().map(Option::unwrap).collect();
    decisions.sort_by_key(|d| d.id);
    let by_node = decisions.iter().map(|d| (d.node, d.id)).collect();
    DecisionSet { decisions, by_node }
}

/// Per arm, whether it still needs a decision: an unguarded arm whose
/// pattern covers every value left by the earlier arms cannot fail.
pub fn contextual_prune(arms: &[(&TPat, bool)], ty: &Ty, env: &TypeEnv) -> Vec<bool> {
    let rest = remaining_spaces(arms, ty, env);
    arms.iter()
        .zip(&rest)
        .map(|((p, guarded), before)| *guarded || !before.is_subset(&denotation(p, env)))
        .collect()
}

/// Whether an expression's value follows from literals and constants alone.
pub fn is_const_expr(e: &Expr, tp: &TypedProgram) -> bool {
    match &e.kind {
        ExprKind::Lit(_) => true,
        ExprKind::Path(_) => matches!(tp.res.get(&e.id), Some(Res::Const(_))),
        ExprKind::Paren(x) | ExprKind::Unary(_, x) | ExprKind::Cast(x, _) => is_const_expr(x, tp),
        ExprKind::Ref { expr, .. } => is_const_expr(expr, tp),
        ExprKind::Binary(_, a, b) => is_const_expr(a, tp) && is_const_expr(b, tp),
        ExprKind::Tuple(xs) => xs.iter().all(|x| is_const_expr(x, tp)),
        _ => false,
    }
}

/// Marks boolean leaves that derive solely from literals and constants.
/// Only obligation flags change; structure and ids stay as they are.
pub fn apply_const_exemption(mut ds: DecisionSet, tp: &TypedProgram) -> DecisionSet {
    struct Leaves<'a>(HashMap<NodeId, &'a Expr>);
    impl<'a> Leaves<'a> {
        fn expr(&mut self, e: &'a Expr) {
            self.0.insert(e.id, e);
        }
    }
    struct Collect<'a, 'b>(&'b mut Leaves<'a>);
    impl<'a> Collect<'a, '_> {
        fn program(&mut self, p: &'a Program) {
            for f in p.functions() {
                self.block(&f.body);
            }
        }
        fn block(&mut self, b: &'a Block) {
            for s in &b.stmts {
                match &s.kind {
                    StmtKind::Let { init, els, .. } => {
                        self.expr(init);
                        if let Some(b) = els {
                            self.block(b);
                        }
                    }
                    StmtKind::Expr { expr, .. } => self.expr(expr),
                    StmtKind::Assign { target, value, .. } => {
                        self.expr(target);
                        self.expr(value);
                    }
                }
            }
            if let Some(t) = &b.tail {
                self.expr(t);
            }
        }
        fn expr(&mut self, e: &'a Expr) {
            self.0.expr(e);
            for c in expr_children(e) {
                match c {
                    Child::Expr(x) => self.expr(x),
                    Child::Block(b) => self.block(b),
                }
            }
        }
    }
    let mut leaves = Leaves(HashMap::new());
    Collect(&mut leaves).program(&tp.program);
    for d in &mut ds.decisions {
        for c in &mut d.conditions {
            c.const_exempt = matches!(c.kind, ConditionKind::BooleanLeaf { .. })
                && leaves.0.get(&c.node).is_some_and(|e| is_const_expr(e, tp));
        }
    }
    ds
}

enum Child<'a> {
    Expr(&'a Expr),
    Block(&'a Block),
}

fn expr_children(e: &Expr) -> Vec<Child<'_>> {
    use Child::{Block as B, Expr as E};
    match &e.kind {
        ExprKind::Lit(_) | ExprKind::Path(_) => vec![],
        ExprKind::Unary(_, x) | ExprKind::Cast(x, _) | ExprKind::Paren(x) | ExprKind::Field(x, _) | ExprKind::Try(x) => {
            vec![E(x)]
        }
        ExprKind::Ref { expr, .. } => vec![E(expr)],
        ExprKind::Binary(_, a, b) | ExprKind::Index(a, b) => vec![E(a), E(b)],
        ExprKind::Tuple(xs) | ExprKind::Array(xs) => xs.iter().map(E).collect(),
        ExprKind::StructLit { fields, .. } => fields.iter().map(|(_, x)| E(x)).collect(),
        ExprKind::Call { callee, args } => std::iter::once(E(&**callee)).chain(args.iter().map(E)).collect(),
        ExprKind::MethodCall { receiver, args, .. } => {
            std::iter::once(E(&**receiver)).chain(args.iter().map(E)).collect()
        }
        ExprKind::Block(b) => vec![B(b)],
        ExprKind::If { cond, then, els } => {
            let mut v = vec![E(&**cond), B(then)];
            v.extend(els.iter().map(|x| E(&**x)));
            v
        }
        ExprKind::IfLet { scrutinee, then, els, .. } => {
            let mut v = vec![E(&**scrutinee), B(then)];
            v.extend(els.iter().map(|x| E(&**x)));
            v
        }
        ExprKind::Match { scrutinee, arms, .. } => {
            let mut v = vec![E(&**scrutinee)];
            for a in arms {
                v.extend(a.guard.iter().map(E));
                v.push(E(&a.body));
            }
            v
        }
        ExprKind::While { cond, body } => vec![E(&**cond), B(body)],
        ExprKind::Return(x, _) => x.iter().map(|x| E(&**x)).collect(),
    }
}

struct Extractor<'a> {
    tp: &'a TypedProgram,
    rule: SliceRule,
    /// Slots are reserved before nested decisions are found so that ids
    /// follow source order.
    decisions: Vec<Option<Decision>>,
    function: String,
}

/// `&&`, `||` and `!` (through parentheses), the operators that combine
/// conditions.
fn has_logical_op(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Binary(op, ..) => op.is_logical(),
        ExprKind::Paren(x) | ExprKind::Unary(UnOp::Not, x) => has_logical_op(x),
        _ => false,
    }
}

impl Extractor<'_> {
    fn reserve(&mut self) -> DecisionId {
        self.decisions.push(None);
        (self.decisions.len() - 1) as DecisionId
    }

    fn block(&mut self, b: &Block) {
        for s in &b.stmts {
            match &s.kind {
                StmtKind::Let { pat, init, els, .. } => {
                    self.expr(init);
                    if let Some(els) = els {
                        self.pattern_decision(pat, Origin::LetElse, None, false);
                        self.block(els);
                    }
                }
                StmtKind::Expr { expr, .. } => self.expr(expr),
                StmtKind::Assign { target, value, .. } => {
                    self.expr(target);
                    self.expr(value);
                }
            }
        }
        if let Some(t) = &b.tail {
            self.expr(t);
        }
    }

    fn expr(&mut self, e: &Expr) {
        if has_logical_op(e) && *self.tp.ty(e) == Ty::Bool {
            self.bool_decision(e, Origin::BooleanExpr);
            return;
        }
        match &e.kind {
            ExprKind::If { cond, then, els } => {
                self.bool_decision(cond, Origin::BooleanExpr);
                self.block(then);
                if let Some(x) = els {
                    self.expr(x);
                }
            }
            ExprKind::While { cond, body } => {
                self.bool_decision(cond, Origin::BooleanExpr);
                self.block(body);
            }
            ExprKind::IfLet { pat, scrutinee, then, els } => {
                self.expr(scrutinee);
                self.pattern_decision(pat, Origin::IfLet, None, false);
                self.block(then);
                if let Some(x) = els {
                    self.expr(x);
                }
            }
            ExprKind::Match { scrutinee, arms, source } => {
                self.expr(scrutinee);
                let typed: Vec<(&TPat, bool)> = arms.iter().map(|a| (self.tp.pattern(&a.pat), a.guard.is_some())).collect();
                let needed = contextual_prune(&typed, self.tp.ty(scrutinee), &self.tp.env);
                let origin = match source {
                    MatchSource::Source => Origin::MatchArm,
                    MatchSource::QuestionMark => Origin::QuestionMark,
                };
                for (i, arm) in arms.iter().enumerate() {
                    self.pattern_decision(&arm.pat, origin, Some(i), !needed[i]);
                    if let Some(g) = &arm.guard {
                        self.bool_decision(g, Origin::Guard);
                    }
                    self.expr(&arm.body);
                }
            }
            _ => {
                for c in expr_children(e) {
                    match c {
                        Child::Expr(x) => self.expr(x),
                        Child::Block(b) => self.block(b),
                    }
                }
            }
        }
    }

    fn pattern_decision(&mut self, pat: &Pattern, origin: Origin, arm: Option<usize>, pruned: bool) {
        let tpat = self.tp.pattern(pat);
        let ap = classify(tpat, &self.tp.env, self.rule);
        let Ok(lowered) = lower_pattern(&ap, &self.tp.env) else { return };
        let id = self.reserve();
        let conditions = lowered
            .conditions
            .into_iter()
            .enumerate()
            .map(|(index, (node, kind, span))| Condition {
                index,
                kind,
                span,
                const_exempt: false,
                node,
            })
            .collect();
        self.decisions[id as usize] = Some(Decision {
            id,
            function: self.function.clone(),
            span: pat.span,
            origin,
            conditions,
            structure: lowered.structure,
            arm,
            pruned,
            node: pat.id,
        });
    }

    fn bool_decision(&mut self, e: &Expr, origin: Origin) {
        let id = self.reserve();
        let mut conditions = Vec::new();
        let structure = self.tree(e, &mut conditions);
        self.decisions[id as usize] = Some(Decision {
            id,
            function: self.function.clone(),
            span: e.span,
            origin,
            conditions,
            structure,
            arm: None,
            pruned: false,
            node: e.id,
        });
    }

    fn tree(&mut self, e: &Expr, out: &mut Vec<Condition>) -> Structure {
        match &e.kind {
            ExprKind::Paren(x) => self.tree(x, out),
            // A negated condition is still one condition.
            ExprKind::Unary(UnOp::Not, x) if has_logical_op(x) => Structure::Not(Box::new(self.tree(x, out))),
            ExprKind::Binary(op @ (BinOp::And | BinOp::Or), a, b) => {
                let parts = vec![self.tree(a, out), self.tree(b, out)];
                if *op == BinOp::And {
                    Structure::and(parts)
                } else {
                    Structure::or(parts)
                }
            }
            _ => {
                let before = self.decisions.len();
                self.expr(e);
                let kind = if self.decisions.len() > before {
                    ConditionKind::NestedDecisionResult {
                        decision: before as DecisionId,
                    }
                } else {
                    ConditionKind::BooleanLeaf { expr: pretty::expr(e) }
                };
                out.push(Condition {
                    index: out.len(),
                    kind,
                    span: e.span,
                    const_exempt: false,
                    node: e.id,
                });
                Structure::Cond(out.len() - 1)
            }
        }
    }
}

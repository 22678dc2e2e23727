//! The statements and exit points a trace is measured against.

use serde::Serialize;

use crate::syntax::visit::{walk_block, walk_expr, Visitor};
use crate::syntax::*;
use crate::types::{Ty, TypedProgram};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StatementSite {
    pub node: NodeId,
    pub span: SourceSpan,
    pub function: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExitSite {
    pub function: String,
    /// `None` for the implicit end of the body.
    pub node: Option<NodeId>,
    pub span: SourceSpan,
    /// Produced by desugaring `?`.
    pub from_question_mark: bool,
}

/// Block statements, block tails and match arm bodies, in source order.
pub fn statement_sites(tp: &TypedProgram) -> Vec<StatementSite> {
    struct C<'a> {
        function: &'a str,
        out: Vec<StatementSite>,
    }
    impl C<'_> {
        fn push(&mut self, node: NodeId, span: SourceSpan) {
            self.out.push(StatementSite {
                node,
                span,
                function: self.function.to_string(),
            });
        }
    }
    impl Visitor for C<'_> {
        fn visit_block(&mut self, b: &Block) {
            for s in &b.stmts {
                self.push(s.id, s.span);
                self.visit_stmt(s);
            }
            if let Some(t) = &b.tail {
                self.push(t.id, t.span);
                self.visit_expr(t);
            }
        }
        fn visit_expr(&mut self, e: &Expr) {
            if let ExprKind::Match { scrutinee, arms, .. } = &e.kind {
                self.visit_expr(scrutinee);
                for a in arms {
                    self.visit_pattern(&a.pat);
                    if let Some(g) = &a.guard {
                        self.visit_expr(g);
                    }
                    self.push(a.body.id, a.body.span);
                    self.visit_expr(&a.body);
                }
                return;
            }
            walk_expr(self, e);
        }
    }
    let mut out = Vec::new();
    for f in tp.program.functions() {
        let mut c = C {
            function: &f.name.name,
            out: Vec::new(),
        };
        c.visit_block(&f.body);
        out.extend(c.out);
    }
    out
}

/// Every `return` of each function, then its implicit end unless the body
/// always diverges.
pub fn exit_sites(tp: &TypedProgram) -> Vec<ExitSite> {
    struct R(Vec<(NodeId, SourceSpan, bool)>);
    impl Visitor for R {
        fn visit_expr(&mut self, e: &Expr) {
            if let ExprKind::Return(_, src) = &e.kind {
                self.0.push((e.id, e.span, *src == ReturnSource::QuestionMark));
            }
            walk_expr(self, e);
        }
    }
    let mut out = Vec::new();
    for f in tp.program.functions() {
        let mut r = R(Vec::new());
        walk_block(&mut r, &f.body);
        let function = f.name.name.clone();
        out.extend(r.0.into_iter().map(|(node, span, q)| ExitSite {
            function: function.clone(),
            node: Some(node),
            span,
            from_question_mark: q,
        }));
        if !diverges(tp, &f.body) {
            let end = f.body.span.end;
            out.push(ExitSite {
                function,
                node: None,
                span: SourceSpan::new(end, end),
                from_question_mark: false,
            });
        }
    }
    out
}

/// A block whose last statement or tail has type `!` never completes.
fn diverges(tp: &TypedProgram, b: &Block) -> bool {
    let never = |e: &Expr| tp.expr_types.get(&e.id) == Some(&Ty::Never);
    if let Some(t) = &b.tail {
        return never(t);
    }
    b.stmts.iter().any(|s| match &s.kind {
        StmtKind::Expr { expr, .. } => never(expr),
        StmtKind::Let { init, .. } => never(init),
        StmtKind::Assign { value, .. } => never(value),
    })
}

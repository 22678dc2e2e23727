//! Source printer. Output re-parses to the same tree (modulo spans and ids).

use std::fmt::Write;

use super::ast::*;

pub fn program(p: &Program) -> String {
    let mut pr = Printer::default();
    for (i, item) in p.items.iter().enumerate() {
        if i > 0 {
            pr.out.push('\n');
        }
        pr.item(item);
    }
    pr.out
}

pub fn expr(e: &Expr) -> String {
    let mut pr = Printer::default();
    pr.expr(e);
    pr.out
}

pub fn pattern(p: &Pattern) -> String {
    let mut pr = Printer::default();
    pr.pat(p);
    pr.out
}

pub fn type_expr(t: &TypeExpr) -> String {
    let mut pr = Printer::default();
    pr.ty(t);
    pr.out
}

pub fn pat_lit(l: &PatLit) -> String {
    match l {
        PatLit::Bool(b) => b.to_string(),
        PatLit::Int {
            negative,
            value,
            suffix,
        } => format!(
            "{}{}{}",
            if *negative { "-" } else { "" },
            value,
            suffix.map(|s| s.name()).unwrap_or("")
        ),
        PatLit::Char(c) => format!("{c:?}"),
        PatLit::Str(s) => format!("{s:?}"),
    }
}

#[derive(Default)]
struct Printer {
    out: String,
    indent: usize,
}

impl Printer {
    fn nl(&mut self) {
        self.out.push('\n');
        for _ in 0..self.indent {
            self.out.push_str("    ");
        }
    }

    fn s(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn sep<T>(&mut self, xs: &[T], mut f: impl FnMut(&mut Self, &T)) {
        for (i, x) in xs.iter().enumerate() {
            if i > 0 {
                self.s(", ");
            }
            f(self, x);
        }
    }

    fn item(&mut self, item: &Item) {
        match &item.kind {
            ItemKind::Enum(e) => {
                let _ = write!(self.out, "enum {} {{", e.name.name);
                self.indent += 1;
                for v in &e.variants {
                    self.nl();
                    self.s(&v.name.name);
                    self.fields(&v.fields);
                    self.s(",");
                }
                self.indent -= 1;
                self.nl();
                self.s("}\n");
            }
            ItemKind::Struct(s) => {
                let _ = write!(self.out, "struct {}", s.name.name);
                self.fields(&s.fields);
                if !matches!(s.fields, Fields::Named(_)) {
                    self.s(";");
                }
                self.s("\n");
            }
            ItemKind::Const(c) => {
                let _ = write!(self.out, "const {}: ", c.name.name);
                self.ty(&c.ty);
                self.s(" = ");
                self.expr(&c.value);
                self.s(";\n");
            }
            ItemKind::Static(s) => {
                self.s("static ");
                if s.mutable {
                    self.s("mut ");
                }
                let _ = write!(self.out, "{}: ", s.name.name);
                self.ty(&s.ty);
                self.s(" = ");
                self.expr(&s.value);
                self.s(";\n");
            }
            ItemKind::Fn(f) => {
                let _ = write!(self.out, "fn {}(", f.name.name);
                self.sep(&f.params, |pr, p| {
                    if p.mutable {
                        pr.s("mut ");
                    }
                    pr.s(&p.name.name);
                    pr.s(": ");
                    pr.ty(&p.ty);
                });
                self.s(")");
                if let Some(r) = &f.ret {
                    self.s(" -> ");
                    self.ty(r);
                }
                self.s(" ");
                self.block(&f.body);
                self.s("\n");
            }
        }
    }

    fn fields(&mut self, f: &Fields) {
        match f {
            Fields::Unit => {}
            Fields::Tuple(ts) => {
                self.s("(");
                self.sep(ts, |pr, t| pr.ty(t));
                self.s(")");
            }
            Fields::Named(ns) => {
                self.s(" { ");
                self.sep(ns, |pr, (n, t)| {
                    pr.s(&n.name);
                    pr.s(": ");
                    pr.ty(t);
                });
                self.s(" }");
            }
        }
    }

    fn ty(&mut self, t: &TypeExpr) {
        match &t.kind {
            TypeExprKind::Path(p, args) => {
                self.s(&p.joined());
                if !args.is_empty() {
                    self.s("<");
                    self.sep(args, |pr, a| pr.ty(a));
                    self.s(">");
                }
            }
            TypeExprKind::Tuple(ts) => {
                self.s("(");
                self.sep(ts, |pr, a| pr.ty(a));
                if ts.len() == 1 {
                    self.s(",");
                }
                self.s(")");
            }
            TypeExprKind::Array(e, n) => {
                self.s("[");
                self.ty(e);
                let _ = write!(self.out, "; {n}]");
            }
            TypeExprKind::Slice(e) => {
                self.s("[");
                self.ty(e);
                self.s("]");
            }
            TypeExprKind::Ref { mutable, inner } => {
                self.s(if *mutable { "&mut " } else { "&" });
                self.ty(inner);
            }
        }
    }

    fn block(&mut self, b: &Block) {
        if b.stmts.is_empty() && b.tail.is_none() {
            self.s("{}");
            return;
        }
        self.s("{");
        self.indent += 1;
        for s in &b.stmts {
            self.nl();
            self.stmt(s);
        }
        if let Some(t) = &b.tail {
            self.nl();
            self.expr(t);
        }
        self.indent -= 1;
        self.nl();
        self.s("}");
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Let { pat, ty, init, els } => {
                self.s("let ");
                self.pat(pat);
                if let Some(t) = ty {
                    self.s(": ");
                    self.ty(t);
                }
                self.s(" = ");
                self.expr(init);
                if let Some(b) = els {
                    self.s(" else ");
                    self.block(b);
                }
                self.s(";");
            }
            StmtKind::Expr { expr, semi } => {
                self.expr(expr);
                if *semi {
                    self.s(";");
                }
            }
            StmtKind::Assign { target, op, value } => {
                self.expr(target);
                self.s(match op {
                    AssignOp::Assign => " = ",
                    AssignOp::Add => " += ",
                    AssignOp::Sub => " -= ",
                });
                self.expr(value);
                self.s(";");
            }
        }
    }

    fn lit(&mut self, l: &Lit) {
        match l {
            Lit::Bool(b) => {
                let _ = write!(self.out, "{b}");
            }
            Lit::Int { value, suffix } => {
                let _ = write!(self.out, "{value}{}", suffix.map(|s| s.name()).unwrap_or(""));
            }
            Lit::Char(c) => {
                let _ = write!(self.out, "{c:?}");
            }
            Lit::Str(s) => {
                let _ = write!(self.out, "{s:?}");
            }
        }
    }

    fn else_branch(&mut self, els: &Option<Box<Expr>>) {
        if let Some(e) = els {
            self.s(" else ");
            match &e.kind {
                ExprKind::Block(b) => self.block(b),
                _ => self.expr(e),
            }
        }
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Lit(l) => self.lit(l),
            ExprKind::Path(p) => self.s(&p.joined()),
            ExprKind::Unary(op, x) => {
                self.s(match op {
                    UnOp::Neg => "-",
                    UnOp::Not => "!",
                    UnOp::Deref => "*",
                });
                self.expr(x);
            }
            ExprKind::Ref { mutable, expr } => {
                self.s(if *mutable { "&mut " } else { "&" });
                self.expr(expr);
            }
            ExprKind::Binary(op, a, b) => {
                self.expr(a);
                let _ = write!(self.out, " {} ", op.symbol());
                self.expr(b);
            }
            ExprKind::Cast(x, t) => {
                self.expr(x);
                self.s(" as ");
                self.ty(t);
            }
            ExprKind::Paren(x) => {
                self.s("(");
                self.expr(x);
                self.s(")");
            }
            ExprKind::Tuple(xs) => {
                self.s("(");
                self.sep(xs, |pr, x| pr.expr(x));
                if xs.len() == 1 {
                    self.s(",");
                }
                self.s(")");
            }
            ExprKind::Array(xs) => {
                self.s("[");
                self.sep(xs, |pr, x| pr.expr(x));
                self.s("]");
            }
            ExprKind::StructLit { path, fields } => {
                self.s(&path.joined());
                if fields.is_empty() {
                    self.s(" {}");
                    return;
                }
                self.s(" { ");
                self.sep(fields, |pr, (n, x)| {
                    pr.s(&n.name);
                    pr.s(": ");
                    pr.expr(x);
                });
                self.s(" }");
            }
            ExprKind::Call { callee, args } => {
                self.expr(callee);
                self.s("(");
                self.sep(args, |pr, x| pr.expr(x));
                self.s(")");
            }
            ExprKind::MethodCall {
                receiver,
                method,
                args,
            } => {
                self.expr(receiver);
                self.s(".");
                self.s(&method.name);
                self.s("(");
                self.sep(args, |pr, x| pr.expr(x));
                self.s(")");
            }
            ExprKind::Field(x, f) => {
                self.expr(x);
                self.s(".");
                match f {
                    FieldName::Named(n) => self.s(&n.name),
                    FieldName::Index(i, _) => {
                        let _ = write!(self.out, "{i}");
                    }
                }
            }
            ExprKind::Index(a, b) => {
                self.expr(a);
                self.s("[");
                self.expr(b);
                self.s("]");
            }
            ExprKind::Block(b) => self.block(b),
            ExprKind::If { cond, then, els } => {
                self.s("if ");
                self.expr(cond);
                self.s(" ");
                self.block(then);
                self.else_branch(els);
            }
            ExprKind::IfLet {
                pat,
                scrutinee,
                then,
                els,
            } => {
                self.s("if let ");
                self.pat(pat);
                self.s(" = ");
                self.expr(scrutinee);
                self.s(" ");
                self.block(then);
                self.else_branch(els);
            }
            ExprKind::Match {
                scrutinee, arms, ..
            } => {
                self.s("match ");
                self.expr(scrutinee);
                self.s(" {");
                self.indent += 1;
                for arm in arms {
                    self.nl();
                    self.pat(&arm.pat);
                    if let Some(g) = &arm.guard {
                        self.s(" if ");
                        self.expr(g);
                    }
                    self.s(" => ");
                    self.expr(&arm.body);
                    self.s(",");
                }
                self.indent -= 1;
                self.nl();
                self.s("}");
            }
            ExprKind::While { cond, body } => {
                self.s("while ");
                self.expr(cond);
                self.s(" ");
                self.block(body);
            }
            ExprKind::Return(x, _) => {
                self.s("return");
                if let Some(x) = x {
                    self.s(" ");
                    self.expr(x);
                }
            }
            ExprKind::Try(x) => {
                self.expr(x);
                self.s("?");
            }
        }
    }

    fn bound(&mut self, b: &RangeBound) {
        match b {
            RangeBound::Lit(l) => self.s(&pat_lit(l)),
            RangeBound::Path(p) => self.s(&p.joined()),
        }
    }

    fn pat(&mut self, p: &Pattern) {
        match &p.kind {
            PatternKind::Literal(l) => self.s(&pat_lit(l)),
            PatternKind::Ident {
                name,
                by_ref,
                mutable,
                sub,
            } => {
                if *by_ref {
                    self.s("ref ");
                }
                if *mutable {
                    self.s("mut ");
                }
                self.s(&name.name);
                if let Some(s) = sub {
                    self.s(" @ ");
                    self.pat(s);
                }
            }
            PatternKind::NameRef(n) => self.s(&n.name),
            PatternKind::Wildcard => self.s("_"),
            PatternKind::Rest => self.s(".."),
            PatternKind::Range { lo, hi, inclusive } => {
                if let Some(l) = lo {
                    self.bound(l);
                }
                self.s(if *inclusive { "..=" } else { ".." });
                if let Some(h) = hi {
                    self.bound(h);
                }
            }
            PatternKind::Reference { mutable, inner } => {
                self.s(if *mutable { "&mut " } else { "&" });
                self.pat(inner);
            }
            PatternKind::Struct {
                path,
                fields,
                has_rest,
            } => {
                self.s(&path.joined());
                if fields.is_empty() && !has_rest {
                    self.s(" {}");
                    return;
                }
                self.s(" { ");
                self.sep(fields, |pr, f| {
                    if f.shorthand {
                        pr.pat(&f.pat);
                    } else {
                        pr.s(&f.name.name);
                        pr.s(": ");
                        pr.pat(&f.pat);
                    }
                });
                if *has_rest {
                    if !fields.is_empty() {
                        self.s(", ");
                    }
                    self.s("..");
                }
                self.s(" }");
            }
            PatternKind::TupleStruct { path, elems } => {
                self.s(&path.joined());
                self.s("(");
                self.sep(elems, |pr, x| pr.pat(x));
                self.s(")");
            }
            PatternKind::Tuple(elems) => {
                self.s("(");
                self.sep(elems, |pr, x| pr.pat(x));
                if elems.len() == 1 && !matches!(elems[0].kind, PatternKind::Rest) {
                    self.s(",");
                }
                self.s(")");
            }
            PatternKind::Grouped(inner) => {
                self.s("(");
                self.pat(inner);
                self.s(")");
            }
            PatternKind::Slice(elems) => {
                self.s("[");
                self.sep(elems, |pr, x| pr.pat(x));
                self.s("]");
            }
            PatternKind::Path(path) => self.s(&path.joined()),
            PatternKind::Or(alts) => {
                for (i, a) in alts.iter().enumerate() {
                    if i > 0 {
                        self.s(" | ");
                    }
                    self.pat(a);
                }
            }
        }
    }
}

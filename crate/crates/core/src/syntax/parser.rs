//! Recursive-descent parser for RPS source text.

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::span::SourceSpan;
use super::ParseError;

type PResult<T> = Result<T, ParseError>;

#[derive(Clone, Copy, Default)]
pub(crate) struct ExprCtx {
    /// Struct literals are not allowed where a `{` would open a block
    /// (conditions, scrutinees).
    no_struct: bool,
}

#[derive(Clone, Copy, Default)]
pub(crate) struct PatCtx {
    /// Direct element of a slice pattern: `a..` needs parentheses here.
    slice_elem: bool,
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    next_id: NodeId,
}

impl Parser {
    pub(crate) fn new(src: &str, first_id: NodeId) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
            next_id: first_id,
        })
    }

    pub(crate) fn next_id(&self) -> NodeId {
        self.next_id
    }

    fn id(&mut self) -> NodeId {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> SourceSpan {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn since(&self, start: SourceSpan) -> SourceSpan {
        start.to(self.prev_span())
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn check(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.check(t) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::expected(self.span(), expected, self.peek().describe())
    }

    fn expect(&mut self, t: &Tok, expected: &str) -> PResult<Token> {
        if self.check(t) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().span;
                Ok(Ident { name, span })
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    pub(crate) fn at_eof(&self) -> bool {
        self.check(&Tok::Eof)
    }

    pub(crate) fn expect_eof(&self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    // ---- items ----

    pub(crate) fn program(&mut self) -> PResult<Vec<Item>> {
        let mut items = Vec::new();
        while !self.at_eof() {
            items.push(self.item()?);
        }
        Ok(items)
    }

    fn item(&mut self) -> PResult<Item> {
        let start = self.span();
        let kind = match self.peek() {
            Tok::Enum => self.enum_def()?,
            Tok::Struct => self.struct_def()?,
            Tok::Const => {
                self.bump();
                let name = self.ident()?;
                self.expect(&Tok::Colon, "`:`")?;
                let ty = self.ty()?;
                self.expect(&Tok::Eq, "`=`")?;
                let value = self.expr(ExprCtx::default())?;
                self.expect(&Tok::Semi, "`;`")?;
                ItemKind::Const(ConstDef { name, ty, value })
            }
            Tok::Static => {
                self.bump();
                let mutable = self.eat(&Tok::Mut);
                let name = self.ident()?;
                self.expect(&Tok::Colon, "`:`")?;
                let ty = self.ty()?;
                self.expect(&Tok::Eq, "`=`")?;
                let value = self.expr(ExprCtx::default())?;
                self.expect(&Tok::Semi, "`;`")?;
                ItemKind::Static(StaticDef {
                    name,
                    mutable,
                    ty,
                    value,
                })
            }
            Tok::Fn => self.fn_def()?,
            _ => return Err(self.unexpected("item (`enum`, `struct`, `const`, `static` or `fn`)")),
        };
        Ok(Item {
            id: self.id(),
            span: self.since(start),
            kind,
        })
    }

    fn fields(&mut self) -> PResult<Fields> {
        if self.eat(&Tok::LParen) {
            let mut tys = Vec::new();
            while !self.check(&Tok::RParen) {
                tys.push(self.ty()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RParen, "`)`")?;
            Ok(Fields::Tuple(tys))
        } else if self.eat(&Tok::LBrace) {
            let mut named = Vec::new();
            while !self.check(&Tok::RBrace) {
                let name = self.ident()?;
                self.expect(&Tok::Colon, "`:`")?;
                named.push((name, self.ty()?));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RBrace, "`}`")?;
            Ok(Fields::Named(named))
        } else {
            Ok(Fields::Unit)
        }
    }

    fn enum_def(&mut self) -> PResult<ItemKind> {
        self.bump();
        let name = self.ident()?;
        self.expect(&Tok::LBrace, "`{`")?;
        let mut variants = Vec::new();
        while !self.check(&Tok::RBrace) {
            let vstart = self.span();
            let vname = self.ident()?;
            let fields = self.fields()?;
            variants.push(VariantDef {
                name: vname,
                fields,
                span: self.since(vstart),
            });
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::RBrace, "`}`")?;
        if variants.is_empty() {
            return Err(ParseError::new(name.span, "enums must have at least one variant"));
        }
        Ok(ItemKind::Enum(EnumDef { name, variants }))
    }

    fn struct_def(&mut self) -> PResult<ItemKind> {
        self.bump();
        let name = self.ident()?;
        let fields = self.fields()?;
        if !matches!(fields, Fields::Named(_)) {
            self.expect(&Tok::Semi, "`;`")?;
        }
        Ok(ItemKind::Struct(StructDef { name, fields }))
    }

    fn fn_def(&mut self) -> PResult<ItemKind> {
        let start = self.span();
        self.bump();
        let name = self.ident()?;
        self.expect(&Tok::LParen, "`(`")?;
        let mut params = Vec::new();
        while !self.check(&Tok::RParen) {
            let mutable = self.eat(&Tok::Mut);
            let pname = self.ident()?;
            self.expect(&Tok::Colon, "`:`")?;
            let ty = self.ty()?;
            params.push(Param {
                name: pname,
                mutable,
                ty,
            });
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::RParen, "`)`")?;
        let ret = if self.eat(&Tok::Arrow) {
            Some(self.ty()?)
        } else {
            None
        };
        let body = self.block()?;
        Ok(ItemKind::Fn(FnDef {
            name,
            params,
            ret,
            body,
            span: self.since(start),
        }))
    }

    // ---- types ----

    pub(crate) fn ty(&mut self) -> PResult<TypeExpr> {
        let start = self.span();
        let kind = match self.peek() {
            Tok::Amp | Tok::AndAnd => {
                let double = self.check(&Tok::AndAnd);
                self.bump();
                let mutable = self.eat(&Tok::Mut);
                let inner = self.ty()?;
                let span = self.since(start);
                let r = TypeExprKind::Ref {
                    mutable,
                    inner: Box::new(inner),
                };
                if double {
                    TypeExprKind::Ref {
                        mutable: false,
                        inner: Box::new(TypeExpr { span, kind: r }),
                    }
                } else {
                    r
                }
            }
            Tok::LParen => {
                self.bump();
                let mut elems = Vec::new();
                let mut trailing = false;
                while !self.check(&Tok::RParen) {
                    elems.push(self.ty()?);
                    trailing = self.eat(&Tok::Comma);
                    if !trailing {
                        break;
                    }
                }
                self.expect(&Tok::RParen, "`)`")?;
                if elems.len() == 1 && !trailing {
                    // `(T)` is just T.
                    return Ok(elems.pop().unwrap());
                }
                TypeExprKind::Tuple(elems)
            }
            Tok::LBracket => {
                self.bump();
                let elem = self.ty()?;
                if self.eat(&Tok::Semi) {
                    let len = match self.peek() {
                        Tok::Int(v, None) => *v,
                        _ => return Err(self.unexpected("array length")),
                    };
                    self.bump();
                    self.expect(&Tok::RBracket, "`]`")?;
                    TypeExprKind::Array(Box::new(elem), len)
                } else {
                    self.expect(&Tok::RBracket, "`]` or `;`")?;
                    TypeExprKind::Slice(Box::new(elem))
                }
            }
            Tok::Ident(_) => {
                let path = self.path()?;
                let mut args = Vec::new();
                if self.eat(&Tok::Lt) {
                    loop {
                        args.push(self.ty()?);
                        if !self.eat(&Tok::Comma) || self.check(&Tok::Gt) {
                            break;
                        }
                    }
                    self.expect(&Tok::Gt, "`>`")?;
                }
                TypeExprKind::Path(path, args)
            }
            _ => return Err(self.unexpected("type")),
        };
        Ok(TypeExpr {
            span: self.since(start),
            kind,
        })
    }

    fn path(&mut self) -> PResult<Path> {
        let first = self.ident()?;
        let start = first.span;
        let mut segments = vec![first];
        while self.check(&Tok::PathSep) && matches!(self.peek_at(1), Tok::Ident(_)) {
            self.bump();
            segments.push(self.ident()?);
        }
        Ok(Path {
            segments,
            span: self.since(start),
        })
    }

    // ---- statements & blocks ----

    fn block(&mut self) -> PResult<Block> {
        let start = self.expect(&Tok::LBrace, "`{`")?.span;
        let mut stmts = Vec::new();
        let mut tail = None;
        loop {
            if self.check(&Tok::RBrace) {
                break;
            }
            if self.eat(&Tok::Semi) {
                continue;
            }
            let sstart = self.span();
            if self.check(&Tok::Let) {
                stmts.push(self.let_stmt()?);
                continue;
            }
            let blocky = matches!(
                self.peek(),
                Tok::If | Tok::Match | Tok::While | Tok::LBrace
            );
            if blocky {
                let e = self.block_like_expr()?;
                if self.check(&Tok::RBrace) {
                    tail = Some(Box::new(e));
                    break;
                }
                let semi = self.eat(&Tok::Semi);
                stmts.push(Stmt {
                    id: self.id(),
                    span: self.since(sstart),
                    kind: StmtKind::Expr { expr: e, semi },
                });
                continue;
            }
            let e = self.expr(ExprCtx::default())?;
            let op = match self.peek() {
                Tok::Eq => Some(AssignOp::Assign),
                Tok::PlusEq => Some(AssignOp::Add),
                Tok::MinusEq => Some(AssignOp::Sub),
                _ => None,
            };
            if let Some(op) = op {
                self.bump();
                let value = self.expr(ExprCtx::default())?;
                self.expect(&Tok::Semi, "`;`")?;
                stmts.push(Stmt {
                    id: self.id(),
                    span: self.since(sstart),
                    kind: StmtKind::Assign {
                        target: e,
                        op,
                        value,
                    },
                });
            } else if self.eat(&Tok::Semi) {
                stmts.push(Stmt {
                    id: self.id(),
                    span: self.since(sstart),
                    kind: StmtKind::Expr { expr: e, semi: true },
                });
            } else if self.check(&Tok::RBrace) {
                tail = Some(Box::new(e));
                break;
            } else {
                return Err(self.unexpected("`;` or `}`"));
            }
        }
        self.expect(&Tok::RBrace, "`}`")?;
        Ok(Block {
            id: self.id(),
            span: self.since(start),
            stmts,
            tail,
        })
    }

    fn let_stmt(&mut self) -> PResult<Stmt> {
        let start = self.bump().span;
        let pat = self.pattern_top(PatCtx::default())?;
        let ty = if self.eat(&Tok::Colon) {
            Some(self.ty()?)
        } else {
            None
        };
        self.expect(&Tok::Eq, "`=`")?;
        let init = self.expr(ExprCtx::default())?;
        let els = if self.eat(&Tok::Else) {
            Some(self.block()?)
        } else {
            None
        };
        self.expect(&Tok::Semi, "`;`")?;
        Ok(Stmt {
            id: self.id(),
            span: self.since(start),
            kind: StmtKind::Let { pat, ty, init, els },
        })
    }

    // ---- expressions ----

    pub(crate) fn expr_top(&mut self) -> PResult<Expr> {
        self.expr(ExprCtx::default())
    }

    fn mk(&mut self, span: SourceSpan, kind: ExprKind) -> Expr {
        Expr {
            id: self.id(),
            span,
            kind,
        }
    }

    fn expr(&mut self, cx: ExprCtx) -> PResult<Expr> {
        self.or_expr(cx)
    }

    fn or_expr(&mut self, cx: ExprCtx) -> PResult<Expr> {
        let mut lhs = self.and_expr(cx)?;
        while self.eat(&Tok::OrOr) {
            let rhs = self.and_expr(cx)?;
            let span = lhs.span.to(rhs.span);
            lhs = self.mk(span, ExprKind::Binary(BinOp::Or, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self, cx: ExprCtx) -> PResult<Expr> {
        let mut lhs = self.cmp_expr(cx)?;
        while self.eat(&Tok::AndAnd) {
            let rhs = self.cmp_expr(cx)?;
            let span = lhs.span.to(rhs.span);
            lhs = self.mk(span, ExprKind::Binary(BinOp::And, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn cmp_op(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::EqEq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return None,
        })
    }

    fn cmp_expr(&mut self, cx: ExprCtx) -> PResult<Expr> {
        let lhs = self.add_expr(cx)?;
        let Some(op) = self.cmp_op() else {
            return Ok(lhs);
        };
        self.bump();
        let rhs = self.add_expr(cx)?;
        if self.cmp_op().is_some() {
            return Err(ParseError::new(
                self.span(),
                "comparison operators cannot be chained; use parentheses",
            ));
        }
        let span = lhs.span.to(rhs.span);
        Ok(self.mk(span, ExprKind::Binary(op, Box::new(lhs), Box::new(rhs))))
    }

    fn add_expr(&mut self, cx: ExprCtx) -> PResult<Expr> {
        let mut lhs = self.mul_expr(cx)?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.mul_expr(cx)?;
            let span = lhs.span.to(rhs.span);
            lhs = self.mk(span, ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)));
        }
    }

    fn mul_expr(&mut self, cx: ExprCtx) -> PResult<Expr> {
        let mut lhs = self.cast_expr(cx)?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                Tok::Percent => BinOp::Rem,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.cast_expr(cx)?;
            let span = lhs.span.to(rhs.span);
            lhs = self.mk(span, ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)));
        }
    }

    fn cast_expr(&mut self, cx: ExprCtx) -> PResult<Expr> {
        let mut e = self.unary_expr(cx)?;
        while self.eat(&Tok::As) {
            let ty = self.ty()?;
            let span = e.span.to(ty.span);
            e = self.mk(span, ExprKind::Cast(Box::new(e), ty));
        }
        Ok(e)
    }

    fn unary_expr(&mut self, cx: ExprCtx) -> PResult<Expr> {
        let start = self.span();
        match self.peek() {
            Tok::Minus | Tok::Bang | Tok::Star => {
                let op = match self.bump().tok {
                    Tok::Minus => UnOp::Neg,
                    Tok::Bang => UnOp::Not,
                    _ => UnOp::Deref,
                };
                let inner = self.unary_expr(cx)?;
                let span = start.to(inner.span);
                Ok(self.mk(span, ExprKind::Unary(op, Box::new(inner))))
            }
            Tok::Amp | Tok::AndAnd => {
                let double = self.check(&Tok::AndAnd);
                self.bump();
                let mutable = self.eat(&Tok::Mut);
                let inner = self.unary_expr(cx)?;
                let span = start.to(inner.span);
                let r = self.mk(
                    span,
                    ExprKind::Ref {
                        mutable,
                        expr: Box::new(inner),
                    },
                );
                if double {
                    Ok(self.mk(
                        span,
                        ExprKind::Ref {
                            mutable: false,
                            expr: Box::new(r),
                        },
                    ))
                } else {
                    Ok(r)
                }
            }
            _ => self.postfix_expr(cx),
        }
    }

    fn args(&mut self, close: &Tok, what: &str) -> PResult<Vec<Expr>> {
        let mut args = Vec::new();
        while !self.check(close) {
            args.push(self.expr(ExprCtx::default())?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(close, what)?;
        Ok(args)
    }

    fn postfix_expr(&mut self, cx: ExprCtx) -> PResult<Expr> {
        let mut e = self.primary_expr(cx)?;
        loop {
            match self.peek() {
                Tok::LParen => {
                    self.bump();
                    let args = self.args(&Tok::RParen, "`)`")?;
                    let span = self.since(e.span);
                    e = self.mk(
                        span,
                        ExprKind::Call {
                            callee: Box::new(e),
                            args,
                        },
                    );
                }
                Tok::Dot => {
                    self.bump();
                    match self.peek().clone() {
                        Tok::Int(v, None) => {
                            let fspan = self.bump().span;
                            let span = self.since(e.span);
                            e = self.mk(
                                span,
                                ExprKind::Field(Box::new(e), FieldName::Index(v as u32, fspan)),
                            );
                        }
                        Tok::Ident(_) => {
                            let name = self.ident()?;
                            if self.eat(&Tok::LParen) {
                                let args = self.args(&Tok::RParen, "`)`")?;
                                let span = self.since(e.span);
                                e = self.mk(
                                    span,
                                    ExprKind::MethodCall {
                                        receiver: Box::new(e),
                                        method: name,
                                        args,
                                    },
                                );
                            } else {
                                let span = self.since(e.span);
                                e = self.mk(span, ExprKind::Field(Box::new(e), FieldName::Named(name)));
                            }
                        }
                        _ => return Err(self.unexpected("field name or tuple index")),
                    }
                }
                Tok::LBracket => {
                    self.bump();
                    let idx = self.expr(ExprCtx::default())?;
                    self.expect(&Tok::RBracket, "`]`")?;
                    let span = self.since(e.span);
                    e = self.mk(span, ExprKind::Index(Box::new(e), Box::new(idx)));
                }
                Tok::Question => {
                    self.bump();
                    let span = self.since(e.span);
                    e = self.mk(span, ExprKind::Try(Box::new(e)));
                }
                _ => return Ok(e),
            }
        }
    }

    fn block_like_expr(&mut self) -> PResult<Expr> {
        let start = self.span();
        match self.peek() {
            Tok::LBrace => {
                let b = self.block()?;
                Ok(self.mk(b.span, ExprKind::Block(b)))
            }
            Tok::If => self.if_expr(),
            Tok::Match => {
                self.bump();
                let scrutinee = self.expr(ExprCtx { no_struct: true })?;
                self.expect(&Tok::LBrace, "`{`")?;
                let mut arms = Vec::new();
                while !self.check(&Tok::RBrace) {
                    let astart = self.span();
                    let pat = self.pattern_top(PatCtx::default())?;
                    let guard = if self.eat(&Tok::If) {
                        Some(self.expr(ExprCtx::default())?)
                    } else {
                        None
                    };
                    self.expect(&Tok::FatArrow, "`=>`")?;
                    let body = if matches!(self.peek(), Tok::If | Tok::Match | Tok::While | Tok::LBrace) {
                        let b = self.block_like_expr()?;
                        // A block-like arm body may still continue as an expression
                        // only when followed by an operator; keep the simple form.
                        b
                    } else {
                        self.expr(ExprCtx::default())?
                    };
                    let block_body = body.kind.is_block_like();
                    let span = self.since(astart);
                    arms.push(Arm {
                        pat,
                        guard,
                        body,
                        span,
                    });
                    if !self.eat(&Tok::Comma) && !block_body && !self.check(&Tok::RBrace) {
                        return Err(self.unexpected("`,` or `}`"));
                    }
                }
                self.expect(&Tok::RBrace, "`}`")?;
                if arms.is_empty() {
                    return Err(ParseError::new(
                        self.since(start),
                        "match expressions need at least one arm",
                    ));
                }
                let span = self.since(start);
                Ok(self.mk(
                    span,
                    ExprKind::Match {
                        scrutinee: Box::new(scrutinee),
                        arms,
                        source: MatchSource::Source,
                    },
                ))
            }
            Tok::While => {
                self.bump();
                let cond = self.expr(ExprCtx { no_struct: true })?;
                let body = self.block()?;
                let span = self.since(start);
                Ok(self.mk(
                    span,
                    ExprKind::While {
                        cond: Box::new(cond),
                        body,
                    },
                ))
            }
            _ => Err(self.unexpected("block-like expression")),
        }
    }

    fn if_expr(&mut self) -> PResult<Expr> {
        let start = self.expect(&Tok::If, "`if`")?.span;
        if self.eat(&Tok::Let) {
            let pat = self.pattern_top(PatCtx::default())?;
            self.expect(&Tok::Eq, "`=`")?;
            let scrutinee = self.expr(ExprCtx { no_struct: true })?;
            if let ExprKind::Binary(op, ..) = &scrutinee.kind {
                if op.is_logical() {
                    return Err(ParseError::new(
                        scrutinee.span,
                        "`let` chains are not supported; parenthesize the scrutinee",
                    ));
                }
            }
            let then = self.block()?;
            let els = self.else_branch()?;
            let span = self.since(start);
            return Ok(self.mk(
                span,
                ExprKind::IfLet {
                    pat,
                    scrutinee: Box::new(scrutinee),
                    then,
                    els,
                },
            ));
        }
        let cond = self.expr(ExprCtx { no_struct: true })?;
        let then = self.block()?;
        let els = self.else_branch()?;
        let span = self.since(start);
        Ok(self.mk(
            span,
            ExprKind::If {
                cond: Box::new(cond),
                then,
                els,
            },
        ))
    }

    fn else_branch(&mut self) -> PResult<Option<Box<Expr>>> {
        if !self.eat(&Tok::Else) {
            return Ok(None);
        }
        if self.check(&Tok::If) {
            Ok(Some(Box::new(self.if_expr()?)))
        } else {
            let b = self.block()?;
            Ok(Some(Box::new(self.mk(b.span, ExprKind::Block(b)))))
        }
    }

    fn can_start_expr(&self) -> bool {
        !matches!(
            self.peek(),
            Tok::Semi | Tok::RBrace | Tok::RParen | Tok::RBracket | Tok::Comma | Tok::Eof | Tok::FatArrow
        )
    }

    fn primary_expr(&mut self, cx: ExprCtx) -> PResult<Expr> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Int(value, suffix) => {
                self.bump();
                Ok(self.mk(start, ExprKind::Lit(Lit::Int { value, suffix })))
            }
            Tok::Char(c) => {
                self.bump();
                Ok(self.mk(start, ExprKind::Lit(Lit::Char(c))))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(self.mk(start, ExprKind::Lit(Lit::Str(s))))
            }
            Tok::True | Tok::False => {
                let b = self.bump().tok == Tok::True;
                Ok(self.mk(start, ExprKind::Lit(Lit::Bool(b))))
            }
            Tok::Ident(_) => {
                let path = self.path()?;
                if self.check(&Tok::LBrace) && !cx.no_struct {
                    self.bump();
                    let mut fields = Vec::new();
                    while !self.check(&Tok::RBrace) {
                        let name = self.ident()?;
                        let value = if self.eat(&Tok::Colon) {
                            self.expr(ExprCtx::default())?
                        } else {
                            // Shorthand `Point { x }`.
                            let p = Path {
                                segments: vec![name.clone()],
                                span: name.span,
                            };
                            self.mk(name.span, ExprKind::Path(p))
                        };
                        fields.push((name, value));
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(&Tok::RBrace, "`}`")?;
                    let span = self.since(start);
                    return Ok(self.mk(span, ExprKind::StructLit { path, fields }));
                }
                Ok(self.mk(path.span, ExprKind::Path(path)))
            }
            Tok::LParen => {
                self.bump();
                let mut elems = Vec::new();
                let mut trailing = false;
                while !self.check(&Tok::RParen) {
                    elems.push(self.expr(ExprCtx::default())?);
                    trailing = self.eat(&Tok::Comma);
                    if !trailing {
                        break;
                    }
                }
                self.expect(&Tok::RParen, "`)`")?;
                let span = self.since(start);
                if elems.len() == 1 && !trailing {
                    let inner = elems.pop().unwrap();
                    return Ok(self.mk(span, ExprKind::Paren(Box::new(inner))));
                }
                Ok(self.mk(span, ExprKind::Tuple(elems)))
            }
            Tok::LBracket => {
                self.bump();
                let elems = self.args(&Tok::RBracket, "`]`")?;
                let span = self.since(start);
                Ok(self.mk(span, ExprKind::Array(elems)))
            }
            Tok::LBrace | Tok::If | Tok::Match | Tok::While => self.block_like_expr(),
            Tok::Return => {
                self.bump();
                let value = if self.can_start_expr() {
                    Some(Box::new(self.expr(cx)?))
                } else {
                    None
                };
                let span = self.since(start);
                Ok(self.mk(span, ExprKind::Return(value, ReturnSource::Source)))
            }
            _ => Err(self.unexpected("expression")),
        }
    }

    // ---- patterns ----

    fn mkp(&mut self, span: SourceSpan, kind: PatternKind) -> Pattern {
        Pattern {
            id: self.id(),
            span,
            kind,
        }
    }

    pub(crate) fn pattern_top(&mut self, cx: PatCtx) -> PResult<Pattern> {
        let start = self.span();
        self.eat(&Tok::Pipe);
        let first = self.pattern_no_alt(cx)?;
        if !self.check(&Tok::Pipe) {
            return Ok(first);
        }
        let mut alts = vec![first];
        while self.eat(&Tok::Pipe) {
            alts.push(self.pattern_no_alt(cx)?);
        }
        let span = self.since(start);
        Ok(self.mkp(span, PatternKind::Or(alts)))
    }

    fn pat_lit(&mut self) -> PResult<Option<PatLit>> {
        Ok(Some(match self.peek().clone() {
            Tok::True => {
                self.bump();
                PatLit::Bool(true)
            }
            Tok::False => {
                self.bump();
                PatLit::Bool(false)
            }
            Tok::Char(c) => {
                self.bump();
                PatLit::Char(c)
            }
            Tok::Str(s) => {
                self.bump();
                PatLit::Str(s)
            }
            Tok::Int(value, suffix) => {
                self.bump();
                PatLit::Int {
                    negative: false,
                    value,
                    suffix,
                }
            }
            Tok::Minus => {
                self.bump();
                match self.peek().clone() {
                    Tok::Int(value, suffix) => {
                        self.bump();
                        PatLit::Int {
                            negative: true,
                            value,
                            suffix,
                        }
                    }
                    _ => return Err(self.unexpected("integer literal after `-`")),
                }
            }
            _ => return Ok(None),
        }))
    }

    fn range_bound(&mut self) -> PResult<RangeBound> {
        if let Some(l) = self.pat_lit()? {
            return match l {
                PatLit::Int { .. } | PatLit::Char(_) => Ok(RangeBound::Lit(l)),
                _ => Err(ParseError::new(
                    self.prev_span(),
                    "range bounds must be integer or char literals or constants",
                )),
            };
        }
        if matches!(self.peek(), Tok::Ident(_)) {
            return Ok(RangeBound::Path(self.path()?));
        }
        Err(self.unexpected("range bound"))
    }

    fn can_start_bound(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Int(..) | Tok::Char(_) | Tok::Minus | Tok::Ident(_)
        )
    }

    /// Continues a pattern whose first bound has been parsed, if a range
    /// operator follows.
    fn range_rest(&mut self, start: SourceSpan, lo: RangeBound, cx: PatCtx) -> PResult<Option<Pattern>> {
        let inclusive = match self.peek() {
            Tok::DotDotEq => true,
            Tok::DotDot => false,
            _ => return Ok(None),
        };
        self.bump();
        let hi = if inclusive {
            Some(self.range_bound()?)
        } else if self.can_start_bound() {
            Some(self.range_bound()?)
        } else {
            if cx.slice_elem {
                return Err(ParseError::new(
                    self.since(start),
                    "range-from patterns must be parenthesized inside slice patterns",
                ));
            }
            None
        };
        let span = self.since(start);
        check_literal_range(span, Some(&lo), hi.as_ref(), inclusive)?;
        Ok(Some(self.mkp(
            span,
            PatternKind::Range {
                lo: Some(lo),
                hi,
                inclusive,
            },
        )))
    }

    fn pattern_no_alt(&mut self, cx: PatCtx) -> PResult<Pattern> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Amp | Tok::AndAnd => {
                let double = self.check(&Tok::AndAnd);
                self.bump();
                let mutable = self.eat(&Tok::Mut);
                let inner = self.pattern_no_alt(PatCtx::default())?;
                if matches!(inner.kind, PatternKind::Range { .. }) {
                    return Err(ParseError::new(
                        self.since(start),
                        "ambiguous reference to a range pattern; write `&(lo..=hi)`",
                    ));
                }
                let span = self.since(start);
                let r = self.mkp(
                    span,
                    PatternKind::Reference {
                        mutable,
                        inner: Box::new(inner),
                    },
                );
                if double {
                    Ok(self.mkp(
                        span,
                        PatternKind::Reference {
                            mutable: false,
                            inner: Box::new(r),
                        },
                    ))
                } else {
                    Ok(r)
                }
            }
            Tok::LParen => {
                self.bump();
                let mut elems = Vec::new();
                let mut trailing = false;
                while !self.check(&Tok::RParen) {
                    elems.push(self.pattern_top(PatCtx::default())?);
                    trailing = self.eat(&Tok::Comma);
                    if !trailing {
                        break;
                    }
                }
                self.expect(&Tok::RParen, "`)`")?;
                let span = self.since(start);
                if elems.len() == 1 && !trailing && !matches!(elems[0].kind, PatternKind::Rest) {
                    let inner = elems.pop().unwrap();
                    return Ok(self.mkp(span, PatternKind::Grouped(Box::new(inner))));
                }
                Ok(self.mkp(span, PatternKind::Tuple(elems)))
            }
            Tok::LBracket => {
                self.bump();
                let mut elems = Vec::new();
                while !self.check(&Tok::RBracket) {
                    elems.push(self.pattern_top(PatCtx { slice_elem: true })?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(&Tok::RBracket, "`]`")?;
                let span = self.since(start);
                let rests = elems.iter().filter(|p| is_rest_like(p)).count();
                if rests > 1 {
                    return Err(ParseError::new(span, "`..` can only be used once per slice pattern"));
                }
                Ok(self.mkp(span, PatternKind::Slice(elems)))
            }
            Tok::Underscore => {
                self.bump();
                Ok(self.mkp(start, PatternKind::Wildcard))
            }
            Tok::DotDot => {
                self.bump();
                Ok(self.mkp(start, PatternKind::Rest))
            }
            Tok::DotDotEq => {
                self.bump();
                let hi = self.range_bound()?;
                let span = self.since(start);
                check_literal_range(span, None, Some(&hi), true)?;
                Ok(self.mkp(
                    span,
                    PatternKind::Range {
                        lo: None,
                        hi: Some(hi),
                        inclusive: true,
                    },
                ))
            }
            Tok::Ref | Tok::Mut => {
                let by_ref = self.eat(&Tok::Ref);
                let mutable = self.eat(&Tok::Mut);
                let name = self.ident()?;
                self.binding(start, name, by_ref, mutable, cx)
            }
            Tok::Ident(_) => {
                let path = self.path()?;
                if path.is_single() && self.check(&Tok::At) {
                    let name = path.segments.into_iter().next().unwrap();
                    return self.binding(start, name, false, false, cx);
                }
                match self.peek() {
                    Tok::LParen => {
                        self.bump();
                        let mut elems = Vec::new();
                        while !self.check(&Tok::RParen) {
                            elems.push(self.pattern_top(PatCtx::default())?);
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                        self.expect(&Tok::RParen, "`)`")?;
                        let span = self.since(start);
                        Ok(self.mkp(span, PatternKind::TupleStruct { path, elems }))
                    }
                    Tok::LBrace => {
                        self.bump();
                        let mut fields = Vec::new();
                        let mut has_rest = false;
                        while !self.check(&Tok::RBrace) {
                            if self.eat(&Tok::DotDot) {
                                has_rest = true;
                                break;
                            }
                            fields.push(self.field_pat()?);
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                        self.expect(&Tok::RBrace, "`}`")?;
                        let span = self.since(start);
                        Ok(self.mkp(
                            span,
                            PatternKind::Struct {
                                path,
                                fields,
                                has_rest,
                            },
                        ))
                    }
                    Tok::DotDot | Tok::DotDotEq => {
                        let lo = RangeBound::Path(path);
                        Ok(self.range_rest(start, lo, cx)?.expect("range operator present"))
                    }
                    _ => {
                        if path.is_single() {
                            let name = path.segments.into_iter().next().unwrap();
                            Ok(self.mkp(start, PatternKind::NameRef(name)))
                        } else {
                            Ok(self.mkp(path.span, PatternKind::Path(path)))
                        }
                    }
                }
            }
            _ => {
                let Some(lit) = self.pat_lit()? else {
                    return Err(self.unexpected("pattern"));
                };
                if matches!(lit, PatLit::Int { .. } | PatLit::Char(_)) {
                    if let Some(r) = self.range_rest(start, RangeBound::Lit(lit.clone()), cx)? {
                        return Ok(r);
                    }
                }
                let span = self.since(start);
                Ok(self.mkp(span, PatternKind::Literal(lit)))
            }
        }
    }

    fn binding(
        &mut self,
        start: SourceSpan,
        name: Ident,
        by_ref: bool,
        mutable: bool,
        cx: PatCtx,
    ) -> PResult<Pattern> {
        let sub = if self.eat(&Tok::At) {
            Some(Box::new(self.pattern_no_alt(cx)?))
        } else {
            None
        };
        let span = self.since(start);
        Ok(self.mkp(
            span,
            PatternKind::Ident {
                name,
                by_ref,
                mutable,
                sub,
            },
        ))
    }

    fn field_pat(&mut self) -> PResult<FieldPat> {
        let start = self.span();
        if matches!(self.peek(), Tok::Ref | Tok::Mut) {
            let by_ref = self.eat(&Tok::Ref);
            let mutable = self.eat(&Tok::Mut);
            let name = self.ident()?;
            let span = self.since(start);
            let pat = self.mkp(
                span,
                PatternKind::Ident {
                    name: name.clone(),
                    by_ref,
                    mutable,
                    sub: None,
                },
            );
            return Ok(FieldPat {
                name,
                pat,
                shorthand: true,
            });
        }
        let name = self.ident()?;
        if self.eat(&Tok::Colon) {
            let pat = self.pattern_top(PatCtx::default())?;
            Ok(FieldPat {
                name,
                pat,
                shorthand: false,
            })
        } else {
            let pat = self.mkp(
                name.span,
                PatternKind::Ident {
                    name: name.clone(),
                    by_ref: false,
                    mutable: false,
                    sub: None,
                },
            );
            Ok(FieldPat {
                name,
                pat,
                shorthand: true,
            })
        }
    }
}

fn is_rest_like(p: &Pattern) -> bool {
    match &p.kind {
        PatternKind::Rest => true,
        PatternKind::Ident { sub: Some(s), .. } => matches!(s.kind, PatternKind::Rest),
        _ => false,
    }
}

fn lit_order_key(l: &PatLit) -> Option<i128> {
    match l {
        PatLit::Int {
            negative, value, ..
        } => Some(if *negative {
            -(*value as i128)
        } else {
            *value as i128
        }),
        PatLit::Char(c) => Some(*c as u32 as i128),
        _ => None,
    }
}

/// Literal-bounded ranges are validated at parse time; const bounds wait for
/// type checking.
fn check_literal_range(
    span: SourceSpan,
    lo: Option<&RangeBound>,
    hi: Option<&RangeBound>,
    inclusive: bool,
) -> PResult<()> {
    let key = |b: Option<&RangeBound>| match b {
        Some(RangeBound::Lit(l)) => lit_order_key(l),
        _ => None,
    };
    if let (Some(RangeBound::Lit(a)), Some(RangeBound::Lit(b))) = (lo, hi) {
        let kinds_match = matches!(
            (a, b),
            (PatLit::Int { .. }, PatLit::Int { .. }) | (PatLit::Char(_), PatLit::Char(_))
        );
        if !kinds_match {
            return Err(ParseError::new(span, "range bounds must have the same type"));
        }
    }
    if let (Some(l), Some(h)) = (key(lo), key(hi)) {
        if (inclusive && l > h) || (!inclusive && l >= h) {
            return Err(ParseError::new(span, "lower range bound must not exceed the upper bound"));
        }
    }
    Ok(())
}

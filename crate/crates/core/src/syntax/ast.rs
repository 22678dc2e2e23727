//! Span-annotated AST of the RPS language.
//!
//! Every node carries a [`NodeId`] that is unique within its [`Program`];
//! later passes key their side tables on it.

use super::span::SourceSpan;

pub type NodeId = u32;

#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub file: String,
    pub items: Vec<Item>,
    /// First id not yet handed out. Passes that synthesise nodes draw from here.
    pub next_id: NodeId,
}

impl Program {
    pub fn fresh_id(&mut self) -> NodeId {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    pub fn functions(&self) -> impl Iterator<Item = &FnDef> {
        self.items.iter().filter_map(|i| match &i.kind {
            ItemKind::Fn(f) => Some(f),
            _ => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ident {
    pub name: String,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub segments: Vec<Ident>,
    pub span: SourceSpan,
}

impl Path {
    pub fn is_single(&self) -> bool {
        self.segments.len() == 1
    }

    pub fn last(&self) -> &Ident {
        self.segments.last().expect("paths have at least one segment")
    }

    pub fn joined(&self) -> String {
        self.segments
            .iter()
            .map(|s| s.name.as_str())
            .collect::<Vec<_>>()
            .join("::")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Item {
    pub id: NodeId,
    pub span: SourceSpan,
    pub kind: ItemKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ItemKind {
    Enum(EnumDef),
    Struct(StructDef),
    Const(ConstDef),
    Static(StaticDef),
    Fn(FnDef),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnumDef {
    pub name: Ident,
    pub variants: Vec<VariantDef>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariantDef {
    pub name: Ident,
    pub fields: Fields,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Fields {
    Unit,
    Tuple(Vec<TypeExpr>),
    Named(Vec<(Ident, TypeExpr)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructDef {
    pub name: Ident,
    pub fields: Fields,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstDef {
    pub name: Ident,
    pub ty: TypeExpr,
    pub value: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StaticDef {
    pub name: Ident,
    /// `static mut`: the only interior-mutable form in the subset.
    pub mutable: bool,
    pub ty: TypeExpr,
    pub value: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FnDef {
    pub name: Ident,
    pub params: Vec<Param>,
    pub ret: Option<TypeExpr>,
    pub body: Block,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: Ident,
    pub mutable: bool,
    pub ty: TypeExpr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TypeExpr {
    pub span: SourceSpan,
    pub kind: TypeExprKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TypeExprKind {
    Path(Path, Vec<TypeExpr>),
    Tuple(Vec<TypeExpr>),
    Array(Box<TypeExpr>, u64),
    Slice(Box<TypeExpr>),
    Ref { mutable: bool, inner: Box<TypeExpr> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IntTy {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
}

impl IntTy {
    pub const ALL: [IntTy; 6] = [
        IntTy::I8,
        IntTy::U8,
        IntTy::I16,
        IntTy::U16,
        IntTy::I32,
        IntTy::U32,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IntTy::I8 => "i8",
            IntTy::U8 => "u8",
            IntTy::I16 => "i16",
            IntTy::U16 => "u16",
            IntTy::I32 => "i32",
            IntTy::U32 => "u32",
        }
    }

    pub fn from_name(s: &str) -> Option<IntTy> {
        IntTy::ALL.into_iter().find(|t| t.name() == s)
    }

    pub fn bits(self) -> u32 {
        match self {
            IntTy::I8 | IntTy::U8 => 8,
            IntTy::I16 | IntTy::U16 => 16,
            IntTy::I32 | IntTy::U32 => 32,
        }
    }

    pub fn signed(self) -> bool {
        matches!(self, IntTy::I8 | IntTy::I16 | IntTy::I32)
    }

    pub fn min_value(self) -> i64 {
        if self.signed() {
            -(1i64 << (self.bits() - 1))
        } else {
            0
        }
    }

    pub fn max_value(self) -> i64 {
        if self.signed() {
            (1i64 << (self.bits() - 1)) - 1
        } else {
            (1i64 << self.bits()) - 1
        }
    }

    pub fn contains(self, v: i64) -> bool {
        self.min_value() <= v && v <= self.max_value()
    }

    /// Two's-complement truncation, as performed by `as`.
    pub fn wrap(self, v: i64) -> i64 {
        let bits = self.bits();
        let mask = (1i64 << bits) - 1;
        let low = v & mask;
        if self.signed() && low >= (1i64 << (bits - 1)) {
            low - (1i64 << bits)
        } else {
            low
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Lit {
    Bool(bool),
    /// Magnitude only; negation is a unary operator in expressions.
    Int { value: u64, suffix: Option<IntTy> },
    Char(char),
    Str(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub id: NodeId,
    pub span: SourceSpan,
    pub kind: ExprKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
    Deref,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchSource {
    Source,
    /// Produced by desugaring a `?` expression.
    QuestionMark,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReturnSource {
    Source,
    QuestionMark,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldName {
    Named(Ident),
    Index(u32, SourceSpan),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Lit(Lit),
    Path(Path),
    Unary(UnOp, Box<Expr>),
    Ref {
        mutable: bool,
        expr: Box<Expr>,
    },
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Cast(Box<Expr>, TypeExpr),
    Paren(Box<Expr>),
    Tuple(Vec<Expr>),
    Array(Vec<Expr>),
    StructLit {
        path: Path,
        fields: Vec<(Ident, Expr)>,
    },
    Call {
        callee: Box<Expr>,
        args: Vec<Expr>,
    },
    MethodCall {
        receiver: Box<Expr>,
        method: Ident,
        args: Vec<Expr>,
    },
    Field(Box<Expr>, FieldName),
    Index(Box<Expr>, Box<Expr>),
    Block(Block),
    If {
        cond: Box<Expr>,
        then: Block,
        els: Option<Box<Expr>>,
    },
    IfLet {
        pat: Pattern,
        scrutinee: Box<Expr>,
        then: Block,
        els: Option<Box<Expr>>,
    },
    Match {
        scrutinee: Box<Expr>,
        arms: Vec<Arm>,
        source: MatchSource,
    },
    While {
        cond: Box<Expr>,
        body: Block,
    },
    Return(Option<Box<Expr>>, ReturnSource),
    Try(Box<Expr>),
}

impl ExprKind {
    /// Block-like expressions end a statement without a semicolon.
    pub fn is_block_like(&self) -> bool {
        matches!(
            self,
            ExprKind::Block(_)
                | ExprKind::If { .. }
                | ExprKind::IfLet { .. }
                | ExprKind::Match { .. }
                | ExprKind::While { .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Arm {
    pub pat: Pattern,
    pub guard: Option<Expr>,
    pub body: Expr,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub id: NodeId,
    pub span: SourceSpan,
    pub stmts: Vec<Stmt>,
    pub tail: Option<Box<Expr>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stmt {
    pub id: NodeId,
    pub span: SourceSpan,
    pub kind: StmtKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssignOp {
    Assign,
    Add,
    Sub,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    Let {
        pat: Pattern,
        ty: Option<TypeExpr>,
        init: Expr,
        els: Option<Block>,
    },
    Expr {
        expr: Expr,
        semi: bool,
    },
    Assign {
        target: Expr,
        op: AssignOp,
        value: Expr,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pattern {
    pub id: NodeId,
    pub span: SourceSpan,
    pub kind: PatternKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PatLit {
    Bool(bool),
    Int {
        negative: bool,
        value: u64,
        suffix: Option<IntTy>,
    },
    Char(char),
    Str(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum RangeBound {
    Lit(PatLit),
    Path(Path),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldPat {
    pub name: Ident,
    pub pat: Pattern,
    /// Written as `name` / `ref name` rather than `name: pat`.
    pub shorthand: bool,
}

/// Sub-pattern kinds. `NameRef` is a bare identifier whose meaning (binding
/// versus path to a const, unit struct or unit variant) is decided during type
/// checking; every other variant is one of the thirteen sub-pattern kinds.
#[derive(Clone, Debug, PartialEq)]
pub enum PatternKind {
    Literal(PatLit),
    Ident {
        name: Ident,
        by_ref: bool,
        mutable: bool,
        sub: Option<Box<Pattern>>,
    },
    NameRef(Ident),
    Wildcard,
    Rest,
    Range {
        lo: Option<RangeBound>,
        hi: Option<RangeBound>,
        inclusive: bool,
    },
    Reference {
        mutable: bool,
        inner: Box<Pattern>,
    },
    Struct {
        path: Path,
        fields: Vec<FieldPat>,
        has_rest: bool,
    },
    TupleStruct {
        path: Path,
        elems: Vec<Pattern>,
    },
    Tuple(Vec<Pattern>),
    Grouped(Box<Pattern>),
    Slice(Vec<Pattern>),
    Path(Path),
    Or(Vec<Pattern>),
}

impl Pattern {
    /// Direct child sub-patterns in source order.
    pub fn children(&self) -> Vec<&Pattern> {
        match &self.kind {
            PatternKind::Literal(_)
            | PatternKind::NameRef(_)
            | PatternKind::Wildcard
            | PatternKind::Rest
            | PatternKind::Range { .. }
            | PatternKind::Path(_) => Vec::new(),
            PatternKind::Ident { sub, .. } => sub.iter().map(|b| &**b).collect(),
            PatternKind::Reference { inner, .. } | PatternKind::Grouped(inner) => vec![inner],
            PatternKind::Struct { fields, .. } => fields.iter().map(|f| &f.pat).collect(),
            PatternKind::TupleStruct { elems, .. }
            | PatternKind::Tuple(elems)
            | PatternKind::Slice(elems)
            | PatternKind::Or(elems) => elems.iter().collect(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            PatternKind::Literal(_) => "Literal",
            PatternKind::Ident { .. } => "Identifier",
            PatternKind::NameRef(_) => "NameRef",
            PatternKind::Wildcard => "Wildcard",
            PatternKind::Rest => "Rest",
            PatternKind::Range { .. } => "Range",
            PatternKind::Reference { .. } => "Reference",
            PatternKind::Struct { .. } => "Struct",
            PatternKind::TupleStruct { .. } => "TupleStruct",
            PatternKind::Tuple(_) => "Tuple",
            PatternKind::Grouped(_) => "Grouped",
            PatternKind::Slice(_) => "Slice",
            PatternKind::Path(_) => "Path",
            PatternKind::Or(_) => "Or",
        }
    }
}

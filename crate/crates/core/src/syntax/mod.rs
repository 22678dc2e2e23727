//! The RPS surface language: lexer, parser, AST and pretty-printer.

pub mod ast;
pub mod lexer;
mod parser;
pub mod pretty;
pub mod span;
pub mod visit;

pub use ast::*;
pub use span::{Pos, SourceSpan};

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    /// What the parser was looking for, when that is meaningful.
    pub expected: Option<String>,
}

impl ParseError {
    pub fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError {
            span,
            message: message.into(),
            expected: None,
        }
    }

    pub(crate) fn expected(span: SourceSpan, expected: &str, found: String) -> Self {
        ParseError {
            span,
            message: format!("expected {expected}, found {found}"),
            expected: Some(expected.to_string()),
        }
    }
}

/// Parses a whole `.rps` file.
pub fn parse_program(file: &str, src: &str) -> Result<Program, ParseError> {
    let mut p = parser::Parser::new(src, 0)?;
    let items = p.program()?;
    let program = Program {
        file: file.to_string(),
        items,
        next_id: p.next_id(),
    };
    check_unique_names(&program)?;
    Ok(program)
}

/// Parses a single pattern, allowing top-level alternatives.
pub fn parse_pattern(src: &str) -> Result<Pattern, ParseError> {
    let mut p = parser::Parser::new(src, 0)?;
    let pat = p.pattern_top(Default::default())?;
    p.expect_eof()?;
    Ok(pat)
}

/// Parses a single expression. Node ids start at `first_id` so the result
/// can be grafted into an existing program.
pub fn parse_expr(src: &str, first_id: NodeId) -> Result<(Expr, NodeId), ParseError> {
    let mut p = parser::Parser::new(src, first_id)?;
    let e = p.expr_top()?;
    p.expect_eof()?;
    Ok((e, p.next_id()))
}

/// Parses a type expression.
pub fn parse_type(src: &str) -> Result<TypeExpr, ParseError> {
    let mut p = parser::Parser::new(src, 0)?;
    let t = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}

fn check_unique_names(program: &Program) -> Result<(), ParseError> {
    use std::collections::HashMap;
    // Types and values live in separate namespaces, as in Rust.
    let mut types: HashMap<&str, SourceSpan> = HashMap::new();
    let mut values: HashMap<&str, SourceSpan> = HashMap::new();
    for item in &program.items {
        let (name, ns) = match &item.kind {
            ItemKind::Enum(e) => (&e.name, &mut types),
            ItemKind::Struct(s) => (&s.name, &mut types),
            ItemKind::Const(c) => (&c.name, &mut values),
            ItemKind::Static(s) => (&s.name, &mut values),
            ItemKind::Fn(f) => (&f.name, &mut values),
        };
        if ns.insert(&name.name, name.span).is_some() {
            return Err(ParseError::new(
                name.span,
                format!("`{}` is defined more than once", name.name),
            ));
        }
        if let ItemKind::Enum(e) = &item.kind {
            let mut seen = HashMap::new();
            for v in &e.variants {
                if seen.insert(&v.name.name, ()).is_some() {
                    return Err(ParseError::new(
                        v.name.span,
                        format!("variant `{}` is defined more than once", v.name.name),
                    ));
                }
            }
        }
    }
    Ok(())
}

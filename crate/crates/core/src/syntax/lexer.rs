use super::ast::IntTy;
use super::span::{Pos, SourceSpan};
use super::ParseError;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(u64, Option<IntTy>),
    Char(char),
    Str(String),
    // keywords
    As,
    Const,
    Else,
    Enum,
    False,
    Fn,
    If,
    Let,
    Match,
    Mut,
    Ref,
    Return,
    Static,
    Struct,
    True,
    While,
    Underscore,
    // punctuation
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    PathSep,
    Arrow,
    FatArrow,
    At,
    Dot,
    DotDot,
    DotDotEq,
    Amp,
    AndAnd,
    Pipe,
    OrOr,
    Bang,
    Eq,
    EqEq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    PlusEq,
    MinusEq,
    Question,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(v, _) => format!("integer `{v}`"),
            Tok::Char(c) => format!("char {c:?}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::As => "as",
            Tok::Const => "const",
            Tok::Else => "else",
            Tok::Enum => "enum",
            Tok::False => "false",
            Tok::Fn => "fn",
            Tok::If => "if",
            Tok::Let => "let",
            Tok::Match => "match",
            Tok::Mut => "mut",
            Tok::Ref => "ref",
            Tok::Return => "return",
            Tok::Static => "static",
            Tok::Struct => "struct",
            Tok::True => "true",
            Tok::While => "while",
            Tok::Underscore => "_",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::PathSep => "::",
            Tok::Arrow => "->",
            Tok::FatArrow => "=>",
            Tok::At => "@",
            Tok::Dot => ".",
            Tok::DotDot => "..",
            Tok::DotDotEq => "..=",
            Tok::Amp => "&",
            Tok::AndAnd => "&&",
            Tok::Pipe => "|",
            Tok::OrOr => "||",
            Tok::Bang => "!",
            Tok::Eq => "=",
            Tok::EqEq => "==",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Percent => "%",
            Tok::PlusEq => "+=",
            Tok::MinusEq => "-=",
            Tok::Question => "?",
            Tok::Ident(_) | Tok::Int(..) | Tok::Char(_) | Tok::Str(_) | Tok::Eof => "",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Lexer<'_> {
    fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn err(&self, start: Pos, msg: impl Into<String>) -> ParseError {
        ParseError::new(SourceSpan::new(start, self.pos()), msg)
    }

    fn skip_trivia(&mut self) -> Result<(), ParseError> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.peek2() == Some('/') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some('/') if self.peek2() == Some('*') => {
                    let start = self.pos();
                    self.bump();
                    self.bump();
                    let mut depth = 1;
                    while depth > 0 {
                        match self.bump() {
                            Some('*') if self.peek() == Some('/') => {
                                self.bump();
                                depth -= 1;
                            }
                            Some('/') if self.peek() == Some('*') => {
                                self.bump();
                                depth += 1;
                            }
                            Some(_) => {}
                            None => return Err(self.err(start, "unterminated block comment")),
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn escape(&mut self, start: Pos) -> Result<char, ParseError> {
        match self.bump() {
            Some('n') => Ok('\n'),
            Some('t') => Ok('\t'),
            Some('r') => Ok('\r'),
            Some('0') => Ok('\0'),
            Some('\\') => Ok('\\'),
            Some('\'') => Ok('\''),
            Some('"') => Ok('"'),
            Some('u') => {
                if !self.eat('{') {
                    return Err(self.err(start, "expected `{` in unicode escape"));
                }
                let mut v = 0u32;
                let mut digits = 0;
                while let Some(c) = self.peek() {
                    if c == '}' {
                        break;
                    }
                    let d = c
                        .to_digit(16)
                        .ok_or_else(|| self.err(start, "invalid hex digit in unicode escape"))?;
                    v = v.saturating_mul(16).saturating_add(d);
                    digits += 1;
                    self.bump();
                }
                if !self.eat('}') || digits == 0 || digits > 6 {
                    return Err(self.err(start, "malformed unicode escape"));
                }
                char::from_u32(v).ok_or_else(|| self.err(start, "invalid unicode scalar value"))
            }
            _ => Err(self.err(start, "unknown escape sequence")),
        }
    }

    fn number(&mut self, start: Pos) -> Result<Tok, ParseError> {
        let mut digits = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || c == '_' {
                if c != '_' {
                    digits.push(c);
                }
                self.bump();
            } else {
                break;
            }
        }
        let value: u64 = digits
            .parse()
            .map_err(|_| self.err(start, "integer literal too large"))?;
        let suffix = if self.peek().is_some_and(|c| c == 'i' || c == 'u') {
            let mut s = String::new();
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() {
                    s.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            Some(
                IntTy::from_name(&s)
                    .ok_or_else(|| self.err(start, format!("unknown integer suffix `{s}`")))?,
            )
        } else {
            None
        };
        Ok(Tok::Int(value, suffix))
    }

    fn next_token(&mut self) -> Result<Token, ParseError> {
        self.skip_trivia()?;
        let start = self.pos();
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let tok = self.number(start)?;
            return Ok(Token {
                tok,
                span: SourceSpan::new(start, self.pos()),
            });
        }
        let Some(c) = self.bump() else {
            return Ok(Token {
                tok: Tok::Eof,
                span: SourceSpan::new(start, start),
            });
        };
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '@' => Tok::At,
            '?' => Tok::Question,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '%' => Tok::Percent,
            ':' => {
                if self.eat(':') {
                    Tok::PathSep
                } else {
                    Tok::Colon
                }
            }
            '.' => {
                if self.eat('.') {
                    if self.eat('=') {
                        Tok::DotDotEq
                    } else if self.peek() == Some('.') {
                        return Err(self.err(start, "`...` range patterns are not supported; use `..=`"));
                    } else {
                        Tok::DotDot
                    }
                } else {
                    Tok::Dot
                }
            }
            '&' => {
                if self.eat('&') {
                    Tok::AndAnd
                } else {
                    Tok::Amp
                }
            }
            '|' => {
                if self.eat('|') {
                    Tok::OrOr
                } else {
                    Tok::Pipe
                }
            }
            '!' => {
                if self.eat('=') {
                    Tok::Ne
                } else {
                    Tok::Bang
                }
            }
            '=' => {
                if self.eat('=') {
                    Tok::EqEq
                } else if self.eat('>') {
                    Tok::FatArrow
                } else {
                    Tok::Eq
                }
            }
            '<' => {
                if self.eat('=') {
                    Tok::Le
                } else {
                    Tok::Lt
                }
            }
            '>' => {
                if self.eat('=') {
                    Tok::Ge
                } else {
                    Tok::Gt
                }
            }
            '+' => {
                if self.eat('=') {
                    Tok::PlusEq
                } else {
                    Tok::Plus
                }
            }
            '-' => {
                if self.eat('=') {
                    Tok::MinusEq
                } else if self.eat('>') {
                    Tok::Arrow
                } else {
                    Tok::Minus
                }
            }
            '\'' => {
                let ch = match self.bump() {
                    Some('\\') => self.escape(start)?,
                    Some('\'') | None => return Err(self.err(start, "empty char literal")),
                    Some(ch) => ch,
                };
                if !self.eat('\'') {
                    return Err(self.err(start, "unterminated char literal"));
                }
                Tok::Char(ch)
            }
            '"' => {
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('"') => break,
                        Some('\\') => s.push(self.escape(start)?),
                        Some(ch) => s.push(ch),
                        None => return Err(self.err(start, "unterminated string literal")),
                    }
                }
                Tok::Str(s)
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::from(c);
                while let Some(n) = self.peek() {
                    if n.is_alphanumeric() || n == '_' {
                        s.push(n);
                        self.bump();
                    } else {
                        break;
                    }
                }
                keyword(&s).unwrap_or(Tok::Ident(s))
            }
            other => return Err(self.err(start, format!("unexpected character {other:?}"))),
        };
        Ok(Token {
            tok,
            span: SourceSpan::new(start, self.pos()),
        })
    }

}

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "as" => Tok::As,
        "const" => Tok::Const,
        "else" => Tok::Else,
        "enum" => Tok::Enum,
        "false" => Tok::False,
        "fn" => Tok::Fn,
        "if" => Tok::If,
        "let" => Tok::Let,
        "match" => Tok::Match,
        "mut" => Tok::Mut,
        "ref" => Tok::Ref,
        "return" => Tok::Return,
        "static" => Tok::Static,
        "struct" => Tok::Struct,
        "true" => Tok::True,
        "while" => Tok::While,
        "_" => Tok::Underscore,
        _ => return None,
    })
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut lx = Lexer {
        chars: src.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        let t = lx.next_token()?;
        let eof = t.tok == Tok::Eof;
        out.push(t);
        if eof {
            return Ok(out);
        }
    }
}

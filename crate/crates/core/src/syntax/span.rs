use std::fmt;

use serde::{Serialize, Serializer};

/// A 1-based line/column position. Columns count Unicode scalar values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub const fn new(line: u32, col: u32) -> Self {
        Pos { line, col }
    }
}

/// Source region of an AST node. `end` is exclusive.
///
/// Spans do not carry the file name; every program is a single file and
/// [`crate::syntax::Program::file`] names it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceSpan {
    pub start: Pos,
    pub end: Pos,
}

impl SourceSpan {
    pub const DUMMY: SourceSpan = SourceSpan {
        start: Pos { line: 0, col: 0 },
        end: Pos { line: 0, col: 0 },
    };

    pub fn new(start: Pos, end: Pos) -> Self {
        debug_assert!(start <= end, "span start after end");
        SourceSpan { start, end }
    }

    /// Smallest span covering both.
    pub fn to(self, other: SourceSpan) -> SourceSpan {
        SourceSpan {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }

    pub fn contains(&self, other: &SourceSpan) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn is_dummy(&self) -> bool {
        *self == Self::DUMMY
    }

    /// Renders as `file:l:c-l:c`.
    pub fn display_in<'a>(&'a self, file: &'a str) -> impl fmt::Display + 'a {
        struct D<'a>(&'a SourceSpan, &'a str);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}:{}", self.1, self.0)
            }
        }
        D(self, file)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}-{}:{}",
            self.start.line, self.start.col, self.end.line, self.end.col
        )
    }
}

impl Serialize for SourceSpan {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn containment_and_join() {
        let a = SourceSpan::new(Pos::new(1, 1), Pos::new(1, 10));
        let b = SourceSpan::new(Pos::new(1, 3), Pos::new(1, 5));
        let c = SourceSpan::new(Pos::new(2, 1), Pos::new(2, 4));
        assert!(a.contains(&b));
        assert!(!b.contains(&a));
        let j = a.to(c);
        assert!(j.contains(&a) && j.contains(&c));
        assert_eq!(j.to_string(), "1:1-2:4");
    }
}

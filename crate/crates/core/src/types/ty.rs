use crate::syntax::IntTy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct EnumId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct StructId(pub u32);

/// Resolved types. `Option<T>` and `Result<T, E>` are ordinary enums
/// instantiated once per payload type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ty {
    Bool,
    Char,
    Int(IntTy),
    Str,
    Enum(EnumId),
    Struct(StructId),
    /// The empty tuple is the unit type.
    Tuple(Vec<Ty>),
    Array(Box<Ty>, u64),
    Slice(Box<Ty>),
    Ref { mutable: bool, inner: Box<Ty> },
    /// Type of diverging expressions (`return`, `panic`).
    Never,
}

impl Ty {
    pub fn unit() -> Ty {
        Ty::Tuple(Vec::new())
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Ty::Tuple(v) if v.is_empty())
    }

    pub fn reference(inner: Ty) -> Ty {
        Ty::Ref {
            mutable: false,
            inner: Box::new(inner),
        }
    }

    /// Strips every layer of reference.
    pub fn peel(&self) -> &Ty {
        let mut t = self;
        while let Ty::Ref { inner, .. } = t {
            t = inner;
        }
        t
    }

    pub fn int(&self) -> Option<IntTy> {
        match self.peel() {
            Ty::Int(i) => Some(*i),
            _ => None,
        }
    }

    /// Element type of arrays and slices, seen through references.
    pub fn elem(&self) -> Option<&Ty> {
        match self.peel() {
            Ty::Array(e, _) | Ty::Slice(e) => Some(e),
            _ => None,
        }
    }
}

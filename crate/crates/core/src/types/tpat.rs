//! Typed patterns: the pattern tree after name resolution, with a type on
//! every node and implicit reference nodes made explicit.

use std::collections::BTreeMap;

use super::env::TypeEnv;
use super::space::{value_space_of, ProductSpace, SliceSpace, Space};
use super::ty::{EnumId, StructId, Ty};
use crate::runtime::Value;
use crate::syntax::{NodeId, SourceSpan};

/// What a struct-like pattern constructs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ctor {
    Variant(EnumId, u32),
    Struct(StructId),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TPat {
    /// Id of the source pattern node, or a fresh id for implicit nodes.
    pub id: NodeId,
    pub span: SourceSpan,
    pub ty: Ty,
    pub kind: TPatKind,
    /// Inserted by match ergonomics rather than written in the source.
    pub implicit: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TPatKind {
    Literal(Value),
    Binding {
        name: String,
        by_ref: bool,
        mutable: bool,
        /// Type of the bound variable; a reference when bound by reference.
        binding_ty: Ty,
        sub: Option<Box<TPat>>,
    },
    Wildcard,
    Rest,
    /// Closed interval over integer values or char scalar values.
    Range {
        lo: i64,
        hi: i64,
        /// As written, for reports.
        text: String,
    },
    Reference {
        mutable: bool,
        inner: Box<TPat>,
    },
    Struct {
        ctor: Ctor,
        /// Field index and pattern, in source order.
        fields: Vec<(usize, TPat)>,
        has_rest: bool,
    },
    TupleStruct {
        ctor: Ctor,
        elems: Vec<TPat>,
    },
    Tuple(Vec<TPat>),
    Grouped(Box<TPat>),
    Slice {
        elems: Vec<TPat>,
        /// `Some(n)` for arrays of length n, `None` for dynamic slices.
        array_len: Option<u64>,
    },
    /// Path to a constant.
    Const {
        name: String,
        value: Value,
    },
    /// Path to a fieldless enum variant.
    UnitVariant(EnumId, u32),
    /// Path to a fieldless struct.
    UnitStruct(StructId),
    Or(Vec<TPat>),
}

impl TPat {
    pub fn children(&self) -> Vec<&TPat> {
        match &self.kind {
            TPatKind::Literal(_)
            | TPatKind::Wildcard
            | TPatKind::Rest
            | TPatKind::Range { .. }
            | TPatKind::Const { .. }
            | TPatKind::UnitVariant(..)
            | TPatKind::UnitStruct(_) => Vec::new(),
            TPatKind::Binding { sub, .. } => sub.iter().map(|b| &**b).collect(),
            TPatKind::Reference { inner, .. } | TPatKind::Grouped(inner) => vec![inner],
            TPatKind::Struct { fields, .. } => fields.iter().map(|(_, p)| p).collect(),
            TPatKind::TupleStruct { elems, .. }
            | TPatKind::Tuple(elems)
            | TPatKind::Slice { elems, .. }
            | TPatKind::Or(elems) => elems.iter().collect(),
        }
    }

    /// One of the thirteen sub-pattern kinds.
    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            TPatKind::Literal(_) => "Literal",
            TPatKind::Binding { .. } => "Identifier",
            TPatKind::Wildcard => "Wildcard",
            TPatKind::Rest => "Rest",
            TPatKind::Range { .. } => "Range",
            TPatKind::Reference { .. } => "Reference",
            TPatKind::Struct { .. } => "Struct",
            TPatKind::TupleStruct { .. } => "TupleStruct",
            TPatKind::Tuple(_) => "Tuple",
            TPatKind::Grouped(_) => "Grouped",
            TPatKind::Slice { .. } => "Slice",
            TPatKind::Const { .. } | TPatKind::UnitVariant(..) | TPatKind::UnitStruct(_) => "Path",
            TPatKind::Or(_) => "Or",
        }
    }

    /// `..` or `name @ ..`: occupies no position of its own.
    pub fn is_rest_like(&self) -> bool {
        match &self.kind {
            TPatKind::Rest => true,
            TPatKind::Binding { sub: Some(s), .. } => s.is_rest_like(),
            _ => false,
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a TPat)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    /// Variables bound anywhere in the pattern, in source order.
    pub fn bindings(&self) -> Vec<(&str, &Ty)> {
        let mut out = Vec::new();
        self.walk(&mut |p| {
            if let TPatKind::Binding {
                name, binding_ty, ..
            } = &p.kind
            {
                out.push((name.as_str(), binding_ty));
            }
        });
        out
    }
}

/// Splits positional elements around a rest element.
///
/// Returns `(prefix, suffix, has_rest)`; rest-like elements are dropped.
pub fn split_rest(elems: &[TPat]) -> (&[TPat], &[TPat], bool) {
    match elems.iter().position(TPat::is_rest_like) {
        Some(r) => (&elems[..r], &elems[r + 1..], true),
        None => (elems, &[], false),
    }
}

/// Maps elements of a tuple-like pattern onto the `n` positions they match.
pub fn positions(elems: &[TPat], n: usize) -> Vec<(usize, &TPat)> {
    let (pre, suf, _) = split_rest(elems);
    let mut out: Vec<(usize, &TPat)> = pre.iter().enumerate().collect();
    out.extend(suf.iter().enumerate().map(|(j, p)| (n - suf.len() + j, p)));
    out
}

/// Field types of a constructor.
pub fn ctor_fields(ctor: Ctor, env: &TypeEnv) -> &[Ty] {
    match ctor {
        Ctor::Variant(e, v) => &env.variant(e, v).fields.tys,
        Ctor::Struct(s) => &env.struct_info(s).fields.tys,
    }
}

/// Exactly the set of values the pattern matches.
pub fn denotation(p: &TPat, env: &TypeEnv) -> Space {
    let top = || value_space_of(&p.ty, env);
    match &p.kind {
        TPatKind::Wildcard | TPatKind::Rest | TPatKind::UnitStruct(_) => top(),
        TPatKind::Binding { sub, .. } => match sub {
            Some(s) => denotation(s, env),
            None => top(),
        },
        TPatKind::Literal(v) | TPatKind::Const { value: v, .. } => point(v, &p.ty, env),
        TPatKind::Range { lo, hi, .. } => top().intersect(&match p.ty.peel() {
            Ty::Int(i) => Space::Int(*i, super::space::IntervalSet::range(*lo, *hi)),
            Ty::Char => Space::Char(super::space::IntervalSet::range(*lo, *hi)),
            t => panic!("range pattern of type {t:?}"),
        }),
        TPatKind::Reference { inner, .. } | TPatKind::Grouped(inner) => denotation(inner, env),
        TPatKind::Or(alts) => alts
            .iter()
            .map(|a| denotation(a, env))
            .reduce(|a, b| a.union(&b))
            .expect("or-patterns have alternatives"),
        TPatKind::UnitVariant(e, v) => variant_space(*e, *v, ProductSpace::unit()),
        TPatKind::Struct { ctor, fields, .. } => {
            let tys = ctor_fields(*ctor, env);
            let mut f: Vec<Space> = tys.iter().map(|t| value_space_of(t, env)).collect();
            for (i, sp) in fields {
                f[*i] = f[*i].intersect(&denotation(sp, env));
            }
            ctor_space(*ctor, ProductSpace::from_box(f))
        }
        TPatKind::TupleStruct { ctor, elems } => {
            let tys = ctor_fields(*ctor, env);
            ctor_space(*ctor, positional(tys, elems, env))
        }
        TPatKind::Tuple(elems) => match p.ty.peel() {
            Ty::Tuple(ts) => Space::Product(positional(ts, elems, env)),
            t => panic!("tuple pattern of type {t:?}"),
        },
        TPatKind::Slice { elems, .. } => match p.ty.peel() {
            Ty::Array(e, n) => Space::Product(positional(&vec![(**e).clone(); *n as usize], elems, env)),
            Ty::Slice(e) => Space::Slice(slice_denotation(e, elems, env)),
            t => panic!("slice pattern of type {t:?}"),
        },
    }
}

fn point(v: &Value, ty: &Ty, env: &TypeEnv) -> Space {
    match (v, ty.peel()) {
        (Value::Bool(b), _) => Space::bool_point(*b),
        (Value::Int(i, x), _) => Space::Int(*i, super::space::IntervalSet::point(*x)),
        (Value::Char(c), _) => Space::Char(super::space::IntervalSet::point(*c as i64)),
        (Value::Str(s), _) => Space::Str(super::space::StrSet::point(s)),
        (Value::Tuple(xs), Ty::Tuple(ts)) if xs.is_empty() && ts.is_empty() => {
            Space::Product(ProductSpace::unit())
        }
        (v, t) => panic!("no point space for {v:?} of {}", env.show(t)),
    }
}

fn variant_space(e: EnumId, v: u32, payload: ProductSpace) -> Space {
    let mut m = BTreeMap::new();
    if !payload.is_empty() {
        m.insert(v, payload);
    }
    Space::Enum(e, m)
}

fn ctor_space(ctor: Ctor, payload: ProductSpace) -> Space {
    match ctor {
        Ctor::Variant(e, v) => variant_space(e, v, payload),
        Ctor::Struct(_) => Space::Product(payload),
    }
}

fn positional(tys: &[Ty], elems: &[TPat], env: &TypeEnv) -> ProductSpace {
    let mut f: Vec<Space> = tys.iter().map(|t| value_space_of(t, env)).collect();
    for (i, sp) in positions(elems, tys.len()) {
        f[i] = denotation(sp, env);
    }
    ProductSpace::from_box(f)
}

fn slice_denotation(elem: &Ty, elems: &[TPat], env: &TypeEnv) -> SliceSpace {
    let w = env.slice_width;
    let (pre, suf, has_rest) = split_rest(elems);
    let (k, m) = (pre.len(), suf.len());
    assert!(k + m <= w, "slice pattern wider than the tracked width");
    let et = value_space_of(elem, env);
    let pre_d: Vec<Space> = pre.iter().map(|p| denotation(p, env)).collect();
    let suf_d: Vec<Space> = suf.iter().map(|p| denotation(p, env)).collect();
    let build = |len: usize| -> ProductSpace {
        let mut f = vec![et.clone(); len];
        for (i, d) in pre_d.iter().enumerate() {
            f[i] = d.clone();
        }
        for (j, d) in suf_d.iter().enumerate() {
            f[len - m + j] = d.clone();
        }
        ProductSpace::from_box(f)
    };
    let exact = (0..=2 * w)
        .map(|len| {
            if (has_rest && len >= k + m) || (!has_rest && len == k) {
                build(len)
            } else {
                ProductSpace::empty(len)
            }
        })
        .collect();
    let tail = if has_rest {
        build(2 * w)
    } else {
        ProductSpace::empty(2 * w)
    };
    SliceSpace::new(w, exact, tail)
}

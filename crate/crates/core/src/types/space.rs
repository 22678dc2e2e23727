//! Exact value spaces.
//!
//! A [`Space`] is a set of values of one type. Every operation is exact:
//! integers and chars are interval sets, strings are finite or cofinite sets,
//! products are unions of boxes and dynamic slices are indexed by length with
//! one bucket for all long slices. The bucket is exact because patterns can
//! only observe a bounded prefix and suffix of a slice; see [`SliceSpace`].

use std::collections::{BTreeMap, BTreeSet};

use super::env::TypeEnv;
use super::ty::{EnumId, Ty};
use crate::runtime::Value;
use crate::syntax::IntTy;

/// Sorted, disjoint, non-adjacent closed intervals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntervalSet {
    ivs: Vec<(i64, i64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { ivs: Vec::new() }
    }

    pub fn range(lo: i64, hi: i64) -> Self {
        if lo > hi {
            Self::empty()
        } else {
            IntervalSet { ivs: vec![(lo, hi)] }
        }
    }

    pub fn point(v: i64) -> Self {
        Self::range(v, v)
    }

    pub fn from_intervals(mut ivs: Vec<(i64, i64)>) -> Self {
        ivs.retain(|(a, b)| a <= b);
        ivs.sort_unstable();
        let mut out: Vec<(i64, i64)> = Vec::with_capacity(ivs.len());
        for (a, b) in ivs {
            match out.last_mut() {
                Some(last) if a <= last.1.saturating_add(1) => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        IntervalSet { ivs: out }
    }

    pub fn intervals(&self) -> &[(i64, i64)] {
        &self.ivs
    }

    pub fn is_empty(&self) -> bool {
        self.ivs.is_empty()
    }

    pub fn contains(&self, v: i64) -> bool {
        let i = self.ivs.partition_point(|&(_, b)| b < v);
        i < self.ivs.len() && self.ivs[i].0 <= v
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut all = self.ivs.clone();
        all.extend_from_slice(&other.ivs);
        Self::from_intervals(all)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.ivs.len() && j < other.ivs.len() {
            let (a0, a1) = self.ivs[i];
            let (b0, b1) = other.ivs[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet { ivs: out }
    }

    pub fn subtract(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for &(a0, a1) in &self.ivs {
            let mut lo = a0;
            let mut consumed = false;
            for &(b0, b1) in &other.ivs {
                if b1 < lo || b0 > a1 {
                    continue;
                }
                if b0 > lo {
                    out.push((lo, b0 - 1));
                }
                if b1 >= a1 {
                    consumed = true;
                    break;
                }
                lo = b1 + 1;
            }
            if !consumed {
                out.push((lo, a1));
            }
        }
        IntervalSet { ivs: out }
    }

    /// Number of members.
    pub fn len(&self) -> u64 {
        self.ivs.iter().map(|(a, b)| (b - a) as u64 + 1).sum()
    }

    /// The member with the smallest magnitude; non-negative wins ties.
    pub fn closest_to_zero(&self) -> Option<i64> {
        self.ivs
            .iter()
            .map(|&(a, b)| 0i64.clamp(a, b))
            .min_by_key(|v| (v.unsigned_abs(), *v < 0))
    }
}

/// Strings: either a finite set or the complement of one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StrSet {
    Finite(BTreeSet<String>),
    Cofinite(BTreeSet<String>),
}

impl StrSet {
    pub fn top() -> Self {
        StrSet::Cofinite(BTreeSet::new())
    }

    pub fn point(s: &str) -> Self {
        StrSet::Finite([s.to_string()].into())
    }

    fn contains(&self, s: &str) -> bool {
        match self {
            StrSet::Finite(set) => set.contains(s),
            StrSet::Cofinite(set) => !set.contains(s),
        }
    }

    fn is_empty(&self) -> bool {
        matches!(self, StrSet::Finite(s) if s.is_empty())
    }

    fn complement(&self) -> Self {
        match self {
            StrSet::Finite(s) => StrSet::Cofinite(s.clone()),
            StrSet::Cofinite(s) => StrSet::Finite(s.clone()),
        }
    }

    fn intersect(&self, other: &Self) -> Self {
        use StrSet::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a.intersection(b).cloned().collect()),
            (Finite(a), Cofinite(b)) | (Cofinite(b), Finite(a)) => {
                Finite(a.difference(b).cloned().collect())
            }
            (Cofinite(a), Cofinite(b)) => Cofinite(a.union(b).cloned().collect()),
        }
    }

    fn union(&self, other: &Self) -> Self {
        self.complement()
            .intersect(&other.complement())
            .complement()
    }

    fn subtract(&self, other: &Self) -> Self {
        self.intersect(&other.complement())
    }

    fn witness(&self) -> Option<String> {
        match self {
            StrSet::Finite(s) => s.iter().next().cloned(),
            StrSet::Cofinite(s) => (0..)
                .map(|i| if i == 0 { String::new() } else { format!("s{i}") })
                .find(|c| !s.contains(c)),
        }
    }
}

/// A union of boxes. Each box is a list of factor spaces, one per position;
/// no box has an empty factor.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductSpace {
    arity: usize,
    boxes: Vec<Vec<Space>>,
}

impl ProductSpace {
    pub fn empty(arity: usize) -> Self {
        ProductSpace {
            arity,
            boxes: Vec::new(),
        }
    }

    pub fn from_box(factors: Vec<Space>) -> Self {
        let arity = factors.len();
        if factors.iter().any(Space::is_empty) {
            return Self::empty(arity);
        }
        ProductSpace {
            arity,
            boxes: vec![factors],
        }
    }

    pub fn unit() -> Self {
        Self::from_box(Vec::new())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn boxes(&self) -> &[Vec<Space>] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn contains(&self, vals: &[Value]) -> bool {
        vals.len() == self.arity
            && self
                .boxes
                .iter()
                .any(|b| b.iter().zip(vals).all(|(s, v)| s.contains(v)))
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.arity, other.arity);
        let mut boxes = self.boxes.clone();
        boxes.extend(other.boxes.iter().cloned());
        Self::compact(self.arity, boxes)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        debug_assert_eq!(self.arity, other.arity);
        let mut boxes = Vec::new();
        for a in &self.boxes {
            for b in &other.boxes {
                if let Some(c) = box_intersect(a, b) {
                    boxes.push(c);
                }
            }
        }
        Self::compact(self.arity, boxes)
    }

    pub fn subtract(&self, other: &Self) -> Self {
        debug_assert_eq!(self.arity, other.arity);
        let mut cur = self.boxes.clone();
        for b in &other.boxes {
            let mut next = Vec::new();
            for a in &cur {
                box_subtract(a, b, &mut next);
            }
            cur = Self::compact(self.arity, next).boxes;
            if cur.is_empty() {
                break;
            }
        }
        ProductSpace {
            arity: self.arity,
            boxes: cur,
        }
    }

    /// Drops duplicates and merges boxes that differ in a single factor.
    fn compact(arity: usize, mut boxes: Vec<Vec<Space>>) -> Self {
        boxes.retain(|b| !b.iter().any(Space::is_empty));
        if arity == 0 {
            boxes.truncate(1);
            return ProductSpace { arity, boxes };
        }
        let mut merged = true;
        while merged {
            merged = false;
            'outer: for i in 0..boxes.len() {
                for j in i + 1..boxes.len() {
                    let diff: Vec<usize> = (0..arity)
                        .filter(|&k| boxes[i][k] != boxes[j][k])
                        .collect();
                    if diff.len() <= 1 {
                        let other = boxes.swap_remove(j);
                        if let Some(&k) = diff.first() {
                            boxes[i][k] = boxes[i][k].union(&other[k]);
                        }
                        merged = true;
                        break 'outer;
                    }
                }
            }
        }
        ProductSpace { arity, boxes }
    }

    fn witness(&self, tys: &[Ty], env: &TypeEnv) -> Option<Vec<Value>> {
        let b = self.boxes.first()?;
        b.iter().zip(tys).map(|(s, t)| s.witness(t, env)).collect()
    }
}

fn box_intersect(a: &[Space], b: &[Space]) -> Option<Vec<Space>> {
    let mut out = Vec::with_capacity(a.len());
    for (x, y) in a.iter().zip(b) {
        let s = x.intersect(y);
        if s.is_empty() {
            return None;
        }
        out.push(s);
    }
    Some(out)
}

/// Disjoint decomposition of `a - b`.
fn box_subtract(a: &[Space], b: &[Space], out: &mut Vec<Vec<Space>>) {
    let Some(common) = box_intersect(a, b) else {
        out.push(a.to_vec());
        return;
    };
    for i in 0..a.len() {
        let rest = a[i].subtract(&b[i]);
        if rest.is_empty() {
            continue;
        }
        let mut nb = Vec::with_capacity(a.len());
        nb.extend_from_slice(&common[..i]);
        nb.push(rest);
        nb.extend_from_slice(&a[i + 1..]);
        out.push(nb);
    }
}

/// Slices of one element type.
///
/// Lengths `0..=2W` are tracked exactly, one product per length. All longer
/// slices share a single product of arity `2W`: the first `W` factors
/// constrain the first `W` elements and the last `W` factors the last `W`
/// elements; the elements in between are unconstrained. A slice pattern with
/// at most `W` non-rest elements can only inspect such a prefix and suffix,
/// so the representation is closed under every operation and exact.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceSpace {
    width: usize,
    exact: Vec<ProductSpace>,
    tail: ProductSpace,
}

impl SliceSpace {
    pub fn width(&self) -> usize {
        self.width
    }

    /// Longest length stored explicitly.
    pub fn max_exact(&self) -> usize {
        2 * self.width
    }

    pub fn exact(&self, len: usize) -> &ProductSpace {
        &self.exact[len]
    }

    pub fn tail(&self) -> &ProductSpace {
        &self.tail
    }

    pub fn new(width: usize, exact: Vec<ProductSpace>, tail: ProductSpace) -> Self {
        debug_assert_eq!(exact.len(), 2 * width + 1);
        debug_assert_eq!(tail.arity(), 2 * width);
        SliceSpace { width, exact, tail }
    }

    fn zip(&self, other: &Self, f: impl Fn(&ProductSpace, &ProductSpace) -> ProductSpace) -> Self {
        assert_eq!(self.width, other.width, "slice spaces of different widths");
        SliceSpace {
            width: self.width,
            exact: self
                .exact
                .iter()
                .zip(&other.exact)
                .map(|(a, b)| f(a, b))
                .collect(),
            tail: f(&self.tail, &other.tail),
        }
    }

    fn is_empty(&self) -> bool {
        self.exact.iter().all(ProductSpace::is_empty) && self.tail.is_empty()
    }

    fn contains(&self, xs: &[Value]) -> bool {
        if xs.len() <= 2 * self.width {
            self.exact[xs.len()].contains(xs)
        } else {
            let mut key: Vec<Value> = xs[..self.width].to_vec();
            key.extend_from_slice(&xs[xs.len() - self.width..]);
            self.tail.contains(&key)
        }
    }

    fn witness(&self, elem: &Ty, env: &TypeEnv) -> Option<Vec<Value>> {
        for (len, p) in self.exact.iter().enumerate() {
            if !p.is_empty() {
                return p.witness(&vec![elem.clone(); len], env);
            }
        }
        let mut key = self.tail.witness(&vec![elem.clone(); 2 * self.width], env)?;
        let middle = value_space_of(elem, env).witness(elem, env)?;
        key.insert(self.width, middle);
        Some(key)
    }
}

/// A set of values of one type.
#[derive(Clone, Debug, PartialEq)]
pub enum Space {
    Bool { t: bool, f: bool },
    Int(IntTy, IntervalSet),
    Char(IntervalSet),
    Str(StrSet),
    /// Tuples, structs and arrays. Unit is the arity-0 product.
    Product(ProductSpace),
    /// Enum values by variant; a missing variant contributes nothing.
    Enum(EnumId, BTreeMap<u32, ProductSpace>),
    Slice(SliceSpace),
}

/// Valid `char` scalar values.
pub fn char_top() -> IntervalSet {
    IntervalSet::from_intervals(vec![(0, 0xD7FF), (0xE000, 0x10FFFF)])
}

impl Space {
    pub fn bool_point(b: bool) -> Space {
        Space::Bool { t: b, f: !b }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Space::Bool { t, f } => !t && !f,
            Space::Int(_, s) | Space::Char(s) => s.is_empty(),
            Space::Str(s) => s.is_empty(),
            Space::Product(p) => p.is_empty(),
            Space::Enum(_, m) => m.values().all(ProductSpace::is_empty),
            Space::Slice(s) => s.is_empty(),
        }
    }

    /// The empty space of the same type.
    pub fn empty_like(&self) -> Space {
        match self {
            Space::Bool { .. } => Space::Bool { t: false, f: false },
            Space::Int(i, _) => Space::Int(*i, IntervalSet::empty()),
            Space::Char(_) => Space::Char(IntervalSet::empty()),
            Space::Str(_) => Space::Str(StrSet::Finite(BTreeSet::new())),
            Space::Product(p) => Space::Product(ProductSpace::empty(p.arity)),
            Space::Enum(e, _) => Space::Enum(*e, BTreeMap::new()),
            Space::Slice(s) => Space::Slice(SliceSpace {
                width: s.width,
                exact: s.exact.iter().map(|p| ProductSpace::empty(p.arity)).collect(),
                tail: ProductSpace::empty(s.tail.arity),
            }),
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (Space::Bool { t, f }, Value::Bool(b)) => {
                if *b {
                    *t
                } else {
                    *f
                }
            }
            (Space::Int(_, s), Value::Int(_, x)) => s.contains(*x),
            (Space::Char(s), Value::Char(c)) => s.contains(*c as i64),
            (Space::Str(s), Value::Str(x)) => s.contains(x),
            (Space::Product(p), Value::Tuple(xs) | Value::Seq(xs) | Value::Struct { fields: xs, .. }) => {
                p.contains(xs)
            }
            (
                Space::Enum(_, m),
                Value::Enum {
                    variant, fields, ..
                },
            ) => m.get(variant).is_some_and(|p| p.contains(fields)),
            (Space::Slice(s), Value::Seq(xs)) => s.contains(xs),
            (s, v) => panic!("value {v:?} checked against a space of another type: {s:?}"),
        }
    }

    pub fn union(&self, other: &Space) -> Space {
        self.combine(other, Op::Union)
    }

    pub fn intersect(&self, other: &Space) -> Space {
        self.combine(other, Op::Intersect)
    }

    pub fn subtract(&self, other: &Space) -> Space {
        self.combine(other, Op::Subtract)
    }

    pub fn is_subset(&self, other: &Space) -> bool {
        self.subtract(other).is_empty()
    }

    /// Semantic equality.
    pub fn same_as(&self, other: &Space) -> bool {
        self.is_subset(other) && other.is_subset(self)
    }

    fn combine(&self, other: &Space, op: Op) -> Space {
        use Space::*;
        match (self, other) {
            (Bool { t: a, f: b }, Bool { t: c, f: d }) => {
                let g = |x: bool, y: bool| match op {
                    Op::Union => x || y,
                    Op::Intersect => x && y,
                    Op::Subtract => x && !y,
                };
                Bool {
                    t: g(*a, *c),
                    f: g(*b, *d),
                }
            }
            (Int(i, a), Int(j, b)) => {
                debug_assert_eq!(i, j);
                Int(*i, op.intervals(a, b))
            }
            (Char(a), Char(b)) => Char(op.intervals(a, b)),
            (Str(a), Str(b)) => Str(match op {
                Op::Union => a.union(b),
                Op::Intersect => a.intersect(b),
                Op::Subtract => a.subtract(b),
            }),
            (Product(a), Product(b)) => Product(op.products(a, b)),
            (Enum(e, a), Enum(f, b)) => {
                debug_assert_eq!(e, f);
                let mut out = BTreeMap::new();
                let keys: BTreeSet<u32> = a.keys().chain(b.keys()).copied().collect();
                for k in keys {
                    let r = match (a.get(&k), b.get(&k)) {
                        (Some(x), Some(y)) => op.products(x, y),
                        (Some(x), None) => match op {
                            Op::Intersect => continue,
                            _ => x.clone(),
                        },
                        (None, Some(y)) => match op {
                            Op::Union => y.clone(),
                            _ => continue,
                        },
                        (None, None) => continue,
                    };
                    if !r.is_empty() {
                        out.insert(k, r);
                    }
                }
                Enum(*e, out)
            }
            (Slice(a), Slice(b)) => Slice(a.zip(b, |x, y| op.products(x, y))),
            (a, b) => panic!("space operation on different types: {a:?} and {b:?}"),
        }
    }

    /// Some member of the space, or `None` if it is empty. Integers and
    /// chars closest to zero and variants in declaration order are preferred.
    pub fn witness(&self, ty: &Ty, env: &TypeEnv) -> Option<Value> {
        let ty = ty.peel();
        match self {
            Space::Bool { t, f } => {
                if *f {
                    Some(Value::Bool(false))
                } else if *t {
                    Some(Value::Bool(true))
                } else {
                    None
                }
            }
            Space::Int(i, s) => s.closest_to_zero().map(|v| Value::Int(*i, v)),
            Space::Char(s) => s
                .closest_to_zero()
                .and_then(|v| char::from_u32(v as u32))
                .map(Value::Char),
            Space::Str(s) => s.witness().map(Value::Str),
            Space::Product(p) => match ty {
                Ty::Tuple(ts) => p.witness(ts, env).map(Value::Tuple),
                Ty::Array(e, n) => p
                    .witness(&vec![(**e).clone(); *n as usize], env)
                    .map(Value::Seq),
                Ty::Struct(s) => {
                    let tys = env.struct_info(*s).fields.tys.clone();
                    p.witness(&tys, env)
                        .map(|fields| Value::Struct { ty: *s, fields })
                }
                _ => panic!("product space for type {ty:?}"),
            },
            Space::Enum(e, m) => m.iter().find(|(_, p)| !p.is_empty()).and_then(|(v, p)| {
                let tys = env.variant(*e, *v).fields.tys.clone();
                p.witness(&tys, env).map(|fields| Value::Enum {
                    ty: *e,
                    variant: *v,
                    fields,
                })
            }),
            Space::Slice(s) => match ty {
                Ty::Slice(e) => s.witness(e, env).map(Value::Seq),
                _ => panic!("slice space for type {ty:?}"),
            },
        }
    }
}

#[derive(Clone, Copy)]
enum Op {
    Union,
    Intersect,
    Subtract,
}

impl Op {
    fn intervals(self, a: &IntervalSet, b: &IntervalSet) -> IntervalSet {
        match self {
            Op::Union => a.union(b),
            Op::Intersect => a.intersect(b),
            Op::Subtract => a.subtract(b),
        }
    }

    fn products(self, a: &ProductSpace, b: &ProductSpace) -> ProductSpace {
        match self {
            Op::Union => a.union(b),
            Op::Intersect => a.intersect(b),
            Op::Subtract => a.subtract(b),
        }
    }
}

/// Every value of type `t`.
pub fn value_space_of(t: &Ty, env: &TypeEnv) -> Space {
    match t {
        Ty::Bool => Space::Bool { t: true, f: true },
        Ty::Char => Space::Char(char_top()),
        Ty::Int(i) => Space::Int(*i, IntervalSet::range(i.min_value(), i.max_value())),
        Ty::Str => Space::Str(StrSet::top()),
        Ty::Enum(e) => {
            let info = env.enum_info(*e);
            let mut m = BTreeMap::new();
            for (i, v) in info.variants.iter().enumerate() {
                m.insert(i as u32, product_top(&v.fields.tys, env));
            }
            Space::Enum(*e, m)
        }
        Ty::Struct(s) => Space::Product(product_top(&env.struct_info(*s).fields.tys, env)),
        Ty::Tuple(ts) => Space::Product(product_top(ts, env)),
        Ty::Array(e, n) => Space::Product(product_top(&vec![(**e).clone(); *n as usize], env)),
        Ty::Slice(e) => {
            let w = env.slice_width;
            let et = value_space_of(e, env);
            let exact = (0..=2 * w)
                .map(|l| ProductSpace::from_box(vec![et.clone(); l]))
                .collect();
            let tail = ProductSpace::from_box(vec![et; 2 * w]);
            Space::Slice(SliceSpace::new(w, exact, tail))
        }
        Ty::Ref { inner, .. } => value_space_of(inner, env),
        Ty::Never => Space::Product(ProductSpace::empty(0)),
    }
}

pub fn product_top(tys: &[Ty], env: &TypeEnv) -> ProductSpace {
    ProductSpace::from_box(tys.iter().map(|t| value_space_of(t, env)).collect())
}

/// Whether `s` holds every value of `t`.
pub fn is_top(s: &Space, t: &Ty, env: &TypeEnv) -> bool {
    value_space_of(t, env).is_subset(s)
}

/// `a - b`. Always exact; kept as a named operation for callers that think
/// in terms of remaining spaces.
pub fn space_subtract(a: &Space, b: &Space) -> Space {
    a.subtract(b)
}

/// One step from a value to a component of it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    /// Tuple, struct or array position, or a field of the variant selected
    /// by the preceding [`Step::Variant`].
    Field(usize),
    /// Requires the given variant and descends into its payload.
    Variant(u32),
    /// Element of a dynamic slice counted from the front.
    FromStart(usize),
    /// Element of a dynamic slice counted from the back; 0 is the last.
    FromEnd(usize),
}

/// Values of type `t` whose component at `path` lies in `sub`.
///
/// `sub` must be a space of the component's type. Components that do not
/// exist (wrong variant, slice too short) exclude the value.
pub fn lift(t: &Ty, path: &[Step], sub: &Space, env: &TypeEnv) -> Space {
    let t = t.peel();
    let Some((step, rest)) = path.split_first() else {
        return sub.clone();
    };
    match (step, t) {
        (Step::Variant(v), Ty::Enum(e)) => {
            let tys = env.variant(*e, *v).fields.tys.clone();
            let payload = lift_fields(&tys, rest, sub, env);
            let mut m = BTreeMap::new();
            if !payload.is_empty() {
                m.insert(*v, payload);
            }
            Space::Enum(*e, m)
        }
        (Step::Field(_), Ty::Tuple(ts)) => Space::Product(lift_fields(ts, path, sub, env)),
        (Step::Field(_), Ty::Struct(s)) => {
            let tys = env.struct_info(*s).fields.tys.clone();
            Space::Product(lift_fields(&tys, path, sub, env))
        }
        (Step::Field(_), Ty::Array(e, n)) => {
            Space::Product(lift_fields(&vec![(**e).clone(); *n as usize], path, sub, env))
        }
        (Step::FromStart(i), Ty::Array(e, n)) => {
            let mut p = vec![Step::Field(*i)];
            p.extend_from_slice(rest);
            lift(&Ty::Array(e.clone(), *n), &p, sub, env)
        }
        (Step::FromEnd(j), Ty::Array(e, n)) => {
            let mut p = vec![Step::Field(*n as usize - 1 - j)];
            p.extend_from_slice(rest);
            lift(&Ty::Array(e.clone(), *n), &p, sub, env)
        }
        (Step::FromStart(_) | Step::FromEnd(_), Ty::Slice(e)) => {
            let w = env.slice_width;
            let comp = lift(e, rest, sub, env);
            let et = value_space_of(e, env);
            let at = |len: usize, pos: Option<usize>| -> ProductSpace {
                match pos {
                    Some(p) => {
                        let mut f = vec![et.clone(); len];
                        f[p] = comp.clone();
                        ProductSpace::from_box(f)
                    }
                    None => ProductSpace::empty(len),
                }
            };
            let pos = |len: usize| -> Option<usize> {
                match step {
                    Step::FromStart(i) => (*i < len).then_some(*i),
                    Step::FromEnd(j) => (*j < len).then(|| len - 1 - j),
                    _ => unreachable!(),
                }
            };
            let exact = (0..=2 * w).map(|l| at(l, pos(l))).collect();
            let tail_pos = match step {
                Step::FromStart(i) => {
                    assert!(*i < w, "slice index beyond tracked width");
                    *i
                }
                Step::FromEnd(j) => {
                    assert!(*j < w, "slice index beyond tracked width");
                    2 * w - 1 - j
                }
                _ => unreachable!(),
            };
            Space::Slice(SliceSpace::new(w, exact, at(2 * w, Some(tail_pos))))
        }
        (s, t) => panic!("path step {s:?} does not apply to {t:?}"),
    }
}

fn lift_fields(tys: &[Ty], path: &[Step], sub: &Space, env: &TypeEnv) -> ProductSpace {
    match path.split_first() {
        None => product_top(tys, env),
        Some((Step::Field(i), rest)) => {
            let mut f: Vec<Space> = tys.iter().map(|t| value_space_of(t, env)).collect();
            f[*i] = lift(&tys[*i], rest, sub, env);
            ProductSpace::from_box(f)
        }
        Some((s, _)) => panic!("expected a field step, found {s:?}"),
    }
}

/// Slices of element type `elem` whose length is `len` (or at least `len`).
pub fn slice_len_space(elem: &Ty, len: usize, at_least: bool, env: &TypeEnv) -> Space {
    let w = env.slice_width;
    let et = value_space_of(elem, env);
    let exact = (0..=2 * w)
        .map(|l| {
            if l == len || (at_least && l >= len) {
                ProductSpace::from_box(vec![et.clone(); l])
            } else {
                ProductSpace::empty(l)
            }
        })
        .collect();
    assert!(len <= 2 * w, "length test beyond tracked width");
    let tail = if at_least {
        ProductSpace::from_box(vec![et; 2 * w])
    } else {
        ProductSpace::empty(2 * w)
    };
    Space::Slice(SliceSpace::new(w, exact, tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(ivs: &[(i64, i64)]) -> IntervalSet {
        IntervalSet::from_intervals(ivs.to_vec())
    }

    #[test]
    fn interval_basics() {
        assert_eq!(set(&[(0, 10)]).subtract(&set(&[(3, 5)])), set(&[(0, 2), (6, 10)]));
        assert_eq!(set(&[(0, 2), (3, 5)]).intervals(), &[(0, 5)]);
        assert!(set(&[(0, 255)]).subtract(&set(&[(0, 255)])).is_empty());
        assert_eq!(set(&[(-5, -2), (3, 9)]).closest_to_zero(), Some(-2));
        assert_eq!(set(&[(-3, -2), (2, 9)]).closest_to_zero(), Some(2));
        assert_eq!(
            set(&[(i64::MIN, i64::MAX)]).subtract(&set(&[(i64::MIN, 0)])),
            set(&[(1, i64::MAX)])
        );
    }

    fn arb_set() -> impl Strategy<Value = IntervalSet> {
        prop::collection::vec((-20i64..20, 0i64..6), 0..5)
            .prop_map(|v| IntervalSet::from_intervals(v.into_iter().map(|(a, l)| (a, a + l)).collect()))
    }

    proptest! {
        #[test]
        fn interval_ops_match_membership(a in arb_set(), b in arb_set()) {
            let u = a.union(&b);
            let i = a.intersect(&b);
            let d = a.subtract(&b);
            for w in u.intervals().windows(2) {
                prop_assert!(w[0].1 + 1 < w[1].0);
            }
            for x in -30..35 {
                prop_assert_eq!(u.contains(x), a.contains(x) || b.contains(x));
                prop_assert_eq!(i.contains(x), a.contains(x) && b.contains(x));
                prop_assert_eq!(d.contains(x), a.contains(x) && !b.contains(x));
            }
        }
    }

    #[test]
    fn string_sets_are_closed() {
        let top = StrSet::top();
        let hi = StrSet::point("hi");
        let rest = top.subtract(&hi);
        assert!(!rest.contains("hi") && rest.contains("x"));
        assert!(rest.union(&hi) == top);
        assert!(hi.subtract(&top).is_empty());
        assert_eq!(rest.witness().as_deref(), Some(""));
    }
}

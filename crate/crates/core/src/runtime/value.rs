//! Runtime values.
//!
//! References are transparent: the subset has no mutation through a
//! reference, so `&e` evaluates to the value of `e` and a reference pattern
//! matches its inner pattern against the same value.

use std::fmt::Write;

use crate::syntax::IntTy;
use crate::types::{EnumId, StructId, TypeEnv};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Char(char),
    Int(IntTy, i64),
    Str(String),
    Enum {
        ty: EnumId,
        variant: u32,
        fields: Vec<Value>,
    },
    Struct {
        ty: StructId,
        fields: Vec<Value>,
    },
    /// Tuples, including the unit value `()`.
    Tuple(Vec<Value>),
    /// Arrays and slices share one representation.
    Seq(Vec<Value>),
}

impl Value {
    pub const UNIT: Value = Value::Tuple(Vec::new());

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(_, v) => Some(*v),
            _ => None,
        }
    }

    /// Integers and chars as a point on a number line, for range tests.
    pub fn as_ordinal(&self) -> Option<i64> {
        match self {
            Value::Int(_, v) => Some(*v),
            Value::Char(c) => Some(*c as i64),
            _ => None,
        }
    }

    /// Renders the value in source syntax. `None` stands for `Option::None`
    /// and similar built-in variants render without their enum prefix.
    pub fn show(&self, env: &TypeEnv) -> String {
        let mut s = String::new();
        self.write(env, &mut s);
        s
    }

    fn write(&self, env: &TypeEnv, out: &mut String) {
        let list = |out: &mut String, xs: &[Value], open: &str, close: &str| {
            out.push_str(open);
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                x.write(env, out);
            }
            out.push_str(close);
        };
        match self {
            Value::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            Value::Char(c) => {
                let _ = write!(out, "{c:?}");
            }
            Value::Int(_, v) => {
                let _ = write!(out, "{v}");
            }
            Value::Str(s) => {
                let _ = write!(out, "{s:?}");
            }
            Value::Enum {
                ty,
                variant,
                fields,
            } => {
                let e = env.enum_info(*ty);
                let v = &e.variants[*variant as usize];
                if !e.is_builtin() {
                    out.push_str(&e.name);
                    out.push_str("::");
                }
                out.push_str(&v.name);
                write_fields(env, out, &v.fields, fields, list);
            }
            Value::Struct { ty, fields } => {
                let s = env.struct_info(*ty);
                out.push_str(&s.name);
                write_fields(env, out, &s.fields, fields, list);
            }
            Value::Tuple(xs) => {
                list(out, xs, "(", "");
                if xs.len() == 1 {
                    out.push(',');
                }
                out.push(')');
            }
            Value::Seq(xs) => list(out, xs, "[", "]"),
        }
    }
}

fn write_fields(
    env: &TypeEnv,
    out: &mut String,
    shape: &crate::types::FieldsInfo,
    fields: &[Value],
    list: impl Fn(&mut String, &[Value], &str, &str),
) {
    use crate::types::FieldShape;
    match shape.shape {
        FieldShape::Unit => {}
        FieldShape::Tuple => list(out, fields, "(", ")"),
        FieldShape::Named => {
            out.push_str(" { ");
            for (i, (n, v)) in shape.names.iter().zip(fields).enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(n);
                out.push_str(": ");
                v.write(env, out);
            }
            out.push_str(" }");
        }
    }
}

//! Three-way refutability of sub-patterns and of whole patterns.

use std::collections::HashMap;
use std::fmt::{self, Write};

use serde::Serialize;

use crate::syntax::NodeId;
use crate::types::space::is_top;
use crate::types::{denotation, Ctor, TPat, TPatKind, TypeEnv};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RefutabilityClass {
    DirectlyRefutable,
    IndirectlyRefutable,
    Irrefutable,
}

impl RefutabilityClass {
    pub fn is_refutable(self) -> bool {
        self != RefutabilityClass::Irrefutable
    }
}

impl fmt::Display for RefutabilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RefutabilityClass::DirectlyRefutable => "directly refutable",
            RefutabilityClass::IndirectlyRefutable => "indirectly refutable",
            RefutabilityClass::Irrefutable => "irrefutable",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Refutability {
    Refutable,
    Irrefutable,
}

/// How slice patterns over dynamically sized slices are classified.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SliceRule {
    /// Directly refutable unless some child is a range pattern; kept as
    /// written even though `[..]` then counts as directly refutable.
    #[default]
    Verbatim,
    /// Directly refutable exactly when the length test can fail.
    Corrected,
}

impl std::str::FromStr for SliceRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "verbatim" => Ok(SliceRule::Verbatim),
            "corrected" => Ok(SliceRule::Corrected),
            _ => Err(format!("unknown slice rule `{s}`; expected `verbatim` or `corrected`")),
        }
    }
}

/// A typed pattern with a class for every node.
#[derive(Clone, Debug)]
pub struct AnnotatedPattern {
    pub pattern: TPat,
    pub classes: HashMap<NodeId, RefutabilityClass>,
}

impl AnnotatedPattern {
    pub fn class(&self, p: &TPat) -> RefutabilityClass {
        self.classes[&p.id]
    }

    pub fn root_class(&self) -> RefutabilityClass {
        self.class(&self.pattern)
    }
}

/// Annotates every node, bottom-up.
pub fn classify(p: &TPat, env: &TypeEnv, rule: SliceRule) -> AnnotatedPattern {
    let mut classes = HashMap::new();
    node(p, env, rule, &mut classes);
    AnnotatedPattern {
        pattern: p.clone(),
        classes,
    }
}

/// Irrefutable iff the root is.
pub fn pattern_refutability(p: &AnnotatedPattern) -> Refutability {
    if p.root_class().is_refutable() {
        Refutability::Refutable
    } else {
        Refutability::Irrefutable
    }
}

fn node(
    p: &TPat,
    env: &TypeEnv,
    rule: SliceRule,
    out: &mut HashMap<NodeId, RefutabilityClass>,
) -> RefutabilityClass {
    use RefutabilityClass::*;
    let kids: Vec<RefutabilityClass> = p.children().into_iter().map(|c| node(c, env, rule, out)).collect();
    let all_irrefutable = kids.iter().all(|k| *k == Irrefutable);
    let from_children = if all_irrefutable { Irrefutable } else { IndirectlyRefutable };
    let class = match &p.kind {
        TPatKind::Literal(_) | TPatKind::Const { .. } => DirectlyRefutable,
        TPatKind::Wildcard | TPatKind::Rest | TPatKind::UnitStruct(_) => Irrefutable,
        TPatKind::Binding { .. } | TPatKind::Reference { .. } | TPatKind::Tuple(_) | TPatKind::Grouped(_) => {
            from_children
        }
        TPatKind::Range { .. } => {
            if is_top(&denotation(p, env), &p.ty, env) {
                Irrefutable
            } else {
                DirectlyRefutable
            }
        }
        TPatKind::Struct { ctor, .. } | TPatKind::TupleStruct { ctor, .. } => match ctor {
            Ctor::Struct(_) => from_children,
            Ctor::Variant(e, _) if env.enum_info(*e).variants.len() > 1 => DirectlyRefutable,
            Ctor::Variant(..) => from_children,
        },
        TPatKind::UnitVariant(e, _) => {
            if env.enum_info(*e).variants.len() > 1 {
                DirectlyRefutable
            } else {
                Irrefutable
            }
        }
        TPatKind::Slice { elems, array_len } => match array_len {
            Some(_) => from_children,
            None => {
                let direct = match rule {
                    SliceRule::Verbatim => !elems.iter().any(|e| matches!(e.kind, TPatKind::Range { .. })),
                    SliceRule::Corrected => length_test_can_fail(elems),
                };
                if direct {
                    DirectlyRefutable
                } else {
                    from_children
                }
            }
        },
        TPatKind::Or(_) => {
            if kids.contains(&Irrefutable) || is_top(&denotation(p, env), &p.ty, env) {
                Irrefutable
            } else {
                IndirectlyRefutable
            }
        }
    };
    out.insert(p.id, class);
    class
}

/// A slice pattern accepts every length only as `[..]` or `[name @ ..]`.
pub fn length_test_can_fail(elems: &[TPat]) -> bool {
    !(elems.len() == 1 && elems[0].is_rest_like())
}

/// Indented tree dump, one node per line: kind, source form, class.
pub fn dump(p: &AnnotatedPattern, env: &TypeEnv) -> String {
    let mut out = String::new();
    dump_node(&p.pattern, p, env, 0, &mut out);
    out
}

fn dump_node(n: &TPat, p: &AnnotatedPattern, env: &TypeEnv, depth: usize, out: &mut String) {
    let kind = if n.implicit {
        format!("{} (implicit)", n.kind_name())
    } else {
        n.kind_name().to_string()
    };
    let _ = writeln!(
        out,
        "{:indent$}{kind} `{}`: {} [{}]",
        "",
        show(n, env),
        p.class(n),
        env.show(&n.ty),
        indent = depth * 2
    );
    for c in n.children() {
        dump_node(c, p, env, depth + 1, out);
    }
}

fn ctor_path(ctor: Ctor, env: &TypeEnv) -> String {
    match ctor {
        Ctor::Struct(s) => env.struct_info(s).name.clone(),
        Ctor::Variant(e, v) => {
            let info = env.enum_info(e);
            let name = &info.variants[v as usize].name;
            if info.is_builtin() {
                name.clone()
            } else {
                format!("{}::{name}", info.name)
            }
        }
    }
}

/// Source-like rendering of a typed pattern. Implicit references are shown
/// as their inner pattern since they have no syntax.
pub fn show(p: &TPat, env: &TypeEnv) -> String {
    let list = |xs: &[TPat]| xs.iter().map(|x| show(x, env)).collect::<Vec<_>>().join(", ");
    match &p.kind {
        TPatKind::Literal(v) => v.show(env),
        TPatKind::Binding { name, by_ref, mutable, sub, .. } => {
            let mut s = String::new();
            if *by_ref {
                s.push_str("ref ");
            }
            if *mutable {
                s.push_str("mut ");
            }
            s.push_str(name);
            if let Some(sub) = sub {
                s.push_str(" @ ");
                s.push_str(&show(sub, env));
            }
            s
        }
        TPatKind::Wildcard => "_".into(),
        TPatKind::Rest => "..".into(),
        TPatKind::Range { text, .. } => text.clone(),
        TPatKind::Reference { inner, .. } if p.implicit => show(inner, env),
        TPatKind::Reference { mutable, inner } => {
            format!("&{}{}", if *mutable { "mut " } else { "" }, show(inner, env))
        }
        TPatKind::Struct { ctor, fields, has_rest } => {
            let names = match ctor {
                Ctor::Struct(s) => &env.struct_info(*s).fields.names,
                Ctor::Variant(e, v) => &env.variant(*e, *v).fields.names,
            };
            let mut parts: Vec<String> = fields
                .iter()
                .map(|(i, f)| match &f.kind {
                    TPatKind::Binding { name, sub: None, by_ref: false, mutable: false, .. } if *name == names[*i] => {
                        name.clone()
                    }
                    _ => format!("{}: {}", names[*i], show(f, env)),
                })
                .collect();
            if *has_rest {
                parts.push("..".into());
            }
            if parts.is_empty() {
                format!("{} {{}}", ctor_path(*ctor, env))
            } else {
                format!("{} {{ {} }}", ctor_path(*ctor, env), parts.join(", "))
            }
        }
        TPatKind::TupleStruct { ctor, elems } => format!("{}({})", ctor_path(*ctor, env), list(elems)),
        TPatKind::Tuple(elems) if elems.len() == 1 && !elems[0].is_rest_like() => format!("({},)", list(elems)),
        TPatKind::Tuple(elems) => format!("({})", list(elems)),
        TPatKind::Grouped(inner) => format!("({})", show(inner, env)),
        TPatKind::Slice { elems, .. } => format!("[{}]", list(elems)),
        TPatKind::Const { name, .. } => name.clone(),
        TPatKind::UnitVariant(e, v) => ctor_path(Ctor::Variant(*e, *v), env),
        TPatKind::UnitStruct(s) => env.struct_info(*s).name.clone(),
        TPatKind::Or(alts) => alts.iter().map(|a| show(a, env)).collect::<Vec<_>>().join(" | "),
    }
}

#[cfg(test)]
mod tests;

//! Lowering a refutable pattern to ordered conditions.

use thiserror::Error;

use super::{ConditionKind, Structure};
use crate::refutability::{length_test_can_fail, AnnotatedPattern, RefutabilityClass};
use crate::syntax::{NodeId, SourceSpan};
use crate::types::tpat::split_rest;
use crate::types::{Ctor, TPat, TPatKind, TypeEnv};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: irrefutable pattern is not a decision")]
pub struct NotADecision {
    pub span: SourceSpan,
}

/// Conditions in match-plan order and the boolean structure over them.
///
/// The plan tests a node before its children and children left to right; a
/// failing test skips the rest of its conjunction and moves to the next
/// alternative of the innermost enclosing or-pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct Lowered {
    pub conditions: Vec<(NodeId, ConditionKind, SourceSpan)>,
    pub structure: Structure,
}

pub fn lower_pattern(p: &AnnotatedPattern, env: &TypeEnv) -> Result<Lowered, NotADecision> {
    if !p.root_class().is_refutable() {
        return Err(NotADecision { span: p.pattern.span });
    }
    let mut conditions = Vec::new();
    let structure = lower(&p.pattern, p, env, &mut conditions);
    if conditions.is_empty() {
        return Err(NotADecision { span: p.pattern.span });
    }
    Ok(Lowered { conditions, structure })
}

/// Whether the node contributes a condition of its own.
pub(crate) fn own_test(n: &TPat, p: &AnnotatedPattern) -> bool {
    match &n.kind {
        TPatKind::Slice { elems, array_len: None } => {
            p.class(n) == RefutabilityClass::DirectlyRefutable || length_test_can_fail(elems)
        }
        _ => p.class(n) == RefutabilityClass::DirectlyRefutable,
    }
}

fn lower(
    n: &TPat,
    p: &AnnotatedPattern,
    env: &TypeEnv,
    out: &mut Vec<(NodeId, ConditionKind, SourceSpan)>,
) -> Structure {
    let mut parts = Vec::new();
    if own_test(n, p) {
        parts.push(Structure::Cond(out.len()));
        out.push((n.id, condition_kind(n, env), n.span));
    }
    match &n.kind {
        TPatKind::Or(alts) => {
            let alts = alts.iter().map(|a| lower(a, p, env, out)).collect();
            parts.push(Structure::or(alts));
        }
        _ => {
            for c in n.children() {
                parts.push(lower(c, p, env, out));
            }
        }
    }
    Structure::and(parts)
}

fn condition_kind(n: &TPat, env: &TypeEnv) -> ConditionKind {
    let disc = |e, v| {
        let info = env.enum_info(e);
        ConditionKind::DiscriminantCheck {
            enum_name: info.name.clone(),
            variant: info.variants[v as usize].name.clone(),
        }
    };
    match &n.kind {
        TPatKind::Literal(v) => ConditionKind::LiteralEq { literal: v.show(env) },
        TPatKind::Const { name, .. } => ConditionKind::ConstEq { name: name.clone() },
        TPatKind::Range { lo, hi, text } => ConditionKind::RangeMembership {
            lo: *lo,
            hi: *hi,
            text: text.clone(),
        },
        TPatKind::Struct { ctor: Ctor::Variant(e, v), .. }
        | TPatKind::TupleStruct { ctor: Ctor::Variant(e, v), .. }
        | TPatKind::UnitVariant(e, v) => disc(*e, *v),
        TPatKind::Slice { elems, .. } => {
            let (pre, suf, has_rest) = split_rest(elems);
            ConditionKind::SliceLenCheck {
                len: (pre.len() + suf.len()) as u64,
                at_least: has_rest,
            }
        }
        k => unreachable!("{k:?} has no test of its own"),
    }
}

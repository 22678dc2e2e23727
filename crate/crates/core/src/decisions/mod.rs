//! Decisions and conditions: what MC/DC obligations a program carries.

mod desugar;
mod extract;
mod lower;

pub use desugar::desugar_question_mark;
pub use extract::{apply_const_exemption, contextual_prune, extract_decisions, is_const_expr};
pub use lower::{lower_pattern, Lowered, NotADecision};

use std::collections::HashMap;

use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::syntax::{NodeId, SourceSpan};

pub type DecisionId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Origin {
    MatchArm,
    IfLet,
    LetElse,
    BooleanExpr,
    Guard,
    QuestionMark,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum ConditionKind {
    DiscriminantCheck { enum_name: String, variant: String },
    LiteralEq { literal: String },
    RangeMembership { lo: i64, hi: i64, text: String },
    SliceLenCheck { len: u64, at_least: bool },
    ConstEq { name: String },
    BooleanLeaf { expr: String },
    NestedDecisionResult { decision: DecisionId },
}

impl ConditionKind {
    pub fn describe(&self) -> String {
        match self {
            ConditionKind::DiscriminantCheck { enum_name, variant } => format!("is {enum_name}::{variant}"),
            ConditionKind::LiteralEq { literal } => format!("== {literal}"),
            ConditionKind::RangeMembership { text, .. } => format!("in {text}"),
            ConditionKind::SliceLenCheck { len, at_least: true } => format!("len >= {len}"),
            ConditionKind::SliceLenCheck { len, at_least: false } => format!("len == {len}"),
            ConditionKind::ConstEq { name } => format!("== {name}"),
            ConditionKind::BooleanLeaf { expr } => expr.clone(),
            ConditionKind::NestedDecisionResult { decision } => format!("result of D{decision}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    /// Position within the owning decision.
    pub index: usize,
    #[serde(flatten)]
    pub kind: ConditionKind,
    pub span: SourceSpan,
    pub const_exempt: bool,
    /// Typed pattern node or leaf expression this condition tests.
    #[serde(skip)]
    pub node: NodeId,
}

/// Boolean structure over the conditions of one decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    Cond(usize),
    And(Vec<Structure>),
    Or(Vec<Structure>),
    Not(Box<Structure>),
    /// An alternative that needs no test.
    True,
}

impl Structure {
    pub fn and(mut parts: Vec<Structure>) -> Structure {
        parts.retain(|p| *p != Structure::True);
        match parts.len() {
            0 => Structure::True,
            1 => parts.pop().unwrap(),
            _ => Structure::And(
                parts
                    .into_iter()
                    .flat_map(|p| match p {
                        Structure::And(xs) => xs,
                        p => vec![p],
                    })
                    .collect(),
            ),
        }
    }

    pub fn or(mut parts: Vec<Structure>) -> Structure {
        match parts.len() {
            1 => parts.pop().unwrap(),
            _ => Structure::Or(
                parts
                    .into_iter()
                    .flat_map(|p| match p {
                        Structure::Or(xs) => xs,
                        p => vec![p],
                    })
                    .collect(),
            ),
        }
    }

    /// Three-valued evaluation: `None` where the result depends on a
    /// condition that is `None`.
    pub fn eval(&self, vals: &[Option<bool>]) -> Option<bool> {
        match self {
            Structure::Cond(i) => vals[*i],
            Structure::True => Some(true),
            Structure::Not(x) => x.eval(vals).map(|b| !b),
            Structure::And(xs) => {
                let mut unknown = false;
                for x in xs {
                    match x.eval(vals) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        Some(true) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(true)
                }
            }
            Structure::Or(xs) => {
                let mut unknown = false;
                for x in xs {
                    match x.eval(vals) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        Some(false) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(false)
                }
            }
        }
    }

    /// Condition indices in order of appearance.
    pub fn conditions(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<usize>) {
        match self {
            Structure::Cond(i) => out.push(*i),
            Structure::True => {}
            Structure::Not(x) => x.collect(out),
            Structure::And(xs) | Structure::Or(xs) => xs.iter().for_each(|x| x.collect(out)),
        }
    }

    pub fn render(&self) -> String {
        self.render_at(true)
    }

    fn render_at(&self, top: bool) -> String {
        let join = |xs: &[Structure], op: &str| {
            let s = xs.iter().map(|x| x.render_at(false)).collect::<Vec<_>>().join(op);
            if top { s } else { format!("({s})") }
        };
        match self {
            Structure::Cond(i) => format!("c{i}"),
            Structure::True => "true".into(),
            Structure::Not(x) => format!("!{}", x.render_at(false)),
            Structure::And(xs) => join(xs, " && "),
            Structure::Or(xs) => join(xs, " || "),
        }
    }
}

/// Nested arrays: `["and", 0, ["or", 1, 2]]`, `["not", 0]`, `true`.
impl Serialize for Structure {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Structure::Cond(i) => s.serialize_u64(*i as u64),
            Structure::True => s.serialize_bool(true),
            Structure::Not(x) => {
                let mut seq = s.serialize_seq(Some(2))?;
                seq.serialize_element("not")?;
                seq.serialize_element(x)?;
                seq.end()
            }
            Structure::And(xs) | Structure::Or(xs) => {
                let mut seq = s.serialize_seq(Some(xs.len() + 1))?;
                seq.serialize_element(if matches!(self, Structure::And(_)) { "and" } else { "or" })?;
                for x in xs {
                    seq.serialize_element(x)?;
                }
                seq.end()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decision {
    pub id: DecisionId,
    pub function: String,
    pub span: SourceSpan,
    pub origin: Origin,
    pub conditions: Vec<Condition>,
    pub structure: Structure,
    /// Match arm index for arm decisions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arm: Option<usize>,
    /// A match arm that cannot fail once the earlier arms have been tried.
    pub pruned: bool,
    /// Root pattern or boolean expression.
    #[serde(skip)]
    pub node: NodeId,
}

impl Decision {
    pub fn condition_of(&self, node: NodeId) -> Option<usize> {
        self.conditions.iter().position(|c| c.node == node)
    }

    pub fn fully_exempt(&self) -> bool {
        self.conditions.iter().all(|c| c.const_exempt)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DecisionSet {
    pub decisions: Vec<Decision>,
    /// Root pattern or boolean expression to its decision.
    #[serde(skip)]
    pub by_node: HashMap<NodeId, DecisionId>,
}

impl DecisionSet {
    pub fn get(&self, id: DecisionId) -> &Decision {
        &self.decisions[id as usize]
    }

    pub fn for_node(&self, node: NodeId) -> Option<&Decision> {
        self.by_node.get(&node).map(|id| self.get(*id))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "decisions": self.decisions })
    }
}

#[cfg(test)]
mod tests;

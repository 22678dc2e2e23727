//! Evaluation vectors and execution traces, with their JSON Lines form.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::decisions::DecisionId;
use crate::syntax::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TriState {
    #[serde(rename = "T")]
    True,
    #[serde(rename = "F")]
    False,
    /// Skipped by short-circuit evaluation.
    #[serde(rename = "-")]
    NotEvaluated,
}

impl TriState {
    pub fn from_bool(b: bool) -> Self {
        if b {
            TriState::True
        } else {
            TriState::False
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            TriState::True => Some(true),
            TriState::False => Some(false),
            TriState::NotEvaluated => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            TriState::True => 'T',
            TriState::False => 'F',
            TriState::NotEvaluated => '-',
        }
    }
}

/// Renders a vector as `TF-`.
pub fn show_conds(conds: &[TriState]) -> String {
    conds.iter().map(|c| c.symbol()).collect()
}

/// One visit of one decision.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EvaluationVector {
    /// Index of the test case that produced the visit.
    pub test: u32,
    /// Visit number within that test's run.
    pub seq: u32,
    pub decision: DecisionId,
    pub conds: Vec<TriState>,
    pub outcome: bool,
}

impl EvaluationVector {
    pub fn id(&self) -> VectorRef {
        VectorRef {
            test: self.test,
            seq: self.seq,
        }
    }
}

/// Identifies a vector within a merged trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct VectorRef {
    pub test: u32,
    pub seq: u32,
}

impl fmt::Display for VectorRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}#{}", self.test, self.seq)
    }
}

/// A function exit: an explicit `return` (including the ones a `?`
/// desugars to) or the implicit end of the body.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExitPoint {
    pub function: String,
    /// Node id of the `return` expression; `None` for the end of the body.
    pub node: Option<NodeId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub program_hash: String,
    /// Sorted by `(test, seq)`.
    pub vectors: Vec<EvaluationVector>,
    pub statements: BTreeSet<NodeId>,
    pub entries: BTreeSet<String>,
    pub exits: BTreeSet<ExitPoint>,
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("traces of different programs cannot be merged")]
    HashMismatch,
}

impl Trace {
    pub fn new(program_hash: impl Into<String>) -> Self {
        Trace {
            program_hash: program_hash.into(),
            ..Trace::default()
        }
    }

    /// Multiset union of vectors and set union of everything else. The
    /// result is independent of argument order and grouping.
    pub fn merge(mut self, other: Trace) -> Result<Trace, TraceError> {
        if self.program_hash.is_empty() {
            self.program_hash = other.program_hash.clone();
        } else if !other.program_hash.is_empty() && other.program_hash != self.program_hash {
            return Err(TraceError::HashMismatch);
        }
        self.vectors.extend(other.vectors);
        self.vectors.sort();
        self.statements.extend(other.statements);
        self.entries.extend(other.entries);
        self.exits.extend(other.exits);
        Ok(self)
    }

    pub fn vectors_of(&self, d: DecisionId) -> impl Iterator<Item = &EvaluationVector> {
        self.vectors.iter().filter(move |v| v.decision == d)
    }

    /// JSON Lines: a header, then vectors, statements, entries and exits,
    /// each in sorted order.
    pub fn to_jsonl(&self) -> String {
        let mut lines = vec![json!({"kind": "header", "program_hash": self.program_hash})];
        for v in &self.vectors {
            lines.push(json!({
                "kind": "vector",
                "decision": v.decision,
                "conds": v.conds,
                "outcome": v.outcome,
                "test": v.test,
                "seq": v.seq,
            }));
        }
        lines.extend(self.statements.iter().map(|s| json!({"kind": "stmt", "node": s})));
        lines.extend(self.entries.iter().map(|f| json!({"kind": "entry", "function": f})));
        lines.extend(
            self.exits
                .iter()
                .map(|e| json!({"kind": "exit", "function": e.function, "node": e.node})),
        );
        let mut out = String::new();
        for l in lines {
            out.push_str(&l.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Trace, TraceError> {
        #[derive(Deserialize)]
        #[serde(tag = "kind", rename_all = "lowercase")]
        enum Record {
            Header { program_hash: String },
            Vector(EvaluationVector),
            Stmt { node: NodeId },
            Entry { function: String },
            Exit(ExitPoint),
        }
        let mut t = Trace::default();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let r: Record = serde_json::from_str(line).map_err(|e| TraceError::Malformed {
                line: i + 1,
                message: e.to_string(),
            })?;
            match r {
                Record::Header { program_hash } => t.program_hash = program_hash,
                Record::Vector(v) => t.vectors.push(v),
                Record::Stmt { node } => {
                    t.statements.insert(node);
                }
                Record::Entry { function } => {
                    t.entries.insert(function);
                }
                Record::Exit(e) => {
                    t.exits.insert(e);
                }
            }
        }
        t.vectors.sort();
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vector(test: u32, seq: u32, conds: &str, outcome: bool) -> EvaluationVector {
        let conds = conds
            .chars()
            .map(|c| match c {
                'T' => TriState::True,
                'F' => TriState::False,
                _ => TriState::NotEvaluated,
            })
            .collect();
        EvaluationVector {
            test,
            seq,
            decision: 0,
            conds,
            outcome,
        }
    }

    fn trace(vs: Vec<EvaluationVector>, stmts: &[NodeId]) -> Trace {
        let mut t = Trace::new("h");
        t.vectors = vs;
        t.statements = stmts.iter().copied().collect();
        t
    }

    #[test]
    fn jsonl_round_trips() {
        let mut t = trace(vec![vector(0, 0, "TF-", false), vector(1, 0, "T", true)], &[3, 5]);
        t.entries.insert("f".into());
        t.exits.insert(ExitPoint {
            function: "f".into(),
            node: None,
        });
        t.exits.insert(ExitPoint {
            function: "f".into(),
            node: Some(9),
        });
        let text = t.to_jsonl();
        assert!(text.contains(r#""conds":["T","F","-"]"#), "{text}");
        assert_eq!(Trace::from_jsonl(&text).unwrap(), t);
    }

    #[test]
    fn merge_is_commutative_and_associative() {
        let a = trace(vec![vector(0, 0, "T", true)], &[1]);
        let b = trace(vec![vector(1, 0, "F", false), vector(1, 1, "T", true)], &[2]);
        let c = trace(vec![vector(2, 0, "F", false)], &[1, 3]);
        let ab = a.clone().merge(b.clone()).unwrap();
        assert_eq!(ab, b.clone().merge(a.clone()).unwrap());
        assert_eq!(
            ab.merge(c.clone()).unwrap(),
            a.merge(b.merge(c).unwrap()).unwrap()
        );
    }

    #[test]
    fn merging_empty_is_identity() {
        let a = trace(vec![vector(0, 0, "T", true)], &[1]);
        assert_eq!(Trace::default().merge(a.clone()).unwrap(), a);
    }

    #[test]
    fn different_programs_do_not_merge() {
        assert!(Trace::new("a").merge(Trace::new("b")).is_err());
    }
}

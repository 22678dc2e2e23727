//! Statement coverage, decision coverage and MC/DC over merged traces.

mod pairs;
mod report;
mod sites;
mod suggest;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

pub use pairs::{find_independence_pairs, pair_rule, IndependencePair, PairRule};
pub use report::render_text;
pub use sites::{exit_sites, statement_sites, ExitSite, StatementSite};
pub use suggest::{
    arm_universes, reachable_vectors, simulate, suggest, Feasibility, Suggestion, Want, MAX_SEARCH_CONDITIONS,
};

use crate::decisions::{ConditionKind, Decision, DecisionId, Origin, Structure};
use crate::runtime::{EvaluationVector, ExitPoint, Trace, TriState};
use crate::syntax::{NodeId, SourceSpan};
use crate::Analysis;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Statement,
    Decision,
    #[default]
    Mcdc,
}

impl FromStr for Criterion {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "statement" => Ok(Criterion::Statement),
            "decision" => Ok(Criterion::Decision),
            "mcdc" => Ok(Criterion::Mcdc),
            _ => Err(format!("unknown criterion `{s}` (expected statement, decision or mcdc)")),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Statement => "statement",
            Criterion::Decision => "decision",
            Criterion::Mcdc => "mcdc",
        })
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CoverageOptions {
    /// Count contextually pruned match arms as decisions.
    pub strict_arms: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoverageError {
    #[error("trace was recorded for program {found}, not {expected}")]
    StaleTrace { expected: String, found: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct StatementReport {
    #[serde(flatten)]
    pub site: StatementSite,
    pub covered: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExitReport {
    #[serde(flatten)]
    pub site: ExitSite,
    pub covered: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FunctionReport {
    pub name: String,
    pub entered: bool,
    pub exits: Vec<ExitReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub index: usize,
    #[serde(flatten)]
    pub kind: ConditionKind,
    pub text: String,
    pub span: SourceSpan,
    pub const_exempt: bool,
    /// The only value the condition can take for inputs that reach it.
    pub fixed_in_context: Option<bool>,
    /// Whether MC/DC asks anything of this condition: not exempt, and not
    /// fixed in context unless arms are strict.
    pub obligated: bool,
    pub seen_true: bool,
    pub seen_false: bool,
    /// The first independence pair found, if any.
    pub pair: Option<IndependencePair>,
}

impl ConditionReport {
    /// Meets the MC/DC obligation (exempt conditions always do).
    pub fn shown(&self) -> bool {
        !self.obligated || self.pair.is_some()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecisionReport {
    pub id: DecisionId,
    pub function: String,
    pub span: SourceSpan,
    pub origin: Origin,
    pub arm: Option<usize>,
    pub pruned: bool,
    /// Left out of every denominator: pruned (without strict arms) or
    /// without any obligated condition.
    pub excluded: bool,
    pub structure: Structure,
    pub visits: usize,
    pub seen_true: bool,
    pub seen_false: bool,
    pub conditions: Vec<ConditionReport>,
}

impl DecisionReport {
    pub fn both_outcomes(&self) -> bool {
        self.seen_true && self.seen_false
    }

    pub fn mcdc(&self) -> bool {
        self.both_outcomes() && self.conditions.iter().all(ConditionReport::shown)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObligationKind {
    Statement { node: NodeId },
    Entry { function: String },
    Exit { function: String, node: Option<NodeId> },
    Outcome { decision: DecisionId, outcome: bool },
    ConditionValue { decision: DecisionId, condition: usize, value: bool },
    Independence { decision: DecisionId, condition: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct Obligation {
    /// The weakest criterion that requires it.
    pub criterion: Criterion,
    #[serde(flatten)]
    pub kind: ObligationKind,
    pub span: SourceSpan,
    pub message: String,
    pub suggestion: Option<Suggestion>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub covered: usize,
    pub total: usize,
}

impl Tally {
    fn add(&mut self, ok: bool) {
        self.total += 1;
        self.covered += ok as usize;
    }

    pub fn complete(&self) -> bool {
        self.covered == self.total
    }

    pub fn percent(&self) -> f64 {
        if self.total == 0 {
            100.0
        } else {
            100.0 * self.covered as f64 / self.total as f64
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub statements: Tally,
    pub entries: Tally,
    pub exits: Tally,
    /// Decisions that took both outcomes.
    pub decisions: Tally,
    /// Non-exempt conditions seen both true and false.
    pub condition_values: Tally,
    /// Non-exempt conditions with an independence pair.
    pub independence: Tally,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub statement: bool,
    pub decision: bool,
    pub mcdc: bool,
}

impl Verdicts {
    pub fn get(&self, c: Criterion) -> bool {
        match c {
            Criterion::Statement => self.statement,
            Criterion::Decision => self.decision,
            Criterion::Mcdc => self.mcdc,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverageReport {
    pub file: String,
    pub program_hash: String,
    pub criterion: Criterion,
    pub strict_arms: bool,
    /// Whether the requested criterion is met.
    pub satisfied: bool,
    pub verdicts: Verdicts,
    pub summary: Summary,
    pub functions: Vec<FunctionReport>,
    pub statements: Vec<StatementReport>,
    pub decisions: Vec<DecisionReport>,
    /// Unmet obligations of the requested criterion.
    pub obligations: Vec<Obligation>,
}

impl CoverageReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn fresh(a: &Analysis, trace: &Trace) -> Result<(), CoverageError> {
    if !trace.program_hash.is_empty() && trace.program_hash != a.program_hash {
        return Err(CoverageError::StaleTrace {
            expected: a.program_hash.clone(),
            found: trace.program_hash.clone(),
        });
    }
    Ok(())
}

/// A statement is covered iff the trace executed it.
pub fn check_statement_coverage(a: &Analysis, trace: &Trace) -> Result<Vec<StatementReport>, CoverageError> {
    fresh(a, trace)?;
    Ok(statement_sites(&a.typed)
        .into_iter()
        .map(|site| StatementReport {
            covered: trace.statements.contains(&site.node),
            site,
        })
        .collect())
}

/// Outcomes, condition values and independence pairs of every decision.
pub fn check_decision_coverage(
    a: &Analysis,
    trace: &Trace,
    opts: CoverageOptions,
) -> Result<Vec<DecisionReport>, CoverageError> {
    fresh(a, trace)?;
    Ok(decision_reports(a, trace, opts, &reachable_by_decision(a)))
}

type Reachable = HashMap<DecisionId, Option<Vec<(Vec<TriState>, bool)>>>;

/// Feasible vectors of every decision, `None` beyond the search bound.
fn reachable_by_decision(a: &Analysis) -> Reachable {
    let universes = arm_universes(&a.typed);
    a.decisions
        .decisions
        .iter()
        .map(|d| {
            let feas = Feasibility::for_decision(d, &a.typed, &universes);
            (d.id, reachable_vectors(d, &feas))
        })
        .collect()
}

fn decision_reports(a: &Analysis, trace: &Trace, opts: CoverageOptions, reach: &Reachable) -> Vec<DecisionReport> {
    let mut by_decision: HashMap<DecisionId, Vec<&EvaluationVector>> = HashMap::new();
    for v in &trace.vectors {
        by_decision.entry(v.decision).or_default().push(v);
    }
    a.decisions
        .decisions
        .iter()
        .map(|d| {
            let vectors = by_decision.get(&d.id).map_or(&[][..], |v| &v[..]);
            decision_report(d, vectors, reach[&d.id].as_deref(), opts)
        })
        .collect()
}

fn decision_report(
    d: &Decision,
    vectors: &[&EvaluationVector],
    reachable: Option<&[(Vec<TriState>, bool)]>,
    opts: CoverageOptions,
) -> DecisionReport {
    let pairs = find_independence_pairs(vectors, d.conditions.len());
    let seen = |i: usize, s: TriState| vectors.iter().any(|v| v.conds.get(i) == Some(&s));
    let fixed = |i: usize| {
        let r = reachable?;
        let can = |b: bool| r.iter().any(|(c, _)| c[i] == TriState::from_bool(b));
        match (can(true), can(false)) {
            (true, false) => Some(true),
            (false, true) => Some(false),
            _ => None,
        }
    };
    let conditions: Vec<ConditionReport> = d
        .conditions
        .iter()
        .map(|c| {
            let fixed_in_context = fixed(c.index);
            ConditionReport {
                index: c.index,
                kind: c.kind.clone(),
                text: c.kind.describe(),
                span: c.span,
                const_exempt: c.const_exempt,
                fixed_in_context,
                obligated: !c.const_exempt && (fixed_in_context.is_none() || opts.strict_arms),
                seen_true: seen(c.index, TriState::True),
                seen_false: seen(c.index, TriState::False),
                pair: pairs[c.index].first().copied(),
            }
        })
        .collect();
    DecisionReport {
        id: d.id,
        function: d.function.clone(),
        span: d.span,
        origin: d.origin,
        arm: d.arm,
        pruned: d.pruned,
        excluded: (d.pruned && !opts.strict_arms) || !conditions.iter().any(|c| c.obligated),
        structure: d.structure.clone(),
        visits: vectors.len(),
        seen_true: vectors.iter().any(|v| v.outcome),
        seen_false: vectors.iter().any(|v| !v.outcome),
        conditions,
    }
}

/// Full MC/DC report: entry and exit points, decision outcomes, condition
/// values and independence, plus statement coverage for reference.
pub fn check_mcdc(a: &Analysis, trace: &Trace, opts: CoverageOptions) -> Result<CoverageReport, CoverageError> {
    coverage_report(a, trace, Criterion::Mcdc, opts)
}

/// Evaluates all three criteria and lists the unmet obligations of the
/// requested one, with suggested vectors for decision obligations.
pub fn coverage_report(
    a: &Analysis,
    trace: &Trace,
    criterion: Criterion,
    opts: CoverageOptions,
) -> Result<CoverageReport, CoverageError> {
    let statements = check_statement_coverage(a, trace)?;
    let reach = reachable_by_decision(a);
    let decisions = decision_reports(a, trace, opts, &reach);
    let exits = exit_sites(&a.typed);
    let functions: Vec<FunctionReport> = a
        .typed
        .program
        .functions()
        .map(|f| FunctionReport {
            name: f.name.name.clone(),
            entered: trace.entries.contains(&f.name.name),
            exits: exits
                .iter()
                .filter(|e| e.function == f.name.name)
                .map(|e| ExitReport {
                    covered: trace.exits.contains(&ExitPoint {
                        function: e.function.clone(),
                        node: e.node,
                    }),
                    site: e.clone(),
                })
                .collect(),
        })
        .collect();

    let mut summary = Summary::default();
    let mut obligations = Vec::new();
    let mut need = |c: Criterion, kind: ObligationKind, span: SourceSpan, message: String| {
        obligations.push(Obligation {
            criterion: c,
            kind,
            span,
            message,
            suggestion: None,
        })
    };
    for s in &statements {
        summary.statements.add(s.covered);
        if !s.covered {
            need(
                Criterion::Statement,
                ObligationKind::Statement { node: s.site.node },
                s.site.span,
                format!("statement in `{}` never executed", s.site.function),
            );
        }
    }
    for f in &functions {
        summary.entries.add(f.entered);
        if !f.entered {
            let span = a.typed.env.fns[&f.name].span;
            need(
                Criterion::Decision,
                ObligationKind::Entry { function: f.name.clone() },
                span,
                format!("function `{}` never entered", f.name),
            );
        }
        for e in &f.exits {
            summary.exits.add(e.covered);
            if !e.covered {
                let what = match (e.site.node, e.site.from_question_mark) {
                    (None, _) => "end of body".to_string(),
                    (Some(_), true) => "early return of `?`".to_string(),
                    (Some(_), false) => "return".to_string(),
                };
                need(
                    Criterion::Decision,
                    ObligationKind::Exit {
                        function: f.name.clone(),
                        node: e.site.node,
                    },
                    e.site.span,
                    format!("exit point ({what}) of `{}` never taken", f.name),
                );
            }
        }
    }
    for d in decisions.iter().filter(|d| !d.excluded) {
        summary.decisions.add(d.both_outcomes());
        for (outcome, seen) in [(true, d.seen_true), (false, d.seen_false)] {
            if !seen {
                need(
                    Criterion::Decision,
                    ObligationKind::Outcome { decision: d.id, outcome },
                    d.span,
                    format!("decision {} ({}) never {}", d.id, describe_origin(d), outcome_word(outcome)),
                );
            }
        }
        for c in d.conditions.iter().filter(|c| c.obligated) {
            summary.condition_values.add(c.seen_true && c.seen_false);
            summary.independence.add(c.pair.is_some());
            for (value, seen) in [(true, c.seen_true), (false, c.seen_false)] {
                if !seen {
                    need(
                        Criterion::Mcdc,
                        ObligationKind::ConditionValue {
                            decision: d.id,
                            condition: c.index,
                            value,
                        },
                        c.span,
                        format!("condition {} `{}` of decision {} never {}", c.index, c.text, d.id, value),
                    );
                }
            }
            if c.pair.is_none() {
                need(
                    Criterion::Mcdc,
                    ObligationKind::Independence {
                        decision: d.id,
                        condition: c.index,
                    },
                    c.span,
                    format!(
                        "condition {} `{}` of decision {} not shown to independently affect the outcome",
                        c.index, c.text, d.id
                    ),
                );
            }
        }
    }

    let verdicts = Verdicts {
        statement: summary.statements.complete(),
        decision: summary.entries.complete() && summary.exits.complete() && summary.decisions.complete(),
        mcdc: summary.entries.complete()
            && summary.exits.complete()
            && summary.decisions.complete()
            && summary.condition_values.complete()
            && summary.independence.complete(),
    };
    obligations.retain(|o| o.criterion <= criterion);
    attach_suggestions(a, trace, &reach, &mut obligations);
    Ok(CoverageReport {
        file: a.typed.program.file.clone(),
        program_hash: a.program_hash.clone(),
        criterion,
        strict_arms: opts.strict_arms,
        satisfied: verdicts.get(criterion),
        verdicts,
        summary,
        functions,
        statements,
        decisions,
        obligations,
    })
}

fn attach_suggestions(a: &Analysis, trace: &Trace, reach: &Reachable, obligations: &mut [Obligation]) {
    for o in obligations.iter_mut() {
        let (id, want) = match o.kind {
            ObligationKind::Outcome { decision, outcome } => (decision, Want::Outcome(outcome)),
            ObligationKind::ConditionValue {
                decision,
                condition,
                value,
            } => (decision, Want::Value(condition, value)),
            ObligationKind::Independence { decision, condition } => (decision, Want::Independence(condition)),
            _ => continue,
        };
        let observed: Vec<&EvaluationVector> = trace.vectors_of(id).collect();
        o.suggestion = Some(suggest(a.decisions.get(id), want, &observed, reach[&id].as_deref()));
    }
}

fn outcome_word(o: bool) -> &'static str {
    if o {
        "true"
    } else {
        "false"
    }
}

pub(crate) fn describe_origin(d: &DecisionReport) -> String {
    match (d.origin, d.arm) {
        (Origin::MatchArm, Some(i)) => format!("match arm {}", i + 1),
        (Origin::QuestionMark, Some(i)) => format!("`?` arm {}", i + 1),
        (Origin::IfLet, _) => "`if let` pattern".into(),
        (Origin::LetElse, _) => "`let else` pattern".into(),
        (Origin::Guard, _) => "match guard".into(),
        _ => "boolean expression".into(),
    }
}

#[cfg(test)]
mod tests;

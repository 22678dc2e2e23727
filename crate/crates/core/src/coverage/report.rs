//! Human-readable rendering of coverage reports.

use std::fmt::Write;

use super::{describe_origin, CoverageReport, Suggestion, Tally};
use crate::runtime::TriState;

/// Renders the report with source excerpts for every unmet obligation.
pub fn render_text(r: &CoverageReport, source: &str) -> String {
    let lines: Vec<&str> = source.lines().collect();
    let mut out = String::new();
    let _ = writeln!(out, "coverage of {} (criterion: {}{})", r.file, r.criterion, if r.strict_arms { ", strict arms" } else { "" });
    let _ = writeln!(out);
    let row = |out: &mut String, name: &str, t: &Tally| {
        let _ = writeln!(out, "  {name:<18} {:>4}/{:<4} {:>6.1}%", t.covered, t.total, t.percent());
    };
    row(&mut out, "statements", &r.summary.statements);
    row(&mut out, "entry points", &r.summary.entries);
    row(&mut out, "exit points", &r.summary.exits);
    row(&mut out, "decisions", &r.summary.decisions);
    row(&mut out, "condition values", &r.summary.condition_values);
    row(&mut out, "independence", &r.summary.independence);

    if !r.decisions.is_empty() {
        let _ = writeln!(out, "\ndecisions:");
    }
    for d in &r.decisions {
        let mark = if d.excluded {
            if d.pruned {
                "pruned"
            } else {
                "exempt"
            }
        } else if d.mcdc() {
            "ok"
        } else {
            "--"
        };
        let outcomes = format!("{}{}", if d.seen_true { "T" } else { "" }, if d.seen_false { "F" } else { "" });
        let _ = writeln!(
            out,
            "  [{mark:>6}] #{} {} in `{}` at {}: {}  outcomes {{{}}}  visits {}",
            d.id,
            describe_origin(d),
            d.function,
            d.span,
            d.structure.render(),
            outcomes,
            d.visits
        );
        for c in &d.conditions {
            let seen = format!(
                "{}{}",
                if c.seen_true { TriState::True.symbol() } else { ' ' },
                if c.seen_false { TriState::False.symbol() } else { ' ' }
            );
            let pair = match (&c.pair, c.const_exempt, c.fixed_in_context) {
                (_, true, _) => "const, exempt".to_string(),
                (Some(p), _, _) => format!("pair {} / {}", p.when_true, p.when_false),
                (None, _, Some(v)) if !c.obligated => format!("always {v} in context"),
                (None, _, _) => "no pair".to_string(),
            };
            let _ = writeln!(out, "             c{} `{}` [{seen}] {pair}", c.index, c.text);
        }
    }

    if !r.obligations.is_empty() {
        let _ = writeln!(out, "\nunmet obligations ({}):", r.obligations.len());
    }
    for o in &r.obligations {
        let _ = writeln!(out, "  {}:{} [{}] {}", r.file, o.span, o.criterion, o.message);
        let ln = o.span.start.line as usize;
        if let Some(text) = ln.checked_sub(1).and_then(|i| lines.get(i)) {
            let _ = writeln!(out, "    {ln:>4} | {}", text.trim_end());
        }
        match &o.suggestion {
            Some(Suggestion::Vectors { vectors }) => {
                let _ = writeln!(out, "         suggest: {}", vectors.join(", "));
            }
            Some(Suggestion::Infeasible) => {
                let _ = writeln!(out, "         infeasible: no reachable vector discharges this");
            }
            Some(Suggestion::TooManyConditions { conditions }) => {
                let _ = writeln!(out, "         not searched: {conditions} conditions");
            }
            None => {}
        }
    }
    let verdict = |b: bool| if b { "met" } else { "not met" };
    let _ = writeln!(
        out,
        "\nstatement {}, decision {}, mcdc {}",
        verdict(r.verdicts.statement),
        verdict(r.verdicts.decision),
        verdict(r.verdicts.mcdc)
    );
    let _ = writeln!(out, "result: {} {}", r.criterion, if r.satisfied { "satisfied" } else { "NOT satisfied" });
    out
}

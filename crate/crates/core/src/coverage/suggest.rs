//! Exhaustive search for the evaluation vectors that would discharge
//! missing obligations.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::pairs::pair_rule;
use crate::decisions::{Decision, Origin, Structure};
use crate::runtime::{show_conds, EvaluationVector, TriState};
use crate::syntax::visit::{walk_expr, Visitor};
use crate::syntax::{Expr, ExprKind, NodeId};
use crate::types::exhaustive::remaining_spaces;
use crate::types::space::product_top;
use crate::types::tpat::positions;
use crate::types::{denotation, lift, slice_len_space, value_space_of, Ctor, Space, Step, TPat, TPatKind, Ty, TypeEnv, TypedProgram};

/// Decisions with more conditions are not searched.
pub const MAX_SEARCH_CONDITIONS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Suggestion {
    /// Adding these vectors, written like `TF-`, discharges the obligation.
    Vectors { vectors: Vec<String> },
    /// No reachable vector can discharge it.
    Infeasible,
    /// The decision exceeds the search bound.
    TooManyConditions { conditions: usize },
}

/// What a missing obligation asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Want {
    Outcome(bool),
    Value(usize, bool),
    Independence(usize),
}

/// Short-circuit evaluation of the structure under a full assignment
/// (bit `i` is condition `i`), writing the conditions it reaches.
pub fn simulate(s: &Structure, assign: u32, out: &mut [TriState]) -> bool {
    match s {
        Structure::Cond(i) => {
            let b = assign >> i & 1 == 1;
            out[*i] = TriState::from_bool(b);
            b
        }
        Structure::True => true,
        Structure::Not(x) => !simulate(x, assign, out),
        Structure::And(xs) => xs.iter().all(|x| simulate(x, assign, out)),
        Structure::Or(xs) => xs.iter().any(|x| simulate(x, assign, out)),
    }
}

/// Decides whether a vector can be produced by some input.
pub enum Feasibility {
    /// Boolean conditions are treated as independent.
    Free,
    /// Pattern conditions: the values reaching the pattern, and per
    /// condition the values for which its test runs and passes or fails.
    Pattern {
        universe: Space,
        pass: Vec<Space>,
        fail: Vec<Space>,
    },
}

impl Feasibility {
    pub fn for_decision(d: &Decision, tp: &TypedProgram, universes: &HashMap<NodeId, Space>) -> Self {
        if matches!(d.origin, Origin::BooleanExpr | Origin::Guard) {
            return Feasibility::Free;
        }
        let root = &tp.patterns[&d.node];
        let env = &tp.env;
        let universe = universes
            .get(&d.node)
            .cloned()
            .unwrap_or_else(|| value_space_of(&root.ty, env));
        let n = d.conditions.len();
        let mut pass = vec![universe.clone(); n];
        let mut fail = vec![universe.clone(); n];
        condition_spaces(root, &root.ty, &mut Vec::new(), d, env, &mut pass, &mut fail);
        Feasibility::Pattern { universe, pass, fail }
    }

    pub fn feasible(&self, conds: &[TriState]) -> bool {
        match self {
            Feasibility::Free => true,
            Feasibility::Pattern { universe, pass, fail } => {
                let mut s = universe.clone();
                for (i, c) in conds.iter().enumerate() {
                    match c {
                        TriState::True => s = s.intersect(&pass[i]),
                        TriState::False => s = s.intersect(&fail[i]),
                        TriState::NotEvaluated => continue,
                    }
                    if s.is_empty() {
                        return false;
                    }
                }
                true
            }
        }
    }
}

fn condition_spaces(
    p: &TPat,
    root: &Ty,
    path: &mut Vec<Step>,
    d: &Decision,
    env: &TypeEnv,
    pass: &mut [Space],
    fail: &mut [Space],
) {
    if let Some(i) = d.condition_of(p.id) {
        let test = own_test_space(p, env);
        let rest = value_space_of(&p.ty, env).subtract(&test);
        pass[i] = lift(root, path, &test, env);
        fail[i] = lift(root, path, &rest, env);
    }
    let mut descend = |step: Vec<Step>, c: &TPat, path: &mut Vec<Step>| {
        let n = path.len();
        path.extend(step);
        condition_spaces(c, root, path, d, env, pass, fail);
        path.truncate(n);
    };
    match &p.kind {
        TPatKind::Binding { sub: Some(s), .. } => descend(vec![], s, path),
        TPatKind::Reference { inner, .. } | TPatKind::Grouped(inner) => descend(vec![], inner, path),
        TPatKind::Or(alts) => alts.iter().for_each(|a| descend(vec![], a, path)),
        TPatKind::Struct { ctor, fields, .. } => {
            for (i, f) in fields {
                descend(ctor_step(*ctor, *i), f, path);
            }
        }
        TPatKind::TupleStruct { ctor, elems } => {
            let n = crate::types::tpat::ctor_fields(*ctor, env).len();
            for (i, e) in positions(elems, n) {
                descend(ctor_step(*ctor, i), e, path);
            }
        }
        TPatKind::Tuple(elems) => {
            let n = match p.ty.peel() {
                Ty::Tuple(ts) => ts.len(),
                _ => elems.len(),
            };
            for (i, e) in positions(elems, n) {
                descend(vec![Step::Field(i)], e, path);
            }
        }
        TPatKind::Slice { elems, array_len: Some(n) } => {
            for (i, e) in positions(elems, *n as usize) {
                descend(vec![Step::Field(i)], e, path);
            }
        }
        TPatKind::Slice { elems, array_len: None } => {
            let (pre, suf, _) = crate::types::tpat::split_rest(elems);
            for (k, e) in pre.iter().enumerate() {
                descend(vec![Step::FromStart(k)], e, path);
            }
            for (j, e) in suf.iter().enumerate() {
                descend(vec![Step::FromEnd(suf.len() - 1 - j)], e, path);
            }
        }
        _ => {}
    }
}

fn ctor_step(ctor: Ctor, i: usize) -> Vec<Step> {
    match ctor {
        Ctor::Variant(_, v) => vec![Step::Variant(v), Step::Field(i)],
        Ctor::Struct(_) => vec![Step::Field(i)],
    }
}

/// Values of the node's own type that pass its own test.
fn own_test_space(p: &TPat, env: &TypeEnv) -> Space {
    let variant = |e, v: u32| {
        let tys = &env.variant(e, v).fields.tys;
        Space::Enum(e, BTreeMap::from([(v, product_top(tys, env))]))
    };
    match &p.kind {
        TPatKind::UnitVariant(e, v)
        | TPatKind::TupleStruct { ctor: Ctor::Variant(e, v), .. }
        | TPatKind::Struct { ctor: Ctor::Variant(e, v), .. } => variant(*e, *v),
        TPatKind::Slice { elems, array_len: None } => {
            let fixed = elems.iter().filter(|e| !e.is_rest_like()).count();
            let elem = p.ty.elem().expect("slice pattern on a slice").clone();
            slice_len_space(&elem, fixed, fixed < elems.len(), env)
        }
        _ => denotation(p, env),
    }
}

/// For every match arm pattern, the values that reach it.
pub fn arm_universes(tp: &TypedProgram) -> HashMap<NodeId, Space> {
    struct U<'a>(&'a TypedProgram, HashMap<NodeId, Space>);
    impl Visitor for U<'_> {
        fn visit_expr(&mut self, e: &Expr) {
            if let ExprKind::Match { scrutinee, arms, .. } = &e.kind {
                let typed: Vec<(&TPat, bool)> =
                    arms.iter().map(|a| (self.0.pattern(&a.pat), a.guard.is_some())).collect();
                let spaces = remaining_spaces(&typed, self.0.ty(scrutinee), &self.0.env);
                for (a, s) in arms.iter().zip(spaces) {
                    self.1.insert(a.pat.id, s);
                }
            }
            walk_expr(self, e);
        }
    }
    let mut u = U(tp, HashMap::new());
    crate::syntax::visit::walk_program(&mut u, &tp.program);
    u.1
}

/// Distinct feasible vectors of a decision with their outcomes, in
/// assignment order.
pub fn reachable_vectors(d: &Decision, feas: &Feasibility) -> Option<Vec<(Vec<TriState>, bool)>> {
    let n = d.conditions.len();
    if n > MAX_SEARCH_CONDITIONS {
        return None;
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for a in 0..1u32 << n {
        let mut conds = vec![TriState::NotEvaluated; n];
        let o = simulate(&d.structure, a, &mut conds);
        if seen.insert(conds.clone()) && feas.feasible(&conds) {
            out.push((conds, o));
        }
    }
    Some(out)
}

/// The fewest vectors that discharge `want`, given what was observed.
pub fn suggest(
    d: &Decision,
    want: Want,
    observed: &[&EvaluationVector],
    reachable: Option<&[(Vec<TriState>, bool)]>,
) -> Suggestion {
    let Some(reachable) = reachable else {
        return Suggestion::TooManyConditions {
            conditions: d.conditions.len(),
        };
    };
    let one = |v: &(Vec<TriState>, bool)| Suggestion::Vectors {
        vectors: vec![show_conds(&v.0)],
    };
    match want {
        Want::Outcome(o) => reachable.iter().find(|v| v.1 == o).map_or(Suggestion::Infeasible, one),
        Want::Value(i, b) => reachable
            .iter()
            .find(|v| v.0[i] == TriState::from_bool(b))
            .map_or(Suggestion::Infeasible, one),
        Want::Independence(i) => {
            let pairs = |a: &(Vec<TriState>, bool), b: (&[TriState], bool)| pair_rule(i, (&a.0, a.1), b).is_some();
            if let Some(v) = reachable
                .iter()
                .find(|v| observed.iter().any(|o| pairs(v, (&o.conds, o.outcome))))
            {
                return one(v);
            }
            for a in reachable {
                if let Some(b) = reachable.iter().find(|b| pairs(a, (&b.0, b.1))) {
                    return Suggestion::Vectors {
                        vectors: vec![show_conds(&a.0), show_conds(&b.0)],
                    };
                }
            }
            Suggestion::Infeasible
        }
    }
}

//! Independence pairs under the masking rule adapted to short-circuit
//! evaluation.

use serde::Serialize;

use crate::runtime::{EvaluationVector, TriState, VectorRef};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairRule {
    /// Every other condition evaluated in both vectors and equal.
    UniqueCause,
    /// Some other condition was skipped in one of the vectors.
    Masking,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IndependencePair {
    pub condition: usize,
    /// The vector in which the condition was true.
    pub when_true: VectorRef,
    pub when_false: VectorRef,
    pub rule: PairRule,
}

/// The pair rule on raw condition vectors: condition `i` is evaluated with
/// opposite values, the outcomes differ, and every other condition is equal
/// wherever both vectors evaluated it.
pub fn pair_rule(i: usize, a: (&[TriState], bool), b: (&[TriState], bool)) -> Option<PairRule> {
    let (ca, oa) = a;
    let (cb, ob) = b;
    let (Some(x), Some(y)) = (ca[i].as_bool(), cb[i].as_bool()) else { return None };
    if x == y || oa == ob {
        return None;
    }
    let mut masked = false;
    for (j, (p, q)) in ca.iter().zip(cb).enumerate() {
        if j == i {
            continue;
        }
        match (p, q) {
            (TriState::NotEvaluated, _) | (_, TriState::NotEvaluated) => masked = true,
            _ if p != q => return None,
            _ => {}
        }
    }
    Some(if masked { PairRule::Masking } else { PairRule::UniqueCause })
}

/// All pairs, per condition index, among vectors of one decision.
/// Identical vectors are considered once, represented by their first visit.
pub fn find_independence_pairs(vectors: &[&EvaluationVector], n_conditions: usize) -> Vec<Vec<IndependencePair>> {
    let mut distinct: Vec<&EvaluationVector> = Vec::new();
    for v in vectors {
        if !distinct.iter().any(|d| d.conds == v.conds && d.outcome == v.outcome) {
            distinct.push(v);
        }
    }
    let mut out = vec![Vec::new(); n_conditions];
    for (i, pairs) in out.iter_mut().enumerate() {
        for a in &distinct {
            if a.conds[i] != TriState::True {
                continue;
            }
            for b in &distinct {
                if let Some(rule) = pair_rule(i, (&a.conds, a.outcome), (&b.conds, b.outcome)) {
                    pairs.push(IndependencePair {
                        condition: i,
                        when_true: a.id(),
                        when_false: b.id(),
                        rule,
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runtime::trace::TriState::{False as F, NotEvaluated as N, True as T};

    fn v(seq: u32, conds: Vec<TriState>, outcome: bool) -> EvaluationVector {
        EvaluationVector {
            test: 0,
            seq,
            decision: 0,
            conds,
            outcome,
        }
    }

    fn summary(pairs: &[Vec<IndependencePair>]) -> Vec<Vec<(u32, u32)>> {
        pairs
            .iter()
            .map(|ps| ps.iter().map(|p| (p.when_true.seq, p.when_false.seq)).collect())
            .collect()
    }

    #[test]
    fn minimal_and_set() {
        let vs = [v(0, vec![T, T], true), v(1, vec![T, F], false), v(2, vec![F, N], false)];
        let refs: Vec<_> = vs.iter().collect();
        let pairs = find_independence_pairs(&refs, 2);
        assert_eq!(summary(&pairs), vec![vec![(0, 2)], vec![(0, 1)]]);
        assert_eq!(pairs[0][0].rule, PairRule::Masking);
        assert_eq!(pairs[1][0].rule, PairRule::UniqueCause);
    }

    #[test]
    fn single_condition_pairs_trivially() {
        let vs = [v(0, vec![T], true), v(1, vec![F], false)];
        let refs: Vec<_> = vs.iter().collect();
        assert_eq!(summary(&find_independence_pairs(&refs, 1)), vec![vec![(0, 1)]]);
    }

    #[test]
    fn identical_vectors_give_nothing() {
        let vs = [v(0, vec![T, T], true), v(1, vec![T, T], true)];
        let refs: Vec<_> = vs.iter().collect();
        assert_eq!(summary(&find_independence_pairs(&refs, 2)), vec![vec![], vec![]]);
    }

    #[test]
    fn three_conditions_with_masking() {
        // a && (b || c)
        let vs = [
            v(0, vec![T, T, N], true),
            v(1, vec![F, N, N], false),
            v(2, vec![T, F, F], false),
            v(3, vec![T, F, T], true),
        ];
        let refs: Vec<_> = vs.iter().collect();
        let pairs = find_independence_pairs(&refs, 3);
        assert!(pairs.iter().all(|p| !p.is_empty()), "{pairs:?}");
    }
}

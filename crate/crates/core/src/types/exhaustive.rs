//! Exhaustiveness of `match` arms over exact value spaces.

use super::env::TypeEnv;
use super::space::{value_space_of, Space};
use super::tpat::{denotation, TPat};
use super::ty::Ty;
use crate::runtime::Value;

/// Values not yet matched before each arm, plus the values left over after
/// the last arm. Guarded arms remove nothing since their guard may fail.
pub fn remaining_spaces(arms: &[(&TPat, bool)], ty: &Ty, env: &TypeEnv) -> Vec<Space> {
    let mut rest = value_space_of(ty, env);
    let mut out = Vec::with_capacity(arms.len() + 1);
    for (p, guarded) in arms {
        out.push(rest.clone());
        if !guarded {
            rest = rest.subtract(&denotation(p, env));
        }
    }
    out.push(rest);
    out
}

/// `Ok` when every value of `ty` is matched by some unguarded arm, otherwise
/// an unmatched value.
pub fn check_exhaustive(arms: &[(&TPat, bool)], ty: &Ty, env: &TypeEnv) -> Result<(), Value> {
    let rest = remaining_spaces(arms, ty, env).pop().expect("at least one space");
    match rest.witness(ty, env) {
        None => Ok(()),
        Some(v) => Err(v),
    }
}

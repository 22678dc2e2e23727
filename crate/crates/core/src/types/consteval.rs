//! Integer and char arithmetic shared by constant evaluation and the
//! interpreter, plus the constant-expression evaluator.

use std::collections::HashMap;

use super::ty::Ty;
use crate::runtime::Value;
use crate::syntax::{BinOp, Expr, ExprKind, IntTy, Lit, NodeId, UnOp};

/// Checked integer arithmetic. Overflow and division by zero are errors.
pub fn int_binop(op: BinOp, ty: IntTy, a: i64, b: i64) -> Result<i64, String> {
    let r = match op {
        BinOp::Add => a.checked_add(b),
        BinOp::Sub => a.checked_sub(b),
        BinOp::Mul => a.checked_mul(b),
        BinOp::Div | BinOp::Rem if b == 0 => {
            return Err(format!("attempt to {} by zero", if op == BinOp::Div { "divide" } else { "calculate the remainder" }))
        }
        BinOp::Div => a.checked_div(b),
        BinOp::Rem => a.checked_rem(b),
        _ => unreachable!("not an arithmetic operator"),
    };
    match r {
        Some(v) if ty.contains(v) => Ok(v),
        _ => Err(format!("attempt to compute `{a} {} {b}`, which overflows {}", op.symbol(), ty.name())),
    }
}

pub fn compare(op: BinOp, a: &Value, b: &Value) -> bool {
    match op {
        BinOp::Eq => a == b,
        BinOp::Ne => a != b,
        BinOp::Lt => a < b,
        BinOp::Le => a <= b,
        BinOp::Gt => a > b,
        BinOp::Ge => a >= b,
        _ => unreachable!("not a comparison"),
    }
}

/// `v as target`.
pub fn cast(v: &Value, target: &Ty) -> Result<Value, String> {
    let n = match v {
        Value::Int(_, x) => *x,
        Value::Bool(b) => *b as i64,
        Value::Char(c) => *c as i64,
        _ => return Err("invalid cast".into()),
    };
    match target.peel() {
        Ty::Int(t) => Ok(Value::Int(*t, t.wrap(n))),
        Ty::Char => char::from_u32(n as u32)
            .filter(|_| (0..=255).contains(&n))
            .map(Value::Char)
            .ok_or_else(|| "only u8 can be cast as char".into()),
        _ => Err("invalid cast".into()),
    }
}

/// Evaluates a constant initializer. `types` holds the checked type of every
/// expression; `lookup` resolves paths to other constants.
pub fn eval_const(
    e: &Expr,
    types: &HashMap<NodeId, Ty>,
    lookup: &mut dyn FnMut(&str) -> Result<Value, String>,
) -> Result<Value, String> {
    let ty = |e: &Expr| types.get(&e.id).cloned().unwrap_or(Ty::Never);
    match &e.kind {
        ExprKind::Lit(l) => Ok(match l {
            Lit::Bool(b) => Value::Bool(*b),
            Lit::Char(c) => Value::Char(*c),
            Lit::Str(s) => Value::Str(s.clone()),
            Lit::Int { value, .. } => {
                let t = ty(e).int().ok_or("integer literal without an integer type")?;
                if *value > t.max_value() as u64 {
                    // Only reachable under negation, handled below.
                    return Err(format!("literal out of range for {}", t.name()));
                }
                Value::Int(t, *value as i64)
            }
        }),
        ExprKind::Paren(x) => eval_const(x, types, lookup),
        ExprKind::Tuple(xs) if xs.is_empty() => Ok(Value::UNIT),
        ExprKind::Path(p) if p.is_single() => lookup(&p.segments[0].name),
        ExprKind::Unary(UnOp::Neg, x) => {
            let t = ty(e).int().ok_or("negation of a non-integer")?;
            if let ExprKind::Lit(Lit::Int { value, .. }) = &x.kind {
                let v = -(*value as i64);
                return if t.contains(v) {
                    Ok(Value::Int(t, v))
                } else {
                    Err(format!("literal out of range for {}", t.name()))
                };
            }
            let v = eval_const(x, types, lookup)?.as_int().ok_or("negation of a non-integer")?;
            int_binop(BinOp::Sub, t, 0, v).map(|r| Value::Int(t, r))
        }
        ExprKind::Unary(UnOp::Not, x) => {
            let b = eval_const(x, types, lookup)?.as_bool().ok_or("`!` on a non-boolean")?;
            Ok(Value::Bool(!b))
        }
        ExprKind::Ref { expr, .. } => eval_const(expr, types, lookup),
        ExprKind::Cast(x, _) => cast(&eval_const(x, types, lookup)?, &ty(e)),
        ExprKind::Binary(op, a, b) => {
            let va = eval_const(a, types, lookup)?;
            match op {
                BinOp::And | BinOp::Or => {
                    let x = va.as_bool().ok_or("logical operator on a non-boolean")?;
                    if (*op == BinOp::And) != x {
                        return Ok(Value::Bool(x));
                    }
                    eval_const(b, types, lookup)
                }
                _ if op.is_comparison() => {
                    let vb = eval_const(b, types, lookup)?;
                    Ok(Value::Bool(compare(*op, &va, &vb)))
                }
                _ => {
                    let vb = eval_const(b, types, lookup)?;
                    let t = ty(e).int().ok_or("arithmetic on a non-integer")?;
                    let (Some(x), Some(y)) = (va.as_int(), vb.as_int()) else {
                        return Err("arithmetic on a non-integer".into());
                    };
                    int_binop(*op, t, x, y).map(|r| Value::Int(t, r))
                }
            }
        }
        _ => Err("not a constant expression: only literals, constants, operators and casts are allowed".into()),
    }
}

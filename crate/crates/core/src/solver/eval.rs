//! Direct constant evaluation of expressions under a variable assignment.
//!
//! Independent of bit-blasting; used to read template rows off models and as
//! the reference the blaster is tested against.

use std::collections::HashMap;

use super::expr::{ExprId, ExprPool, Op, VarId};
use crate::types::{mask, ops};

/// Evaluate `root` with variable values supplied by `lookup`.
/// Returns `None` if some variable has no value.
pub fn eval(pool: &ExprPool, root: ExprId, lookup: &dyn Fn(VarId) -> Option<u128>) -> Option<u128> {
    let mut memo = HashMap::new();
    eval_memo(pool, root, lookup, &mut memo)
}

pub fn eval_memo(
    pool: &ExprPool,
    root: ExprId,
    lookup: &dyn Fn(VarId) -> Option<u128>,
    memo: &mut HashMap<ExprId, u128>,
) -> Option<u128> {
    if let Some(&v) = memo.get(&root) {
        return Some(v);
    }
    // explicit stack: SSA chains get deep at higher unwindings
    let mut stack = vec![(root, false)];
    while let Some((e, expanded)) = stack.pop() {
        if memo.contains_key(&e) {
            continue;
        }
        let n = pool.node(e);
        if !expanded {
            stack.push((e, true));
            for &a in &n.args {
                if !memo.contains_key(&a) {
                    stack.push((a, false));
                }
            }
            continue;
        }
        let arg = |i: usize| memo[&n.args[i]];
        let w = n.ty.width;
        let aw = n.args.first().map(|&a| pool.width(a)).unwrap_or(w);
        let b = |x: bool| x as u128;
        let v = match n.op {
            Op::Const(c) => c,
            Op::Var(v) => lookup(v)? & mask(w),
            Op::Not => !arg(0) & mask(w),
            Op::And => arg(0) & arg(1),
            Op::Or => arg(0) | arg(1),
            Op::Xor => arg(0) ^ arg(1),
            Op::Neg => ops::neg(arg(0), w),
            Op::Add => ops::add(arg(0), arg(1), w),
            Op::Sub => ops::sub(arg(0), arg(1), w),
            Op::Mul => ops::mul(arg(0), arg(1), w),
            Op::UDiv => ops::udiv(arg(0), arg(1), w),
            Op::SDiv => ops::sdiv(arg(0), arg(1), w),
            Op::URem => ops::urem(arg(0), arg(1), w),
            Op::SRem => ops::srem(arg(0), arg(1), w),
            Op::Shl => ops::shl(arg(0), arg(1), w),
            Op::LShr => ops::lshr(arg(0), arg(1), w),
            Op::AShr => ops::ashr(arg(0), arg(1), w),
            Op::Eq => b(arg(0) == arg(1)),
            Op::Ne => b(arg(0) != arg(1)),
            Op::Ult => b(ops::ult(arg(0), arg(1), aw)),
            Op::Ule => b(ops::ule(arg(0), arg(1), aw)),
            Op::Slt => b(ops::slt(arg(0), arg(1), aw)),
            Op::Sle => b(ops::sle(arg(0), arg(1), aw)),
            Op::Ite => {
                if arg(0) == 1 {
                    arg(1)
                } else {
                    arg(2)
                }
            }
            Op::BoolNot => b(arg(0) == 0),
            Op::BoolAnd => b(arg(0) == 1 && arg(1) == 1),
            Op::BoolOr => b(arg(0) == 1 || arg(1) == 1),
            Op::Implies => b(arg(0) == 0 || arg(1) == 1),
            Op::ZeroExt => ops::zext(arg(0), aw),
            Op::SignExt => ops::sext(arg(0), aw, w),
            Op::Extract { hi, lo } => (arg(0) >> lo) & mask(hi - lo + 1),
        };
        memo.insert(e, v);
    }
    memo.get(&root).copied()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::expr::SsaName;
    use crate::types::BvType;

    #[test]
    fn evaluates_wrapping_add() {
        let mut p = ExprPool::new();
        let a = p.constant(200, BvType::U8);
        let b = p.constant(100, BvType::U8);
        let s = p.add(a, b);
        assert_eq!(eval(&p, s, &|_| None), Some(44));
    }

    #[test]
    fn missing_variable_gives_none() {
        let mut p = ExprPool::new();
        let x = p.var(SsaName::def("x", 0, &[]), BvType::U8);
        assert_eq!(eval(&p, x, &|_| None), None);
        assert_eq!(eval(&p, x, &|_| Some(0x1ff)), Some(0xff));
    }

    #[test]
    fn sign_extension_of_min() {
        let mut p = ExprPool::new();
        let m = p.int(i32::MIN as i128, BvType::I32);
        let e = p.sign_ext(m, BvType::signed(33));
        let v = eval(&p, e, &|_| None).unwrap();
        assert_eq!(BvType::signed(33).to_int(v), -2147483648);
    }
}

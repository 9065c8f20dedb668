//! Source expressions to pool terms. Mirrors the interpreter's evaluation
//! rules operator by operator.

use std::collections::BTreeMap;

use crate::frontend::ast::{BinOp, Expr, ExprKind, UnOp};
use crate::frontend::typecheck::operand_type;
use crate::solver::expr::{ExprId, ExprPool, Op, SsaName};
use crate::types::BvType;

/// Base name of nondeterministic inputs; `$` keeps it apart from program
/// identifiers.
pub const NONDET: &str = "$nondet";

/// Convert `a` to `to` with assignment semantics (`!= 0` into `_Bool`).
pub fn cast(pool: &mut ExprPool, a: ExprId, to: BvType) -> ExprId {
    let from = pool.ty(a);
    if to.is_bool() && !from.is_bool() {
        let z = pool.constant(0, from);
        pool.ne(a, z)
    } else {
        pool.convert(a, to)
    }
}

/// Boolean reading of a value.
pub fn truth(pool: &mut ExprPool, a: ExprId) -> ExprId {
    cast(pool, a, BvType::BOOL)
}

pub struct Translator<'a> {
    pub pool: &'a mut ExprPool,
    pub env: &'a BTreeMap<String, ExprId>,
    pub path: &'a [u32],
}

impl Translator<'_> {
    pub fn expr(&mut self, e: &Expr) -> ExprId {
        let w = e.ty.width;
        match &e.kind {
            ExprKind::Lit(v) => self.pool.int(*v, e.ty),
            ExprKind::Var(n) => self.env[n],
            ExprKind::Nondet(t, id) => self.pool.var(SsaName::def(NONDET, *id, self.path), *t),
            ExprKind::Cast(t, a) => self.at(a, *t),
            ExprKind::Unary(UnOp::Not, a) => {
                let c = self.cond(a);
                self.pool.not(c)
            }
            ExprKind::Unary(UnOp::Neg, a) => {
                let x = self.at(a, e.ty);
                self.pool.neg(x)
            }
            ExprKind::Unary(UnOp::BitNot, a) => {
                let x = self.at(a, e.ty);
                self.pool.unary(Op::Not, x)
            }
            ExprKind::Binary(BinOp::And, a, b) => {
                let (x, y) = (self.cond(a), self.cond(b));
                self.pool.and(x, y)
            }
            ExprKind::Binary(BinOp::Or, a, b) => {
                let (x, y) = (self.cond(a), self.cond(b));
                self.pool.or(x, y)
            }
            ExprKind::Binary(op, a, b) if op.is_shift() => {
                let x = self.at(a, e.ty);
                let amt = self.shift_amount(b, w);
                let sop = match op {
                    BinOp::Shl => Op::Shl,
                    _ if e.ty.signed => Op::AShr,
                    _ => Op::LShr,
                };
                self.pool.binary(sop, x, amt)
            }
            ExprKind::Binary(op, a, b) => {
                let ot = operand_type(*op, e.ty, a.ty, b.ty);
                let x = self.at(a, ot);
                let y = self.at(b, ot);
                let s = ot.signed;
                let p = &mut *self.pool;
                match op {
                    BinOp::Add => p.add(x, y),
                    BinOp::Sub => p.sub(x, y),
                    BinOp::Mul => p.binary(Op::Mul, x, y),
                    BinOp::Div => p.binary(if s { Op::SDiv } else { Op::UDiv }, x, y),
                    BinOp::Rem => p.binary(if s { Op::SRem } else { Op::URem }, x, y),
                    BinOp::BitAnd => p.binary(Op::And, x, y),
                    BinOp::BitOr => p.binary(Op::Or, x, y),
                    BinOp::BitXor => p.binary(Op::Xor, x, y),
                    BinOp::Lt => p.lt(x, y),
                    BinOp::Le => p.le(x, y),
                    BinOp::Gt => p.lt(y, x),
                    BinOp::Ge => p.le(y, x),
                    BinOp::Eq => p.eq(x, y),
                    BinOp::Ne => p.ne(x, y),
                    BinOp::Shl | BinOp::Shr | BinOp::And | BinOp::Or => unreachable!(),
                }
            }
            ExprKind::Ternary(c, a, b) => {
                let c = self.cond(c);
                let x = self.at(a, e.ty);
                let y = self.at(b, e.ty);
                self.pool.ite(c, x, y)
            }
        }
    }

    pub fn cond(&mut self, e: &Expr) -> ExprId {
        let v = self.expr(e);
        truth(self.pool, v)
    }

    pub fn at(&mut self, e: &Expr, ty: BvType) -> ExprId {
        let v = self.expr(e);
        cast(self.pool, v, ty)
    }

    /// Shift amount as an unsigned `w`-bit value, saturated at `w`.
    fn shift_amount(&mut self, b: &Expr, w: u32) -> ExprId {
        let v = self.expr(b);
        let bw = self.pool.width(v);
        let uw = BvType::unsigned(w);
        let v = self.pool.retype(v, BvType::unsigned(bw));
        if bw < w {
            self.pool.zero_ext(v, uw)
        } else if bw == w {
            v
        } else {
            let limit = self.pool.constant(w as u128, BvType::unsigned(bw));
            let small = self.pool.ult(v, limit);
            let low = self.pool.extract(v, w - 1, 0, false);
            let sat = self.pool.constant(w as u128, uw);
            self.pool.ite(small, low, sat)
        }
    }
}

//! Concrete small-step interpreter.
//!
//! Nondeterminism is resolved by an [`Oracle`] keyed by the source of the
//! choice and the iteration counts of the enclosing loops, which is exactly
//! how the SSA encoding names its free variables; replaying a solver model
//! therefore only needs a lookup.

use std::collections::BTreeMap;

use super::ast::*;
use super::printer::stmt_summary;
use super::typecheck::operand_type;
use crate::types::{mask, ops, BvType};

/// Where a nondeterministic value comes from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NondetKey {
    /// A `__VERIFIER_nondet_*()` occurrence.
    Input(u32),
    /// An uninitialized declaration.
    Uninit(String),
}

pub trait Oracle {
    fn choose(&mut self, key: &NondetKey, iters: &[u32], ty: BvType) -> u128;
}

impl<F: FnMut(&NondetKey, &[u32], BvType) -> u128> Oracle for F {
    fn choose(&mut self, key: &NondetKey, iters: &[u32], ty: BvType) -> u128 {
        self(key, iters, ty)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub stmt: u32,
    pub span: Span,
    pub text: String,
    /// Iteration index of each enclosing loop, outermost first.
    pub iters: Vec<u32>,
    /// Variable written by this step, if any.
    pub assigned: Option<(String, BvType, u128)>,
    /// Outcome of a branch or loop condition.
    pub branch: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Finished,
    AssertionFailed { stmt: u32, span: Span },
    /// An assumption was false: the run is infeasible from here on.
    Blocked { stmt: u32 },
    OutOfSteps,
}

#[derive(Clone, Debug)]
pub struct Execution {
    pub steps: Vec<Step>,
    pub outcome: Outcome,
    /// Final values of all declared variables.
    pub env: BTreeMap<String, (BvType, u128)>,
    /// Every nondeterministic choice made, in order.
    pub choices: Vec<(NondetKey, Vec<u32>, BvType, u128)>,
}

impl Execution {
    pub fn failed_assertion(&self) -> Option<u32> {
        match self.outcome {
            Outcome::AssertionFailed { stmt, .. } => Some(stmt),
            _ => None,
        }
    }
}

enum Flow {
    Continue,
    Stop(Outcome),
}

struct Machine<'a> {
    oracle: &'a mut dyn Oracle,
    env: BTreeMap<String, (BvType, u128)>,
    iters: Vec<u32>,
    steps: Vec<Step>,
    choices: Vec<(NondetKey, Vec<u32>, BvType, u128)>,
    budget: usize,
}

pub fn execute(p: &Program, oracle: &mut dyn Oracle, max_steps: usize) -> Execution {
    let mut m = Machine { oracle, env: BTreeMap::new(), iters: Vec::new(), steps: Vec::new(), choices: Vec::new(), budget: max_steps };
    let outcome = match m.block(&p.body) {
        Flow::Continue => Outcome::Finished,
        Flow::Stop(o) => o,
    };
    Execution { steps: m.steps, outcome, env: m.env, choices: m.choices }
}

/// Boolean reading of a value of type `ty`.
pub fn truth(v: u128, ty: BvType) -> bool {
    v & mask(ty.width) != 0
}

impl Machine<'_> {
    fn step(&mut self, s: &Stmt, assigned: Option<(String, BvType, u128)>, branch: Option<bool>) -> bool {
        self.steps.push(Step { stmt: s.id, span: s.span, text: stmt_summary(s), iters: self.iters.clone(), assigned, branch });
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        true
    }

    fn block(&mut self, ss: &[Stmt]) -> Flow {
        for s in ss {
            if let Flow::Stop(o) = self.stmt(s) {
                return Flow::Stop(o);
            }
        }
        Flow::Continue
    }

    fn stmt(&mut self, s: &Stmt) -> Flow {
        let ok = match &s.kind {
            StmtKind::Decl { name, ty, init } => {
                let v = match init {
                    Some(e) => {
                        let v = self.eval(e);
                        ops::cast(v, e.ty, *ty)
                    }
                    None => self.choose(NondetKey::Uninit(name.clone()), *ty),
                };
                self.env.insert(name.clone(), (*ty, v));
                self.step(s, Some((name.clone(), *ty, v)), None)
            }
            StmtKind::Assign { name, value } => {
                let ty = self.env[name].0;
                let v = self.eval(value);
                let v = ops::cast(v, value.ty, ty);
                self.env.insert(name.clone(), (ty, v));
                self.step(s, Some((name.clone(), ty, v)), None)
            }
            StmtKind::Assert(e) => {
                let c = self.cond(e);
                self.step(s, None, Some(c));
                if !c {
                    return Flow::Stop(Outcome::AssertionFailed { stmt: s.id, span: s.span });
                }
                true
            }
            StmtKind::Assume(e) => {
                let c = self.cond(e);
                self.step(s, None, Some(c));
                if !c {
                    return Flow::Stop(Outcome::Blocked { stmt: s.id });
                }
                true
            }
            StmtKind::If { cond, then, els } => {
                let c = self.cond(cond);
                if !self.step(s, None, Some(c)) {
                    return Flow::Stop(Outcome::OutOfSteps);
                }
                return self.block(if c { then } else { els });
            }
            StmtKind::While { cond, body } => {
                self.iters.push(0);
                loop {
                    let c = self.cond(cond);
                    if !self.step(s, None, Some(c)) {
                        return Flow::Stop(Outcome::OutOfSteps);
                    }
                    if !c {
                        break;
                    }
                    if let Flow::Stop(o) = self.block(body) {
                        return Flow::Stop(o);
                    }
                    *self.iters.last_mut().unwrap() += 1;
                }
                self.iters.pop();
                true
            }
        };
        if ok {
            Flow::Continue
        } else {
            Flow::Stop(Outcome::OutOfSteps)
        }
    }

    fn choose(&mut self, key: NondetKey, ty: BvType) -> u128 {
        let v = self.oracle.choose(&key, &self.iters, ty) & ty.mask();
        self.choices.push((key, self.iters.clone(), ty, v));
        v
    }

    fn cond(&mut self, e: &Expr) -> bool {
        let v = self.eval(e);
        truth(v, e.ty)
    }

    /// Value of `e` converted to `ty`.
    fn eval_at(&mut self, e: &Expr, ty: BvType) -> u128 {
        let v = self.eval(e);
        ops::cast(v, e.ty, ty)
    }

    fn eval(&mut self, e: &Expr) -> u128 {
        let w = e.ty.width;
        match &e.kind {
            ExprKind::Lit(v) => e.ty.from_int(*v),
            ExprKind::Var(n) => self.env[n].1,
            ExprKind::Nondet(t, id) => self.choose(NondetKey::Input(*id), *t),
            ExprKind::Cast(t, a) => self.eval_at(a, *t),
            ExprKind::Unary(UnOp::Not, a) => (!self.cond(a)) as u128,
            ExprKind::Unary(UnOp::Neg, a) => {
                let v = self.eval_at(a, e.ty);
                ops::neg(v, w)
            }
            ExprKind::Unary(UnOp::BitNot, a) => {
                let v = self.eval_at(a, e.ty);
                !v & mask(w)
            }
            ExprKind::Binary(BinOp::And, a, b) => (self.cond(a) && self.cond(b)) as u128,
            ExprKind::Binary(BinOp::Or, a, b) => (self.cond(a) || self.cond(b)) as u128,
            ExprKind::Binary(op, a, b) if op.is_shift() => {
                let x = self.eval_at(a, e.ty);
                let amt = self.eval(b) & mask(b.ty.width);
                let amt = amt.min(w as u128);
                match op {
                    BinOp::Shl => ops::shl(x, amt, w),
                    _ if e.ty.signed => ops::ashr(x, amt, w),
                    _ => ops::lshr(x, amt, w),
                }
            }
            ExprKind::Binary(op, a, b) => {
                let ot = operand_type(*op, e.ty, a.ty, b.ty);
                let x = self.eval_at(a, ot);
                let y = self.eval_at(b, ot);
                let ow = ot.width;
                let s = ot.signed;
                match op {
                    BinOp::Add => ops::add(x, y, ow),
                    BinOp::Sub => ops::sub(x, y, ow),
                    BinOp::Mul => ops::mul(x, y, ow),
                    BinOp::Div if s => ops::sdiv(x, y, ow),
                    BinOp::Div => ops::udiv(x, y, ow),
                    BinOp::Rem if s => ops::srem(x, y, ow),
                    BinOp::Rem => ops::urem(x, y, ow),
                    BinOp::BitAnd => x & y,
                    BinOp::BitOr => x | y,
                    BinOp::BitXor => x ^ y,
                    BinOp::Lt if s => ops::slt(x, y, ow) as u128,
                    BinOp::Lt => ops::ult(x, y, ow) as u128,
                    BinOp::Le if s => ops::sle(x, y, ow) as u128,
                    BinOp::Le => ops::ule(x, y, ow) as u128,
                    BinOp::Gt if s => ops::slt(y, x, ow) as u128,
                    BinOp::Gt => ops::ult(y, x, ow) as u128,
                    BinOp::Ge if s => ops::sle(y, x, ow) as u128,
                    BinOp::Ge => ops::ule(y, x, ow) as u128,
                    BinOp::Eq => (x == y) as u128,
                    BinOp::Ne => (x != y) as u128,
                    BinOp::Shl | BinOp::Shr | BinOp::And | BinOp::Or => unreachable!(),
                }
            }
            ExprKind::Ternary(c, a, b) => {
                if self.cond(c) {
                    self.eval_at(a, e.ty)
                } else {
                    self.eval_at(b, e.ty)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load;

    fn run(src: &str, mut f: impl FnMut(&NondetKey, &[u32], BvType) -> u128) -> Execution {
        let p = load(src).unwrap();
        execute(&p, &mut f, 10_000)
    }

    #[test]
    fn counting_loop_reaches_ten() {
        let e = run("void main() { unsigned x = 0; while (x < 10) { ++x; } assert(x == 10); }", |_, _, _| 0);
        assert_eq!(e.outcome, Outcome::Finished);
        assert_eq!(e.env["x"].1, 10);
    }

    #[test]
    fn step_by_two_misses_ten() {
        let e = run("void main() { unsigned x = 1; while (x < 10) { x += 2; } assert(x == 10); }", |_, _, _| 0);
        assert!(matches!(e.outcome, Outcome::AssertionFailed { .. }));
        assert_eq!(e.env["x"].1, 11);
    }

    #[test]
    fn nondet_is_keyed_by_iteration() {
        let e = run(
            "void main() { int s = 0; int i = 0; while (i < 3) { s = s + __VERIFIER_nondet_int(); i++; } }",
            |_, it, _| it[0] as u128 * 10,
        );
        assert_eq!(e.env["s"].1, 30);
        assert_eq!(e.choices.len(), 3);
    }

    #[test]
    fn failed_assume_blocks() {
        let e = run("void main() { int x; __CPROVER_assume(x > 0); assert(0); }", |_, _, _| 0);
        assert!(matches!(e.outcome, Outcome::Blocked { .. }));
    }

    #[test]
    fn wraps_and_divides_totally() {
        let e = run("void main() { u8 a = 200; a = a + 100; int d = 7; int z = 0; d = d / z; }", |_, _, _| 0);
        assert_eq!(e.env["a"].1, 44);
        assert_eq!(BvType::I32.to_int(e.env["d"].1), -1);
    }
}

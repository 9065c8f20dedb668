//! Type assignment.
//!
//! Rules, in place of C's integer promotions:
//! - arithmetic and bitwise operators work at the common type of their
//!   operands: the wider one, or the unsigned one at equal width; `_Bool`
//!   operands count as `int` unless both sides are `_Bool` in a bitwise op;
//! - shifts take the type of the left operand;
//! - integer literals take the type of their context and must fit it;
//!   a context made only of literals is `int`;
//! - comparing a signed with an unsigned operand is an error;
//! - integers in boolean position mean `!= 0`; assignments convert
//!   implicitly (truncate or extend by the source signedness, `!= 0` into
//!   `_Bool`).

use std::collections::HashMap;

use super::ast::*;
use super::{Diagnostic, ErrorCode};
use crate::types::BvType;

pub fn typecheck(mut p: Program) -> Result<Program, Diagnostic> {
    let mut cx = Ctx { vars: HashMap::new() };
    cx.stmts(&mut p.body)?;
    Ok(p)
}

/// Common type of two operand types for arithmetic and comparisons.
pub fn unify(a: BvType, b: BvType) -> BvType {
    if a == b {
        a
    } else if a.is_bool() {
        b
    } else if b.is_bool() {
        a
    } else if a.width != b.width {
        if a.width > b.width {
            a
        } else {
            b
        }
    } else {
        BvType::unsigned(a.width)
    }
}

fn arith(op: Option<BinOp>, a: BvType, b: BvType) -> BvType {
    let bitwise = matches!(op, Some(BinOp::BitAnd | BinOp::BitOr | BinOp::BitXor) | None);
    if a.is_bool() && b.is_bool() && bitwise {
        return BvType::BOOL;
    }
    let lift = |t: BvType| if t.is_bool() { BvType::I32 } else { t };
    unify(lift(a), lift(b))
}

/// Type at which a binary node's operands are evaluated.
pub fn operand_type(op: BinOp, node: BvType, a: BvType, b: BvType) -> BvType {
    if op.is_comparison() {
        unify(a, b)
    } else if op.is_logical() {
        BvType::BOOL
    } else {
        node
    }
}

struct Ctx {
    vars: HashMap<String, BvType>,
}

type R<T> = Result<T, Diagnostic>;

fn mismatch(span: Span, msg: impl Into<String>) -> Diagnostic {
    Diagnostic::new(ErrorCode::TypeMismatch, span, msg)
}

impl Ctx {
    fn stmts(&mut self, ss: &mut [Stmt]) -> R<()> {
        for s in ss {
            match &mut s.kind {
                StmtKind::Decl { name, ty, init } => {
                    if let Some(e) = init {
                        self.value(e, *ty)?;
                    }
                    if self.vars.insert(name.clone(), *ty).is_some() {
                        return Err(Diagnostic::new(ErrorCode::Redeclaration, s.span, format!("`{name}` is already declared")));
                    }
                }
                StmtKind::Assign { name, value } => {
                    let ty = self.var(name, s.span)?;
                    self.value(value, ty)?;
                }
                StmtKind::If { cond, then, els } => {
                    self.cond(cond)?;
                    self.stmts(then)?;
                    self.stmts(els)?;
                }
                StmtKind::While { cond, body } => {
                    self.cond(cond)?;
                    self.stmts(body)?;
                }
                StmtKind::Assert(e) | StmtKind::Assume(e) => self.cond(e)?,
            }
        }
        Ok(())
    }

    fn var(&self, name: &str, span: Span) -> R<BvType> {
        self.vars
            .get(name)
            .copied()
            .ok_or_else(|| Diagnostic::new(ErrorCode::UnknownIdentifier, span, format!("unknown identifier `{name}`")))
    }

    /// Expression assigned to a variable of type `target`.
    fn value(&mut self, e: &mut Expr, target: BvType) -> R<()> {
        if self.infer(e)?.is_none() {
            self.fix(e, target)?;
        }
        Ok(())
    }

    /// Expression in boolean position.
    fn cond(&mut self, e: &mut Expr) -> R<()> {
        if self.infer(e)?.is_none() {
            self.fix(e, BvType::I32)?;
        }
        Ok(())
    }

    /// Type of `e` if determined by its leaves; `None` for literal-only
    /// subtrees, which [`Ctx::fix`] types later from context.
    fn infer(&mut self, e: &mut Expr) -> R<Option<BvType>> {
        let span = e.span;
        let t = match &mut e.kind {
            ExprKind::Lit(_) => None,
            ExprKind::Var(n) => Some(self.var(n, span)?),
            ExprKind::Nondet(t, _) => Some(*t),
            ExprKind::Cast(t, a) => {
                let t = *t;
                if self.infer(a)?.is_none() {
                    self.fix(a, t)?;
                }
                Some(t)
            }
            ExprKind::Unary(UnOp::Not, a) => {
                self.cond(a)?;
                Some(BvType::BOOL)
            }
            ExprKind::Unary(_, a) => self.infer(a)?.map(|t| if t.is_bool() { BvType::I32 } else { t }),
            ExprKind::Binary(op, a, b) if op.is_logical() => {
                self.cond(a)?;
                self.cond(b)?;
                Some(BvType::BOOL)
            }
            ExprKind::Binary(op, a, b) if op.is_comparison() => {
                let (ta, tb) = (self.infer(a)?, self.infer(b)?);
                match (ta, tb) {
                    (None, None) => {
                        self.fix(a, BvType::I32)?;
                        self.fix(b, BvType::I32)?;
                    }
                    (Some(t), None) => self.fix(b, t)?,
                    (None, Some(t)) => self.fix(a, t)?,
                    (Some(x), Some(y)) => {
                        if !x.is_bool() && !y.is_bool() && x.signed != y.signed {
                            return Err(mismatch(
                                span,
                                format!("mixed-signedness comparison between {} and {}", x, y),
                            ));
                        }
                    }
                }
                Some(BvType::BOOL)
            }
            ExprKind::Binary(op, a, b) if op.is_shift() => {
                let (ta, tb) = (self.infer(a)?, self.infer(b)?);
                match ta {
                    None => None,
                    Some(t) => {
                        let t = if t.is_bool() { BvType::I32 } else { t };
                        if tb.is_none() {
                            self.fix(b, t)?;
                        }
                        Some(t)
                    }
                }
            }
            ExprKind::Binary(op, a, b) => {
                let op = Some(*op);
                let (ta, tb) = (self.infer(a)?, self.infer(b)?);
                match (ta, tb) {
                    (None, None) => None,
                    (Some(t), None) => {
                        let r = arith(op, t, t);
                        self.fix(b, r)?;
                        Some(r)
                    }
                    (None, Some(t)) => {
                        let r = arith(op, t, t);
                        self.fix(a, r)?;
                        Some(r)
                    }
                    (Some(x), Some(y)) => Some(arith(op, x, y)),
                }
            }
            ExprKind::Ternary(c, a, b) => {
                self.cond(c)?;
                let (ta, tb) = (self.infer(a)?, self.infer(b)?);
                match (ta, tb) {
                    (None, None) => None,
                    (Some(t), None) => {
                        self.fix(b, t)?;
                        Some(t)
                    }
                    (None, Some(t)) => {
                        self.fix(a, t)?;
                        Some(t)
                    }
                    (Some(x), Some(y)) => Some(if x.is_bool() && y.is_bool() { x } else { arith(Some(BinOp::Add), x, y) }),
                }
            }
        };
        if let Some(t) = t {
            e.ty = t;
        }
        Ok(t)
    }

    /// Give an untyped (literal-only) subtree the type `ty`.
    fn fix(&mut self, e: &mut Expr, ty: BvType) -> R<()> {
        let span = e.span;
        match &mut e.kind {
            ExprKind::Lit(v) => {
                if !ty.fits(*v) {
                    return Err(Diagnostic::new(
                        ErrorCode::LiteralOverflow,
                        span,
                        format!("literal {v} does not fit {}", super::printer::type_name(ty)),
                    ));
                }
            }
            ExprKind::Unary(_, a) => self.fix(a, ty)?,
            ExprKind::Binary(op, a, b) => {
                // comparisons and logical nodes are always typed by infer
                debug_assert!(!op.is_comparison() && !op.is_logical());
                let ty = if ty.is_bool() && !matches!(op, BinOp::BitAnd | BinOp::BitOr | BinOp::BitXor) {
                    BvType::I32
                } else {
                    ty
                };
                self.fix(a, ty)?;
                if !op.is_shift() || self.infer(b)?.is_none() {
                    self.fix(b, ty)?;
                }
                e.ty = ty;
                return Ok(());
            }
            ExprKind::Ternary(_, a, b) => {
                self.fix(a, ty)?;
                self.fix(b, ty)?;
            }
            _ => unreachable!("typed node in untyped subtree"),
        }
        e.ty = ty;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load;

    fn first_cond(src: &str) -> Expr {
        let p = load(src).unwrap();
        p.body
            .iter()
            .find_map(|s| match &s.kind {
                StmtKind::Assert(e) => Some(e.clone()),
                _ => None,
            })
            .unwrap()
    }

    #[test]
    fn unsigned_comparison() {
        let e = first_cond("void main() { unsigned x; assert(x < 10); }");
        match &e.kind {
            ExprKind::Binary(_, a, b) => {
                assert_eq!(a.ty, BvType::U32);
                assert_eq!(b.ty, BvType::U32);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn mixed_signedness_rejected() {
        let err = load("void main() { int x; unsigned y; assert(x < y); }").unwrap_err();
        assert_eq!(err.code, ErrorCode::TypeMismatch);
        assert!(err.message.contains("mixed-signedness comparison"));
    }

    #[test]
    fn int_addition_is_i32() {
        let p = load("void main() { int w = 0, x; x = x + w; }").unwrap();
        match &p.body[2].kind {
            StmtKind::Assign { value, .. } => assert_eq!(value.ty, BvType::I32),
            _ => panic!(),
        }
    }

    #[test]
    fn literal_overflow() {
        assert_eq!(load("void main() { u8 x = 256; }").unwrap_err().code, ErrorCode::LiteralOverflow);
        assert_eq!(load("void main() { unsigned x = -1; }").unwrap_err().code, ErrorCode::LiteralOverflow);
        assert!(load("void main() { int x = -2147483648; }").is_ok());
        assert_eq!(load("void main() { int x = 2147483648; }").unwrap_err().code, ErrorCode::LiteralOverflow);
    }

    #[test]
    fn common_type_rules() {
        assert_eq!(unify(BvType::I32, BvType::U32), BvType::U32);
        assert_eq!(unify(BvType::I64, BvType::U32), BvType::I64);
        assert_eq!(arith(Some(BinOp::Add), BvType::BOOL, BvType::BOOL), BvType::I32);
        assert_eq!(arith(Some(BinOp::BitAnd), BvType::BOOL, BvType::BOOL), BvType::BOOL);
    }
}

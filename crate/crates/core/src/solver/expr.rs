//! Hash-consed bit-vector expressions.
//!
//! Every formula the verifier builds (transition constraints, guards,
//! template rows, search bounds) is a node in one [`ExprPool`]. Structurally
//! equal nodes share an [`ExprId`], so bit-blasting encodes each node once.

use std::collections::HashMap;
use std::fmt;

use crate::types::{mask, BvType};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExprId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

/// Which flavour of SSA definition a name refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SsaIndex {
    /// Ordinary definition at a program location: `x#3`.
    Def(u32),
    /// Loop-head multiplexer: `x#phi1`.
    Phi(u32),
    /// Free loop-back variable: `x#lb1`.
    LoopBack(u32),
    /// Loop-head select guard: `guard#ls1`.
    Select(u32),
}

/// A logical variable: program variable (or guard) at a definition point,
/// within a particular loop-unwinding copy.
///
/// `path` holds one copy index per enclosing loop, outermost first. The
/// rendering elides the `%` suffix when every index is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SsaName {
    pub base: String,
    pub index: SsaIndex,
    pub path: Vec<u32>,
}

impl SsaName {
    pub fn new(base: impl Into<String>, index: SsaIndex, path: &[u32]) -> Self {
        SsaName { base: base.into(), index, path: path.to_vec() }
    }

    pub fn def(base: impl Into<String>, n: u32, path: &[u32]) -> Self {
        Self::new(base, SsaIndex::Def(n), path)
    }

    /// Copy index of the innermost enclosing loop, 0 outside loops.
    pub fn unwinding(&self) -> u32 {
        self.path.last().copied().unwrap_or(0)
    }
}

impl fmt::Display for SsaName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#", self.base)?;
        match self.index {
            SsaIndex::Def(n) => write!(f, "{n}")?,
            SsaIndex::Phi(n) => write!(f, "phi{n}")?,
            SsaIndex::LoopBack(n) => write!(f, "lb{n}")?,
            SsaIndex::Select(n) => write!(f, "ls{n}")?,
        }
        if self.path.iter().any(|&u| u != 0) {
            let parts: Vec<String> = self.path.iter().map(|u| u.to_string()).collect();
            write!(f, "%{}", parts.join("."))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Const(u128),
    Var(VarId),
    // bitwise
    Not,
    And,
    Or,
    Xor,
    // arithmetic
    Neg,
    Add,
    Sub,
    Mul,
    UDiv,
    SDiv,
    URem,
    SRem,
    Shl,
    LShr,
    AShr,
    // predicates
    Eq,
    Ne,
    Ult,
    Ule,
    Slt,
    Sle,
    Ite,
    // boolean connectives (width 1)
    BoolNot,
    BoolAnd,
    BoolOr,
    Implies,
    // width changes
    ZeroExt,
    SignExt,
    Extract { hi: u32, lo: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Node {
    pub op: Op,
    pub args: Vec<ExprId>,
    pub ty: BvType,
}

#[derive(Default, Clone)]
pub struct ExprPool {
    nodes: Vec<Node>,
    interned: HashMap<Node, ExprId>,
    vars: Vec<(SsaName, BvType)>,
    var_ids: HashMap<SsaName, VarId>,
}

impl ExprPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&self, e: ExprId) -> &Node {
        &self.nodes[e.0 as usize]
    }

    pub fn ty(&self, e: ExprId) -> BvType {
        self.node(e).ty
    }

    pub fn width(&self, e: ExprId) -> u32 {
        self.node(e).ty.width
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn var_name(&self, v: VarId) -> &SsaName {
        &self.vars[v.0 as usize].0
    }

    pub fn var_type(&self, v: VarId) -> BvType {
        self.vars[v.0 as usize].1
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn lookup_var(&self, name: &SsaName) -> Option<VarId> {
        self.var_ids.get(name).copied()
    }

    pub fn as_const(&self, e: ExprId) -> Option<u128> {
        match self.node(e).op {
            Op::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_var(&self, e: ExprId) -> Option<VarId> {
        match self.node(e).op {
            Op::Var(v) => Some(v),
            _ => None,
        }
    }

    fn intern(&mut self, op: Op, args: Vec<ExprId>, ty: BvType) -> ExprId {
        let node = Node { op, args, ty };
        if let Some(&id) = self.interned.get(&node) {
            return id;
        }
        let id = ExprId(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.interned.insert(node, id);
        id
    }

    // ---- leaves -------------------------------------------------------

    pub fn constant(&mut self, value: u128, ty: BvType) -> ExprId {
        self.intern(Op::Const(value & mask(ty.width)), Vec::new(), ty)
    }

    pub fn int(&mut self, value: i128, ty: BvType) -> ExprId {
        self.constant(ty.from_int(value), ty)
    }

    pub fn tru(&mut self) -> ExprId {
        self.constant(1, BvType::BOOL)
    }

    pub fn fals(&mut self) -> ExprId {
        self.constant(0, BvType::BOOL)
    }

    pub fn bool_const(&mut self, b: bool) -> ExprId {
        self.constant(b as u128, BvType::BOOL)
    }

    /// Get or create the variable `name`.
    ///
    /// # Panics
    /// If `name` already exists with a different type.
    pub fn var(&mut self, name: SsaName, ty: BvType) -> ExprId {
        let id = match self.var_ids.get(&name) {
            Some(&id) => {
                assert_eq!(self.vars[id.0 as usize].1, ty, "type clash for {name}");
                id
            }
            None => {
                let id = VarId(self.vars.len() as u32);
                self.vars.push((name.clone(), ty));
                self.var_ids.insert(name, id);
                id
            }
        };
        self.intern(Op::Var(id), Vec::new(), ty)
    }

    pub fn var_expr(&mut self, v: VarId) -> ExprId {
        let ty = self.var_type(v);
        self.intern(Op::Var(v), Vec::new(), ty)
    }

    // ---- builders -----------------------------------------------------

    fn same_width(&self, a: ExprId, b: ExprId) {
        debug_assert_eq!(self.width(a), self.width(b), "operand width mismatch");
    }

    pub fn unary(&mut self, op: Op, a: ExprId) -> ExprId {
        let ty = self.ty(a);
        self.intern(op, vec![a], ty)
    }

    /// Bitwise or arithmetic binary operator; the result takes `a`'s type.
    pub fn binary(&mut self, op: Op, a: ExprId, b: ExprId) -> ExprId {
        self.same_width(a, b);
        let ty = self.ty(a);
        self.intern(op, vec![a, b], ty)
    }

    pub fn add(&mut self, a: ExprId, b: ExprId) -> ExprId {
        self.binary(Op::Add, a, b)
    }

    pub fn sub(&mut self, a: ExprId, b: ExprId) -> ExprId {
        self.binary(Op::Sub, a, b)
    }

    pub fn neg(&mut self, a: ExprId) -> ExprId {
        self.unary(Op::Neg, a)
    }

    fn predicate(&mut self, op: Op, a: ExprId, b: ExprId) -> ExprId {
        self.same_width(a, b);
        self.intern(op, vec![a, b], BvType::BOOL)
    }

    pub fn eq(&mut self, a: ExprId, b: ExprId) -> ExprId {
        self.predicate(Op::Eq, a, b)
    }

    pub fn ne(&mut self, a: ExprId, b: ExprId) -> ExprId {
        self.predicate(Op::Ne, a, b)
    }

    pub fn ult(&mut self, a: ExprId, b: ExprId) -> ExprId {
        self.predicate(Op::Ult, a, b)
    }

    pub fn ule(&mut self, a: ExprId, b: ExprId) -> ExprId {
        self.predicate(Op::Ule, a, b)
    }

    pub fn slt(&mut self, a: ExprId, b: ExprId) -> ExprId {
        self.predicate(Op::Slt, a, b)
    }

    pub fn sle(&mut self, a: ExprId, b: ExprId) -> ExprId {
        self.predicate(Op::Sle, a, b)
    }

    /// `a <= b` at the signedness of `a`'s type.
    pub fn le(&mut self, a: ExprId, b: ExprId) -> ExprId {
        if self.ty(a).signed {
            self.sle(a, b)
        } else {
            self.ule(a, b)
        }
    }

    pub fn lt(&mut self, a: ExprId, b: ExprId) -> ExprId {
        if self.ty(a).signed {
            self.slt(a, b)
        } else {
            self.ult(a, b)
        }
    }

    pub fn ite(&mut self, c: ExprId, t: ExprId, e: ExprId) -> ExprId {
        debug_assert_eq!(self.width(c), 1);
        self.same_width(t, e);
        if let Some(cv) = self.as_const(c) {
            return if cv == 1 { t } else { e };
        }
        if t == e {
            return t;
        }
        let ty = self.ty(t);
        self.intern(Op::Ite, vec![c, t, e], ty)
    }

    pub fn not(&mut self, a: ExprId) -> ExprId {
        debug_assert_eq!(self.width(a), 1);
        if let Some(c) = self.as_const(a) {
            return self.bool_const(c == 0);
        }
        if let Op::BoolNot = self.node(a).op {
            return self.node(a).args[0];
        }
        self.intern(Op::BoolNot, vec![a], BvType::BOOL)
    }

    pub fn and(&mut self, a: ExprId, b: ExprId) -> ExprId {
        match (self.as_const(a), self.as_const(b)) {
            (Some(0), _) | (_, Some(0)) => self.fals(),
            (Some(1), _) => b,
            (_, Some(1)) => a,
            _ if a == b => a,
            _ => self.intern(Op::BoolAnd, vec![a, b], BvType::BOOL),
        }
    }

    pub fn or(&mut self, a: ExprId, b: ExprId) -> ExprId {
        match (self.as_const(a), self.as_const(b)) {
            (Some(1), _) | (_, Some(1)) => self.tru(),
            (Some(0), _) => b,
            (_, Some(0)) => a,
            _ if a == b => a,
            _ => self.intern(Op::BoolOr, vec![a, b], BvType::BOOL),
        }
    }

    pub fn implies(&mut self, a: ExprId, b: ExprId) -> ExprId {
        match (self.as_const(a), self.as_const(b)) {
            (Some(0), _) | (_, Some(1)) => self.tru(),
            (Some(1), _) => b,
            _ => self.intern(Op::Implies, vec![a, b], BvType::BOOL),
        }
    }

    pub fn and_all(&mut self, items: impl IntoIterator<Item = ExprId>) -> ExprId {
        let mut acc = self.tru();
        for e in items {
            acc = self.and(acc, e);
        }
        acc
    }

    pub fn or_all(&mut self, items: impl IntoIterator<Item = ExprId>) -> ExprId {
        let mut acc = self.fals();
        for e in items {
            acc = self.or(acc, e);
        }
        acc
    }

    /// Zero- or sign-extend `a` to `ty` (which must not be narrower).
    pub fn extend(&mut self, a: ExprId, ty: BvType) -> ExprId {
        let from = self.ty(a);
        assert!(ty.width >= from.width, "extend to a narrower type");
        if ty.width == from.width {
            return self.retype(a, ty);
        }
        let op = if from.signed { Op::SignExt } else { Op::ZeroExt };
        self.intern(op, vec![a], ty)
    }

    pub fn zero_ext(&mut self, a: ExprId, ty: BvType) -> ExprId {
        assert!(ty.width > self.width(a));
        self.intern(Op::ZeroExt, vec![a], ty)
    }

    pub fn sign_ext(&mut self, a: ExprId, ty: BvType) -> ExprId {
        assert!(ty.width > self.width(a));
        self.intern(Op::SignExt, vec![a], ty)
    }

    pub fn extract(&mut self, a: ExprId, hi: u32, lo: u32, signed: bool) -> ExprId {
        assert!(hi >= lo && hi < self.width(a));
        let ty = BvType { signed, width: hi - lo + 1 };
        self.intern(Op::Extract { hi, lo }, vec![a], ty)
    }

    /// Reinterpret `a` at a type of the same width (signedness change only).
    pub fn retype(&mut self, a: ExprId, ty: BvType) -> ExprId {
        assert_eq!(ty.width, self.width(a));
        if self.ty(a) == ty {
            return a;
        }
        if let Op::Const(c) = self.node(a).op {
            return self.constant(c, ty);
        }
        // a zero-width extract keeps the bits and changes the label
        let hi = ty.width - 1;
        self.intern(Op::Extract { hi, lo: 0 }, vec![a], ty)
    }

    /// Convert between program types (truncate or extend by source signedness).
    pub fn convert(&mut self, a: ExprId, ty: BvType) -> ExprId {
        let from = self.ty(a);
        if ty.width > from.width {
            self.extend(a, ty)
        } else if ty.width < from.width {
            self.extract(a, ty.width - 1, 0, ty.signed)
        } else {
            self.retype(a, ty)
        }
    }

    /// All variables reachable from `roots`.
    pub fn collect_vars(&self, roots: &[ExprId]) -> Vec<VarId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<ExprId> = roots.to_vec();
        let mut out = Vec::new();
        while let Some(e) = stack.pop() {
            if std::mem::replace(&mut seen[e.0 as usize], true) {
                continue;
            }
            let n = self.node(e);
            if let Op::Var(v) = n.op {
                out.push(v);
            }
            stack.extend(n.args.iter().copied());
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn display(&self, e: ExprId) -> ExprDisplay<'_> {
        ExprDisplay { pool: self, root: e }
    }
}

/// Renders an expression in the C-like textual style used by SSA dumps:
/// `guard#2 == (x#phi1 < 10u) && guard#1`.
pub struct ExprDisplay<'a> {
    pool: &'a ExprPool,
    root: ExprId,
}

fn precedence(op: &Op) -> u8 {
    match op {
        Op::Implies => 1,
        Op::Ite => 2,
        Op::BoolOr => 3,
        Op::BoolAnd => 4,
        Op::Or => 5,
        Op::Xor => 6,
        Op::And => 7,
        Op::Eq | Op::Ne => 8,
        Op::Ult | Op::Ule | Op::Slt | Op::Sle => 9,
        Op::Shl | Op::LShr | Op::AShr => 10,
        Op::Add | Op::Sub => 11,
        Op::Mul | Op::UDiv | Op::SDiv | Op::URem | Op::SRem => 12,
        Op::Not | Op::Neg | Op::BoolNot | Op::ZeroExt | Op::SignExt | Op::Extract { .. } => 13,
        Op::Const(_) | Op::Var(_) => 14,
    }
}

impl ExprDisplay<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, e: ExprId, parent: u8) -> fmt::Result {
        let n = self.pool.node(e);
        let p = precedence(&n.op);
        // comparisons nested under boolean connectives are parenthesized
        // for readability, matching the dump style
        let paren = p < parent || (p == 9 && parent <= 4 && parent > 0 && !matches!(n.op, Op::Eq | Op::Ne));
        if paren {
            write!(f, "(")?;
        }
        let a = &n.args;
        let bin = |f: &mut fmt::Formatter<'_>, sym: &str| -> fmt::Result {
            self.write(f, a[0], p)?;
            write!(f, " {sym} ")?;
            self.write(f, a[1], p + 1)
        };
        match n.op {
            Op::Const(c) => {
                if n.ty.is_bool() {
                    write!(f, "{}", if c == 1 { "TRUE" } else { "FALSE" })?
                } else if n.ty.signed {
                    write!(f, "{}", n.ty.to_int(c))?
                } else {
                    write!(f, "{c}u")?
                }
            }
            Op::Var(v) => write!(f, "{}", self.pool.var_name(v))?,
            Op::Not => {
                write!(f, "~")?;
                self.write(f, a[0], p)?
            }
            Op::Neg => {
                write!(f, "-")?;
                self.write(f, a[0], p)?
            }
            Op::BoolNot => {
                write!(f, "!")?;
                self.write(f, a[0], p + 1)?
            }
            Op::And => bin(f, "&")?,
            Op::Or => bin(f, "|")?,
            Op::Xor => bin(f, "^")?,
            Op::Add => bin(f, "+")?,
            Op::Sub => bin(f, "-")?,
            Op::Mul => bin(f, "*")?,
            Op::UDiv | Op::SDiv => bin(f, "/")?,
            Op::URem | Op::SRem => bin(f, "%")?,
            Op::Shl => bin(f, "<<")?,
            Op::LShr | Op::AShr => bin(f, ">>")?,
            Op::Eq => bin(f, "==")?,
            Op::Ne => bin(f, "!=")?,
            Op::Ult | Op::Slt => bin(f, "<")?,
            Op::Ule | Op::Sle => bin(f, "<=")?,
            Op::BoolAnd => bin(f, "&&")?,
            Op::BoolOr => bin(f, "||")?,
            Op::Implies => bin(f, "==>")?,
            Op::Ite => {
                self.write(f, a[0], p + 1)?;
                write!(f, " ? ")?;
                self.write(f, a[1], p + 1)?;
                write!(f, " : ")?;
                self.write(f, a[2], p)?
            }
            Op::ZeroExt | Op::SignExt | Op::Extract { .. } => {
                if n.ty.signed {
                    write!(f, "(signed bv[{}])", n.ty.width)?
                } else {
                    write!(f, "(unsigned bv[{}])", n.ty.width)?
                }
                self.write(f, a[0], p)?
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // definitions `lhs == rhs` print their right-hand side unbracketed,
        // except multiplexers
        let n = self.pool.node(self.root);
        if let Op::Eq = n.op {
            self.write(f, n.args[0], 9)?;
            write!(f, " == ")?;
            let rhs_parent = if let Op::Ite = self.pool.node(n.args[1]).op { 3 } else { 0 };
            return self.write(f, n.args[1], rhs_parent);
        }
        self.write(f, self.root, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_consing_shares_nodes() {
        let mut p = ExprPool::new();
        let x = p.var(SsaName::def("x", 0, &[]), BvType::U8);
        let one = p.constant(1, BvType::U8);
        let a = p.add(x, one);
        let b = p.add(x, one);
        assert_eq!(a, b);
    }

    #[test]
    fn names_render_like_listings() {
        assert_eq!(SsaName::new("x", SsaIndex::Phi(1), &[0]).to_string(), "x#phi1");
        assert_eq!(SsaName::new("guard", SsaIndex::Select(5), &[]).to_string(), "guard#ls5");
        assert_eq!(SsaName::def("x", 2, &[1]).to_string(), "x#2%1");
        assert_eq!(SsaName::def("x", 2, &[0, 2]).to_string(), "x#2%0.2");
    }

    #[test]
    fn display_guard_definition() {
        let mut p = ExprPool::new();
        let g2 = p.var(SsaName::def("guard", 2, &[]), BvType::BOOL);
        let g1 = p.var(SsaName::def("guard", 1, &[]), BvType::BOOL);
        let x = p.var(SsaName::new("x", SsaIndex::Phi(1), &[]), BvType::U32);
        let ten = p.constant(10, BvType::U32);
        let lt = p.ult(x, ten);
        let rhs = p.and(lt, g1);
        let def = p.eq(g2, rhs);
        assert_eq!(p.display(def).to_string(), "guard#2 == (x#phi1 < 10u) && guard#1");
    }
}

//! Loop-cut SSA form with incremental unwinding.
//!
//! Each loop instance gets a select guard `guard#lsN` and loop-back
//! variables `x#lbN`. At the head of the first copy the loop variables are
//! `x#phiN == (guard#lsN ? x#lbN : x_entry)`: with the select guard false the
//! copies compute a plain bounded unwinding from the entry state, with it
//! true they start from an arbitrary state, which is what the induction step
//! and invariant inference need.
//!
//! Unwinding appends a copy below the current bottom one and re-merges the
//! loop exits under a fresh enable literal. Constraints are never retracted,
//! so a single incremental solver can follow the system through every `k`.

pub mod dump;
mod encode;
pub mod locs;
pub mod translate;

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use crate::frontend::ast::{visit_stmts, Expr, Program, Span, Stmt, StmtKind};
use crate::frontend::interp::NondetKey;
use crate::solver::expr::{ExprId, ExprPool, SsaName};
use crate::types::BvType;
use locs::Loc;
use translate::{Translator, NONDET};

pub const GUARD: &str = "guard";
pub const ENABLE: &str = "enable";
const PROPERTY: &str = "$p";
const ERROR: &str = "$err";

/// SSA base name of a program variable, kept apart from the reserved bases.
pub fn var_base(name: &str) -> String {
    if name == GUARD || name == ENABLE {
        format!("{name}$")
    } else {
        name.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Definition,
    Guard,
    LoopHead,
    Merge,
    /// Activation-guarded property assumption.
    Property,
    /// Activation-guarded error disjunction.
    Error,
    /// An assertion, listed for readability but not enforced.
    Assertion,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub expr: ExprId,
    pub role: Role,
}

impl Constraint {
    pub fn enforced(&self) -> bool {
        self.role != Role::Assertion
    }
}

/// A syntactic loop.
#[derive(Debug)]
pub struct LoopInfo {
    pub stmt: u32,
    pub span: Span,
    pub head: u32,
    pub body_loc: u32,
    pub exit: u32,
    pub merge: u32,
    pub cond: Expr,
    pub body: Rc<Vec<Stmt>>,
    /// Variables declared outside the loop and assigned inside it.
    pub vars: Vec<(String, BvType)>,
    pub parent: Option<usize>,
}

/// One unwinding copy of a loop body.
#[derive(Clone, Debug)]
pub struct Copy {
    pub head_guard: ExprId,
    /// Loop variable values at the head, in [`LoopInfo::vars`] order.
    pub head: Vec<ExprId>,
    pub end_guard: ExprId,
    pub end: Vec<ExprId>,
    pub exit_guard: ExprId,
}

/// A loop in one particular copy of its enclosing loops.
#[derive(Clone, Debug)]
pub struct Instance {
    pub loop_idx: usize,
    pub path: Vec<u32>,
    /// Enclosing (instance, copy) pairs, outermost first.
    pub enclosing: Vec<(usize, u32)>,
    pub select: ExprId,
    pub loop_back: Vec<ExprId>,
    pub entry_guard: ExprId,
    pub entry: BTreeMap<String, ExprId>,
    pub copies: Vec<Copy>,
    /// One enable literal per unwinding depth; only the last is active.
    pub enables: Vec<ExprId>,
    pub merged_guard: ExprId,
    pub merged: Vec<ExprId>,
}

#[derive(Clone, Debug)]
pub struct AssertionInstance {
    pub stmt: u32,
    pub span: Span,
    pub guard: ExprId,
    pub prop: ExprId,
    pub enclosing: Vec<(usize, u32)>,
}

pub struct SsaSystem {
    pub pool: ExprPool,
    pub program: Program,
    pub constraints: Vec<Constraint>,
    pub loops: Vec<LoopInfo>,
    pub instances: Vec<Instance>,
    pub assertions: Vec<AssertionInstance>,
    k: u32,
    locs: HashMap<u32, Loc>,
    loop_of_stmt: HashMap<u32, usize>,
    var_types: HashMap<String, BvType>,
    decl_locs: HashMap<String, u32>,
    property_lits: Vec<ExprId>,
    property_level: Vec<usize>,
    error_lits: HashMap<u32, ExprId>,
}

struct Cx {
    guard: ExprId,
    env: BTreeMap<String, ExprId>,
    path: Vec<u32>,
    enclosing: Vec<(usize, u32)>,
}

impl SsaSystem {
    /// Encode `program` with one copy per loop.
    pub fn new(program: Program) -> Self {
        let locs = locs::assign_locs(&program.body);
        let mut sys = SsaSystem {
            pool: ExprPool::new(),
            constraints: Vec::new(),
            loops: Vec::new(),
            instances: Vec::new(),
            assertions: Vec::new(),
            k: 1,
            loop_of_stmt: HashMap::new(),
            var_types: program.decls().into_iter().collect(),
            decl_locs: HashMap::new(),
            property_lits: Vec::new(),
            property_level: Vec::new(),
            error_lits: HashMap::new(),
            locs,
            program,
        };
        sys.collect_loops();
        let body = sys.program.body.clone();
        let g = sys.pool.var(SsaName::def(GUARD, 0, &[]), BvType::BOOL);
        let t = sys.pool.tru();
        let c = sys.pool.eq(g, t);
        sys.emit(c, Role::Guard);
        let mut cx = Cx { guard: g, env: BTreeMap::new(), path: Vec::new(), enclosing: Vec::new() };
        sys.block(&body, &mut cx);
        sys.refresh_properties();
        sys
    }

    /// Number of copies per loop instance.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Add one copy to every loop instance.
    pub fn unwind(&mut self) {
        self.k += 1;
        let mut i = 0;
        while i < self.instances.len() {
            if (self.instances[i].copies.len() as u32) < self.k {
                self.add_copy(i);
                self.add_merge(i);
            }
            i += 1;
        }
        self.refresh_properties();
    }

    /// `¬guard#ls` for every instance: plain bounded unwinding from entry.
    pub fn start_assumptions(&mut self) -> Vec<ExprId> {
        let sels: Vec<ExprId> = self.instances.iter().map(|i| i.select).collect();
        sels.into_iter().map(|s| self.pool.not(s)).collect()
    }

    /// Activate the newest exit merge of every instance, deactivate the rest.
    pub fn enable_assumptions(&mut self) -> Vec<ExprId> {
        let mut out = Vec::new();
        for i in 0..self.instances.len() {
            let n = self.instances[i].enables.len();
            for j in 0..n {
                let e = self.instances[i].enables[j];
                out.push(if j + 1 == n { e } else { self.pool.not(e) });
            }
        }
        out
    }

    /// Activation literals of the installed property assumptions.
    pub fn property_assumptions(&self) -> Vec<ExprId> {
        self.property_lits.clone()
    }

    /// Literal that, when assumed, requires some assertion to fail: in the
    /// bottom copies, or anywhere along a path from the entry state.
    pub fn error_literal(&mut self) -> ExprId {
        if let Some(&e) = self.error_lits.get(&self.k) {
            return e;
        }
        let mut terms = Vec::new();
        for a in 0..self.assertions.len() {
            let sels = self.non_bottom_selects(a);
            let mut parts: Vec<ExprId> = sels.into_iter().map(|s| self.pool.not(s)).collect();
            let (g, p) = (self.assertions[a].guard, self.assertions[a].prop);
            parts.push(g);
            parts.push(self.pool.not(p));
            terms.push(self.pool.and_all(parts));
        }
        let any = self.pool.or_all(terms);
        let e = self.pool.var(SsaName::def(ERROR, self.k, &[]), BvType::BOOL);
        let c = self.pool.implies(e, any);
        self.emit(c, Role::Error);
        self.error_lits.insert(self.k, e);
        e
    }

    /// SSA name under which the encoding represents a nondeterministic
    /// choice made by the interpreter.
    pub fn nondet_name(&self, key: &NondetKey, iters: &[u32]) -> Option<SsaName> {
        match key {
            NondetKey::Input(id) => Some(SsaName::def(NONDET, *id, iters)),
            NondetKey::Uninit(name) => self.decl_locs.get(name).map(|&l| SsaName::def(var_base(name), l, iters)),
        }
    }

    /// Instances of syntactic loop `l`.
    pub fn instances_of(&self, l: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.instances.len()).filter(move |&i| self.instances[i].loop_idx == l)
    }

    pub fn loop_of_stmt(&self, stmt: u32) -> Option<usize> {
        self.loop_of_stmt.get(&stmt).copied()
    }

    fn non_bottom_selects(&self, a: usize) -> Vec<ExprId> {
        self.assertions[a]
            .enclosing
            .iter()
            .filter(|&&(i, q)| (q as usize) + 1 < self.instances[i].copies.len())
            .map(|&(i, _)| self.instances[i].select)
            .collect()
    }

    fn refresh_properties(&mut self) {
        self.property_level.resize(self.assertions.len(), 0);
        for a in 0..self.assertions.len() {
            let sels = self.non_bottom_selects(a);
            if sels.len() <= self.property_level[a] {
                continue;
            }
            self.property_level[a] = sels.len();
            let premise = self.pool.or_all(sels);
            let (g, p) = (self.assertions[a].guard, self.assertions[a].prop);
            let holds = self.pool.implies(g, p);
            let body = self.pool.implies(premise, holds);
            let lit = self.pool.var(SsaName::def(PROPERTY, self.property_lits.len() as u32, &[]), BvType::BOOL);
            let c = self.pool.implies(lit, body);
            self.emit(c, Role::Property);
            self.property_lits.push(lit);
        }
    }

    fn collect_loops(&mut self) {
        fn walk(sys: &mut SsaSystem, stmts: &[Stmt], parent: Option<usize>) {
            for s in stmts {
                match &s.kind {
                    StmtKind::While { cond, body } => {
                        let Some(Loc::While { head, body: b, exit, merge }) = sys.locs.get(&s.id).copied() else {
                            unreachable!()
                        };
                        let mut assigned = Vec::new();
                        let mut declared = Vec::new();
                        visit_stmts(body, &mut |t| match &t.kind {
                            StmtKind::Assign { name, .. } => assigned.push(name.clone()),
                            StmtKind::Decl { name, .. } => declared.push(name.clone()),
                            _ => {}
                        });
                        assigned.sort();
                        assigned.dedup();
                        let vars = assigned
                            .into_iter()
                            .filter(|n| !declared.contains(n))
                            .map(|n| {
                                let t = sys.var_types[&n];
                                (n, t)
                            })
                            .collect();
                        let idx = sys.loops.len();
                        sys.loops.push(LoopInfo {
                            stmt: s.id,
                            span: s.span,
                            head,
                            body_loc: b,
                            exit,
                            merge,
                            cond: cond.clone(),
                            body: Rc::new(body.clone()),
                            vars,
                            parent,
                        });
                        sys.loop_of_stmt.insert(s.id, idx);
                        walk(sys, body, Some(idx));
                    }
                    StmtKind::If { then, els, .. } => {
                        walk(sys, then, parent);
                        walk(sys, els, parent);
                    }
                    StmtKind::Decl { name, .. } => {
                        if let Some(Loc::Def(l)) = sys.locs.get(&s.id) {
                            sys.decl_locs.insert(name.clone(), *l);
                        }
                    }
                    _ => {}
                }
            }
        }
        let body = self.program.body.clone();
        walk(self, &body, None);
    }

    fn emit(&mut self, expr: ExprId, role: Role) {
        self.constraints.push(Constraint { expr, role });
    }

    fn define(&mut self, name: SsaName, ty: BvType, rhs: ExprId, role: Role) -> ExprId {
        let v = self.pool.var(name, ty);
        let c = self.pool.eq(v, rhs);
        self.emit(c, role);
        v
    }

    fn translate_at(&mut self, e: &Expr, ty: BvType, cx: &Cx) -> ExprId {
        Translator { pool: &mut self.pool, env: &cx.env, path: &cx.path }.at(e, ty)
    }

    fn translate_cond(&mut self, e: &Expr, cx: &Cx) -> ExprId {
        Translator { pool: &mut self.pool, env: &cx.env, path: &cx.path }.cond(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load;

    const COUNT_TO_TEN: &str = "void main() { unsigned x = 0; while (x < 10) { ++x; } assert(x == 10); }";

    #[test]
    fn counting_loop_listing() {
        let sys = SsaSystem::new(load(COUNT_TO_TEN).unwrap());
        let d = sys.dump();
        let lines: Vec<&str> = d.lines().collect();
        assert_eq!(
            lines,
            [
                "guard#0 == TRUE",
                "x#0 == 0u",
                "guard#1 == guard#0",
                "x#phi1 == (guard#ls1 ? x#lb1 : x#0)",
                "guard#2 == (x#phi1 < 10u) && guard#1",
                "x#2 == 1u + x#phi1",
                "guard#3 == !(x#phi1 < 10u) && guard#1",
                "enable#1 ==> guard#4 == guard#3  // loop exit",
                "enable#1 ==> x#phi4 == x#phi1  // loop exit",
                "guard#4 ==> x#phi4 == 10u  // assertion",
            ]
        );
    }

    #[test]
    fn unwinding_appends_copies() {
        let mut sys = SsaSystem::new(load(COUNT_TO_TEN).unwrap());
        let before = sys.constraints.len();
        sys.unwind();
        assert_eq!(sys.k(), 2);
        let d = sys.dump();
        let added: Vec<&str> = d.lines().skip(before).collect();
        assert!(added.contains(&"guard#1%1 == guard#2"), "{d}");
        assert!(added.contains(&"x#phi1%1 == x#2"), "{d}");
        assert!(added.iter().any(|l| l.starts_with("enable#1%1 ==> x#phi4 == ")), "{d}");
        assert_eq!(sys.instances[0].copies.len(), 2);
        // the assertion is outside the loop, so nothing is assumed about it
        assert!(sys.property_assumptions().is_empty());
    }
}

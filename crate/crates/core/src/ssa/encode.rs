//! Statement encoding and loop unwinding.

use crate::frontend::ast::{Stmt, StmtKind};
use crate::solver::expr::{SsaIndex, SsaName};
use crate::types::BvType;

use super::locs::Loc;
use super::*;

impl SsaSystem {
    pub(super) fn block(&mut self, stmts: &[Stmt], cx: &mut Cx) {
        for s in stmts {
            self.stmt(s, cx);
        }
    }

    fn stmt(&mut self, s: &Stmt, cx: &mut Cx) {
        let loc = self.locs[&s.id];
        match (&s.kind, loc) {
            (StmtKind::Decl { name, ty, init }, Loc::Def(n)) => {
                let sname = SsaName::def(var_base(name), n, &cx.path);
                let v = match init {
                    Some(e) => {
                        let rhs = self.translate_at(e, *ty, cx);
                        self.define(sname, *ty, rhs, Role::Definition)
                    }
                    None => self.pool.var(sname, *ty),
                };
                cx.env.insert(name.clone(), v);
            }
            (StmtKind::Assign { name, value }, Loc::Def(n)) => {
                let ty = self.var_types[name];
                let rhs = self.translate_at(value, ty, cx);
                let v = self.define(SsaName::def(var_base(name), n, &cx.path), ty, rhs, Role::Definition);
                cx.env.insert(name.clone(), v);
            }
            (StmtKind::Assert(e), Loc::Assert) => {
                let prop = self.translate_cond(e, cx);
                let shown = self.pool.implies(cx.guard, prop);
                self.emit(shown, Role::Assertion);
                self.assertions.push(AssertionInstance {
                    stmt: s.id,
                    span: s.span,
                    guard: cx.guard,
                    prop,
                    enclosing: cx.enclosing.clone(),
                });
            }
            (StmtKind::Assume(e), Loc::Assume(n)) => {
                let c = self.translate_cond(e, cx);
                let rhs = self.pool.and(c, cx.guard);
                cx.guard = self.define(SsaName::def(GUARD, n, &cx.path), BvType::BOOL, rhs, Role::Guard);
            }
            (StmtKind::If { cond, then, els }, Loc::If { then: lt, els: le, join, new_guard }) => {
                let c = self.translate_cond(cond, cx);
                let rhs = self.pool.and(c, cx.guard);
                let tg = self.define(SsaName::def(GUARD, lt, &cx.path), BvType::BOOL, rhs, Role::Guard);
                let mut tcx = Cx { guard: tg, env: cx.env.clone(), path: cx.path.clone(), enclosing: cx.enclosing.clone() };
                self.block(then, &mut tcx);
                let nc = self.pool.not(c);
                let mut eg = self.pool.and(nc, cx.guard);
                if let Some(le) = le {
                    eg = self.define(SsaName::def(GUARD, le, &cx.path), BvType::BOOL, eg, Role::Guard);
                }
                let mut ecx = Cx { guard: eg, env: cx.env.clone(), path: cx.path.clone(), enclosing: cx.enclosing.clone() };
                self.block(els, &mut ecx);
                let names: Vec<String> = cx.env.keys().cloned().collect();
                for name in names {
                    let (t, e) = (tcx.env[&name], ecx.env[&name]);
                    if t != e {
                        let ty = self.var_types[&name];
                        let rhs = self.pool.ite(tg, t, e);
                        let v = self.define(SsaName::new(var_base(&name), SsaIndex::Phi(join), &cx.path), ty, rhs, Role::Definition);
                        cx.env.insert(name, v);
                    }
                }
                if new_guard {
                    let rhs = self.pool.or(tcx.guard, ecx.guard);
                    cx.guard = self.define(SsaName::def(GUARD, join, &cx.path), BvType::BOOL, rhs, Role::Guard);
                }
            }
            (StmtKind::While { .. }, Loc::While { .. }) => self.enter_loop(s.id, cx),
            _ => unreachable!("location kind does not match statement"),
        }
    }

    fn enter_loop(&mut self, stmt: u32, cx: &mut Cx) {
        let l = self.loop_of_stmt[&stmt];
        let (h, m) = (self.loops[l].head, self.loops[l].merge);
        let vars = self.loops[l].vars.clone();
        let select = self.pool.var(SsaName::new(GUARD, SsaIndex::Select(h), &cx.path), BvType::BOOL);
        let loop_back = vars
            .iter()
            .map(|(n, t)| self.pool.var(SsaName::new(var_base(n), SsaIndex::LoopBack(h), &cx.path), *t))
            .collect();
        let merged_guard = self.pool.var(SsaName::def(GUARD, m, &cx.path), BvType::BOOL);
        let merged: Vec<ExprId> = vars
            .iter()
            .map(|(n, t)| self.pool.var(SsaName::new(var_base(n), SsaIndex::Phi(m), &cx.path), *t))
            .collect();
        let idx = self.instances.len();
        self.instances.push(Instance {
            loop_idx: l,
            path: cx.path.clone(),
            enclosing: cx.enclosing.clone(),
            select,
            loop_back,
            entry_guard: cx.guard,
            entry: cx.env.clone(),
            copies: Vec::new(),
            enables: Vec::new(),
            merged_guard,
            merged: merged.clone(),
        });
        for _ in 0..self.k {
            self.add_copy(idx);
        }
        self.add_merge(idx);
        cx.guard = merged_guard;
        for ((n, _), v) in vars.iter().zip(merged) {
            cx.env.insert(n.clone(), v);
        }
    }

    pub(super) fn add_copy(&mut self, idx: usize) {
        let inst = &self.instances[idx];
        let info = &self.loops[inst.loop_idx];
        let (h, b, x) = (info.head, info.body_loc, info.exit);
        let vars = info.vars.clone();
        let cond = info.cond.clone();
        let body = info.body.clone();
        let q = inst.copies.len() as u32;
        let mut path = inst.path.clone();
        path.push(q);
        let mut enclosing = inst.enclosing.clone();
        enclosing.push((idx, q));
        let mut env = inst.entry.clone();
        let (head_guard, head) = match inst.copies.last() {
            None => {
                let (ls, entry_guard) = (inst.select, inst.entry_guard);
                let lb = inst.loop_back.clone();
                let entry: Vec<ExprId> = vars.iter().map(|(n, _)| inst.entry[n]).collect();
                let g = self.define(SsaName::def(GUARD, h, &path), BvType::BOOL, entry_guard, Role::LoopHead);
                let mut head = Vec::new();
                for (((n, t), lbv), ev) in vars.iter().zip(lb).zip(entry) {
                    let rhs = self.pool.ite(ls, lbv, ev);
                    head.push(self.define(SsaName::new(var_base(n), SsaIndex::Phi(h), &path), *t, rhs, Role::LoopHead));
                }
                (g, head)
            }
            Some(prev) => {
                let (pg, pend) = (prev.end_guard, prev.end.clone());
                let g = self.define(SsaName::def(GUARD, h, &path), BvType::BOOL, pg, Role::LoopHead);
                let mut head = Vec::new();
                for ((n, t), v) in vars.iter().zip(pend) {
                    head.push(self.define(SsaName::new(var_base(n), SsaIndex::Phi(h), &path), *t, v, Role::LoopHead));
                }
                (g, head)
            }
        };
        for ((n, _), v) in vars.iter().zip(&head) {
            env.insert(n.clone(), *v);
        }
        let mut cx = Cx { guard: head_guard, env, path, enclosing };
        let c = self.translate_cond(&cond, &cx);
        let rhs = self.pool.and(c, head_guard);
        cx.guard = self.define(SsaName::def(GUARD, b, &cx.path), BvType::BOOL, rhs, Role::Guard);
        self.block(&body, &mut cx);
        let nc = self.pool.not(c);
        let rhs = self.pool.and(nc, head_guard);
        let exit_guard = self.define(SsaName::def(GUARD, x, &cx.path), BvType::BOOL, rhs, Role::Guard);
        let end = vars.iter().map(|(n, _)| cx.env[n]).collect();
        self.instances[idx].copies.push(Copy { head_guard, head, end_guard: cx.guard, end, exit_guard });
    }

    pub(super) fn add_merge(&mut self, idx: usize) {
        let inst = &self.instances[idx];
        let h = self.loops[inst.loop_idx].head;
        let kk = inst.copies.len() as u32;
        let mut path = inst.path.clone();
        path.push(kk - 1);
        let copies = inst.copies.clone();
        let (mg, merged) = (inst.merged_guard, inst.merged.clone());
        let en = self.pool.var(SsaName::def(ENABLE, h, &path), BvType::BOOL);
        let any = self.pool.or_all(copies.iter().map(|c| c.exit_guard));
        let eq = self.pool.eq(mg, any);
        let c = self.pool.implies(en, eq);
        self.emit(c, Role::Merge);
        for (j, &mv) in merged.iter().enumerate() {
            let last = copies.last().unwrap();
            let mut acc = last.head[j];
            for cp in copies[..copies.len() - 1].iter().rev() {
                acc = self.pool.ite(cp.exit_guard, cp.head[j], acc);
            }
            let eq = self.pool.eq(mv, acc);
            let c = self.pool.implies(en, eq);
            self.emit(c, Role::Merge);
        }
        self.instances[idx].enables.push(en);
    }
}

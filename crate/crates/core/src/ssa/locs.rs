//! Syntactic location numbers for SSA names.
//!
//! Numbers are fixed per statement before encoding, so every unwinding copy
//! of a loop body reuses them and copies differ only in the `%` path. A
//! definition directly after a guard definition shares the guard's number
//! (`guard#2`, `x#2`), mirroring the usual listing style.

use std::collections::HashMap;

use crate::frontend::ast::{Stmt, StmtKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Loc {
    /// Declaration or assignment defining `x#n`.
    Def(u32),
    /// Assumption defining `guard#n`.
    Assume(u32),
    Assert,
    If {
        then: u32,
        /// Guard of the else branch, absent when there is no else branch.
        els: Option<u32>,
        join: u32,
        /// Whether the guard after the join differs from the one before.
        new_guard: bool,
    },
    While {
        head: u32,
        body: u32,
        exit: u32,
        merge: u32,
    },
}

pub fn assign_locs(body: &[Stmt]) -> HashMap<u32, Loc> {
    let mut p = Pass { next: 1, share: Some(0), map: HashMap::new() };
    // leading declarations all live at location 0 with guard#0
    let mut rest = body;
    while let Some((s, tail)) = rest.split_first() {
        if let StmtKind::Decl { .. } = s.kind {
            p.map.insert(s.id, Loc::Def(0));
            rest = tail;
        } else {
            break;
        }
    }
    p.share = None;
    p.stmts(rest);
    p.map
}

/// True if executing `stmts` can leave a stronger guard than it started with.
pub fn changes_guard(stmts: &[Stmt]) -> bool {
    stmts.iter().any(|s| match &s.kind {
        StmtKind::Assume(_) | StmtKind::While { .. } => true,
        StmtKind::If { then, els, .. } => changes_guard(then) || changes_guard(els),
        _ => false,
    })
}

struct Pass {
    next: u32,
    share: Option<u32>,
    map: HashMap<u32, Loc>,
}

impl Pass {
    fn fresh(&mut self) -> u32 {
        let l = self.next;
        self.next += 1;
        l
    }

    fn def(&mut self) -> u32 {
        match self.share.take() {
            Some(l) => l,
            None => self.fresh(),
        }
    }

    fn guard(&mut self) -> u32 {
        let l = self.fresh();
        self.share = Some(l);
        l
    }

    fn stmts(&mut self, ss: &[Stmt]) {
        for s in ss {
            let loc = match &s.kind {
                StmtKind::Decl { .. } | StmtKind::Assign { .. } => Loc::Def(self.def()),
                StmtKind::Assert(_) => Loc::Assert,
                StmtKind::Assume(_) => Loc::Assume(self.guard()),
                StmtKind::If { then, els, .. } => {
                    let t = self.guard();
                    self.stmts(then);
                    let e = if els.is_empty() {
                        None
                    } else {
                        let e = self.guard();
                        self.stmts(els);
                        Some(e)
                    };
                    let join = self.fresh();
                    let new_guard = changes_guard(then) || changes_guard(els);
                    self.share = if new_guard { None } else { Some(join) };
                    Loc::If { then: t, els: e, join, new_guard }
                }
                StmtKind::While { body, .. } => {
                    self.share = None;
                    let head = self.fresh();
                    let b = self.guard();
                    self.stmts(body);
                    self.share = None;
                    let exit = self.fresh();
                    let merge = self.guard();
                    Loc::While { head, body: b, exit, merge }
                }
            };
            self.map.insert(s.id, loc);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load;

    #[test]
    fn counting_loop_numbers() {
        let p = load("void main() { unsigned x = 0; while (x < 10) { ++x; } assert(x == 10); }").unwrap();
        let m = assign_locs(&p.body);
        assert_eq!(m[&0], Loc::Def(0));
        assert_eq!(m[&1], Loc::While { head: 1, body: 2, exit: 3, merge: 4 });
        assert_eq!(m[&2], Loc::Def(2));
        assert_eq!(m[&3], Loc::Assert);
    }
}

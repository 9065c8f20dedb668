//! Incremental CDCL propositional solver.
//!
//! Two-watched-literal propagation, first-UIP learning with local clause
//! minimization, VSIDS branching with phase saving, Luby restarts and
//! activity-based learnt clause reduction. Clauses may be added between
//! calls; each call solves under a set of assumption literals, in the style
//! of MiniSat's `solve(assumps)`.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

/// Literal: `2 * var + sign`, sign 1 meaning negated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(pub u32);

impl Lit {
    pub fn new(v: Var, negated: bool) -> Lit {
        Lit(v.0 << 1 | negated as u32)
    }

    pub fn pos(v: Var) -> Lit {
        Lit::new(v, false)
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }

    /// DIMACS integer form.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var().0 as i64 + 1;
        if self.is_neg() {
            -v
        } else {
            v
        }
    }

    pub fn from_dimacs(x: i64) -> Lit {
        assert!(x != 0);
        Lit::new(Var(x.unsigned_abs() as u32 - 1), x < 0)
    }

    fn idx(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum LBool {
    True,
    False,
    Undef,
}

/// Budget for one `solve` call.
#[derive(Clone, Debug, Default)]
pub struct Limits {
    pub deadline: Option<Instant>,
    pub cancel: Option<Arc<AtomicBool>>,
    pub max_conflicts: Option<u64>,
}

impl Limits {
    fn exceeded(&self, conflicts: u64) -> Option<Interrupt> {
        if let Some(c) = &self.cancel {
            if c.load(Ordering::Relaxed) {
                return Some(Interrupt::Cancelled);
            }
        }
        if let Some(d) = self.deadline {
            if Instant::now() >= d {
                return Some(Interrupt::Timeout);
            }
        }
        if let Some(m) = self.max_conflicts {
            if conflicts >= m {
                return Some(Interrupt::ConflictBudget);
            }
        }
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interrupt {
    Timeout,
    Cancelled,
    ConflictBudget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat,
    Unsat,
    Interrupted(Interrupt),
}

#[derive(Clone, Debug, Default)]
pub struct SatStats {
    pub solves: u64,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    activity: f64,
    deleted: bool,
}

#[derive(Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: Lit,
}

/// Indexed binary max-heap of variables ordered by activity.
#[derive(Default)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<i32>,
}

impl VarHeap {
    fn grow(&mut self, n: usize) {
        self.pos.resize(n, -1);
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize] >= 0
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if act[self.heap[p] as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[p];
            self.pos[self.heap[i] as usize] = i as i32;
            i = p;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && act[self.heap[r] as usize] > act[self.heap[l] as usize] { r } else { l };
            if act[self.heap[c] as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i] as usize] = i as i32;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v as usize] = i as i32;
        self.up(i, act);
    }

    fn bumped(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            let i = self.pos[v as usize] as usize;
            self.up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap[0];
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = -1;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top)
    }

    fn rebuild(&mut self, vars: impl Iterator<Item = u32>, act: &[f64]) {
        for v in self.heap.drain(..) {
            self.pos[v as usize] = -1;
        }
        for v in vars {
            self.insert(v, act);
        }
    }
}

pub struct Cdcl {
    assigns: Vec<LBool>,
    level: Vec<u32>,
    reason: Vec<Option<u32>>,
    polarity: Vec<bool>,
    activity: Vec<f64>,
    seen: Vec<bool>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    clauses: Vec<Clause>,
    learnts: Vec<u32>,
    free_slots: Vec<u32>,
    watches: Vec<Vec<Watcher>>,
    order: VarHeap,
    var_inc: f64,
    cla_inc: f64,
    max_learnts: f64,
    ok: bool,
    model: Vec<bool>,
    pub stats: SatStats,
}

impl Default for Cdcl {
    fn default() -> Self {
        Self::new()
    }
}

const VAR_DECAY: f64 = 0.95;
const CLA_DECAY: f64 = 0.999;
const RESTART_BASE: u64 = 100;

fn luby(mut x: u64) -> u64 {
    // sequence 1 1 2 1 1 2 4 1 1 2 ...
    let (mut size, mut seq) = (1u64, 0u32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

impl Cdcl {
    pub fn new() -> Self {
        Cdcl {
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            polarity: Vec::new(),
            activity: Vec::new(),
            seen: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            clauses: Vec::new(),
            learnts: Vec::new(),
            free_slots: Vec::new(),
            watches: Vec::new(),
            order: VarHeap::default(),
            var_inc: 1.0,
            cla_inc: 1.0,
            max_learnts: 0.0,
            ok: true,
            model: Vec::new(),
            stats: SatStats::default(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.assigns.len() as u32
    }

    pub fn new_var(&mut self) -> Var {
        let v = self.assigns.len() as u32;
        self.assigns.push(LBool::Undef);
        self.level.push(0);
        self.reason.push(None);
        self.polarity.push(true);
        self.activity.push(0.0);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.order.grow(v as usize + 1);
        self.order.insert(v, &self.activity);
        Var(v)
    }

    fn value(&self, l: Lit) -> LBool {
        match self.assigns[l.var().0 as usize] {
            LBool::Undef => LBool::Undef,
            LBool::True => {
                if l.is_neg() {
                    LBool::False
                } else {
                    LBool::True
                }
            }
            LBool::False => {
                if l.is_neg() {
                    LBool::True
                } else {
                    LBool::False
                }
            }
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: Option<u32>) {
        let v = l.var().0 as usize;
        debug_assert_eq!(self.assigns[v], LBool::Undef);
        self.assigns[v] = if l.is_neg() { LBool::False } else { LBool::True };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let start = self.trail_lim[lvl as usize];
        for i in (start..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().0 as usize;
            self.assigns[v] = LBool::Undef;
            self.reason[v] = None;
            self.polarity[v] = !l.is_neg();
            self.order.insert(v as u32, &self.activity);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = start;
    }

    /// Add a clause permanently. Returns false once the formula is UNSAT at
    /// the root level.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        self.cancel_until(0);
        let mut ls: Vec<Lit> = lits.to_vec();
        ls.sort();
        ls.dedup();
        let mut out = Vec::with_capacity(ls.len());
        for (i, &l) in ls.iter().enumerate() {
            if i + 1 < ls.len() && ls[i + 1] == !l {
                return true; // tautology
            }
            match self.value(l) {
                LBool::True => return true,
                LBool::False => {}
                LBool::Undef => out.push(l),
            }
        }
        match out.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(out[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                self.attach(out, false);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        let (l0, l1) = (lits[0], lits[1]);
        let c = Clause { lits, learnt, activity: 0.0, deleted: false };
        let cref = match self.free_slots.pop() {
            Some(i) => {
                self.clauses[i as usize] = c;
                i
            }
            None => {
                self.clauses.push(c);
                (self.clauses.len() - 1) as u32
            }
        };
        self.watches[(!l0).idx()].push(Watcher { cref, blocker: l1 });
        self.watches[(!l1).idx()].push(Watcher { cref, blocker: l0 });
        cref
    }

    /// Returns the conflicting clause, if any.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let mut ws = std::mem::take(&mut self.watches[p.idx()]);
            let false_lit = !p;
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == LBool::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let c = &mut self.clauses[cref].lits;
                    if c[0] == false_lit {
                        c.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                let nw = Watcher { cref: w.cref, blocker: first };
                if first != w.blocker && self.value(first) == LBool::True {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                // look for a new watch
                let len = self.clauses[cref].lits.len();
                let mut found = false;
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.value(l) != LBool::False {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[(!l).idx()].push(nw);
                        found = true;
                        break;
                    }
                }
                if found {
                    continue;
                }
                ws[j] = nw;
                j += 1;
                if self.value(first) == LBool::False {
                    conflict = Some(w.cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(w.cref));
                }
            }
            ws.truncate(j);
            // watches pushed to p's list during the loop (none: a clause never
            // re-watches the literal it just left) are preserved by appending
            let extra = std::mem::take(&mut self.watches[p.idx()]);
            ws.extend(extra);
            self.watches[p.idx()] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.bumped(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut path = 0;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let dl = self.decision_level();
        loop {
            self.bump_clause(confl);
            let start = if p.is_some() { 1 } else { 0 };
            let n = self.clauses[confl as usize].lits.len();
            for k in start..n {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var().0 as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= dl {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var().0 as usize] {
                    break;
                }
            }
            let pl = self.trail[idx];
            p = Some(pl);
            let v = pl.var().0 as usize;
            self.seen[v] = false;
            path -= 1;
            if path == 0 {
                learnt[0] = !pl;
                break;
            }
            confl = self.reason[v].expect("non-decision literal has a reason");
            // the reason's implied literal must sit at index 0
            let lits = &mut self.clauses[confl as usize].lits;
            if lits[0] != pl {
                let pos = lits.iter().position(|&l| l == pl).unwrap();
                lits.swap(0, pos);
            }
        }

        // local minimization: drop literals implied by other learnt literals
        let mut keep = vec![learnt[0]];
        for &l in &learnt[1..] {
            let v = l.var().0 as usize;
            let redundant = match self.reason[v] {
                None => false,
                Some(r) => self.clauses[r as usize].lits.iter().all(|&q| {
                    let qv = q.var().0 as usize;
                    qv == v || self.seen[qv] || self.level[qv] == 0
                }),
            };
            if !redundant {
                keep.push(l);
            }
        }
        for &l in &learnt {
            self.seen[l.var().0 as usize] = false;
        }
        let mut learnt = keep;

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var().0 as usize] > self.level[learnt[max_i].var().0 as usize] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var().0 as usize]
        };
        (learnt, bt)
    }

    fn reduce_db(&mut self) {
        let mut ls: Vec<u32> = self.learnts.clone();
        ls.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            (ca.lits.len() <= 2)
                .cmp(&(cb.lits.len() <= 2))
                .then(ca.activity.partial_cmp(&cb.activity).unwrap())
        });
        let half = ls.len() / 2;
        let mut kept = Vec::with_capacity(ls.len());
        for (i, &c) in ls.iter().enumerate() {
            let cl = &self.clauses[c as usize];
            let locked = {
                let v = cl.lits[0].var().0 as usize;
                self.reason[v] == Some(c) && self.value(cl.lits[0]) == LBool::True
            };
            if i < half && cl.lits.len() > 2 && !locked {
                self.clauses[c as usize].deleted = true;
                self.clauses[c as usize].lits = Vec::new();
                self.free_slots.push(c);
            } else {
                kept.push(c);
            }
        }
        self.learnts = kept;
        self.purge_watches();
    }

    fn purge_watches(&mut self) {
        let clauses = &self.clauses;
        for ws in self.watches.iter_mut() {
            ws.retain(|w| !clauses[w.cref as usize].deleted);
        }
        // freed slots may be reused now that no watcher points at them
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.order.pop(&self.activity) {
            if self.assigns[v as usize] == LBool::Undef {
                return Some(Lit::new(Var(v), !self.polarity[v as usize]));
            }
        }
        None
    }

    /// Solve under `assumptions`. On `Sat` the model is available through
    /// [`Cdcl::model_value`].
    pub fn solve(&mut self, assumptions: &[Lit], limits: &Limits) -> SatResult {
        self.stats.solves += 1;
        self.model.clear();
        if !self.ok {
            return SatResult::Unsat;
        }
        self.cancel_until(0);
        if self.propagate().is_some() {
            self.ok = false;
            return SatResult::Unsat;
        }
        if self.max_learnts == 0.0 {
            self.max_learnts = (self.clauses.len() as f64 / 3.0).max(2000.0);
        }
        let start_conflicts = self.stats.conflicts;
        let mut restart_n = 0;
        loop {
            let budget = luby(restart_n) * RESTART_BASE;
            restart_n += 1;
            match self.search(assumptions, budget, limits, start_conflicts) {
                Some(r) => {
                    if r != SatResult::Sat {
                        self.cancel_until(0);
                    }
                    return r;
                }
                None => {
                    self.stats.restarts += 1;
                    self.cancel_until(0);
                }
            }
        }
    }

    fn search(&mut self, assumptions: &[Lit], budget: u64, limits: &Limits, start: u64) -> Option<SatResult> {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Some(SatResult::Unsat);
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let l0 = learnt[0];
                    let cref = self.attach(learnt, true);
                    self.learnts.push(cref);
                    self.bump_clause(cref);
                    self.enqueue(l0, Some(cref));
                }
                self.var_inc /= VAR_DECAY;
                self.cla_inc /= CLA_DECAY;
                if self.stats.conflicts % 64 == 0 {
                    if let Some(i) = limits.exceeded(self.stats.conflicts - start) {
                        return Some(SatResult::Interrupted(i));
                    }
                }
            } else {
                if conflicts >= budget {
                    return None;
                }
                if self.learnts.len() as f64 - self.trail.len() as f64 >= self.max_learnts {
                    self.reduce_db();
                    self.max_learnts *= 1.1;
                }
                let mut next = None;
                while (self.decision_level() as usize) < assumptions.len() {
                    let a = assumptions[self.decision_level() as usize];
                    match self.value(a) {
                        LBool::True => self.trail_lim.push(self.trail.len()),
                        LBool::False => return Some(SatResult::Unsat),
                        LBool::Undef => {
                            next = Some(a);
                            break;
                        }
                    }
                }
                let lit = match next {
                    Some(a) => a,
                    None => {
                        self.stats.decisions += 1;
                        if self.stats.decisions % 4096 == 0 {
                            if let Some(i) = limits.exceeded(self.stats.conflicts - start) {
                                return Some(SatResult::Interrupted(i));
                            }
                        }
                        match self.pick_branch() {
                            Some(l) => l,
                            None => {
                                self.model = self.assigns.iter().map(|&a| a == LBool::True).collect();
                                return Some(SatResult::Sat);
                            }
                        }
                    }
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(lit, None);
            }
        }
    }

    /// Model value of `l` after a `Sat` answer.
    pub fn model_value(&self, l: Lit) -> Option<bool> {
        self.model.get(l.var().0 as usize).map(|&b| b != l.is_neg())
    }

    pub fn is_ok(&self) -> bool {
        self.ok
    }

    /// Rebuild the branching heap; used after bulk variable creation.
    pub fn reset_order(&mut self) {
        let n = self.num_vars();
        self.order.rebuild(0..n, &self.activity);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(s: &mut Cdcl, n: usize) -> Vec<Lit> {
        (0..n).map(|_| Lit::pos(s.new_var())).collect()
    }

    #[test]
    fn luby_sequence() {
        let seq: Vec<u64> = (0..10).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2]);
    }

    #[test]
    fn empty_is_sat() {
        let mut s = Cdcl::new();
        assert_eq!(s.solve(&[], &Limits::default()), SatResult::Sat);
    }

    #[test]
    fn unit_contradiction() {
        let mut s = Cdcl::new();
        let x = lits(&mut s, 1)[0];
        s.add_clause(&[x]);
        s.add_clause(&[!x]);
        assert_eq!(s.solve(&[], &Limits::default()), SatResult::Unsat);
    }

    #[test]
    fn assumptions_do_not_persist() {
        let mut s = Cdcl::new();
        let v = lits(&mut s, 2);
        s.add_clause(&[v[0], v[1]]);
        assert_eq!(s.solve(&[!v[0], !v[1]], &Limits::default()), SatResult::Unsat);
        assert_eq!(s.solve(&[!v[0]], &Limits::default()), SatResult::Sat);
        assert_eq!(s.model_value(v[1]), Some(true));
    }

    /// Pigeonhole n+1 into n: small, but needs real search.
    #[test]
    fn pigeonhole_is_unsat() {
        let n = 6;
        let mut s = Cdcl::new();
        let p: Vec<Vec<Lit>> = (0..=n).map(|_| lits(&mut s, n)).collect();
        for row in &p {
            s.add_clause(row);
        }
        for h in 0..n {
            for i in 0..=n {
                for j in i + 1..=n {
                    s.add_clause(&[!p[i][h], !p[j][h]]);
                }
            }
        }
        assert_eq!(s.solve(&[], &Limits::default()), SatResult::Unsat);
    }

    fn brute_force(n: usize, clauses: &[Vec<Lit>]) -> bool {
        (0..1u32 << n).any(|m| {
            clauses.iter().all(|c| c.iter().any(|l| ((m >> l.var().0) & 1 == 1) != l.is_neg()))
        })
    }

    #[test]
    fn random_3sat_agrees_with_brute_force() {
        let mut seed = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..300 {
            let n = 8;
            let m = 20 + (next() % 25) as usize;
            let clauses: Vec<Vec<Lit>> = (0..m)
                .map(|_| (0..3).map(|_| Lit::new(Var((next() % n as u64) as u32), next() % 2 == 0)).collect())
                .collect();
            let mut s = Cdcl::new();
            lits(&mut s, n);
            for c in &clauses {
                s.add_clause(c);
            }
            let r = s.solve(&[], &Limits::default());
            assert_eq!(r == SatResult::Sat, brute_force(n, &clauses));
            if r == SatResult::Sat {
                for c in &clauses {
                    assert!(c.iter().any(|&l| s.model_value(l) == Some(true)));
                }
            }
        }
    }

    #[test]
    fn conflict_budget_interrupts() {
        let n = 9;
        let mut s = Cdcl::new();
        let p: Vec<Vec<Lit>> = (0..=n).map(|_| lits(&mut s, n)).collect();
        for row in &p {
            s.add_clause(row);
        }
        for h in 0..n {
            for i in 0..=n {
                for j in i + 1..=n {
                    s.add_clause(&[!p[i][h], !p[j][h]]);
                }
            }
        }
        let lim = Limits { max_conflicts: Some(10), ..Default::default() };
        assert!(matches!(s.solve(&[], &lim), SatResult::Interrupted(Interrupt::ConflictBudget)));
    }
}

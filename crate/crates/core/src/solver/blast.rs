//! Bit-blasting of [`ExprPool`] expressions into CNF.
//!
//! Gates are hash-consed and constant-folded, so shared sub-terms and
//! constant operands cost nothing. Each expression is blasted once per
//! solver; bits are stored least-significant first.

use std::collections::HashMap;

use super::expr::{ExprId, ExprPool, Op, VarId};
use super::sat::Lit;
use super::SatBackend;

pub struct Blaster {
    pub(crate) sat: Box<dyn SatBackend>,
    tru: Lit,
    bits: HashMap<ExprId, Vec<Lit>>,
    var_bits: HashMap<VarId, Vec<Lit>>,
    and_cache: HashMap<(Lit, Lit), Lit>,
    xor_cache: HashMap<(Lit, Lit), Lit>,
    log: Option<Vec<Vec<Lit>>>,
    num_clauses: u64,
}

impl Blaster {
    pub fn new(mut sat: Box<dyn SatBackend>, keep_log: bool) -> Self {
        let t = sat.new_var();
        let mut b = Blaster {
            sat,
            tru: t,
            bits: HashMap::new(),
            var_bits: HashMap::new(),
            and_cache: HashMap::new(),
            xor_cache: HashMap::new(),
            log: if keep_log { Some(Vec::new()) } else { None },
            num_clauses: 0,
        };
        // bypass `clause`, which treats `t` as already satisfied
        b.sat.add_clause(&[t]);
        b.num_clauses = 1;
        if let Some(log) = &mut b.log {
            log.push(vec![t]);
        }
        b
    }

    pub fn tru(&self) -> Lit {
        self.tru
    }

    pub fn fals(&self) -> Lit {
        !self.tru
    }

    pub fn num_clauses(&self) -> u64 {
        self.num_clauses
    }

    pub fn clause_log(&self) -> Option<&[Vec<Lit>]> {
        self.log.as_deref()
    }

    pub fn var_bits(&self, v: VarId) -> Option<&[Lit]> {
        self.var_bits.get(&v).map(|b| b.as_slice())
    }

    pub fn clause(&mut self, lits: &[Lit]) {
        if lits.contains(&self.tru) {
            return;
        }
        let f = !self.tru;
        let ls: Vec<Lit> = lits.iter().copied().filter(|&l| l != f).collect();
        self.num_clauses += 1;
        if let Some(log) = &mut self.log {
            log.push(ls.clone());
        }
        self.sat.add_clause(&ls);
    }

    fn fresh(&mut self) -> Lit {
        self.sat.new_var()
    }

    fn konst(&self, b: bool) -> Lit {
        if b {
            self.tru
        } else {
            !self.tru
        }
    }

    fn as_const(&self, l: Lit) -> Option<bool> {
        if l == self.tru {
            Some(true)
        } else if l == !self.tru {
            Some(false)
        } else {
            None
        }
    }

    // ---- gates ----------------------------------------------------------

    pub fn and2(&mut self, a: Lit, b: Lit) -> Lit {
        match (self.as_const(a), self.as_const(b)) {
            (Some(false), _) | (_, Some(false)) => return self.fals(),
            (Some(true), _) => return b,
            (_, Some(true)) => return a,
            _ => {}
        }
        if a == b {
            return a;
        }
        if a == !b {
            return self.fals();
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&g) = self.and_cache.get(&key) {
            return g;
        }
        let g = self.fresh();
        self.clause(&[!g, a]);
        self.clause(&[!g, b]);
        self.clause(&[g, !a, !b]);
        self.and_cache.insert(key, g);
        g
    }

    pub fn or2(&mut self, a: Lit, b: Lit) -> Lit {
        !self.and2(!a, !b)
    }

    pub fn xor2(&mut self, a: Lit, b: Lit) -> Lit {
        match (self.as_const(a), self.as_const(b)) {
            (Some(x), _) => return if x { !b } else { b },
            (_, Some(y)) => return if y { !a } else { a },
            _ => {}
        }
        if a == b {
            return self.fals();
        }
        if a == !b {
            return self.tru;
        }
        // strip polarity so each pair of variables gets one gate
        let flip = a.is_neg() != b.is_neg();
        let (pa, pb) = (Lit::pos(a.var()), Lit::pos(b.var()));
        let key = if pa < pb { (pa, pb) } else { (pb, pa) };
        let g = match self.xor_cache.get(&key) {
            Some(&g) => g,
            None => {
                let g = self.fresh();
                self.clause(&[!g, pa, pb]);
                self.clause(&[!g, !pa, !pb]);
                self.clause(&[g, !pa, pb]);
                self.clause(&[g, pa, !pb]);
                self.xor_cache.insert(key, g);
                g
            }
        };
        if flip {
            !g
        } else {
            g
        }
    }

    pub fn mux(&mut self, c: Lit, t: Lit, e: Lit) -> Lit {
        if let Some(cv) = self.as_const(c) {
            return if cv { t } else { e };
        }
        if t == e {
            return t;
        }
        if t == self.tru || e == !self.tru || t == !self.tru || e == self.tru {
            // reduces to and/or forms
            let ct = self.and2(c, t);
            let ce = self.and2(!c, e);
            return self.or2(ct, ce);
        }
        let g = self.fresh();
        self.clause(&[!c, !t, g]);
        self.clause(&[!c, t, !g]);
        self.clause(&[c, !e, g]);
        self.clause(&[c, e, !g]);
        self.clause(&[!t, !e, g]);
        self.clause(&[t, e, !g]);
        g
    }

    fn or_many(&mut self, ls: &[Lit]) -> Lit {
        let mut acc = self.fals();
        for &l in ls {
            acc = self.or2(acc, l);
        }
        acc
    }

    // ---- word-level circuits --------------------------------------------

    fn add_carry(&mut self, a: &[Lit], b: &[Lit], mut carry: Lit) -> Vec<Lit> {
        let mut out = Vec::with_capacity(a.len());
        for i in 0..a.len() {
            let ab = self.xor2(a[i], b[i]);
            out.push(self.xor2(ab, carry));
            let g = self.and2(a[i], b[i]);
            let p = self.and2(carry, ab);
            carry = self.or2(g, p);
        }
        out
    }

    fn add(&mut self, a: &[Lit], b: &[Lit]) -> Vec<Lit> {
        let f = self.fals();
        self.add_carry(a, b, f)
    }

    fn sub(&mut self, a: &[Lit], b: &[Lit]) -> Vec<Lit> {
        let nb: Vec<Lit> = b.iter().map(|&l| !l).collect();
        let t = self.tru;
        self.add_carry(a, &nb, t)
    }

    fn neg(&mut self, a: &[Lit]) -> Vec<Lit> {
        let z = vec![self.fals(); a.len()];
        self.sub(&z, a)
    }

    fn mul(&mut self, a: &[Lit], b: &[Lit]) -> Vec<Lit> {
        let w = a.len();
        let mut acc = vec![self.fals(); w];
        for i in 0..w {
            if b[i] == self.fals() {
                continue;
            }
            let mut part = vec![self.fals(); w];
            for j in 0..w - i {
                part[i + j] = self.and2(a[j], b[i]);
            }
            acc = self.add(&acc, &part);
        }
        acc
    }

    /// Unsigned `a < b`.
    fn ult(&mut self, a: &[Lit], b: &[Lit]) -> Lit {
        let mut lt = self.fals();
        for i in 0..a.len() {
            let here = self.and2(!a[i], b[i]);
            let same = !self.xor2(a[i], b[i]);
            let keep = self.and2(same, lt);
            lt = self.or2(here, keep);
        }
        lt
    }

    fn slt(&mut self, a: &[Lit], b: &[Lit]) -> Lit {
        let n = a.len();
        let mut fa = a.to_vec();
        let mut fb = b.to_vec();
        fa[n - 1] = !fa[n - 1];
        fb[n - 1] = !fb[n - 1];
        self.ult(&fa, &fb)
    }

    fn eq(&mut self, a: &[Lit], b: &[Lit]) -> Lit {
        let mut acc = self.tru;
        for i in 0..a.len() {
            let d = self.xor2(a[i], b[i]);
            acc = self.and2(acc, !d);
        }
        acc
    }

    fn mux_word(&mut self, c: Lit, t: &[Lit], e: &[Lit]) -> Vec<Lit> {
        (0..t.len()).map(|i| self.mux(c, t[i], e[i])).collect()
    }

    /// Restoring division; returns (quotient, remainder). A zero divisor
    /// yields an all-ones quotient and the dividend as remainder.
    fn udivrem(&mut self, a: &[Lit], b: &[Lit]) -> (Vec<Lit>, Vec<Lit>) {
        let w = a.len();
        let f = self.fals();
        let mut bx = b.to_vec();
        bx.push(f);
        let mut rem = vec![f; w + 1];
        let mut q = vec![f; w];
        for i in (0..w).rev() {
            let mut shifted = Vec::with_capacity(w + 1);
            shifted.push(a[i]);
            shifted.extend_from_slice(&rem[..w]);
            let lt = self.ult(&shifted, &bx);
            let ge = !lt;
            let diff = self.sub(&shifted, &bx);
            rem = self.mux_word(ge, &diff, &shifted);
            q[i] = ge;
        }
        rem.truncate(w);
        (q, rem)
    }

    fn abs(&mut self, a: &[Lit]) -> Vec<Lit> {
        let n = self.neg(a);
        self.mux_word(a[a.len() - 1], &n, a)
    }

    fn sdivrem(&mut self, a: &[Lit], b: &[Lit]) -> (Vec<Lit>, Vec<Lit>) {
        let w = a.len();
        let (sa, sb) = (a[w - 1], b[w - 1]);
        let aa = self.abs(a);
        let ab = self.abs(b);
        let (q, r) = self.udivrem(&aa, &ab);
        let nq = self.neg(&q);
        let neg_q = self.xor2(sa, sb);
        let q = self.mux_word(neg_q, &nq, &q);
        let zero = vec![self.fals(); w];
        let bz = self.eq(b, &zero);
        let ones = vec![self.tru; w];
        let q = self.mux_word(bz, &ones, &q);
        let nr = self.neg(&r);
        let r = self.mux_word(sa, &nr, &r);
        (q, r)
    }

    fn shift(&mut self, a: &[Lit], b: &[Lit], kind: Shift) -> Vec<Lit> {
        let w = a.len();
        let fill = match kind {
            Shift::Ashr => a[w - 1],
            _ => self.fals(),
        };
        let mut cur = a.to_vec();
        let mut overflow = Vec::new();
        for (k, &bit) in b.iter().enumerate() {
            let amt = if k < 127 { 1u128 << k } else { u128::MAX };
            if amt >= w as u128 {
                overflow.push(bit);
                continue;
            }
            let amt = amt as usize;
            let shifted: Vec<Lit> = (0..w)
                .map(|i| match kind {
                    Shift::Shl => {
                        if i >= amt {
                            cur[i - amt]
                        } else {
                            fill
                        }
                    }
                    _ => {
                        if i + amt < w {
                            cur[i + amt]
                        } else {
                            fill
                        }
                    }
                })
                .collect();
            cur = self.mux_word(bit, &shifted, &cur);
        }
        let ov = self.or_many(&overflow);
        let filled = vec![fill; w];
        self.mux_word(ov, &filled, &cur)
    }

    // ---- expressions ----------------------------------------------------

    /// Bits of `e`, blasting it (and any unseen sub-terms) on first use.
    pub fn blast(&mut self, pool: &ExprPool, root: ExprId) -> Vec<Lit> {
        if let Some(b) = self.bits.get(&root) {
            return b.clone();
        }
        let mut stack = vec![(root, false)];
        while let Some((e, expanded)) = stack.pop() {
            if self.bits.contains_key(&e) {
                continue;
            }
            let n = pool.node(e);
            if !expanded {
                stack.push((e, true));
                for &a in &n.args {
                    if !self.bits.contains_key(&a) {
                        stack.push((a, false));
                    }
                }
                continue;
            }
            let bits = self.blast_node(pool, e);
            self.bits.insert(e, bits);
        }
        self.bits[&root].clone()
    }

    fn blast_node(&mut self, pool: &ExprPool, e: ExprId) -> Vec<Lit> {
        let n = pool.node(e);
        let w = n.ty.width as usize;
        let args: Vec<Vec<Lit>> = n.args.iter().map(|a| self.bits[a].clone()).collect();
        let a = |i: usize| &args[i];
        match n.op {
            Op::Const(c) => (0..w).map(|i| self.konst(i < 128 && (c >> i) & 1 == 1)).collect(),
            Op::Var(v) => self.var_lits(v, w),
            Op::Not => a(0).iter().map(|&l| !l).collect(),
            Op::And => (0..w).map(|i| self.and2(a(0)[i], a(1)[i])).collect(),
            Op::Or => (0..w).map(|i| self.or2(a(0)[i], a(1)[i])).collect(),
            Op::Xor => (0..w).map(|i| self.xor2(a(0)[i], a(1)[i])).collect(),
            Op::Neg => self.neg(a(0)),
            Op::Add => self.add(a(0), a(1)),
            Op::Sub => self.sub(a(0), a(1)),
            Op::Mul => self.mul(a(0), a(1)),
            Op::UDiv => self.udivrem(a(0), a(1)).0,
            Op::URem => self.udivrem(a(0), a(1)).1,
            Op::SDiv => self.sdivrem(a(0), a(1)).0,
            Op::SRem => self.sdivrem(a(0), a(1)).1,
            Op::Shl => self.shift(a(0), a(1), Shift::Shl),
            Op::LShr => self.shift(a(0), a(1), Shift::Lshr),
            Op::AShr => self.shift(a(0), a(1), Shift::Ashr),
            Op::Eq => vec![self.eq(a(0), a(1))],
            Op::Ne => vec![!self.eq(a(0), a(1))],
            Op::Ult => vec![self.ult(a(0), a(1))],
            Op::Ule => vec![!self.ult(a(1), a(0))],
            Op::Slt => vec![self.slt(a(0), a(1))],
            Op::Sle => vec![!self.slt(a(1), a(0))],
            Op::Ite => self.mux_word(a(0)[0], a(1), a(2)),
            Op::BoolNot => vec![!a(0)[0]],
            Op::BoolAnd => vec![self.and2(a(0)[0], a(1)[0])],
            Op::BoolOr => vec![self.or2(a(0)[0], a(1)[0])],
            Op::Implies => vec![self.or2(!a(0)[0], a(1)[0])],
            Op::ZeroExt => {
                let mut v = a(0).clone();
                v.resize(w, self.fals());
                v
            }
            Op::SignExt => {
                let mut v = a(0).clone();
                let s = *v.last().unwrap();
                v.resize(w, s);
                v
            }
            Op::Extract { hi, lo } => a(0)[lo as usize..=hi as usize].to_vec(),
        }
    }

    fn var_lits(&mut self, v: VarId, w: usize) -> Vec<Lit> {
        if let Some(b) = self.var_bits.get(&v) {
            return b.clone();
        }
        let bits: Vec<Lit> = (0..w).map(|_| self.fresh()).collect();
        self.var_bits.insert(v, bits.clone());
        bits
    }

    /// Literal for a boolean expression.
    pub fn literal(&mut self, pool: &ExprPool, e: ExprId) -> Lit {
        debug_assert_eq!(pool.width(e), 1);
        self.blast(pool, e)[0]
    }

    /// Permanently assert a boolean expression.
    ///
    /// Top-level conjunctions are split, implications become single clauses,
    /// and an equation whose left side is a variable not yet encoded simply
    /// names the right side's bits, so SSA definitions add no clauses.
    pub fn assert(&mut self, pool: &ExprPool, e: ExprId) {
        let mut work = vec![e];
        while let Some(e) = work.pop() {
            let n = pool.node(e);
            match n.op {
                Op::Const(c) => {
                    if c == 0 {
                        self.clause(&[]);
                    }
                }
                Op::BoolAnd => work.extend(n.args.iter().rev().copied()),
                Op::Implies => {
                    let a = self.literal(pool, n.args[0]);
                    let b = self.literal(pool, n.args[1]);
                    self.clause(&[!a, b]);
                }
                Op::BoolOr => {
                    let a = self.literal(pool, n.args[0]);
                    let b = self.literal(pool, n.args[1]);
                    self.clause(&[a, b]);
                }
                Op::Eq => {
                    let (l, r) = (n.args[0], n.args[1]);
                    if let Some(v) = pool.as_var(l) {
                        if !self.var_bits.contains_key(&v) && !self.bits.contains_key(&l) {
                            let rb = self.blast(pool, r);
                            self.var_bits.insert(v, rb.clone());
                            self.bits.insert(l, rb);
                            continue;
                        }
                    }
                    let lb = self.blast(pool, l);
                    let rb = self.blast(pool, r);
                    for i in 0..lb.len() {
                        self.clause(&[!lb[i], rb[i]]);
                        self.clause(&[lb[i], !rb[i]]);
                    }
                }
                _ => {
                    let l = self.literal(pool, e);
                    self.clause(&[l]);
                }
            }
        }
    }
}

#[derive(Clone, Copy)]
enum Shift {
    Shl,
    Lshr,
    Ashr,
}

//! Guarded template domains over loop variables.
//!
//! A row `e(x) <= d` belongs to one syntactic loop and is instantiated at
//! every instance and copy of that loop. Row expressions are evaluated in a
//! signed type wide enough that they never wrap.

use std::fmt;
use std::str::FromStr;

use crate::solver::expr::{ExprId, ExprPool};
use crate::ssa::SsaSystem;
use crate::types::BvType;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DomainKind {
    #[default]
    Intervals,
    Zones,
    Octagons,
}

impl FromStr for DomainKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "intervals" => Ok(DomainKind::Intervals),
            "zones" => Ok(DomainKind::Zones),
            "octagons" => Ok(DomainKind::Octagons),
            _ => Err(format!("unknown domain `{s}` (expected intervals, zones or octagons)")),
        }
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::Intervals => "intervals",
            DomainKind::Zones => "zones",
            DomainKind::Octagons => "octagons",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub loop_idx: usize,
    /// `(index into the loop's variables, coefficient)`.
    pub terms: Vec<(usize, i8)>,
    /// Signed type the row expression is evaluated in.
    pub ty: BvType,
    pub min: i128,
    pub max: i128,
}

impl Row {
    fn new(sys: &SsaSystem, loop_idx: usize, terms: Vec<(usize, i8)>, extra_bits: u32) -> Self {
        let vars = &sys.loops[loop_idx].vars;
        let width = terms.iter().map(|&(i, _)| vars[i].1.width).max().unwrap_or(1);
        let (mut min, mut max) = (0i128, 0i128);
        for &(i, c) in &terms {
            let t = vars[i].1;
            let (lo, hi) = (t.min_value(), t.max_value());
            if c > 0 {
                min += lo;
                max += hi;
            } else {
                min -= hi;
                max -= lo;
            }
        }
        Row { loop_idx, terms, ty: BvType::signed(width + extra_bits), min, max }
    }
}

/// Bound of one row. The derived order is the lattice order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    Bottom,
    Le(i128),
    Top,
}

impl Bound {
    pub fn join(self, v: i128) -> Bound {
        match self {
            Bound::Bottom => Bound::Le(v),
            Bound::Le(d) => Bound::Le(d.max(v)),
            Bound::Top => Bound::Top,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Bottom => f.write_str("bottom"),
            Bound::Le(d) => write!(f, "{d}"),
            Bound::Top => f.write_str("top"),
        }
    }
}

pub type AbstractValue = Vec<Bound>;

#[derive(Clone, Debug)]
pub struct Template {
    pub kind: DomainKind,
    pub rows: Vec<Row>,
}

/// A place where a row is instantiated: guard and loop variable values.
#[derive(Clone, Debug)]
pub struct Point {
    pub guard: ExprId,
    pub vals: Vec<ExprId>,
}

impl Template {
    pub fn new(sys: &SsaSystem, kind: DomainKind) -> Self {
        let mut rows = Vec::new();
        for (l, info) in sys.loops.iter().enumerate() {
            let numeric: Vec<usize> = (0..info.vars.len()).filter(|&i| !info.vars[i].1.is_bool()).collect();
            for &i in &numeric {
                rows.push(Row::new(sys, l, vec![(i, 1)], 1));
                rows.push(Row::new(sys, l, vec![(i, -1)], 1));
            }
            if kind == DomainKind::Intervals {
                continue;
            }
            for (a, &i) in numeric.iter().enumerate() {
                for &j in &numeric[a + 1..] {
                    if info.vars[i].1 != info.vars[j].1 {
                        continue;
                    }
                    rows.push(Row::new(sys, l, vec![(i, 1), (j, -1)], 1));
                    rows.push(Row::new(sys, l, vec![(i, -1), (j, 1)], 1));
                    if kind == DomainKind::Octagons {
                        rows.push(Row::new(sys, l, vec![(i, 1), (j, 1)], 2));
                        rows.push(Row::new(sys, l, vec![(i, -1), (j, -1)], 2));
                    }
                }
            }
        }
        Template { kind, rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn bottom(&self) -> AbstractValue {
        vec![Bound::Bottom; self.rows.len()]
    }

    pub fn top(&self) -> AbstractValue {
        vec![Bound::Top; self.rows.len()]
    }

    /// Largest value row `r` can take.
    pub fn row_max(&self, r: usize) -> i128 {
        self.rows[r].max
    }

    /// Row expression over the loop variable values `vals`.
    pub fn row_expr(&self, pool: &mut ExprPool, r: usize, vals: &[ExprId]) -> ExprId {
        let row = &self.rows[r];
        let mut acc: Option<ExprId> = None;
        for &(i, c) in &row.terms {
            let x = pool.convert(vals[i], row.ty);
            acc = Some(match (acc, c > 0) {
                (None, true) => x,
                (None, false) => pool.neg(x),
                (Some(a), true) => pool.add(a, x),
                (Some(a), false) => pool.sub(a, x),
            });
        }
        acc.expect("row without terms")
    }

    /// `e <= bound` at the row's type.
    pub fn bound_expr(&self, pool: &mut ExprPool, r: usize, e: ExprId, b: Bound) -> ExprId {
        match b {
            Bound::Bottom => pool.fals(),
            Bound::Top => pool.tru(),
            Bound::Le(d) => {
                let d = pool.int(d, self.rows[r].ty);
                pool.sle(e, d)
            }
        }
    }

    /// Conjunction of `guard ==> row <= bound` over `points` of each row's
    /// loop.
    fn conjoin(&self, sys: &mut SsaSystem, v: &AbstractValue, points: &dyn Fn(&mut SsaSystem, usize) -> Vec<Point>) -> ExprId {
        let mut parts = Vec::new();
        for r in 0..self.rows.len() {
            if v[r] == Bound::Top {
                continue;
            }
            for p in points(sys, self.rows[r].loop_idx) {
                let e = self.row_expr(&mut sys.pool, r, &p.vals);
                let b = self.bound_expr(&mut sys.pool, r, e, v[r]);
                parts.push(sys.pool.implies(p.guard, b));
            }
        }
        sys.pool.and_all(parts)
    }

    /// The invariant assumed at every loop head reached from an arbitrary
    /// state.
    pub fn concretize_head(&self, sys: &mut SsaSystem, v: &AbstractValue) -> ExprId {
        self.conjoin(sys, v, &head_points)
    }

    /// The invariant required at the check points: heads reached from the
    /// entry state and the end of the bottom copy.
    pub fn concretize_body(&self, sys: &mut SsaSystem, v: &AbstractValue) -> ExprId {
        self.conjoin(sys, v, &check_points)
    }

    /// Exact value of row `r` on concrete loop variable values.
    pub fn eval_row(&self, r: usize, vals: &[i128]) -> i128 {
        self.rows[r].terms.iter().map(|&(i, c)| c as i128 * vals[i]).sum()
    }

    /// Text of a row over the loop-back variables of the loop's first
    /// instance, e.g. `x#lb1 - y#lb1`.
    pub fn row_text(&self, sys: &SsaSystem, r: usize) -> String {
        let row = &self.rows[r];
        let inst = sys.instances_of(row.loop_idx).next();
        let mut s = String::new();
        for (n, &(i, c)) in row.terms.iter().enumerate() {
            let name = match inst {
                Some(k) => sys.pool.display(sys.instances[k].loop_back[i]).to_string(),
                None => sys.loops[row.loop_idx].vars[i].0.clone(),
            };
            match (n, c > 0) {
                (0, true) => s.push_str(&name),
                (0, false) => s.push_str(&format!("-{name}")),
                (_, true) => s.push_str(&format!(" + {name}")),
                (_, false) => s.push_str(&format!(" - {name}")),
            }
        }
        s
    }

    /// Listing of the invariant, one `guard ==> row <= bound` line per row.
    pub fn render(&self, sys: &SsaSystem, v: &AbstractValue) -> String {
        let mut out = String::new();
        for r in 0..self.rows.len() {
            let l = self.rows[r].loop_idx;
            let guard = match sys.instances_of(l).next() {
                Some(k) => {
                    let i = &sys.instances[k];
                    format!("{} && {}", sys.pool.display(i.copies[0].head_guard), sys.pool.display(i.select))
                }
                None => "FALSE".to_string(),
            };
            let rhs = match v[r] {
                Bound::Le(d) => format!("<= {d}"),
                Bound::Bottom => "<= bottom".to_string(),
                Bound::Top => "<= top".to_string(),
            };
            out.push_str(&format!("{guard} ==> {} {rhs}\n", self.row_text(sys, r)));
        }
        out
    }
}

/// Heads of all copies of every instance of loop `l` when entered from an
/// arbitrary state (select guard set).
pub fn head_points(sys: &mut SsaSystem, l: usize) -> Vec<Point> {
    let mut out = Vec::new();
    let insts: Vec<usize> = sys.instances_of(l).collect();
    for k in insts {
        let inst = sys.instances[k].clone();
        for (u, c) in inst.copies.iter().enumerate() {
            let vals = if u == 0 { inst.loop_back.clone() } else { c.head.clone() };
            out.push(Point { guard: sys.pool.and(c.head_guard, inst.select), vals });
        }
    }
    out
}

/// Where the invariant must hold: every head reached from the entry state,
/// and the end of the bottom copy when started from an arbitrary state.
pub fn check_points(sys: &mut SsaSystem, l: usize) -> Vec<Point> {
    let mut out = Vec::new();
    let insts: Vec<usize> = sys.instances_of(l).collect();
    for k in insts {
        let inst = sys.instances[k].clone();
        let not_sel = sys.pool.not(inst.select);
        for c in &inst.copies {
            out.push(Point { guard: sys.pool.and(c.head_guard, not_sel), vals: c.head.clone() });
        }
        let last = inst.copies.last().expect("instance without copies");
        out.push(Point { guard: sys.pool.and(last.end_guard, inst.select), vals: last.end.clone() });
    }
    out
}

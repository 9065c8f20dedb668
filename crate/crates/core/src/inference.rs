//! Template invariant inference.
//!
//! Starting from bottom, the current value `v` is checked for inductivity:
//! assume it at the loop heads entered from an arbitrary state and ask for a
//! check point where it fails. A failing model names the violated rows and
//! their witness values. Strengthening then maximizes the sum of the
//! violated rows' bounds by binary search over an assumption `sum >= m`,
//! which jumps over long ascending chains that plain model enumeration
//! would walk one value at a time.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::domains::{check_points, head_points, AbstractValue, Bound, Template};
use crate::session::Session;
use crate::solver::expr::{ExprId, SsaName};
use crate::solver::{SolveResult, Solver, SolverError};
use crate::ssa::SsaSystem;
use crate::types::BvType;

const DELTA: &str = "$delta";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InferMethod {
    #[default]
    BinarySearch,
    Enumeration,
}

impl FromStr for InferMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "binsearch" => Ok(InferMethod::BinarySearch),
            "enum" => Ok(InferMethod::Enumeration),
            _ => Err(format!("unknown inference method `{s}` (expected binsearch or enum)")),
        }
    }
}

impl fmt::Display for InferMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InferMethod::BinarySearch => "binsearch",
            InferMethod::Enumeration => "enum",
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct InferConfig {
    pub method: InferMethod,
    /// Inductivity rounds before giving up with top. Defaults to 64 per row
    /// for binary search and 2^16 for enumeration.
    pub max_rounds: Option<u64>,
    /// Keep each strengthened row at or above its witness inside the search
    /// rather than only in aggregate.
    pub per_row_floor: bool,
}

#[derive(Clone, Debug, Default)]
pub struct InferStats {
    pub runs: u64,
    pub rounds: u64,
    pub solver_calls: u64,
    /// One record per strengthening.
    pub searches: Vec<Search>,
    /// Runs that hit the round cap and returned top.
    pub capped: u64,
    pub time: Duration,
}

/// Queries issued by one binary search over the sum of the violated rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Search {
    pub queries: u64,
    /// `u - l` when the search started.
    pub range: i128,
}

impl Search {
    /// `ceil(log2(range)) + 1`, and 0 for an empty range.
    pub fn query_bound(&self) -> u64 {
        if self.range <= 0 {
            0
        } else {
            (128 - (self.range - 1).leading_zeros()) as u64 + 1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inductivity {
    Inductive,
    /// Rows exceeded at some check point, each with the largest value seen.
    Violation { rows: Vec<(usize, i128)> },
}

/// Check whether `v` is preserved by the loops at the current unwinding.
pub fn is_inductive(s: &mut Session, tpl: &Template, v: &AbstractValue, stats: &mut InferStats) -> Result<Inductivity, SolverError> {
    if tpl.is_empty() {
        return Ok(Inductivity::Inductive);
    }
    let premise = tpl.concretize_head(&mut s.sys, v);
    let mut checks = Vec::new();
    let mut viol = Vec::new();
    for r in 0..tpl.len() {
        if v[r] == Bound::Top {
            continue;
        }
        for p in check_points(&mut s.sys, tpl.rows[r].loop_idx) {
            let pool = &mut s.sys.pool;
            let e = tpl.row_expr(pool, r, &p.vals);
            let b = tpl.bound_expr(pool, r, e, v[r]);
            let nb = pool.not(b);
            viol.push(pool.and(p.guard, nb));
            checks.push((r, p.guard, e, b));
        }
    }
    let any = s.sys.pool.or_all(viol);
    let mut assumptions = s.standing_assumptions();
    assumptions.push(premise);
    assumptions.push(any);
    stats.solver_calls += 1;
    if s.check(&assumptions)? == SolveResult::Unsat {
        return Ok(Inductivity::Inductive);
    }
    let mut worst: HashMap<usize, i128> = HashMap::new();
    for (r, g, e, b) in checks {
        let vals = s.values(&[g, b, e]);
        if vals[0] == 1 && vals[1] == 0 {
            let x = tpl.rows[r].ty.to_int(vals[2]);
            worst.entry(r).and_modify(|w| *w = (*w).max(x)).or_insert(x);
        }
    }
    let mut rows: Vec<(usize, i128)> = worst.into_iter().collect();
    rows.sort();
    debug_assert!(!rows.is_empty(), "violation model violates no row");
    Ok(Inductivity::Violation { rows })
}

/// Raise the violated rows to the largest bounds (by sum) that some state
/// satisfying the raised invariant can reach.
pub fn strengthen(
    s: &mut Session,
    tpl: &Template,
    v: &AbstractValue,
    violated: &[(usize, i128)],
    cfg: &InferConfig,
    stats: &mut InferStats,
) -> Result<AbstractValue, SolverError> {
    let call = stats.searches.len() as u32;
    let mut delta: HashMap<usize, ExprId> = HashMap::new();
    for &(r, _) in violated {
        let d = s.sys.pool.var(SsaName::def(DELTA, r as u32, &[call]), tpl.rows[r].ty);
        delta.insert(r, d);
    }
    let mut parts = Vec::new();
    for r in 0..tpl.len() {
        if v[r] == Bound::Top && !delta.contains_key(&r) {
            continue;
        }
        for p in head_points(&mut s.sys, tpl.rows[r].loop_idx) {
            let pool = &mut s.sys.pool;
            let e = tpl.row_expr(pool, r, &p.vals);
            let b = match delta.get(&r) {
                Some(&d) => pool.sle(e, d),
                None => tpl.bound_expr(pool, r, e, v[r]),
            };
            parts.push(pool.implies(p.guard, b));
        }
    }
    for &(r, w) in violated {
        let d = delta[&r];
        let mut reach = Vec::new();
        for p in check_points(&mut s.sys, tpl.rows[r].loop_idx) {
            let pool = &mut s.sys.pool;
            let e = tpl.row_expr(pool, r, &p.vals);
            let above = pool.sle(d, e);
            reach.push(pool.and(p.guard, above));
        }
        let pool = &mut s.sys.pool;
        parts.push(pool.or_all(reach));
        if cfg.per_row_floor {
            let floor = pool.int(w, tpl.rows[r].ty);
            parts.push(pool.sle(floor, d));
        }
    }
    let width = violated.iter().map(|&(r, _)| tpl.rows[r].ty.width).max().unwrap_or(1)
        + (usize::BITS - violated.len().leading_zeros());
    let sum_ty = BvType::signed(width);
    let pool = &mut s.sys.pool;
    let mut sum = pool.int(0, sum_ty);
    for &(r, _) in violated {
        let d = pool.sign_ext(delta[&r], sum_ty);
        sum = pool.add(sum, d);
    }
    let system = pool.and_all(parts);

    let mut best: Vec<i128> = violated.iter().map(|&(_, w)| w).collect();
    let mut lo: i128 = best.iter().sum();
    let mut hi: i128 = violated.iter().map(|&(r, _)| tpl.row_max(r)).sum();
    let range = hi - lo;
    let deltas: Vec<ExprId> = violated.iter().map(|&(r, _)| delta[&r]).collect();
    let standing = s.standing_assumptions();
    let mut calls = 0;
    while lo < hi {
        let m = lo + (hi - lo + 1) / 2;
        let mc = s.sys.pool.int(m, sum_ty);
        let at_least = s.sys.pool.sle(mc, sum);
        let mut assumptions = standing.clone();
        assumptions.push(system);
        assumptions.push(at_least);
        calls += 1;
        stats.solver_calls += 1;
        match s.check(&assumptions)? {
            SolveResult::Sat => {
                best = s.values(&deltas).iter().zip(violated).map(|(&x, &(r, _))| tpl.rows[r].ty.to_int(x)).collect();
                lo = best.iter().sum::<i128>().max(m);
            }
            SolveResult::Unsat => hi = m - 1,
        }
    }
    stats.searches.push(Search { queries: calls, range });
    let mut out = v.clone();
    for (&(r, w), &b) in violated.iter().zip(&best) {
        out[r] = Bound::Le(b.max(w));
    }
    Ok(out)
}

/// Least inductive value of the template at the current unwinding, or top
/// when the round cap is hit.
pub fn infer(s: &mut Session, tpl: &Template, cfg: &InferConfig, stats: &mut InferStats) -> Result<AbstractValue, SolverError> {
    let start = Instant::now();
    stats.runs += 1;
    let cap = cfg.max_rounds.unwrap_or(match cfg.method {
        InferMethod::BinarySearch => 64 * tpl.len().max(1) as u64,
        InferMethod::Enumeration => 1 << 16,
    });
    let mut v = tpl.bottom();
    let mut rounds = 0u64;
    let result = loop {
        rounds += 1;
        stats.rounds += 1;
        match is_inductive(s, tpl, &v, stats)? {
            Inductivity::Inductive => break v,
            Inductivity::Violation { rows } => {
                if rounds > cap {
                    stats.capped += 1;
                    break tpl.top();
                }
                v = match cfg.method {
                    InferMethod::BinarySearch => strengthen(s, tpl, &v, &rows, cfg, stats)?,
                    InferMethod::Enumeration => {
                        let mut next = v.clone();
                        for (r, w) in rows {
                            next[r] = next[r].join(w);
                        }
                        next
                    }
                };
            }
        }
    };
    stats.time += start.elapsed();
    Ok(result)
}

/// The model-enumeration baseline: join one violating model per round.
pub fn infer_enumeration(s: &mut Session, tpl: &Template, max_rounds: Option<u64>, stats: &mut InferStats) -> Result<AbstractValue, SolverError> {
    let cfg = InferConfig { method: InferMethod::Enumeration, max_rounds, per_row_floor: false };
    infer(s, tpl, &cfg, stats)
}

/// Re-check inductivity of `v` on a solver that has seen nothing but the
/// system's constraints.
pub fn certify_inductive(sys: &mut SsaSystem, tpl: &Template, v: &AbstractValue, mut solver: Solver) -> Result<bool, SolverError> {
    for c in &sys.constraints {
        if c.enforced() {
            solver.assert(&sys.pool, c.expr);
        }
    }
    if tpl.is_empty() {
        return Ok(true);
    }
    let premise = tpl.concretize_head(sys, v);
    let body = tpl.concretize_body(sys, v);
    let broken = sys.pool.not(body);
    let mut assumptions = sys.enable_assumptions();
    assumptions.extend(sys.property_assumptions());
    assumptions.push(premise);
    assumptions.push(broken);
    Ok(solver.solve(&sys.pool, &assumptions)? == SolveResult::Unsat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::DomainKind;
    use crate::frontend::load;

    fn session(src: &str) -> Session {
        Session::new(SsaSystem::new(load(src).unwrap()), Solver::builtin())
    }

    const COUNT_TO_TEN: &str = "void main() { unsigned x = 0; while (x < 10) { ++x; } assert(x == 10); }";

    #[test]
    fn counting_loop_bounds() {
        let mut s = session(COUNT_TO_TEN);
        let tpl = Template::new(&s.sys, DomainKind::Intervals);
        assert_eq!(tpl.len(), 2);
        assert_eq!(tpl.rows[0].ty, BvType::signed(33));
        let mut stats = InferStats::default();
        let v = infer(&mut s, &tpl, &InferConfig::default(), &mut stats).unwrap();
        assert_eq!(v, vec![Bound::Le(10), Bound::Le(0)]);
        assert!(stats.searches.iter().all(|c| c.queries <= c.query_bound()), "{stats:?}");
        assert!(certify_inductive(&mut s.sys, &tpl, &v, Solver::builtin()).unwrap());
    }

    #[test]
    fn bottom_is_violated_by_the_entry_state() {
        let mut s = session(COUNT_TO_TEN);
        let tpl = Template::new(&s.sys, DomainKind::Intervals);
        let mut stats = InferStats::default();
        match is_inductive(&mut s, &tpl, &tpl.bottom(), &mut stats).unwrap() {
            Inductivity::Violation { rows } => assert_eq!(rows.len(), 2),
            other => panic!("{other:?}"),
        }
        let v = vec![Bound::Le(10), Bound::Le(0)];
        assert_eq!(is_inductive(&mut s, &tpl, &v, &mut stats).unwrap(), Inductivity::Inductive);
    }

    #[test]
    fn enumeration_agrees_on_bytes() {
        let src = "void main() { u8 x = 3; while (x < 200) { x = x + 1; } }";
        let mut a = session(src);
        let tpl = Template::new(&a.sys, DomainKind::Intervals);
        let mut stats = InferStats::default();
        let fast = infer(&mut a, &tpl, &InferConfig::default(), &mut stats).unwrap();
        let mut b = session(src);
        let slow = infer_enumeration(&mut b, &tpl, None, &mut InferStats::default()).unwrap();
        assert_eq!(fast, slow);
        assert_eq!(fast, vec![Bound::Le(200), Bound::Le(-3)]);
    }

    #[test]
    fn loop_free_is_trivially_inductive() {
        let mut s = session("void main() { int x = 1; assert(x == 1); }");
        let tpl = Template::new(&s.sys, DomainKind::Intervals);
        let mut stats = InferStats::default();
        assert!(infer(&mut s, &tpl, &InferConfig::default(), &mut stats).unwrap().is_empty());
        assert_eq!(stats.solver_calls, 0);
    }
}

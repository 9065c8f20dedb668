//! Independent re-check of safety certificates.

use crate::domains::{AbstractValue, Template};
use crate::inference::certify_inductive;
use crate::solver::sat::Limits;
use crate::solver::{SolveResult, Solver, SolverError};
use crate::ssa::SsaSystem;

/// On a solver that has seen only the system's constraints: `inv` is
/// inductive, and with `inv` at the loop heads no assertion can fail.
pub fn safe(sys: &mut SsaSystem, tpl: &Template, inv: &AbstractValue, limits: Limits) -> Result<bool, SolverError> {
    let mut fresh = Solver::builtin();
    fresh.set_limits(limits.clone());
    if !certify_inductive(sys, tpl, inv, fresh)? {
        return Ok(false);
    }
    // building these may emit constraints, so do it before asserting them
    let premise = tpl.concretize_head(sys, inv);
    let err = sys.error_literal();
    let mut fresh = Solver::builtin();
    fresh.set_limits(limits);
    for c in &sys.constraints {
        if c.enforced() {
            fresh.assert(&sys.pool, c.expr);
        }
    }
    let mut a = sys.enable_assumptions();
    a.extend(sys.property_assumptions());
    a.push(premise);
    a.push(err);
    Ok(fresh.solve(&sys.pool, &a)? == SolveResult::Unsat)
}

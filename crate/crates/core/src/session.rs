//! An SSA system paired with the solver that has its constraints.

use crate::solver::expr::ExprId;
use crate::solver::{SolveResult, Solver, SolverError};
use crate::ssa::SsaSystem;

pub struct Session {
    pub sys: SsaSystem,
    pub solver: Solver,
    asserted: usize,
}

impl Session {
    pub fn new(sys: SsaSystem, solver: Solver) -> Self {
        Session { sys, solver, asserted: 0 }
    }

    /// Assert constraints added to the system since the last call.
    pub fn sync(&mut self) {
        for c in &self.sys.constraints[self.asserted..] {
            if c.enforced() {
                self.solver.assert(&self.sys.pool, c.expr);
            }
        }
        self.asserted = self.sys.constraints.len();
    }

    pub fn check(&mut self, assumptions: &[ExprId]) -> Result<SolveResult, SolverError> {
        self.sync();
        self.solver.solve(&self.sys.pool, assumptions)
    }

    /// Value of `e` in the last model.
    pub fn value(&self, e: ExprId) -> u128 {
        self.solver.value(&self.sys.pool, e)
    }

    pub fn values(&self, es: &[ExprId]) -> Vec<u128> {
        self.solver.values(&self.sys.pool, es)
    }

    /// Standing assumptions of the current unwinding: the newest exit merges
    /// and the installed property assumptions.
    pub fn standing_assumptions(&mut self) -> Vec<ExprId> {
        let mut a = self.sys.enable_assumptions();
        a.extend(self.sys.property_assumptions());
        a
    }
}

//! Bit-vector decision procedure: expressions, bit-blasting and SAT.

pub mod blast;
pub mod dimacs;
pub mod eval;
pub mod expr;
pub mod external;
pub mod sat;

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::types::BvType;
use blast::Blaster;
use expr::{ExprId, ExprPool, SsaName, VarId};
use sat::{Cdcl, Interrupt, Limits, Lit, SatResult, SatStats, Var};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("time limit reached")]
    Timeout,
    #[error("cancelled")]
    Cancelled,
    #[error("solver resource limit reached")]
    ResourceOut,
    #[error("external solver: {0}")]
    External(String),
}

impl From<Interrupt> for SolverError {
    fn from(i: Interrupt) -> Self {
        match i {
            Interrupt::Timeout => SolverError::Timeout,
            Interrupt::Cancelled => SolverError::Cancelled,
            Interrupt::ConflictBudget => SolverError::ResourceOut,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveResult {
    Sat,
    Unsat,
}

/// Propositional engine behind a [`Solver`].
pub trait SatBackend: Send {
    fn new_var(&mut self) -> Lit;
    fn add_clause(&mut self, lits: &[Lit]);
    fn solve(&mut self, assumptions: &[Lit], limits: &Limits) -> Result<SolveResult, SolverError>;
    fn model_value(&self, l: Lit) -> Option<bool>;
    fn stats(&self) -> SatStats;
}

impl SatBackend for Cdcl {
    fn new_var(&mut self) -> Lit {
        Lit::pos(Cdcl::new_var(self))
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        Cdcl::add_clause(self, lits);
    }

    fn solve(&mut self, assumptions: &[Lit], limits: &Limits) -> Result<SolveResult, SolverError> {
        match Cdcl::solve(self, assumptions, limits) {
            SatResult::Sat => Ok(SolveResult::Sat),
            SatResult::Unsat => Ok(SolveResult::Unsat),
            SatResult::Interrupted(i) => Err(i.into()),
        }
    }

    fn model_value(&self, l: Lit) -> Option<bool> {
        Cdcl::model_value(self, l)
    }

    fn stats(&self) -> SatStats {
        self.stats.clone()
    }
}

/// Which SAT engine to use.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum SolverKind {
    #[default]
    Builtin,
    /// Shell command speaking the line protocol in [`external`].
    External(String),
}

impl std::str::FromStr for SolverKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "builtin" {
            Ok(SolverKind::Builtin)
        } else if let Some(cmd) = s.strip_prefix("external:") {
            if cmd.trim().is_empty() {
                Err("external solver command is empty".into())
            } else {
                Ok(SolverKind::External(cmd.to_string()))
            }
        } else {
            Err(format!("unknown solver `{s}` (expected builtin or external:<cmd>)"))
        }
    }
}

/// Per-solver counters.
#[derive(Debug, Clone, Default)]
pub struct SolverStats {
    pub calls: u64,
    pub time: Duration,
}

/// Satisfying assignment of the encoded variables, by SSA name.
#[derive(Debug, Clone, Default)]
pub struct Model {
    pub values: BTreeMap<SsaName, (BvType, u128)>,
}

impl Model {
    pub fn get(&self, name: &SsaName) -> Option<u128> {
        self.values.get(name).map(|&(_, v)| v)
    }

    pub fn get_int(&self, name: &SsaName) -> Option<i128> {
        self.values.get(name).map(|&(t, v)| t.to_int(v))
    }
}

/// Incremental bit-vector solver over one [`ExprPool`].
pub struct Solver {
    blaster: Blaster,
    limits: Limits,
    pub stats: SolverStats,
}

impl Solver {
    pub fn new(kind: &SolverKind, keep_cnf: bool) -> Result<Self, SolverError> {
        let backend: Box<dyn SatBackend> = match kind {
            SolverKind::Builtin => Box::new(Cdcl::new()),
            SolverKind::External(cmd) => Box::new(external::ExternalSat::spawn(cmd)?),
        };
        Ok(Solver { blaster: Blaster::new(backend, keep_cnf), limits: Limits::default(), stats: SolverStats::default() })
    }

    pub fn builtin() -> Self {
        Solver::new(&SolverKind::Builtin, false).expect("builtin solver")
    }

    pub fn set_limits(&mut self, limits: Limits) {
        self.limits = limits;
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn assert(&mut self, pool: &ExprPool, e: ExprId) {
        self.blaster.assert(pool, e);
    }

    pub fn literal(&mut self, pool: &ExprPool, e: ExprId) -> Lit {
        self.blaster.literal(pool, e)
    }

    /// Fresh free literal, e.g. an activation switch.
    pub fn fresh_literal(&mut self) -> Lit {
        self.blaster.sat.new_var()
    }

    pub fn add_clause(&mut self, lits: &[Lit]) {
        self.blaster.clause(lits);
    }

    /// Check satisfiability of everything asserted so far together with the
    /// boolean `assumptions` (which do not persist).
    pub fn solve(&mut self, pool: &ExprPool, assumptions: &[ExprId]) -> Result<SolveResult, SolverError> {
        let lits: Vec<Lit> = assumptions.iter().map(|&a| self.literal(pool, a)).collect();
        self.solve_lits(&lits)
    }

    pub fn solve_lits(&mut self, assumptions: &[Lit]) -> Result<SolveResult, SolverError> {
        let start = Instant::now();
        self.stats.calls += 1;
        let r = self.blaster.sat.solve(assumptions, &self.limits);
        self.stats.time += start.elapsed();
        r
    }

    fn var_value(&self, pool: &ExprPool, v: VarId) -> u128 {
        let _ = pool;
        match self.blaster.var_bits(v) {
            None => 0,
            Some(bits) => bits.iter().enumerate().fold(0u128, |acc, (i, &l)| {
                if self.blaster.sat.model_value(l).unwrap_or(false) {
                    acc | 1u128 << i
                } else {
                    acc
                }
            }),
        }
    }

    /// Value of `e` in the last model. Variables never encoded read as 0.
    pub fn value(&self, pool: &ExprPool, e: ExprId) -> u128 {
        let lookup = |v: VarId| Some(self.var_value(pool, v));
        eval::eval(pool, e, &lookup).expect("all variables have values")
    }

    /// Evaluate many expressions against the last model, sharing work.
    pub fn values(&self, pool: &ExprPool, es: &[ExprId]) -> Vec<u128> {
        let lookup = |v: VarId| Some(self.var_value(pool, v));
        let mut memo = HashMap::new();
        es.iter().map(|&e| eval::eval_memo(pool, e, &lookup, &mut memo).unwrap()).collect()
    }

    pub fn bool_value(&self, pool: &ExprPool, e: ExprId) -> bool {
        self.value(pool, e) == 1
    }

    pub fn lit_value(&self, l: Lit) -> bool {
        self.blaster.sat.model_value(l).unwrap_or(false)
    }

    /// Model restricted to variables that have been encoded.
    pub fn model(&self, pool: &ExprPool) -> Model {
        let mut m = Model::default();
        for i in 0..pool.num_vars() {
            let v = VarId(i as u32);
            if self.blaster.var_bits(v).is_some() {
                m.values.insert(pool.var_name(v).clone(), (pool.var_type(v), self.var_value(pool, v)));
            }
        }
        m
    }

    pub fn num_clauses(&self) -> u64 {
        self.blaster.num_clauses()
    }

    pub fn sat_stats(&self) -> SatStats {
        self.blaster.sat.stats()
    }

    /// DIMACS rendering of every clause added so far, if the solver was
    /// created with `keep_cnf`.
    pub fn dimacs(&self) -> Option<String> {
        let log = self.blaster.clause_log()?;
        let nvars = log.iter().flatten().map(|l| l.var().0 + 1).max().unwrap_or(1);
        Some(dimacs::render(nvars, log))
    }

    pub fn true_literal(&self) -> Lit {
        self.blaster.tru()
    }
}

/// Variable index helper for tests and tools.
pub fn lit_of(var: u32, negated: bool) -> Lit {
    Lit::new(Var(var), negated)
}

//! Verification driver.
//!
//! All modes share one loop over the number of copies `K` per loop:
//!
//! 1. the concrete check (select guards false, so copies run from the entry
//!    state) looks for an assertion failure within `K-1` iterations;
//! 2. an invariant is inferred at `K`;
//! 3. the step check (select guards free, invariant assumed at the heads)
//!    looks for a failure anywhere; if there is none the program is safe;
//! 4. otherwise every loop is unwound once more.
//!
//! `ibmc` skips steps 2 and 3, `kind` skips step 2, and `ai` stops after the
//! first step check. Every verdict is certified before it is returned: safe
//! verdicts on a fresh solver, unsafe ones by concrete replay.

mod certify;
mod portfolio;
pub mod trace;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::domains::{AbstractValue, DomainKind, Template};
use crate::frontend::ast::Program;
use crate::inference::{infer, InferConfig, InferStats};
use crate::session::Session;
use crate::solver::sat::Limits;
use crate::solver::{SolveResult, Solver, SolverError, SolverKind};
use crate::ssa::SsaSystem;
pub use trace::{replay, Trace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    #[default]
    Kiki,
    Ibmc,
    Kind,
    Ai,
    Portfolio,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::Kiki, Mode::Ibmc, Mode::Kind, Mode::Ai, Mode::Portfolio];
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "kiki" => Ok(Mode::Kiki),
            "ibmc" => Ok(Mode::Ibmc),
            "kind" => Ok(Mode::Kind),
            "ai" => Ok(Mode::Ai),
            "portfolio" => Ok(Mode::Portfolio),
            _ => Err(format!("unknown mode `{s}` (expected kiki, ibmc, kind, ai or portfolio)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Kiki => "kiki",
            Mode::Ibmc => "ibmc",
            Mode::Kind => "kind",
            Mode::Ai => "ai",
            Mode::Portfolio => "portfolio",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Config {
    pub mode: Mode,
    /// Largest number of loop copies tried.
    pub max_k: u32,
    pub domain: DomainKind,
    pub infer: InferConfig,
    pub timeout: Option<Duration>,
    /// Conflict budget of each solver call; exhausting it ends the run
    /// with a resource-out verdict.
    pub max_conflicts: Option<u64>,
    pub solver: SolverKind,
    /// Keep the clause log for `--dump-cnf`.
    pub keep_cnf: bool,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            mode: Mode::Kiki,
            max_k: 50,
            domain: DomainKind::Intervals,
            infer: InferConfig::default(),
            timeout: None,
            max_conflicts: None,
            solver: SolverKind::Builtin,
            keep_cnf: false,
            cancel: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Concrete,
    Inference,
    Step,
    Certification,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Concrete => "concrete check",
            Phase::Inference => "invariant inference",
            Phase::Step => "step check",
            Phase::Certification => "certification",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnknownReason {
    /// No decision up to the unwinding limit.
    BoundExhausted(u32),
    /// Abstract interpretation could not prove the property.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Safe { k: u32, invariant: AbstractValue, text: String },
    Unsafe { k: u32, trace: Trace },
    Unknown { reason: UnknownReason },
    ResourceOut { phase: Phase },
}

impl Verdict {
    pub fn is_conclusive(&self) -> bool {
        matches!(self, Verdict::Safe { .. } | Verdict::Unsafe { .. })
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Safe { .. } => 0,
            Verdict::Unsafe { .. } => 10,
            Verdict::Unknown { .. } => 2,
            Verdict::ResourceOut { .. } => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Safe { .. } => "safe",
            Verdict::Unsafe { .. } => "unsafe",
            Verdict::Unknown { .. } => "unknown",
            Verdict::ResourceOut { .. } => "resource-out",
        }
    }

    pub fn k(&self) -> Option<u32> {
        match self {
            Verdict::Safe { k, .. } | Verdict::Unsafe { k, .. } => Some(*k),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Safe { k, .. } => write!(f, "SAFE k={k}"),
            Verdict::Unsafe { k, .. } => write!(f, "UNSAFE k={k}"),
            Verdict::Unknown { reason: UnknownReason::BoundExhausted(n) } => write!(f, "UNKNOWN (no decision up to k={n})"),
            Verdict::Unknown { reason: UnknownReason::Inconclusive } => write!(f, "UNKNOWN (invariant too weak)"),
            Verdict::ResourceOut { phase } => write!(f, "RESOURCE-OUT ({phase})"),
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("safe verdict at k={k} failed recertification")]
    Certification { k: u32 },
    #[error("counterexample at k={k} does not replay")]
    Replay { k: u32 },
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Time spent by one portfolio lane.
#[derive(Clone, Debug)]
pub struct Lane {
    pub mode: Mode,
    pub verdict: String,
    pub time: Duration,
}

#[derive(Clone, Debug, Default)]
pub struct RunStats {
    /// Copies per loop when the run ended.
    pub unwindings: u32,
    pub solver_calls: u64,
    pub conflicts: u64,
    pub decisions: u64,
    pub clauses: u64,
    pub concrete_time: Duration,
    pub step_time: Duration,
    pub certify_time: Duration,
    pub infer: InferStats,
    pub time: Duration,
    pub lanes: Vec<Lane>,
}

pub struct Outcome {
    pub verdict: Verdict,
    pub stats: RunStats,
    /// Listing of the final SSA system.
    pub ssa: String,
    /// Clauses of the main solver, when requested.
    pub cnf: Option<String>,
}

/// Verify `program` in the configured mode.
pub fn run(program: &Program, cfg: &Config) -> Result<Outcome, EngineError> {
    match cfg.mode {
        Mode::Portfolio => portfolio::run(program, cfg),
        _ => Driver::new(program, cfg)?.run(),
    }
}

/// Re-check a conclusive verdict from scratch: a safe verdict on a freshly
/// built system unwound to its `k`, an unsafe one by concrete replay.
/// Inconclusive verdicts have nothing to check and give `true`.
pub fn recertify(program: &Program, verdict: &Verdict, domain: DomainKind) -> Result<bool, SolverError> {
    match verdict {
        Verdict::Safe { k, invariant, .. } => {
            let mut sys = SsaSystem::new(program.clone());
            while sys.k() < *k {
                sys.unwind();
            }
            let tpl = Template::new(&sys, domain);
            if tpl.len() != invariant.len() {
                return Ok(false);
            }
            certify::safe(&mut sys, &tpl, invariant, Limits::default())
        }
        Verdict::Unsafe { trace, .. } => Ok(replay(program, trace)),
        _ => Ok(true),
    }
}

struct Driver<'a> {
    cfg: &'a Config,
    s: Session,
    tpl: Template,
    stats: RunStats,
    start: Instant,
}

fn resource_out(e: SolverError, phase: Phase) -> Result<Verdict, EngineError> {
    match e {
        SolverError::Timeout | SolverError::Cancelled | SolverError::ResourceOut => Ok(Verdict::ResourceOut { phase }),
        e => Err(e.into()),
    }
}

impl<'a> Driver<'a> {
    fn new(program: &Program, cfg: &'a Config) -> Result<Self, EngineError> {
        let start = Instant::now();
        let mut solver = Solver::new(&cfg.solver, cfg.keep_cnf)?;
        solver.set_limits(Limits {
            deadline: cfg.timeout.map(|t| start + t),
            cancel: cfg.cancel.clone(),
            max_conflicts: cfg.max_conflicts,
        });
        let sys = SsaSystem::new(program.clone());
        let tpl = Template::new(&sys, cfg.domain);
        Ok(Driver { cfg, s: Session::new(sys, solver), tpl, stats: RunStats::default(), start })
    }

    fn run(mut self) -> Result<Outcome, EngineError> {
        let verdict = self.decide()?;
        let st = self.s.solver.sat_stats();
        self.stats.unwindings = self.s.sys.k();
        self.stats.solver_calls = self.s.solver.stats.calls;
        self.stats.conflicts = st.conflicts;
        self.stats.decisions = st.decisions;
        self.stats.clauses = self.s.solver.num_clauses();
        self.stats.time = self.start.elapsed();
        Ok(Outcome { verdict, stats: self.stats, ssa: self.s.sys.dump(), cnf: self.s.solver.dimacs() })
    }

    fn decide(&mut self) -> Result<Verdict, EngineError> {
        let mode = self.cfg.mode;
        loop {
            let k = self.s.sys.k();
            match self.concrete_check() {
                Ok(true) => return self.certify_unsafe(),
                Ok(false) => {}
                Err(e) => return resource_out(e, Phase::Concrete),
            }
            if mode != Mode::Ibmc {
                let inv = if mode == Mode::Kind {
                    self.tpl.top()
                } else {
                    let t = Instant::now();
                    let r = infer(&mut self.s, &self.tpl, &self.cfg.infer, &mut self.stats.infer);
                    self.stats.infer.time = self.stats.infer.time.max(t.elapsed());
                    match r {
                        Ok(v) => v,
                        Err(e) => return resource_out(e, Phase::Inference),
                    }
                };
                match self.step_check(&inv) {
                    Ok(true) => return self.certify_safe(inv),
                    Ok(false) => {}
                    Err(e) => return resource_out(e, Phase::Step),
                }
            }
            if mode == Mode::Ai {
                return Ok(Verdict::Unknown { reason: UnknownReason::Inconclusive });
            }
            if k >= self.cfg.max_k {
                return Ok(Verdict::Unknown { reason: UnknownReason::BoundExhausted(self.cfg.max_k) });
            }
            self.s.sys.unwind();
        }
    }

    /// Look for a failure reachable from the entry state within the current
    /// copies.
    fn concrete_check(&mut self) -> Result<bool, SolverError> {
        let t = Instant::now();
        let mut a = self.s.sys.start_assumptions();
        a.extend(self.s.standing_assumptions());
        a.push(self.s.sys.error_literal());
        let r = self.s.check(&a);
        self.stats.concrete_time += t.elapsed();
        Ok(r? == SolveResult::Sat)
    }

    /// Turn the last model into a replayed counterexample.
    fn certify_unsafe(&mut self) -> Result<Verdict, EngineError> {
        let k = self.s.sys.k() - 1;
        match trace::extract(&self.s) {
            Some(trace) if replay(&self.s.sys.program, &trace) => Ok(Verdict::Unsafe { k, trace }),
            _ => Err(EngineError::Replay { k }),
        }
    }

    /// True if no failure is possible under the invariant.
    fn step_check(&mut self, inv: &AbstractValue) -> Result<bool, SolverError> {
        let t = Instant::now();
        let premise = self.tpl.concretize_head(&mut self.s.sys, inv);
        let mut a = self.s.standing_assumptions();
        a.push(premise);
        a.push(self.s.sys.error_literal());
        let r = self.s.check(&a);
        self.stats.step_time += t.elapsed();
        Ok(r? == SolveResult::Unsat)
    }

    fn certify_safe(&mut self, inv: AbstractValue) -> Result<Verdict, EngineError> {
        let t = Instant::now();
        let k = self.s.sys.k();
        let ok = certify::safe(&mut self.s.sys, &self.tpl, &inv, self.s.solver.limits().clone());
        self.stats.certify_time += t.elapsed();
        match ok {
            Ok(true) => {
                let text = self.tpl.render(&self.s.sys, &inv);
                Ok(Verdict::Safe { k, invariant: inv, text })
            }
            Ok(false) => Err(EngineError::Certification { k }),
            Err(e) => resource_out(e, Phase::Certification),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load;

    const COUNTING: &str = "void main() {\n  unsigned x = 0;\n  while (x < 10) {\n    ++x;\n  }\n  assert(x == 10);\n}\n";

    fn verify(src: &str, mode: Mode) -> Outcome {
        let p = load(src).unwrap();
        run(&p, &Config { mode, max_k: 20, ..Config::default() }).unwrap()
    }

    #[test]
    fn counting_loop_is_safe_after_one_copy() {
        let o = verify(COUNTING, Mode::Kiki);
        assert_eq!(o.verdict.k(), Some(1), "{}", o.verdict);
        assert!(matches!(o.verdict, Verdict::Safe { .. }));
    }

    #[test]
    fn plain_k_induction_cannot_close_the_counting_loop() {
        let o = verify(COUNTING, Mode::Kind);
        assert!(matches!(o.verdict, Verdict::Unknown { .. }), "{}", o.verdict);
    }

    #[test]
    fn abstract_interpretation_proves_the_counting_loop() {
        let o = verify(COUNTING, Mode::Ai);
        assert!(matches!(o.verdict, Verdict::Safe { k: 1, .. }), "{}", o.verdict);
    }

    #[test]
    fn failing_assertion_without_loops() {
        let o = verify("void main() { assert(0); }", Mode::Kiki);
        assert!(matches!(o.verdict, Verdict::Unsafe { k: 0, .. }), "{}", o.verdict);
    }

    #[test]
    fn failure_after_three_iterations() {
        let src = "void main() {\n  unsigned x = 0;\n  while (x < 3) {\n    x = x + 1;\n  }\n  assert(x != 3);\n}\n";
        for mode in [Mode::Ibmc, Mode::Kiki, Mode::Portfolio] {
            let o = verify(src, mode);
            match &o.verdict {
                Verdict::Unsafe { k, trace } => {
                    assert_eq!(*k, 3, "{mode}");
                    assert!(replay(&load(src).unwrap(), trace));
                }
                v => panic!("{mode}: {v}"),
            }
        }
    }

    #[test]
    fn portfolio_reports_every_lane() {
        let o = verify(COUNTING, Mode::Portfolio);
        assert!(o.verdict.is_conclusive(), "{}", o.verdict);
        assert_eq!(o.stats.lanes.len(), 3);
    }
}

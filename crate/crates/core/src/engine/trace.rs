//! Counterexample traces: extracted from a solver model by re-executing the
//! program with the model's nondeterministic choices.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use serde::Serialize;

use crate::frontend::ast::{Program, Span};
use crate::frontend::interp::{execute, Execution, NondetKey, Outcome};
use crate::session::Session;
use crate::types::BvType;

/// Step budget for replays; a trace never runs longer than the unwinding
/// that produced it, so this only guards against runaway loops.
const MAX_STEPS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub stmt: u32,
    pub line: u32,
    pub text: String,
    /// Iteration index of each enclosing loop.
    pub iters: Vec<u32>,
    /// Values of all variables declared so far, after the step.
    pub env: BTreeMap<String, i128>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Choice {
    pub key: NondetKey,
    pub iters: Vec<u32>,
    pub ty: BvType,
    pub value: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    pub choices: Vec<Choice>,
    pub failed_stmt: u32,
    pub failed_span: Span,
}

impl Trace {
    fn from_execution(exec: &Execution) -> Option<Trace> {
        let Outcome::AssertionFailed { stmt, span } = exec.outcome else {
            return None;
        };
        let mut env: BTreeMap<String, (BvType, u128)> = BTreeMap::new();
        let mut steps = Vec::new();
        for s in &exec.steps {
            if let Some((n, t, v)) = &s.assigned {
                env.insert(n.clone(), (*t, *v));
            }
            steps.push(TraceStep {
                stmt: s.stmt,
                line: s.span.line,
                text: s.text.clone(),
                iters: s.iters.clone(),
                env: env.iter().map(|(n, &(t, v))| (n.clone(), t.to_int(v))).collect(),
            });
        }
        let choices = exec
            .choices
            .iter()
            .map(|(key, iters, ty, value)| Choice { key: key.clone(), iters: iters.clone(), ty: *ty, value: *value })
            .collect();
        Some(Trace { steps, choices, failed_stmt: stmt, failed_span: span })
    }

    /// Number of executed steps.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// One block per step: a header naming the statement, then `var=value`
    /// lines.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(out, "step {i}: line {}: {}", s.line, s.text).unwrap();
            for (n, v) in &s.env {
                writeln!(out, "  {n}={v}").unwrap();
            }
        }
        writeln!(out, "assertion violated at line {}", self.failed_span.line).unwrap();
        out
    }
}

/// Re-execute `p` with the nondeterministic choices of the session's last
/// model.
pub fn extract(s: &Session) -> Option<Trace> {
    let model = s.solver.model(&s.sys.pool);
    let sys = &s.sys;
    let mut oracle = |key: &NondetKey, iters: &[u32], _ty: BvType| -> u128 {
        sys.nondet_name(key, iters).and_then(|n| model.get(&n)).unwrap_or(0)
    };
    let exec = execute(&sys.program, &mut oracle, MAX_STEPS);
    Trace::from_execution(&exec)
}

/// True iff running `p` with the trace's choices reproduces the trace and
/// ends in the recorded assertion violation.
pub fn replay(p: &Program, t: &Trace) -> bool {
    let table: HashMap<(NondetKey, Vec<u32>), u128> =
        t.choices.iter().map(|c| ((c.key.clone(), c.iters.clone()), c.value)).collect();
    let mut oracle =
        |key: &NondetKey, iters: &[u32], _ty: BvType| -> u128 { table.get(&(key.clone(), iters.to_vec())).copied().unwrap_or(0) };
    let exec = execute(p, &mut oracle, MAX_STEPS);
    match Trace::from_execution(&exec) {
        Some(r) => r.failed_stmt == t.failed_stmt && r.steps == t.steps,
        None => false,
    }
}

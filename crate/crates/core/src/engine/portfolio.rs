//! Parallel lanes of `ibmc`, `kind` and `ai`; the first conclusive verdict
//! wins and cancels the others.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{mpsc, Arc};
use std::thread;
use std::time::{Duration, Instant};

use super::{Config, EngineError, Lane, Mode, Outcome, Verdict};
use crate::frontend::ast::Program;

const LANES: [Mode; 3] = [Mode::Ibmc, Mode::Kind, Mode::Ai];

pub fn run(program: &Program, cfg: &Config) -> Result<Outcome, EngineError> {
    let start = Instant::now();
    let cancel = Arc::new(AtomicBool::new(false));
    let (tx, rx) = mpsc::channel();
    let mut handles = Vec::new();
    for mode in LANES {
        let mut lane_cfg = cfg.clone();
        lane_cfg.mode = mode;
        lane_cfg.cancel = Some(cancel.clone());
        let p = program.clone();
        let tx = tx.clone();
        let cancel = cancel.clone();
        handles.push(thread::spawn(move || {
            let t = Instant::now();
            let r = super::run(&p, &lane_cfg);
            if let Ok(o) = &r {
                if o.verdict.is_conclusive() {
                    cancel.store(true, Ordering::SeqCst);
                }
            }
            let _ = tx.send((mode, r, t.elapsed()));
        }));
    }
    drop(tx);
    // Forward an outer cancellation to the lanes.
    if let Some(outer) = &cfg.cancel {
        let (outer, cancel) = (outer.clone(), cancel.clone());
        thread::spawn(move || {
            while !cancel.load(Ordering::SeqCst) {
                if outer.load(Ordering::SeqCst) {
                    cancel.store(true, Ordering::SeqCst);
                }
                thread::sleep(Duration::from_millis(10));
            }
        });
    }

    let mut lanes = Vec::new();
    let mut best: Option<Outcome> = None;
    let mut error = None;
    for (mode, r, time) in rx {
        match r {
            Ok(o) => {
                lanes.push(Lane { mode, verdict: o.verdict.to_string(), time });
                if rank(&o.verdict) > best.as_ref().map_or(-1, |b| rank(&b.verdict)) {
                    best = Some(o);
                }
            }
            Err(e) => {
                lanes.push(Lane { mode, verdict: format!("error: {e}"), time });
                error.get_or_insert(e);
            }
        }
    }
    for h in handles {
        let _ = h.join();
    }
    // Stop the forwarding thread.
    cancel.store(true, Ordering::SeqCst);
    lanes.sort_by_key(|l| LANES.iter().position(|&m| m == l.mode));

    let mut out = match (best, error) {
        (Some(o), _) if o.verdict.is_conclusive() => o,
        (_, Some(e)) => return Err(e),
        (Some(o), None) => o,
        (None, None) => unreachable!("portfolio without lanes"),
    };
    out.stats.lanes = lanes;
    out.stats.time = start.elapsed();
    Ok(out)
}

/// Preference among lane outcomes.
fn rank(v: &Verdict) -> i32 {
    match v {
        Verdict::Safe { .. } | Verdict::Unsafe { .. } => 3,
        Verdict::Unknown { .. } => 2,
        Verdict::ResourceOut { .. } => 1,
    }
}

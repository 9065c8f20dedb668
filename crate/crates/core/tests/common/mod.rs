//! Oracles shared by the integration tests. Nothing here calls into the
//! verifier's inference or decision code.

#![allow(dead_code)]

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kiwi::corpus::read_manifest;
use kiwi::frontend::ast::Program;
use kiwi::frontend::interp::{execute, NondetKey};
use kiwi::frontend::load;
use kiwi::solver::expr::SsaName;
use kiwi::solver::{SolveResult, Solver};
use kiwi::ssa::locs::{assign_locs, Loc};
use kiwi::ssa::{var_base, SsaSystem};
use kiwi::types::BvType;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus_program(name: &str) -> Program {
    let src = fs::read_to_string(corpus_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    load(&src).unwrap_or_else(|d| panic!("{name}: {d}"))
}

/// Programs listed in the corpus manifest, in manifest order.
pub fn corpus_names() -> Vec<String> {
    read_manifest(&corpus_dir()).expect("manifest").into_iter().map(|e| e.path.display().to_string()).collect()
}

/// Least interval of the counter at the head of
/// `x = 0; while (x < n) ++x;`, by Kleene iteration on intervals.
pub fn counting_loop_box(n: i128) -> (i128, i128) {
    let (mut lo, mut hi) = (0i128, 0i128);
    loop {
        // body is entered with x in [lo, min(hi, n-1)]
        let (blo, bhi) = (lo, hi.min(n - 1));
        let (nlo, nhi) = if blo <= bhi { (lo.min(blo + 1), hi.max(bhi + 1)) } else { (lo, hi) };
        if (nlo, nhi) == (lo, hi) {
            return (lo, hi);
        }
        (lo, hi) = (nlo, nhi);
    }
}

/// Tally of the over-approximation fuzz.
#[derive(Debug, Default)]
pub struct FuzzReport {
    pub runs: usize,
    /// Assigned values compared against a model.
    pub checked_values: usize,
    pub violations: Vec<String>,
}

/// Loop iterations kept from each random run; later steps are cut off so
/// the unwinding stays small.
const MAX_ITER: u32 = 5;
const MAX_STEPS: usize = 400;

/// Every concrete run is a model of the unwound encoding: run the
/// interpreter on random inputs, pin the encoding's free inputs to the same
/// choices, and check the solution is forced to agree on every assignment.
pub fn fuzz_overapproximation(programs: &[(String, Program)], runs: usize, seed: u64) -> FuzzReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cache: HashMap<(usize, u32), (SsaSystem, Solver)> = HashMap::new();
    let locs: Vec<_> = programs.iter().map(|(_, p)| assign_locs(&p.body)).collect();
    let mut report = FuzzReport::default();

    for run in 0..runs {
        let pi = rng.gen_range(0..programs.len());
        let (name, program) = &programs[pi];
        let budget = rng.gen_range(1..=MAX_STEPS);
        let run_seed: u64 = rng.gen();
        let mut input_rng = ChaCha8Rng::seed_from_u64(run_seed);
        let mut oracle = |_: &NondetKey, _: &[u32], ty: BvType| -> u128 {
            // favour small magnitudes so loops actually iterate
            let v: u128 = if input_rng.gen_bool(0.7) { input_rng.gen_range(0..16) } else { input_rng.gen() };
            let v = if ty.signed && input_rng.gen_bool(0.3) { v.wrapping_neg() } else { v };
            v & ty.mask()
        };
        let exec = execute(program, &mut oracle, budget);

        let in_range = |iters: &[u32]| iters.iter().all(|&i| i < MAX_ITER);
        let steps: Vec<_> = exec.steps.iter().take_while(|s| in_range(&s.iters)).collect();
        let deepest = steps.iter().flat_map(|s| s.iters.iter().copied()).max().unwrap_or(0);
        let k = deepest + 2;

        let (sys, solver) = cache.entry((pi, k)).or_insert_with(|| {
            let mut sys = SsaSystem::new(program.clone());
            while sys.k() < k {
                sys.unwind();
            }
            let mut solver = Solver::builtin();
            for c in &sys.constraints {
                if c.enforced() {
                    solver.assert(&sys.pool, c.expr);
                }
            }
            (sys, solver)
        });

        let mut a = sys.start_assumptions();
        a.extend(sys.enable_assumptions());
        for (key, iters, ty, value) in &exec.choices {
            if !in_range(iters) {
                continue;
            }
            let Some(n) = sys.nondet_name(key, iters) else { continue };
            let Some(v) = sys.pool.lookup_var(&n) else { continue };
            let e = sys.pool.var_expr(v);
            let c = sys.pool.constant(*value, *ty);
            a.push(sys.pool.eq(e, c));
        }
        report.runs += 1;
        match solver.solve(&sys.pool, &a) {
            Ok(SolveResult::Sat) => {}
            other => {
                report.violations.push(format!("run {run} ({name}, k={k}): encoding rejects a concrete run ({other:?})"));
                continue;
            }
        }
        let model = solver.model(&sys.pool);
        for s in &steps {
            let (Some((var, ty, value)), Some(Loc::Def(n))) = (&s.assigned, locs[pi].get(&s.stmt)) else { continue };
            let ssa = SsaName::def(var_base(var), *n, &s.iters);
            match model.get(&ssa) {
                Some(m) if m & ty.mask() == value & ty.mask() => report.checked_values += 1,
                Some(m) => report.violations.push(format!("run {run} ({ssa}): {} = {m}, interpreter has {value}", s.text)),
                // a definition the encoding folded away, e.g. a constant
                None => {}
            }
        }
    }
    report
}

//! End-to-end acceptance checks, run in order so the timed ones are not
//! measured next to the corpus run. Each prints a PASS/FAIL line and the
//! process fails if any of them does.

mod common;

use std::process::ExitCode;
use std::thread;
use std::time::{Duration, Instant};

use kiwi::corpus::{run_corpus, Report};
use kiwi::domains::{Bound, DomainKind, Template};
use kiwi::engine::{self, recertify, Config, Mode, UnknownReason, Verdict};
use kiwi::frontend::ast::Program;
use kiwi::inference::{infer, InferConfig, InferMethod, InferStats};
use kiwi::session::Session;
use kiwi::solver::Solver;
use kiwi::ssa::SsaSystem;

use common::{corpus_dir, corpus_program, counting_loop_box, fuzz_overapproximation};

const ROTATING_LIMIT: Duration = Duration::from_secs(10);
const COUNTING_LIMIT: Duration = Duration::from_secs(2);
const MONOTONE_LIMIT: Duration = Duration::from_secs(120);
const CORPUS_LIMIT: Duration = Duration::from_secs(300);
const MIN_MONOTONE: usize = 10;
const FUZZ_RUNS: usize = 1000;
const FUZZ_SEED: u64 = 0x6b69_7769;

const TABLE_ROWS: [&str; 6] = ["counterexamples", "proofs", "false proofs", "false alarms", "inconclusive", "timeout"];
const CORPUS_MODES: [Mode; 4] = [Mode::Kiki, Mode::Ibmc, Mode::Kind, Mode::Ai];

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn mode_config(mode: Mode) -> Config {
    Config { mode, ..Config::default() }
}

/// Invariant at the first unwinding, before any verdict.
fn first_invariant(p: &Program, method: InferMethod) -> (SsaSystem, Template, Vec<Bound>) {
    let sys = SsaSystem::new(p.clone());
    let tpl = Template::new(&sys, DomainKind::Intervals);
    let mut s = Session::new(sys, Solver::builtin());
    let cfg = InferConfig { method, ..InferConfig::default() };
    let v = infer(&mut s, &tpl, &cfg, &mut InferStats::default()).expect("inference runs");
    (s.sys, tpl, v)
}

fn bound_of(sys: &SsaSystem, tpl: &Template, v: &[Bound], row: &str) -> Option<Bound> {
    (0..tpl.len()).find(|&r| tpl.row_text(sys, r) == row).map(|r| v[r])
}

fn rotating_bounds() -> Check {
    let p = corpus_program("rotating_bounds.c");
    let t = Instant::now();
    let (sys, tpl, v) = first_invariant(&p, InferMethod::BinarySearch);
    let upper = bound_of(&sys, &tpl, &v, "x#lb2");
    let lower = bound_of(&sys, &tpl, &v, "-x#lb2");
    ensure(upper == Some(Bound::Le(9)), || format!("k=1 row x#lb2 is {upper:?}, want <= 9"))?;
    ensure(lower == Some(Bound::Le(2147483648)), || format!("k=1 row -x#lb2 is {lower:?}, want <= 2147483648"))?;

    let open = engine::run(&p, &Config { max_k: 1, ..mode_config(Mode::Kiki) }).map_err(|e| e.to_string())?;
    ensure(open.verdict == Verdict::Unknown { reason: UnknownReason::BoundExhausted(1) }, || {
        format!("k=1 verdict is {}, want open", open.verdict)
    })?;
    let o = engine::run(&p, &mode_config(Mode::Kiki)).map_err(|e| e.to_string())?;
    ensure(matches!(o.verdict, Verdict::Safe { k: 2, .. }), || format!("verdict {}, want SAFE k=2", o.verdict))?;
    let dt = t.elapsed();
    ensure(dt < ROTATING_LIMIT, || format!("took {dt:?}"))?;
    Ok(format!("k=1 open with x#lb2 <= 9 and -x#lb2 <= 2147483648, SAFE k=2, {dt:.2?}"))
}

fn counting_loop() -> Check {
    let p = corpus_program("counting_loop.c");
    let t = Instant::now();
    let dump = SsaSystem::new(p.clone()).dump();
    ensure(dump == include_str!("golden/counting_loop.ssa"), || format!("SSA listing differs from golden file:\n{dump}"))?;

    let o = engine::run(&p, &mode_config(Mode::Kiki)).map_err(|e| e.to_string())?;
    let Verdict::Safe { k: 1, invariant, .. } = &o.verdict else {
        return Err(format!("verdict {}, want SAFE k=1", o.verdict));
    };
    let dt = t.elapsed();

    let sys = SsaSystem::new(p.clone());
    let tpl = Template::new(&sys, DomainKind::Intervals);
    let (lo, hi) = counting_loop_box(10);
    let got = (bound_of(&sys, &tpl, invariant, "-x#lb1"), bound_of(&sys, &tpl, invariant, "x#lb1"));
    ensure(got == (Some(Bound::Le(-lo)), Some(Bound::Le(hi))), || format!("invariant rows {got:?}, oracle box [{lo},{hi}]"))?;
    // model enumeration at full width reaches the same fixpoint
    let (_, _, enumerated) = first_invariant(&p, InferMethod::Enumeration);
    ensure(&enumerated == invariant, || format!("enumeration gives {enumerated:?}"))?;
    ensure(dt < COUNTING_LIMIT, || format!("took {dt:?}"))?;
    Ok(format!("golden SSA matches, SAFE k=1 with x in [{lo},{hi}], {dt:.2?}"))
}

fn monotone_equivalence() -> Check {
    let t = Instant::now();
    let mut names: Vec<String> = std::fs::read_dir(corpus_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.starts_with("m_") && n.ends_with(".c"))
        .collect();
    names.sort();
    ensure(names.len() >= MIN_MONOTONE, || format!("only {} monotone programs", names.len()))?;
    for n in &names {
        let p = corpus_program(n);
        let (_, _, bin) = first_invariant(&p, InferMethod::BinarySearch);
        let (_, _, en) = first_invariant(&p, InferMethod::Enumeration);
        ensure(bin == en, || format!("{n}: binsearch {bin:?} vs enum {en:?}"))?;
    }
    let dt = t.elapsed();
    ensure(dt < MONOTONE_LIMIT, || format!("took {dt:?}"))?;
    Ok(format!("{} programs identical, {dt:.2?}", names.len()))
}

fn corpus_config() -> Config {
    Config { max_k: 25, max_conflicts: Some(30_000), timeout: Some(Duration::from_secs(20)), ..Config::default() }
}

fn corpus_report() -> Report {
    let jobs = thread::available_parallelism().map_or(1, |n| n.get());
    run_corpus(&corpus_dir(), &CORPUS_MODES, &corpus_config(), jobs).expect("corpus runs")
}

fn subsumption(r: &Report) -> Check {
    let kiki: Vec<_> = r.rows_of(Mode::Kiki).collect();
    let mut compared = 0;
    for m in [Mode::Ibmc, Mode::Kind, Mode::Ai] {
        for (row, k) in r.rows_of(m).zip(&kiki) {
            assert_eq!(row.file, k.file, "report rows out of order");
            let (Some(v), Some(kv)) = (&row.outcome, &k.outcome) else { continue };
            if !v.is_conclusive() {
                continue;
            }
            compared += 1;
            ensure(v.name() == kv.name(), || format!("{}: {m} says {v}, kiki says {kv}", row.file))?;
            if m == Mode::Ibmc && matches!(v, Verdict::Unsafe { .. }) {
                ensure(v.k() == kv.k(), || format!("{}: ibmc {v} vs kiki {kv}", row.file))?;
            }
            if m == Mode::Ai && matches!(v, Verdict::Safe { .. }) {
                ensure(kv.k() == Some(1), || format!("{}: ai proves it, kiki needs {kv}", row.file))?;
            }
        }
    }
    let ms: f64 = r.modes.iter().map(|s| s.time_ms).sum();
    let dt = Duration::from_secs_f64(ms / 1000.0);
    ensure(dt < CORPUS_LIMIT, || format!("serial time {dt:?}"))?;
    Ok(format!("{compared} conclusive verdicts agree with kiki, serial time {dt:.2?}"))
}

fn certification(r: &Report) -> Check {
    let (mut safe, mut unsafe_) = (0, 0);
    for row in &r.rows {
        let Some(v) = &row.outcome else {
            return Err(format!("{} ({}): {}", row.file, row.mode, row.error.as_deref().unwrap_or("no verdict")));
        };
        if !v.is_conclusive() {
            continue;
        }
        let p = corpus_program(&row.file);
        let ok = recertify(&p, v, DomainKind::Intervals).map_err(|e| format!("{}: {e}", row.file))?;
        ensure(ok, || format!("{} ({}): {v} does not recertify", row.file, row.mode))?;
        match v {
            Verdict::Safe { .. } => safe += 1,
            _ => unsafe_ += 1,
        }
    }
    ensure(safe > 0 && unsafe_ > 0, || format!("{safe} safe and {unsafe_} unsafe verdicts"))?;
    Ok(format!("{safe} safe verdicts recertified, {unsafe_} counterexamples replayed"))
}

/// ceil(log2(range)) + 1 for a positive range.
fn query_bound(range: i128) -> u64 {
    if range <= 0 {
        return 0;
    }
    let r = range as u128;
    let ceil_log = if r == 1 { 0 } else { 128 - (r - 1).leading_zeros() };
    ceil_log as u64 + 1
}

fn query_counts(r: &Report) -> Check {
    let mut n = 0;
    for row in &r.rows {
        for &(queries, range) in &row.searches {
            n += 1;
            ensure(queries <= query_bound(range), || {
                format!("{} ({}): {queries} queries over range {range}", row.file, row.mode)
            })?;
        }
    }
    ensure(n > 0, || "no searches recorded".into())?;
    Ok(format!("{n} searches within the bound"))
}

fn table_shape(r: &Report) -> Check {
    let text = r.render_text();
    for label in TABLE_ROWS {
        ensure(text.lines().any(|l| l.starts_with(label)), || format!("no `{label}` row in\n{text}"))?;
    }
    for s in &r.modes {
        let c = &s.counts;
        ensure(c.total() == r.benchmarks, || format!("{}: counts sum to {} of {}", s.mode, c.total(), r.benchmarks))?;
        ensure(c.false_proofs == 0 && c.false_alarms == 0 && c.errors == 0, || format!("{}: {c:?}", s.mode))?;
    }
    Ok(format!("{} benchmarks x {} modes, no false proofs or false alarms", r.benchmarks, r.modes.len()))
}

fn overapproximation() -> Check {
    let names = common::corpus_names();
    let programs: Vec<_> = names.iter().map(|n| (n.clone(), corpus_program(n))).collect();
    let rep = fuzz_overapproximation(&programs, FUZZ_RUNS, FUZZ_SEED);
    ensure(rep.runs == FUZZ_RUNS, || format!("{} runs", rep.runs))?;
    ensure(rep.violations.is_empty(), || format!("{} violations, first: {}", rep.violations.len(), rep.violations[0]))?;
    ensure(rep.checked_values > FUZZ_RUNS, || format!("only {} values compared", rep.checked_values))?;
    Ok(format!("{} runs, {} assigned values matched", rep.runs, rep.checked_values))
}

fn main() -> ExitCode {
    // timed checks first, before the corpus run loads the machine
    let rotating = rotating_bounds();
    let counting = counting_loop();
    let monotone = monotone_equivalence();
    let report = corpus_report();
    let results: [(&str, Check); 8] = [
        ("rotating bounds", rotating),
        ("counting loop", counting),
        ("subsumption", subsumption(&report)),
        ("monotone equivalence", monotone),
        ("certification", certification(&report)),
        ("query bound", query_counts(&report)),
        ("table shape", table_shape(&report)),
        ("overapproximation fuzz", overapproximation()),
    ];

    let mut failed = 0;
    for (i, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(msg) => println!("criterion {} ({name}): PASS {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL {msg}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

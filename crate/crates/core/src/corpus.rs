//! Benchmark corpus: a directory of programs plus a manifest of expected
//! verdicts, run under several modes and summarized per mode.
//!
//! Manifest lines are `path,expected,notes` with `expected` one of `safe` or
//! `unsafe`. A `k=N` token in the notes records the expected counterexample
//! length or proof depth. Blank lines and lines starting with `#` are skipped.

use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::engine::{self, Config, Mode, Outcome, Verdict};
use crate::frontend::{load, Diagnostic};

pub const MANIFEST: &str = "manifest.csv";
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Manifest { path: PathBuf, line: usize, message: String },
    #[error("{path}:{diag}")]
    Parse { path: PathBuf, diag: Diagnostic },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expected {
    Safe,
    Unsafe,
}

impl FromStr for Expected {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "safe" => Ok(Expected::Safe),
            "unsafe" => Ok(Expected::Unsafe),
            _ => Err(format!("expected verdict must be `safe` or `unsafe`, got `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    /// Relative to the corpus directory.
    pub path: PathBuf,
    pub expected: Expected,
    pub k: Option<u32>,
    pub notes: String,
}

/// Read `manifest.csv` from `dir`. A missing manifest is an error.
pub fn read_manifest(dir: &Path) -> Result<Vec<Entry>, CorpusError> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|source| CorpusError::Io { path: path.clone(), source })?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| CorpusError::Manifest { path: path.clone(), line: i + 1, message };
        let mut fields = line.splitn(3, ',');
        let file = fields.next().unwrap_or("").trim();
        let expected = fields.next().ok_or_else(|| bad("missing expected verdict".into()))?;
        let expected = expected.trim().parse().map_err(bad)?;
        let notes = fields.next().unwrap_or("").trim().to_string();
        let mut k = None;
        for tok in notes.split_whitespace() {
            if let Some(n) = tok.strip_prefix("k=") {
                k = Some(n.parse().map_err(|_| bad(format!("bad k value `{n}`")))?);
            }
        }
        if file.is_empty() {
            return Err(bad("empty path".into()));
        }
        out.push(Entry { path: PathBuf::from(file), expected, k, notes });
    }
    Ok(out)
}

/// Outcome class of one run against the expected verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Class {
    Counterexample,
    Proof,
    FalseProof,
    FalseAlarm,
    Inconclusive,
    Timeout,
    /// Certification or replay failed; no verdict was issued.
    Error,
}

pub fn classify(expected: Expected, v: &Verdict) -> Class {
    match (v, expected) {
        (Verdict::Safe { .. }, Expected::Safe) => Class::Proof,
        (Verdict::Safe { .. }, Expected::Unsafe) => Class::FalseProof,
        (Verdict::Unsafe { .. }, Expected::Unsafe) => Class::Counterexample,
        (Verdict::Unsafe { .. }, Expected::Safe) => Class::FalseAlarm,
        (Verdict::Unknown { .. }, _) => Class::Inconclusive,
        (Verdict::ResourceOut { .. }, _) => Class::Timeout,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub counterexamples: usize,
    pub proofs: usize,
    pub false_proofs: usize,
    pub false_alarms: usize,
    pub inconclusive: usize,
    pub timeout: usize,
    pub errors: usize,
}

impl Counts {
    fn add(&mut self, c: Class) {
        *match c {
            Class::Counterexample => &mut self.counterexamples,
            Class::Proof => &mut self.proofs,
            Class::FalseProof => &mut self.false_proofs,
            Class::FalseAlarm => &mut self.false_alarms,
            Class::Inconclusive => &mut self.inconclusive,
            Class::Timeout => &mut self.timeout,
            Class::Error => &mut self.errors,
        } += 1;
    }

    pub fn total(&self) -> usize {
        self.counterexamples
            + self.proofs
            + self.false_proofs
            + self.false_alarms
            + self.inconclusive
            + self.timeout
            + self.errors
    }
}

/// One benchmark under one mode.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub file: String,
    pub mode: String,
    pub expected: Expected,
    pub expected_k: Option<u32>,
    pub verdict: String,
    pub k: Option<u32>,
    pub class: Class,
    pub time_ms: f64,
    pub solver_calls: u64,
    /// `(queries, range)` of every binary search, for the query bound.
    pub searches: Vec<(u64, i128)>,
    /// Safe verdicts were recertified and unsafe ones replayed; an engine
    /// error clears this.
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// The verdict itself, for callers that re-check it.
    #[serde(skip)]
    pub outcome: Option<Verdict>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModeSummary {
    pub mode: String,
    #[serde(flatten)]
    pub counts: Counts,
    pub time_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: u32,
    pub benchmarks: usize,
    pub modes: Vec<ModeSummary>,
    pub rows: Vec<Row>,
    pub time_ms: f64,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

fn row_of(entry: &Entry, mode: Mode, r: Result<Outcome, engine::EngineError>, time: Duration) -> Row {
    let mut row = Row {
        file: entry.path.display().to_string(),
        mode: mode.to_string(),
        expected: entry.expected,
        expected_k: entry.k,
        verdict: String::new(),
        k: None,
        class: Class::Error,
        time_ms: ms(time),
        solver_calls: 0,
        searches: Vec::new(),
        certified: false,
        error: None,
        outcome: None,
    };
    match r {
        Ok(o) => {
            row.verdict = o.verdict.to_string();
            row.k = o.verdict.k();
            row.class = classify(entry.expected, &o.verdict);
            row.solver_calls = o.stats.solver_calls;
            row.searches = o.stats.infer.searches.iter().map(|s| (s.queries, s.range)).collect();
            row.certified = true;
            row.outcome = Some(o.verdict);
        }
        Err(e) => {
            row.verdict = "error".into();
            row.error = Some(e.to_string());
        }
    }
    row
}

/// Run every manifest entry under each of `modes` with `jobs` workers.
/// Rows come out sorted by manifest order, then mode order.
pub fn run_corpus(dir: &Path, modes: &[Mode], cfg: &Config, jobs: usize) -> Result<Report, CorpusError> {
    let start = Instant::now();
    let entries = read_manifest(dir)?;
    let mut programs = Vec::new();
    for e in &entries {
        let path = dir.join(&e.path);
        let src = fs::read_to_string(&path).map_err(|source| CorpusError::Io { path: path.clone(), source })?;
        programs.push(load(&src).map_err(|diag| CorpusError::Parse { path, diag })?);
    }
    let tasks: Vec<(usize, usize)> = (0..entries.len()).flat_map(|e| (0..modes.len()).map(move |m| (e, m))).collect();
    let next = AtomicUsize::new(0);
    let done = Mutex::new(Vec::with_capacity(tasks.len()));
    thread::scope(|scope| {
        for _ in 0..jobs.max(1) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(&(e, m)) = tasks.get(i) else { break };
                let cfg = Config { mode: modes[m], ..cfg.clone() };
                let t = Instant::now();
                let r = engine::run(&programs[e], &cfg);
                let row = row_of(&entries[e], modes[m], r, t.elapsed());
                done.lock().unwrap().push((i, row));
            });
        }
    });
    let mut done = done.into_inner().unwrap();
    done.sort_by_key(|&(i, _)| i);
    let rows: Vec<Row> = done.into_iter().map(|(_, r)| r).collect();

    let summaries = modes
        .iter()
        .map(|m| {
            let name = m.to_string();
            let mut counts = Counts::default();
            let mut time = 0.0;
            for r in rows.iter().filter(|r| r.mode == name) {
                counts.add(r.class);
                time += r.time_ms;
            }
            ModeSummary { mode: name, counts, time_ms: time }
        })
        .collect();
    Ok(Report { version: REPORT_VERSION, benchmarks: entries.len(), modes: summaries, rows, time_ms: ms(start.elapsed()) })
}

impl Report {
    pub fn summary(&self, mode: Mode) -> Option<&ModeSummary> {
        let name = mode.to_string();
        self.modes.iter().find(|s| s.mode == name)
    }

    pub fn rows_of(&self, mode: Mode) -> impl Iterator<Item = &Row> {
        let name = mode.to_string();
        self.rows.iter().filter(move |r| r.mode == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Per-mode table with one column per mode, then one line per run.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        write!(out, "{:<16}", "").unwrap();
        for s in &self.modes {
            write!(out, "{:>11}", s.mode).unwrap();
        }
        out.push('\n');
        let lines: [(&str, fn(&Counts) -> usize); 6] = [
            ("counterexamples", |c| c.counterexamples),
            ("proofs", |c| c.proofs),
            ("false proofs", |c| c.false_proofs),
            ("false alarms", |c| c.false_alarms),
            ("inconclusive", |c| c.inconclusive),
            ("timeout", |c| c.timeout),
        ];
        for (label, get) in lines {
            write!(out, "{label:<16}").unwrap();
            for s in &self.modes {
                write!(out, "{:>11}", get(&s.counts)).unwrap();
            }
            out.push('\n');
        }
        if self.modes.iter().any(|s| s.counts.errors > 0) {
            write!(out, "{:<16}", "errors").unwrap();
            for s in &self.modes {
                write!(out, "{:>11}", s.counts.errors).unwrap();
            }
            out.push('\n');
        }
        write!(out, "{:<16}", "time (s)").unwrap();
        for s in &self.modes {
            write!(out, "{:>11.2}", s.time_ms / 1000.0).unwrap();
        }
        out.push_str("\n\n");
        for r in &self.rows {
            write!(out, "{:<28} {:<10} {:<8} {:<34} {:>9.1} ms", r.file, r.mode, format!("{:?}", r.expected).to_lowercase(), r.verdict, r.time_ms).unwrap();
            if let Some(e) = &r.error {
                write!(out, "  {e}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lines() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(MANIFEST), "# comment\n\na.c,safe,\nb.c, unsafe ,k=3 off by one\n").unwrap();
        let m = read_manifest(dir.path()).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[1], Entry { path: "b.c".into(), expected: Expected::Unsafe, k: Some(3), notes: "k=3 off by one".into() });
        assert_eq!(m[0].k, None);
    }

    #[test]
    fn missing_manifest_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(read_manifest(dir.path()), Err(CorpusError::Io { .. })));
    }

    #[test]
    fn bad_verdict_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(MANIFEST), "a.c,safe\nb.c,maybe\n").unwrap();
        match read_manifest(dir.path()) {
            Err(CorpusError::Manifest { line, .. }) => assert_eq!(line, 2),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn empty_corpus_gives_zero_counts() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(MANIFEST), "").unwrap();
        let r = run_corpus(dir.path(), &Mode::ALL, &Config::default(), 2).unwrap();
        assert_eq!(r.benchmarks, 0);
        assert!(r.modes.iter().all(|s| s.counts == Counts::default()));
        assert_eq!(r.modes.len(), 5);
    }
}

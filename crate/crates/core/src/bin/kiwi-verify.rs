use std::fs;
use std::io::{self, BufReader};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use kiwi::corpus::{run_corpus, CorpusError};
use kiwi::domains::DomainKind;
use kiwi::engine::{self, Config, Mode, Outcome, Verdict};
use kiwi::frontend::load;
use kiwi::inference::{InferConfig, InferMethod};
use kiwi::solver::{external, SolverKind};
use kiwi::ssa::SsaSystem;

const EXIT_USAGE: u8 = 64;
const EXIT_FAILURE: u8 = 1;
/// Widest loop variable `--infer enum` accepts without `--force`.
const ENUM_MAX_WIDTH: u32 = 8;

#[derive(Parser)]
#[command(name = "kiwi-verify", version, about = "Verify assertions in a small C-like program")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    verify: VerifyArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Run every program listed in a corpus manifest and print a summary.
    Corpus(CorpusArgs),
    /// Serve the built-in SAT solver over stdin/stdout for `--solver external:`.
    SatServer,
}

#[derive(Args, Clone)]
struct EngineArgs {
    #[arg(long, default_value = "kiki", value_parser = parse_mode)]
    mode: Mode,
    /// Largest number of loop copies tried.
    #[arg(long, default_value_t = 50)]
    max_k: u32,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Conflict budget per solver call.
    #[arg(long)]
    max_conflicts: Option<u64>,
    #[arg(long, default_value = "intervals", value_parser = parse_domain)]
    domain: DomainKind,
    #[arg(long, default_value = "binsearch", value_parser = parse_infer)]
    infer: InferMethod,
    /// Allow `--infer enum` on variables wider than 8 bits.
    #[arg(long)]
    force: bool,
    /// `builtin` or `external:<command>`.
    #[arg(long, default_value = "builtin", value_parser = parse_solver)]
    solver: SolverKind,
}

#[derive(Args)]
struct VerifyArgs {
    /// Program to verify.
    file: Option<PathBuf>,
    #[command(flatten)]
    engine: EngineArgs,
    /// Write the invariant or counterexample to this file.
    #[arg(long)]
    witness: Option<PathBuf>,
    /// Print one JSON record instead of text.
    #[arg(long)]
    json: bool,
    /// Print solver and phase statistics.
    #[arg(long)]
    stats: bool,
    /// Print the SSA constraints of the final unwinding.
    #[arg(long)]
    dump_ssa: bool,
    /// Print the clauses of the main solver in DIMACS form.
    #[arg(long)]
    dump_cnf: bool,
    /// Print the invariant of a safe verdict.
    #[arg(long)]
    dump_invariant: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Args)]
struct CorpusArgs {
    /// Directory holding the programs and `manifest.csv`.
    dir: PathBuf,
    /// Modes to run; defaults to all of them.
    #[arg(long = "modes", value_delimiter = ',', value_parser = parse_mode)]
    modes: Vec<Mode>,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long, value_enum, default_value = "text")]
    report: ReportFormat,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

fn parse_domain(s: &str) -> Result<DomainKind, String> {
    s.parse()
}

fn parse_infer(s: &str) -> Result<InferMethod, String> {
    s.parse()
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    s.parse()
}

/// Failure that ends the run without a verdict.
struct Fatal {
    code: u8,
    message: String,
}

impl Fatal {
    fn usage(message: impl Into<String>) -> Self {
        Fatal { code: EXIT_USAGE, message: message.into() }
    }

    fn failure(message: impl Into<String>) -> Self {
        Fatal { code: EXIT_FAILURE, message: message.into() }
    }
}

fn config(a: &EngineArgs) -> Result<Config, Fatal> {
    let timeout = match a.timeout {
        Some(t) if !(t.is_finite() && t > 0.0) => return Err(Fatal::usage("--timeout must be a positive number of seconds")),
        t => t.map(Duration::from_secs_f64),
    };
    Ok(Config {
        mode: a.mode,
        max_k: a.max_k.max(1),
        domain: a.domain,
        infer: InferConfig { method: a.infer, ..InferConfig::default() },
        timeout,
        max_conflicts: a.max_conflicts,
        solver: a.solver.clone(),
        keep_cnf: false,
        cancel: None,
    })
}

fn read_program(path: &Path) -> Result<kiwi::frontend::ast::Program, Fatal> {
    let src = fs::read_to_string(path).map_err(|e| Fatal::usage(format!("{}: {e}", path.display())))?;
    load(&src).map_err(|d| Fatal::usage(format!("{}:{d}", path.display())))
}

/// Widest loop variable, the width the enumeration gate looks at.
fn widest_loop_var(p: &kiwi::frontend::ast::Program) -> u32 {
    let sys = SsaSystem::new(p.clone());
    sys.loops.iter().flat_map(|l| l.vars.iter().map(|v| v.1.width)).max().unwrap_or(0)
}

fn witness_text(v: &Verdict) -> Option<String> {
    match v {
        Verdict::Safe { k, text, .. } => Some(format!("k={k}\n{text}")),
        Verdict::Unsafe { trace, .. } => Some(trace.render()),
        _ => None,
    }
}

fn json_record(file: &Path, cfg: &Config, o: &Outcome) -> serde_json::Value {
    let v = &o.verdict;
    let st = &o.stats;
    let mut rec = json!({
        "file": file.display().to_string(),
        "mode": cfg.mode.to_string(),
        "verdict": v.name(),
        "k": v.k(),
        "exit_code": v.exit_code(),
        "summary": v.to_string(),
        "stats": {
            "unwindings": st.unwindings,
            "solver_calls": st.solver_calls,
            "conflicts": st.conflicts,
            "decisions": st.decisions,
            "clauses": st.clauses,
            "inference_rounds": st.infer.rounds,
            "strengthenings": st.infer.searches.len(),
            "time_ms": st.time.as_secs_f64() * 1000.0,
        },
    });
    match v {
        Verdict::Safe { text, .. } => rec["invariant"] = json!(text.lines().collect::<Vec<_>>()),
        Verdict::Unsafe { trace, .. } => rec["trace"] = json!(trace.steps),
        _ => {}
    }
    rec
}

fn print_stats(o: &Outcome) {
    let st = &o.stats;
    println!("unwindings: {}", st.unwindings);
    println!("solver calls: {}", st.solver_calls);
    println!("conflicts: {}", st.conflicts);
    println!("decisions: {}", st.decisions);
    println!("clauses: {}", st.clauses);
    println!("inference rounds: {}", st.infer.rounds);
    println!("strengthenings: {}", st.infer.searches.len());
    println!("time concrete: {:.3}s", st.concrete_time.as_secs_f64());
    println!("time inference: {:.3}s", st.infer.time.as_secs_f64());
    println!("time step: {:.3}s", st.step_time.as_secs_f64());
    println!("time certification: {:.3}s", st.certify_time.as_secs_f64());
    println!("time total: {:.3}s", st.time.as_secs_f64());
    for l in &st.lanes {
        println!("lane {}: {} in {:.3}s", l.mode, l.verdict, l.time.as_secs_f64());
    }
}

fn verify(a: &VerifyArgs) -> Result<u8, Fatal> {
    let file = a.file.as_deref().ok_or_else(|| Fatal::usage("missing input file (see --help)"))?;
    let p = read_program(file)?;
    let mut cfg = config(&a.engine)?;
    cfg.keep_cnf = a.dump_cnf;
    if cfg.infer.method == InferMethod::Enumeration && !a.engine.force {
        let w = widest_loop_var(&p);
        if w > ENUM_MAX_WIDTH {
            return Err(Fatal::usage(format!(
                "--infer enum is limited to {ENUM_MAX_WIDTH}-bit loop variables (found {w} bits); pass --force to run anyway"
            )));
        }
    }
    let o = engine::run(&p, &cfg).map_err(|e| Fatal::failure(format!("{}: {e}", file.display())))?;
    let v = &o.verdict;

    if let Some(path) = &a.witness {
        if let Some(text) = witness_text(v) {
            fs::write(path, text).map_err(|e| Fatal::failure(format!("{}: {e}", path.display())))?;
        }
    }
    if a.json {
        let mut rec = json_record(file, &cfg, &o);
        if a.dump_ssa {
            rec["ssa"] = json!(o.ssa.lines().collect::<Vec<_>>());
        }
        println!("{}", serde_json::to_string_pretty(&rec).expect("record serializes"));
        return Ok(v.exit_code() as u8);
    }
    println!("{v}");
    match v {
        Verdict::Unsafe { trace, .. } => print!("{}", trace.render()),
        Verdict::Safe { text, .. } if a.dump_invariant => print!("{text}"),
        _ => {}
    }
    if a.dump_ssa {
        print!("{}", o.ssa);
    }
    if a.dump_cnf {
        if let Some(cnf) = &o.cnf {
            print!("{cnf}");
        }
    }
    if a.stats {
        print_stats(&o);
    }
    Ok(v.exit_code() as u8)
}

fn corpus(a: &CorpusArgs) -> Result<u8, Fatal> {
    let cfg = config(&a.engine)?;
    let modes = if a.modes.is_empty() { Mode::ALL.to_vec() } else { a.modes.clone() };
    let report = run_corpus(&a.dir, &modes, &cfg, a.jobs).map_err(|e| match e {
        CorpusError::Io { .. } | CorpusError::Manifest { .. } => Fatal::usage(e.to_string()),
        CorpusError::Parse { .. } => Fatal::failure(e.to_string()),
    })?;
    match a.report {
        ReportFormat::Text => print!("{}", report.render_text()),
        ReportFormat::Json => println!("{}", report.to_json()),
    }
    let unsound = report.modes.iter().any(|s| s.counts.false_proofs + s.counts.false_alarms + s.counts.errors > 0);
    Ok(if unsound { EXIT_FAILURE } else { 0 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let r = match &cli.command {
        Some(Command::Corpus(a)) => corpus(a),
        Some(Command::SatServer) => {
            let stdin = io::stdin();
            external::serve(BufReader::new(stdin.lock()), io::stdout().lock())
                .map(|_| 0)
                .map_err(|e| Fatal::failure(format!("sat-server: {e}")))
        }
        None => verify(&cli.verify),
    };
    match r {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("kiwi-verify: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

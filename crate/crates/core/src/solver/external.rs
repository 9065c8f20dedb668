//! SAT backend living in a separate process.
//!
//! Line protocol, client to server:
//!
//! ```text
//! c <lit> <lit> ... 0      add a clause (DIMACS literals)
//! s <lit> ... 0            solve under assumptions
//! ```
//!
//! The server answers each `s` with `UNSAT`, or `SAT` followed by one line
//! `m <lit> ... 0` giving every variable's value. Any other reply is an
//! error. `kiwi-verify sat-server` runs [`serve`] over stdin/stdout.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::{Duration, Instant};

use super::sat::{Cdcl, Limits, Lit, SatResult, SatStats};
use super::{SatBackend, SolveResult, SolverError};

pub struct ExternalSat {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
    pending: String,
    num_vars: u32,
    model: Vec<bool>,
    stats: SatStats,
    dead: bool,
}

impl ExternalSat {
    pub fn spawn(cmd: &str) -> Result<Self, SolverError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(cmd)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| SolverError::External(format!("cannot start `{cmd}`: {e}")))?;
        let stdin = child.stdin.take().unwrap();
        let stdout = child.stdout.take().unwrap();
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                match line {
                    Ok(l) => {
                        if tx.send(l).is_err() {
                            break;
                        }
                    }
                    Err(_) => break,
                }
            }
        });
        Ok(ExternalSat {
            child,
            stdin,
            lines: rx,
            pending: String::new(),
            num_vars: 0,
            model: Vec::new(),
            stats: SatStats::default(),
            dead: false,
        })
    }

    fn recv(&mut self, limits: &Limits) -> Result<String, SolverError> {
        loop {
            if let Some(c) = &limits.cancel {
                if c.load(std::sync::atomic::Ordering::Relaxed) {
                    self.kill();
                    return Err(SolverError::Cancelled);
                }
            }
            let mut wait = Duration::from_millis(50);
            if let Some(d) = limits.deadline {
                let now = Instant::now();
                if now >= d {
                    self.kill();
                    return Err(SolverError::Timeout);
                }
                wait = wait.min(d - now);
            }
            match self.lines.recv_timeout(wait) {
                Ok(l) => return Ok(l),
                Err(RecvTimeoutError::Timeout) => continue,
                Err(RecvTimeoutError::Disconnected) => {
                    self.dead = true;
                    return Err(SolverError::External("solver process exited".into()));
                }
            }
        }
    }

    fn kill(&mut self) {
        self.dead = true;
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Drop for ExternalSat {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn write_lits(out: &mut String, tag: char, lits: &[Lit]) {
    out.push(tag);
    for l in lits {
        out.push(' ');
        out.push_str(&l.to_dimacs().to_string());
    }
    out.push_str(" 0\n");
}

impl SatBackend for ExternalSat {
    fn new_var(&mut self) -> Lit {
        let v = self.num_vars;
        self.num_vars += 1;
        Lit::pos(super::sat::Var(v))
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        write_lits(&mut self.pending, 'c', lits);
    }

    fn solve(&mut self, assumptions: &[Lit], limits: &Limits) -> Result<SolveResult, SolverError> {
        if self.dead {
            return Err(SolverError::External("solver process is gone".into()));
        }
        self.stats.solves += 1;
        self.model.clear();
        let mut msg = std::mem::take(&mut self.pending);
        write_lits(&mut msg, 's', assumptions);
        let io = |e: std::io::Error| SolverError::External(e.to_string());
        self.stdin.write_all(msg.as_bytes()).map_err(io)?;
        self.stdin.flush().map_err(io)?;
        let head = self.recv(limits)?;
        match head.trim() {
            "UNSAT" => Ok(SolveResult::Unsat),
            "SAT" => {
                let m = self.recv(limits)?;
                let mut model = vec![false; self.num_vars as usize];
                let body = m.trim().strip_prefix('m').ok_or_else(|| SolverError::External(format!("bad model line `{m}`")))?;
                for tok in body.split_whitespace() {
                    let x: i64 = tok.parse().map_err(|_| SolverError::External(format!("bad literal `{tok}`")))?;
                    if x == 0 {
                        break;
                    }
                    let l = Lit::from_dimacs(x);
                    let i = l.var().0 as usize;
                    if i >= model.len() {
                        model.resize(i + 1, false);
                    }
                    model[i] = !l.is_neg();
                }
                self.model = model;
                Ok(SolveResult::Sat)
            }
            other => Err(SolverError::External(format!("unexpected reply `{other}`"))),
        }
    }

    fn model_value(&self, l: Lit) -> Option<bool> {
        self.model.get(l.var().0 as usize).map(|&b| b != l.is_neg())
    }

    fn stats(&self) -> SatStats {
        self.stats.clone()
    }
}

/// Serve the protocol with the built-in solver until input ends.
pub fn serve(input: impl BufRead, mut output: impl Write) -> std::io::Result<()> {
    let mut s = Cdcl::new();
    let bad = |m: String| std::io::Error::new(std::io::ErrorKind::InvalidData, m);
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (tag, rest) = line.split_at(1);
        let mut lits = Vec::new();
        for tok in rest.split_whitespace() {
            let x: i64 = tok.parse().map_err(|_| bad(format!("bad literal `{tok}`")))?;
            if x == 0 {
                break;
            }
            let l = Lit::from_dimacs(x);
            while s.num_vars() <= l.var().0 {
                s.new_var();
            }
            lits.push(l);
        }
        match tag {
            "c" => {
                s.add_clause(&lits);
            }
            "s" => match s.solve(&lits, &Limits::default()) {
                SatResult::Sat => {
                    let mut m = String::from("SAT\nm");
                    for v in 0..s.num_vars() {
                        let l = Lit::pos(super::sat::Var(v));
                        let x = l.to_dimacs();
                        let val = s.model_value(l).unwrap_or(false);
                        m.push_str(&format!(" {}", if val { x } else { -x }));
                    }
                    m.push_str(" 0\n");
                    output.write_all(m.as_bytes())?;
                    output.flush()?;
                }
                _ => {
                    output.write_all(b"UNSAT\n")?;
                    output.flush()?;
                }
            },
            _ => return Err(bad(format!("unknown command `{line}`"))),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn server_answers_sat_and_unsat() {
        let input = "c 1 2 0\nc -1 0\ns 0\ns -2 0\n";
        let mut out = Vec::new();
        serve(input.as_bytes(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines, vec!["SAT", "m -1 2 0", "UNSAT"]);
    }
}

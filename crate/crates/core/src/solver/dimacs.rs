//! DIMACS CNF reading and writing.

use std::fmt::Write;

use super::sat::Lit;

pub fn render(num_vars: u32, clauses: &[Vec<Lit>]) -> String {
    let mut s = String::new();
    writeln!(s, "p cnf {} {}", num_vars, clauses.len()).unwrap();
    for c in clauses {
        for l in c {
            write!(s, "{} ", l.to_dimacs()).unwrap();
        }
        s.push_str("0\n");
    }
    s
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

/// Parse DIMACS text into (declared variable count, clauses).
pub fn parse(text: &str) -> Result<(u32, Vec<Vec<Lit>>), ParseError> {
    let mut nvars = 0;
    let mut clauses = Vec::new();
    let mut cur = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let err = |msg: &str| ParseError { line: i + 1, msg: msg.to_string() };
        if let Some(rest) = line.strip_prefix('p') {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 || parts[0] != "cnf" {
                return Err(err("malformed header"));
            }
            nvars = parts[1].parse().map_err(|_| err("bad variable count"))?;
            continue;
        }
        for tok in line.split_whitespace() {
            let x: i64 = tok.parse().map_err(|_| err("bad literal"))?;
            if x == 0 {
                clauses.push(std::mem::take(&mut cur));
            } else {
                cur.push(Lit::from_dimacs(x));
            }
        }
    }
    if !cur.is_empty() {
        clauses.push(cur);
    }
    Ok((nvars, clauses))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let cs = vec![vec![Lit::from_dimacs(1), Lit::from_dimacs(-2)], vec![Lit::from_dimacs(2)]];
        let text = render(2, &cs);
        assert_eq!(text, "p cnf 2 2\n1 -2 0\n2 0\n");
        assert_eq!(parse(&text).unwrap(), (2, cs));
    }
}

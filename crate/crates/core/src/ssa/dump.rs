//! Textual listing of the SSA constraints.

use std::fmt::Write;

use super::{Role, SsaSystem};

impl SsaSystem {
    /// One constraint per line, in creation order. Assertions are shown as
    /// `guard ==> property` and marked, since they are not constraints.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for c in &self.constraints {
            let text = self.pool.display(c.expr).to_string();
            match c.role {
                Role::Assertion => writeln!(out, "{text}  // assertion").unwrap(),
                Role::Merge => writeln!(out, "{text}  // loop exit").unwrap(),
                _ => writeln!(out, "{text}").unwrap(),
            }
        }
        out
    }
}

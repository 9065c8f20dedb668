//! Source printer. Output is fully parenthesized and re-parses to the same
//! tree.

use std::fmt::Write;

use super::ast::*;
use super::parser::nondet_name;
use crate::types::BvType;

pub fn type_name(t: BvType) -> String {
    match t {
        BvType::BOOL => "_Bool".into(),
        BvType::I32 => "int".into(),
        BvType::U32 => "unsigned".into(),
        t => t.to_string(),
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    expr(&mut s, e);
    s
}

fn expr(out: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::Lit(v) => {
            if *v < 0 {
                write!(out, "({v})").unwrap();
            } else {
                write!(out, "{v}").unwrap();
            }
        }
        ExprKind::Var(n) => out.push_str(n),
        ExprKind::Unary(op, a) => {
            out.push(match op {
                UnOp::Neg => '-',
                UnOp::BitNot => '~',
                UnOp::Not => '!',
            });
            out.push('(');
            expr(out, a);
            out.push(')');
        }
        ExprKind::Binary(op, a, b) => {
            out.push('(');
            expr(out, a);
            write!(out, " {} ", op.symbol()).unwrap();
            expr(out, b);
            out.push(')');
        }
        ExprKind::Ternary(c, t, f) => {
            out.push('(');
            expr(out, c);
            out.push_str(" ? ");
            expr(out, t);
            out.push_str(" : ");
            expr(out, f);
            out.push(')');
        }
        ExprKind::Cast(t, a) => {
            write!(out, "(({})", type_name(*t)).unwrap();
            expr(out, a);
            out.push(')');
        }
        ExprKind::Nondet(t, _) => write!(out, "{}()", nondet_name(*t)).unwrap(),
    }
}

/// One-line rendering of a statement's head, used in traces.
pub fn stmt_summary(s: &Stmt) -> String {
    match &s.kind {
        StmtKind::Decl { name, ty, init: Some(e) } => format!("{} {} = {}", type_name(*ty), name, print_expr(e)),
        StmtKind::Decl { name, ty, init: None } => format!("{} {}", type_name(*ty), name),
        StmtKind::Assign { name, value } => format!("{} = {}", name, print_expr(value)),
        StmtKind::If { cond, .. } => format!("if {}", print_expr(cond)),
        StmtKind::While { cond, .. } => format!("while {}", print_expr(cond)),
        StmtKind::Assert(e) => format!("assert({})", print_expr(e)),
        StmtKind::Assume(e) => format!("__CPROVER_assume({})", print_expr(e)),
    }
}

fn stmts(out: &mut String, ss: &[Stmt], depth: usize) {
    for s in ss {
        let pad = "  ".repeat(depth);
        match &s.kind {
            StmtKind::If { cond, then, els } => {
                writeln!(out, "{pad}if ({}) {{", print_expr(cond)).unwrap();
                stmts(out, then, depth + 1);
                if els.is_empty() {
                    writeln!(out, "{pad}}}").unwrap();
                } else {
                    writeln!(out, "{pad}}} else {{").unwrap();
                    stmts(out, els, depth + 1);
                    writeln!(out, "{pad}}}").unwrap();
                }
            }
            StmtKind::While { cond, body } => {
                writeln!(out, "{pad}while ({}) {{", print_expr(cond)).unwrap();
                stmts(out, body, depth + 1);
                writeln!(out, "{pad}}}").unwrap();
            }
            _ => writeln!(out, "{pad}{};", stmt_summary(s)).unwrap(),
        }
    }
}

pub fn print_program(p: &Program) -> String {
    let mut out = String::from("void main() {\n");
    stmts(&mut out, &p.body, 1);
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;

    #[test]
    fn round_trips() {
        let src = "void main() { int w = 0, x; u8 c = (u8) x; while (x < -3 && !(w % 3 != 0)) { x = x - -5; if (x >= 10) x = w = 0; else { w += __VERIFIER_nondet_int(); } } assert(x <= 3 ? 1 : 0); }";
        let a = parse(src).unwrap();
        let text = print_program(&a);
        let b = parse(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(print_program(&b), text);
    }
}

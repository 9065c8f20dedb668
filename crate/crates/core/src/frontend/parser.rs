//! Recursive-descent parser.
//!
//! Sugar is lowered while parsing: `for` and `do`/`while` become `while`,
//! compound assignments and increments become plain assignments, and
//! chained assignments `x = y = e` become a sequence. Block scoping is
//! resolved here: a declaration that reuses a name from a closed or outer
//! scope is renamed to `name__N`, so later stages see one flat namespace.

use std::collections::{HashMap, HashSet};

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::{Diagnostic, ErrorCode};
use crate::types::BvType;

pub fn parse(src: &str) -> Result<Program, Diagnostic> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, scopes: vec![HashMap::new()], used: HashSet::new(), next_nondet: 0 };
    let mut prog = p.program()?;
    number_stmts(&mut prog.body);
    Ok(prog)
}

const NONDET: &[(&str, BvType)] = &[
    ("__VERIFIER_nondet_int", BvType::I32),
    ("__VERIFIER_nondet_uint", BvType::U32),
    ("__VERIFIER_nondet_unsigned", BvType::U32),
    ("__VERIFIER_nondet_char", BvType::I8),
    ("__VERIFIER_nondet_uchar", BvType::U8),
    ("__VERIFIER_nondet_short", BvType::I16),
    ("__VERIFIER_nondet_ushort", BvType::U16),
    ("__VERIFIER_nondet_long", BvType::I64),
    ("__VERIFIER_nondet_ulong", BvType::U64),
    ("__VERIFIER_nondet_bool", BvType::BOOL),
    ("__VERIFIER_nondet__Bool", BvType::BOOL),
];

pub fn nondet_type(name: &str) -> Option<BvType> {
    NONDET.iter().find(|(n, _)| *n == name).map(|&(_, t)| t)
}

/// Name of the nondet intrinsic producing `ty`, for printing.
pub fn nondet_name(ty: BvType) -> &'static str {
    NONDET.iter().find(|(_, t)| *t == ty).map(|&(n, _)| n).expect("nondet intrinsic for every source type")
}

const TYPE_WORDS: &[&str] = &[
    "int", "unsigned", "signed", "char", "short", "long", "_Bool", "bool", "int8_t", "int16_t", "int32_t", "int64_t",
    "uint8_t", "uint16_t", "uint32_t", "uint64_t", "i8", "i16", "i32", "i64", "u8", "u16", "u32", "u64", "const",
    "volatile",
];

const ASSERTS: &[&str] = &["assert", "__VERIFIER_assert"];
const ASSUMES: &[&str] = &["__CPROVER_assume", "__VERIFIER_assume", "assume"];
const ERRORS: &[&str] = &["__VERIFIER_error", "reach_error"];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    scopes: Vec<HashMap<String, String>>,
    used: HashSet<String>,
    next_nondet: u32,
}

type R<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(i) if i == s)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.is(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> R<()> {
        if self.eat(p) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{p}`")))
        }
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        let found = match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v, _) => format!("`{v}`"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".to_string(),
        };
        Diagnostic::new(ErrorCode::Syntax, self.span(), format!("expected {wanted}, found {found}"))
    }

    fn ident(&mut self) -> R<(String, Span)> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, span))
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn unsupported(&self, span: Span, what: &str) -> Diagnostic {
        Diagnostic::new(ErrorCode::Unsupported, span, format!("{what} not supported"))
    }

    // ---- scopes -----------------------------------------------------------

    fn declare(&mut self, name: &str, span: Span) -> R<String> {
        if self.scopes.last().unwrap().contains_key(name) {
            return Err(Diagnostic::new(ErrorCode::Redeclaration, span, format!("`{name}` is already declared")));
        }
        let mut unique = name.to_string();
        let mut n = 1;
        while self.used.contains(&unique) {
            unique = format!("{name}__{n}");
            n += 1;
        }
        self.used.insert(unique.clone());
        self.scopes.last_mut().unwrap().insert(name.to_string(), unique.clone());
        Ok(unique)
    }

    fn resolve(&self, name: &str, span: Span) -> R<String> {
        for s in self.scopes.iter().rev() {
            if let Some(u) = s.get(name) {
                return Ok(u.clone());
            }
        }
        Err(Diagnostic::new(ErrorCode::UnknownIdentifier, span, format!("unknown identifier `{name}`")))
    }

    fn scoped<T>(&mut self, f: impl FnOnce(&mut Self) -> R<T>) -> R<T> {
        self.scopes.push(HashMap::new());
        let r = f(self);
        self.scopes.pop();
        r
    }

    // ---- types ------------------------------------------------------------

    fn at_type(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if TYPE_WORDS.contains(&s.as_str()))
    }

    fn parse_type(&mut self) -> R<BvType> {
        let span = self.span();
        let mut words = Vec::new();
        while let Tok::Ident(s) = self.peek().clone() {
            if !TYPE_WORDS.contains(&s.as_str()) {
                break;
            }
            self.bump();
            if s != "const" && s != "volatile" {
                words.push(s);
            }
        }
        let bad = || Diagnostic::new(ErrorCode::Syntax, span, format!("invalid type `{}`", words.join(" ")));
        let named = |w: &str| -> Option<BvType> {
            Some(match w {
                "_Bool" | "bool" => BvType::BOOL,
                "int8_t" | "i8" => BvType::I8,
                "int16_t" | "i16" => BvType::I16,
                "int32_t" | "i32" => BvType::I32,
                "int64_t" | "i64" => BvType::I64,
                "uint8_t" | "u8" => BvType::U8,
                "uint16_t" | "u16" => BvType::U16,
                "uint32_t" | "u32" => BvType::U32,
                "uint64_t" | "u64" => BvType::U64,
                _ => return None,
            })
        };
        if words.len() == 1 {
            if let Some(t) = named(&words[0]) {
                return Ok(t);
            }
        }
        let mut signed = None;
        let (mut chars, mut shorts, mut longs, mut ints) = (0, 0, 0, 0);
        for w in &words {
            match w.as_str() {
                "unsigned" if signed.is_none() => signed = Some(false),
                "signed" if signed.is_none() => signed = Some(true),
                "char" => chars += 1,
                "short" => shorts += 1,
                "long" => longs += 1,
                "int" => ints += 1,
                _ => return Err(bad()),
            }
        }
        if words.is_empty() || chars > 1 || shorts > 1 || longs > 2 || ints > 1 || chars + shorts + (longs > 0) as i32 > 1 {
            return Err(bad());
        }
        if chars == 1 && ints == 1 {
            return Err(bad());
        }
        let width = if chars == 1 {
            8
        } else if shorts == 1 {
            16
        } else if longs > 0 {
            64
        } else {
            32
        };
        Ok(BvType { signed: signed.unwrap_or(true), width })
    }

    // ---- top level --------------------------------------------------------

    fn program(&mut self) -> R<Program> {
        let mut globals = Vec::new();
        let mut main = None;
        loop {
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Ident(s) if s == "extern" || s == "typedef" => {
                    if s == "typedef" {
                        return Err(self.unsupported(self.span(), "typedef"));
                    }
                    while !self.is(";") && *self.peek() != Tok::Eof {
                        self.bump();
                    }
                    self.expect(";")?;
                }
                Tok::Ident(s) if s == "void" || self.at_type() => {
                    let span = self.span();
                    let ty = if s == "void" {
                        self.bump();
                        None
                    } else {
                        Some(self.parse_type()?)
                    };
                    let (name, nspan) = self.ident()?;
                    if self.is("(") {
                        if name == "main" {
                            if main.is_some() {
                                return Err(Diagnostic::new(ErrorCode::Redeclaration, nspan, "`main` is defined twice"));
                            }
                            self.main_header()?;
                            main = Some(self.scoped(|p| p.main_body())?);
                        } else {
                            self.prototype(&name, nspan)?;
                        }
                    } else {
                        let ty = ty.ok_or_else(|| Diagnostic::new(ErrorCode::TypeMismatch, span, "variable of type void"))?;
                        self.declarators(ty, name, nspan, true, &mut globals)?;
                    }
                }
                _ => return Err(self.unexpected("declaration or `main`")),
            }
        }
        let main = main.ok_or_else(|| Diagnostic::new(ErrorCode::Syntax, self.span(), "no `main` function"))?;
        globals.extend(main);
        Ok(Program { body: globals })
    }

    fn main_header(&mut self) -> R<()> {
        self.expect("(")?;
        if self.is_ident("void") {
            self.bump();
        }
        self.expect(")")
    }

    /// Function other than `main`: a prototype is skipped, a definition is
    /// rejected.
    fn prototype(&mut self, name: &str, span: Span) -> R<()> {
        let mut depth = 0;
        loop {
            if self.is("(") {
                depth += 1;
            } else if self.is(")") {
                depth -= 1;
            } else if *self.peek() == Tok::Eof {
                return Err(self.unexpected("`)`"));
            }
            self.bump();
            if depth == 0 {
                break;
            }
        }
        if self.eat(";") {
            Ok(())
        } else {
            Err(Diagnostic::new(ErrorCode::Unsupported, span, format!("function `{name}`: functions other than main are not supported")))
        }
    }

    fn main_body(&mut self) -> R<Vec<Stmt>> {
        self.expect("{")?;
        let mut out = Vec::new();
        while !self.is("}") {
            if self.is_ident("return") {
                let span = self.span();
                self.bump();
                if !self.is(";") {
                    self.expr()?;
                }
                self.expect(";")?;
                if !self.is("}") {
                    return Err(self.unsupported(span, "`return` before the end of main is"));
                }
                break;
            }
            self.stmt(&mut out)?;
        }
        self.expect("}")?;
        Ok(out)
    }

    fn declarators(&mut self, ty: BvType, first: String, span: Span, global: bool, out: &mut Vec<Stmt>) -> R<()> {
        let (mut name, mut nspan) = (first, span);
        loop {
            if self.is("[") {
                return Err(self.unsupported(nspan, "arrays are"));
            }
            let init = if self.eat("=") {
                Some(self.expr()?)
            } else if global {
                // globals are zero-initialized
                Some(Expr::new(ExprKind::Lit(0), nspan))
            } else {
                None
            };
            let unique = self.declare(&name, nspan)?;
            out.push(Stmt { kind: StmtKind::Decl { name: unique, ty, init }, span: nspan, id: 0 });
            if self.eat(",") {
                if self.is("*") {
                    return Err(self.unsupported(self.span(), "pointers are"));
                }
                let (n, s) = self.ident()?;
                name = n;
                nspan = s;
            } else {
                break;
            }
        }
        self.expect(";")
    }

    // ---- statements -------------------------------------------------------

    fn block_or_stmt(&mut self) -> R<Vec<Stmt>> {
        let mut out = Vec::new();
        self.scoped(|p| p.stmt(&mut out))?;
        Ok(out)
    }

    fn stmt(&mut self, out: &mut Vec<Stmt>) -> R<()> {
        let span = self.span();
        if self.eat("{") {
            return self.scoped(|p| {
                while !p.is("}") {
                    if *p.peek() == Tok::Eof {
                        return Err(p.unexpected("`}`"));
                    }
                    p.stmt(out)?;
                }
                p.bump();
                Ok(())
            });
        }
        if self.eat(";") {
            return Ok(());
        }
        if self.is("++") || self.is("--") {
            let inc = self.is("++");
            self.bump();
            let (n, s) = self.ident()?;
            self.expect(";")?;
            out.push(self.increment(&n, s, inc, span)?);
            return Ok(());
        }
        if self.is("*") {
            return Err(self.unsupported(span, "pointers are"));
        }
        if self.at_type() {
            let ty = self.parse_type()?;
            if self.is("*") {
                return Err(self.unsupported(self.span(), "pointers are"));
            }
            let (n, s) = self.ident()?;
            return self.declarators(ty, n, s, false, out);
        }
        let word = match self.peek().clone() {
            Tok::Ident(w) => w,
            _ => return Err(self.unexpected("statement")),
        };
        match word.as_str() {
            "if" => {
                self.bump();
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                let then = self.block_or_stmt()?;
                let els = if self.is_ident("else") {
                    self.bump();
                    self.block_or_stmt()?
                } else {
                    Vec::new()
                };
                out.push(Stmt { kind: StmtKind::If { cond, then, els }, span, id: 0 });
            }
            "while" => {
                self.bump();
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                let body = self.block_or_stmt()?;
                out.push(Stmt { kind: StmtKind::While { cond, body }, span, id: 0 });
            }
            "do" => {
                self.bump();
                let body = self.block_or_stmt()?;
                if !self.is_ident("while") {
                    return Err(self.unexpected("`while`"));
                }
                self.bump();
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                self.expect(";")?;
                // body; while (cond) body -- the copy gets fresh nondet ids
                let copy = self.renumber(&body);
                out.extend(body);
                out.push(Stmt { kind: StmtKind::While { cond, body: copy }, span, id: 0 });
            }
            "for" => {
                self.bump();
                self.scoped(|p| {
                    p.expect("(")?;
                    if !p.eat(";") {
                        if p.at_type() {
                            let ty = p.parse_type()?;
                            let (n, s) = p.ident()?;
                            p.declarators(ty, n, s, false, out)?;
                        } else {
                            p.simple_list(out)?;
                            p.expect(";")?;
                        }
                    }
                    let cond = if p.is(";") { Expr::new(ExprKind::Lit(1), p.span()) } else { p.expr()? };
                    p.expect(";")?;
                    let mut step = Vec::new();
                    if !p.is(")") {
                        p.simple_list(&mut step)?;
                    }
                    p.expect(")")?;
                    let mut body = p.block_or_stmt()?;
                    body.extend(step);
                    out.push(Stmt { kind: StmtKind::While { cond, body }, span, id: 0 });
                    Ok(())
                })?;
            }
            w if ASSERTS.contains(&w) || ASSUMES.contains(&w) => {
                self.bump();
                self.expect("(")?;
                let e = self.expr()?;
                self.expect(")")?;
                self.expect(";")?;
                let kind = if ASSERTS.contains(&w) { StmtKind::Assert(e) } else { StmtKind::Assume(e) };
                out.push(Stmt { kind, span, id: 0 });
            }
            w if ERRORS.contains(&w) => {
                self.bump();
                self.expect("(")?;
                self.expect(")")?;
                self.expect(";")?;
                out.push(Stmt { kind: StmtKind::Assert(Expr::new(ExprKind::Lit(0), span)), span, id: 0 });
            }
            "break" | "continue" | "goto" | "switch" | "return" => {
                return Err(self.unsupported(span, &format!("`{word}` is")));
            }
            _ => {
                self.simple(out)?;
                self.expect(";")?;
            }
        }
        Ok(())
    }

    fn simple_list(&mut self, out: &mut Vec<Stmt>) -> R<()> {
        self.simple(out)?;
        while self.eat(",") {
            self.simple(out)?;
        }
        Ok(())
    }

    /// Assignment-like statement without the trailing `;`.
    fn simple(&mut self, out: &mut Vec<Stmt>) -> R<()> {
        let span = self.span();
        if self.is("++") || self.is("--") {
            let inc = self.is("++");
            self.bump();
            let (n, s) = self.ident()?;
            out.push(self.increment(&n, s, inc, span)?);
            return Ok(());
        }
        let (name, nspan) = self.ident()?;
        if self.is("(") {
            return Err(self.unsupported(nspan, &format!("call of `{name}`: function calls are")));
        }
        if self.is("[") {
            return Err(self.unsupported(nspan, "arrays are"));
        }
        if self.is("++") || self.is("--") {
            let inc = self.is("++");
            self.bump();
            out.push(self.increment(&name, nspan, inc, span)?);
            return Ok(());
        }
        let target = self.resolve(&name, nspan)?;
        let op = match self.peek() {
            Tok::Punct("=") => None,
            Tok::Punct(p) => match *p {
                "+=" => Some(BinOp::Add),
                "-=" => Some(BinOp::Sub),
                "*=" => Some(BinOp::Mul),
                "/=" => Some(BinOp::Div),
                "%=" => Some(BinOp::Rem),
                "&=" => Some(BinOp::BitAnd),
                "|=" => Some(BinOp::BitOr),
                "^=" => Some(BinOp::BitXor),
                "<<=" => Some(BinOp::Shl),
                ">>=" => Some(BinOp::Shr),
                _ => return Err(self.unexpected("assignment")),
            },
            _ => return Err(self.unexpected("assignment")),
        };
        self.bump();
        if op.is_none() && matches!(self.peek(), Tok::Ident(_)) && matches!(self.peek_at(1), Tok::Punct("=")) {
            // chained assignment: x = y = ... assigns the innermost first
            let (inner, ispan) = match self.peek().clone() {
                Tok::Ident(s) => (s, self.span()),
                _ => unreachable!(),
            };
            self.simple(out)?;
            let src = self.resolve(&inner, ispan)?;
            out.push(Stmt { kind: StmtKind::Assign { name: target, value: Expr::new(ExprKind::Var(src), ispan) }, span, id: 0 });
            return Ok(());
        }
        let rhs = self.expr()?;
        let value = match op {
            None => rhs,
            Some(op) => {
                let lhs = Expr::new(ExprKind::Var(target.clone()), nspan);
                Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span)
            }
        };
        out.push(Stmt { kind: StmtKind::Assign { name: target, value }, span, id: 0 });
        Ok(())
    }

    /// `x++` is `x = 1 + x`; `x--` is `x = x - 1`.
    fn increment(&self, name: &str, nspan: Span, inc: bool, span: Span) -> R<Stmt> {
        let target = self.resolve(name, nspan)?;
        let var = Expr::new(ExprKind::Var(target.clone()), nspan);
        let one = Expr::new(ExprKind::Lit(1), nspan);
        let value = if inc {
            Expr::new(ExprKind::Binary(BinOp::Add, Box::new(one), Box::new(var)), span)
        } else {
            Expr::new(ExprKind::Binary(BinOp::Sub, Box::new(var), Box::new(one)), span)
        };
        Ok(Stmt { kind: StmtKind::Assign { name: target, value }, span, id: 0 })
    }

    fn renumber(&mut self, stmts: &[Stmt]) -> Vec<Stmt> {
        stmts.iter().map(|s| self.renumber_stmt(s)).collect()
    }

    fn renumber_stmt(&mut self, s: &Stmt) -> Stmt {
        let kind = match &s.kind {
            StmtKind::Decl { name, ty, init } => {
                StmtKind::Decl { name: name.clone(), ty: *ty, init: init.as_ref().map(|e| self.renumber_expr(e)) }
            }
            StmtKind::Assign { name, value } => StmtKind::Assign { name: name.clone(), value: self.renumber_expr(value) },
            StmtKind::If { cond, then, els } => {
                StmtKind::If { cond: self.renumber_expr(cond), then: self.renumber(then), els: self.renumber(els) }
            }
            StmtKind::While { cond, body } => StmtKind::While { cond: self.renumber_expr(cond), body: self.renumber(body) },
            StmtKind::Assert(e) => StmtKind::Assert(self.renumber_expr(e)),
            StmtKind::Assume(e) => StmtKind::Assume(self.renumber_expr(e)),
        };
        Stmt { kind, span: s.span, id: 0 }
    }

    fn renumber_expr(&mut self, e: &Expr) -> Expr {
        let kind = match &e.kind {
            ExprKind::Nondet(t, _) => {
                let id = self.next_nondet;
                self.next_nondet += 1;
                ExprKind::Nondet(*t, id)
            }
            ExprKind::Unary(o, a) => ExprKind::Unary(*o, Box::new(self.renumber_expr(a))),
            ExprKind::Binary(o, a, b) => ExprKind::Binary(*o, Box::new(self.renumber_expr(a)), Box::new(self.renumber_expr(b))),
            ExprKind::Ternary(a, b, c) => ExprKind::Ternary(
                Box::new(self.renumber_expr(a)),
                Box::new(self.renumber_expr(b)),
                Box::new(self.renumber_expr(c)),
            ),
            ExprKind::Cast(t, a) => ExprKind::Cast(*t, Box::new(self.renumber_expr(a))),
            k => k.clone(),
        };
        Expr { kind, ty: e.ty, span: e.span }
    }

    // ---- expressions ------------------------------------------------------

    pub fn expr(&mut self) -> R<Expr> {
        let span = self.span();
        let c = self.binary(0)?;
        if self.eat("?") {
            let t = self.expr()?;
            self.expect(":")?;
            let e = self.expr()?;
            return Ok(Expr::new(ExprKind::Ternary(Box::new(c), Box::new(t), Box::new(e)), span));
        }
        if self.is("=") || matches!(self.peek(), Tok::Punct(p) if p.len() >= 2 && p.ends_with('=') && !["==", "!=", "<=", ">="].contains(p)) {
            return Err(self.unsupported(self.span(), "assignment inside an expression is"));
        }
        Ok(c)
    }

    fn binop_info(&self) -> Option<(BinOp, u8)> {
        let p = match self.peek() {
            Tok::Punct(p) => *p,
            _ => return None,
        };
        Some(match p {
            "||" => (BinOp::Or, 1),
            "&&" => (BinOp::And, 2),
            "|" => (BinOp::BitOr, 3),
            "^" => (BinOp::BitXor, 4),
            "&" => (BinOp::BitAnd, 5),
            "==" => (BinOp::Eq, 6),
            "!=" => (BinOp::Ne, 6),
            "<" => (BinOp::Lt, 7),
            "<=" => (BinOp::Le, 7),
            ">" => (BinOp::Gt, 7),
            ">=" => (BinOp::Ge, 7),
            "<<" => (BinOp::Shl, 8),
            ">>" => (BinOp::Shr, 8),
            "+" => (BinOp::Add, 9),
            "-" => (BinOp::Sub, 9),
            "*" => (BinOp::Mul, 10),
            "/" => (BinOp::Div, 10),
            "%" => (BinOp::Rem, 10),
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> R<Expr> {
        let mut lhs = self.unary()?;
        while let Some((op, prec)) = self.binop_info() {
            if prec <= min_prec {
                break;
            }
            let span = self.span();
            self.bump();
            let rhs = self.binary(prec)?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> R<Expr> {
        let span = self.span();
        if self.eat("-") {
            let e = self.unary()?;
            if let ExprKind::Lit(v) = e.kind {
                return Ok(Expr::new(ExprKind::Lit(-v), span));
            }
            return Ok(Expr::new(ExprKind::Unary(UnOp::Neg, Box::new(e)), span));
        }
        if self.eat("+") {
            return self.unary();
        }
        if self.eat("!") {
            let e = self.unary()?;
            return Ok(Expr::new(ExprKind::Unary(UnOp::Not, Box::new(e)), span));
        }
        if self.eat("~") {
            let e = self.unary()?;
            return Ok(Expr::new(ExprKind::Unary(UnOp::BitNot, Box::new(e)), span));
        }
        if self.is("++") || self.is("--") {
            return Err(self.unsupported(span, "increment inside an expression is"));
        }
        if self.is("*") || self.is("&") {
            return Err(self.unsupported(span, "pointers are"));
        }
        if self.is("(") && matches!(self.peek_at(1), Tok::Ident(s) if TYPE_WORDS.contains(&s.as_str())) {
            self.bump();
            let ty = self.parse_type()?;
            if self.is("*") {
                return Err(self.unsupported(self.span(), "pointers are"));
            }
            self.expect(")")?;
            let e = self.unary()?;
            return Ok(Expr::new(ExprKind::Cast(ty, Box::new(e)), span));
        }
        self.primary()
    }

    fn primary(&mut self) -> R<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(v, _) => {
                self.bump();
                Ok(Expr::new(ExprKind::Lit(v as i128), span))
            }
            Tok::Punct("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "true" => return Ok(Expr::new(ExprKind::Lit(1), span)),
                    "false" => return Ok(Expr::new(ExprKind::Lit(0), span)),
                    _ => {}
                }
                if self.is("(") {
                    if let Some(ty) = nondet_type(&name) {
                        self.bump();
                        self.expect(")")?;
                        let id = self.next_nondet;
                        self.next_nondet += 1;
                        return Ok(Expr::new(ExprKind::Nondet(ty, id), span));
                    }
                    return Err(self.unsupported(span, &format!("call of `{name}`: function calls are")));
                }
                if self.is("[") {
                    return Err(self.unsupported(span, "arrays are"));
                }
                let u = self.resolve(&name, span)?;
                Ok(Expr::new(ExprKind::Var(u), span))
            }
            _ => Err(self.unexpected("expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body(src: &str) -> Vec<Stmt> {
        parse(src).unwrap().body
    }

    #[test]
    fn empty_main() {
        assert!(body("void main(){}").is_empty());
        assert!(body("int main(void) { return 0; }").is_empty());
    }

    #[test]
    fn increment_lowers_to_one_plus_x() {
        let b = body("void main(){ unsigned x = 0; ++x; }");
        match &b[1].kind {
            StmtKind::Assign { name, value } => {
                assert_eq!(name, "x");
                assert!(matches!(&value.kind, ExprKind::Binary(BinOp::Add, l, _) if matches!(l.kind, ExprKind::Lit(1))));
            }
            k => panic!("{k:?}"),
        }
    }

    #[test]
    fn chained_assignment_assigns_innermost_first() {
        let b = body("void main(){ int x, y, z; x = y = z = 0; }");
        let names: Vec<&str> = b[3..]
            .iter()
            .map(|s| match &s.kind {
                StmtKind::Assign { name, .. } => name.as_str(),
                _ => "?",
            })
            .collect();
        assert_eq!(names, vec!["z", "y", "x"]);
    }

    #[test]
    fn for_loop_lowers_to_while() {
        let b = body("void main(){ for (int i = 0; i < 3; i++) { } }");
        assert!(matches!(b[0].kind, StmtKind::Decl { .. }));
        match &b[1].kind {
            StmtKind::While { body, .. } => assert_eq!(body.len(), 1),
            k => panic!("{k:?}"),
        }
    }

    #[test]
    fn sibling_scopes_rename() {
        let b = body("void main(){ { int i = 0; } { int i = 1; i = 2; } }");
        match &b[2].kind {
            StmtKind::Assign { name, .. } => assert_eq!(name, "i__1"),
            k => panic!("{k:?}"),
        }
    }

    #[test]
    fn diagnostics_have_distinct_codes() {
        let code = |s: &str| parse(s).unwrap_err().code;
        assert_eq!(code("void main() { x = 1; }"), ErrorCode::UnknownIdentifier);
        assert_eq!(code("void main() { int x; int x; }"), ErrorCode::Redeclaration);
        assert_eq!(code("void main() { int a[3]; }"), ErrorCode::Unsupported);
        assert_eq!(code("int f() { return 1; } void main() {}"), ErrorCode::Unsupported);
        assert_eq!(code("void main() { int x = ; }"), ErrorCode::Syntax);
        assert_eq!(code("void main() { while(1) { break; } }"), ErrorCode::Unsupported);
    }

    #[test]
    fn nondet_ids_are_unique() {
        let b = body("void main(){ int x = __VERIFIER_nondet_int(); int y = __VERIFIER_nondet_int(); }");
        let ids: Vec<u32> = b
            .iter()
            .map(|s| match &s.kind {
                StmtKind::Decl { init: Some(Expr { kind: ExprKind::Nondet(_, i), .. }), .. } => *i,
                _ => 99,
            })
            .collect();
        assert_eq!(ids, vec![0, 1]);
    }

    #[test]
    fn prototypes_are_skipped() {
        let b = body("extern int __VERIFIER_nondet_int(void);\nint __VERIFIER_nondet_int();\nvoid main() { assert(1); }");
        assert_eq!(b.len(), 1);
    }
}

//! Syntax tree of the input language.
//!
//! Parsing produces the tree with placeholder types; [`super::typecheck`]
//! fills in `Expr::ty` on every node. Equality ignores spans and types so
//! that trees from different sources can be compared structurally.

use crate::types::BvType;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    /// Arithmetic negation `-e`.
    Neg,
    /// Bitwise complement `~e`.
    BitNot,
    /// Logical negation `!e`.
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Shl,
    Shr,
    BitAnd,
    BitOr,
    BitXor,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne)
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }

    pub fn is_shift(self) -> bool {
        matches!(self, BinOp::Shl | BinOp::Shr)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Shl => "<<",
            BinOp::Shr => ">>",
            BinOp::BitAnd => "&",
            BinOp::BitOr => "|",
            BinOp::BitXor => "^",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    /// Integer literal; negative only after folding a unary minus.
    Lit(i128),
    Var(String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Ternary(Box<Expr>, Box<Expr>, Box<Expr>),
    Cast(BvType, Box<Expr>),
    /// Nondeterministic input of the given type. `id` is unique per
    /// occurrence in the program text.
    Nondet(BvType, u32),
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    /// Filled in by the type checker; `BOOL` placeholder before that.
    pub ty: BvType,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, ty: BvType::BOOL, span }
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        use ExprKind::*;
        match (&self.kind, &other.kind) {
            (Lit(a), Lit(b)) => a == b,
            (Var(a), Var(b)) => a == b,
            (Unary(o, a), Unary(p, b)) => o == p && a == b,
            (Binary(o, a, c), Binary(p, b, d)) => o == p && a == b && c == d,
            (Ternary(a, b, c), Ternary(d, e, f)) => a == d && b == e && c == f,
            (Cast(t, a), Cast(u, b)) => t == u && a == b,
            (Nondet(t, i), Nondet(u, j)) => t == u && i == j,
            _ => false,
        }
    }
}

#[derive(Clone, Debug)]
pub enum StmtKind {
    Decl { name: String, ty: BvType, init: Option<Expr> },
    Assign { name: String, value: Expr },
    If { cond: Expr, then: Vec<Stmt>, els: Vec<Stmt> },
    While { cond: Expr, body: Vec<Stmt> },
    Assert(Expr),
    Assume(Expr),
}

#[derive(Clone, Debug)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
    /// Pre-order index in the program, assigned after parsing.
    pub id: u32,
}

impl PartialEq for Stmt {
    fn eq(&self, other: &Self) -> bool {
        use StmtKind::*;
        match (&self.kind, &other.kind) {
            (Decl { name: a, ty: t, init: i }, Decl { name: b, ty: u, init: j }) => a == b && t == u && i == j,
            (Assign { name: a, value: v }, Assign { name: b, value: w }) => a == b && v == w,
            (If { cond: c, then: t, els: e }, If { cond: d, then: u, els: f }) => c == d && t == u && e == f,
            (While { cond: c, body: b }, While { cond: d, body: e }) => c == d && b == e,
            (Assert(a), Assert(b)) => a == b,
            (Assume(a), Assume(b)) => a == b,
            _ => false,
        }
    }
}

/// A whole program: the body of `main`, preceded by any global declarations.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    pub body: Vec<Stmt>,
}

impl Program {
    /// Declared variables in order of declaration.
    pub fn decls(&self) -> Vec<(String, BvType)> {
        let mut out = Vec::new();
        visit_stmts(&self.body, &mut |s| {
            if let StmtKind::Decl { name, ty, .. } = &s.kind {
                out.push((name.clone(), *ty));
            }
        });
        out
    }

    pub fn count_loops(&self) -> usize {
        let mut n = 0;
        visit_stmts(&self.body, &mut |s| {
            if let StmtKind::While { .. } = s.kind {
                n += 1;
            }
        });
        n
    }

    pub fn count_assertions(&self) -> usize {
        let mut n = 0;
        visit_stmts(&self.body, &mut |s| {
            if let StmtKind::Assert(_) = s.kind {
                n += 1;
            }
        });
        n
    }

    pub fn count_assumptions(&self) -> usize {
        let mut n = 0;
        visit_stmts(&self.body, &mut |s| {
            if let StmtKind::Assume(_) = s.kind {
                n += 1;
            }
        });
        n
    }

    /// Largest width of any declared variable.
    pub fn max_width(&self) -> u32 {
        self.decls().iter().map(|(_, t)| t.width).max().unwrap_or(0)
    }
}

/// Assign pre-order ids to every statement.
pub fn number_stmts(stmts: &mut [Stmt]) {
    fn go(stmts: &mut [Stmt], next: &mut u32) {
        for s in stmts {
            s.id = *next;
            *next += 1;
            match &mut s.kind {
                StmtKind::If { then, els, .. } => {
                    go(then, next);
                    go(els, next);
                }
                StmtKind::While { body, .. } => go(body, next),
                _ => {}
            }
        }
    }
    go(stmts, &mut 0);
}

/// Pre-order walk over statements, descending into nested blocks.
pub fn visit_stmts(stmts: &[Stmt], f: &mut dyn FnMut(&Stmt)) {
    for s in stmts {
        f(s);
        match &s.kind {
            StmtKind::If { then, els, .. } => {
                visit_stmts(then, f);
                visit_stmts(els, f);
            }
            StmtKind::While { body, .. } => visit_stmts(body, f),
            _ => {}
        }
    }
}

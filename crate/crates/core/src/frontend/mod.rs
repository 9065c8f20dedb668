//! Parsing, type checking, printing and concrete execution of the input
//! language, a small C subset: one `main` function over fixed-width integer
//! variables with `if`, `while`, `for`, `assert` and `assume`.

pub mod ast;
pub mod interp;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod typecheck;

use std::fmt;

use ast::{Program, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ErrorCode {
    Syntax,
    UnknownIdentifier,
    Unsupported,
    TypeMismatch,
    LiteralOverflow,
    Redeclaration,
}

impl ErrorCode {
    pub fn code(self) -> &'static str {
        match self {
            ErrorCode::Syntax => "E001",
            ErrorCode::UnknownIdentifier => "E002",
            ErrorCode::Unsupported => "E003",
            ErrorCode::TypeMismatch => "E004",
            ErrorCode::LiteralOverflow => "E005",
            ErrorCode::Redeclaration => "E006",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct Diagnostic {
    pub code: ErrorCode,
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: ErrorCode, span: Span, message: impl Into<String>) -> Self {
        Diagnostic { code, span, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: error[{}]: {}", self.span.line, self.span.col, self.code.code(), self.message)
    }
}

/// Parse without type checking.
pub fn parse(src: &str) -> Result<Program, Diagnostic> {
    parser::parse(src)
}

/// Parse and type check.
pub fn load(src: &str) -> Result<Program, Diagnostic> {
    let p = parser::parse(src)?;
    typecheck::typecheck(p)
}

use super::ast::Span;
use super::{Diagnostic, ErrorCode};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Integer literal value and whether it was written in hex or octal.
    Int(u128, bool),
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

// longest first so that maximal munch works by linear scan
const PUNCT: &[&str] = &[
    "<<=", ">>=", "==", "!=", "<=", ">=", "&&", "||", "<<", ">>", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "++",
    "--", "?", ":", ";", ",", "(", ")", "{", "}", "[", "]", "=", "<", ">", "+", "-", "*", "/", "%", "&", "|", "^", "~", "!",
];

pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let advance = |i: &mut usize, line: &mut u32, col: &mut u32, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            advance(&mut i, &mut line, &mut col, 2);
            loop {
                if i + 1 >= chars.len() {
                    return Err(Diagnostic::new(ErrorCode::Syntax, span, "unterminated comment"));
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    advance(&mut i, &mut line, &mut col, 2);
                    break;
                }
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        if c == '#' {
            return Err(Diagnostic::new(ErrorCode::Unsupported, span, "preprocessor directives are not supported"));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(&mut i, &mut line, &mut col, 1);
            }
            toks.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), span });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let text: String = chars[start..i].iter().collect();
            let digits = text.trim_end_matches(['u', 'U', 'l', 'L']);
            let bad = || Diagnostic::new(ErrorCode::Syntax, span, format!("malformed integer literal `{text}`"));
            let (radix, body, based) = if let Some(h) = digits.strip_prefix("0x").or_else(|| digits.strip_prefix("0X")) {
                (16, h, true)
            } else if digits.len() > 1 && digits.starts_with('0') {
                (8, &digits[1..], true)
            } else {
                (10, digits, false)
            };
            if body.is_empty() {
                return Err(bad());
            }
            let v = u128::from_str_radix(body, radix).map_err(|_| bad())?;
            if v > u64::MAX as u128 {
                return Err(Diagnostic::new(ErrorCode::LiteralOverflow, span, format!("literal `{text}` exceeds 64 bits")));
            }
            toks.push(Token { tok: Tok::Int(v, based), span });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        match PUNCT.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                advance(&mut i, &mut line, &mut col, p.len());
                toks.push(Token { tok: Tok::Punct(p), span });
            }
            None => {
                return Err(Diagnostic::new(ErrorCode::Syntax, span, format!("unexpected character `{c}`")));
            }
        }
    }
    toks.push(Token { tok: Tok::Eof, span: Span { line, col } });
    Ok(toks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_operators_and_literals() {
        let t = lex("x <<= 0x1F; y+=10u; // c\n/* d */ z").unwrap();
        let toks: Vec<Tok> = t.into_iter().map(|t| t.tok).collect();
        assert_eq!(
            toks,
            vec![
                Tok::Ident("x".into()),
                Tok::Punct("<<="),
                Tok::Int(31, true),
                Tok::Punct(";"),
                Tok::Ident("y".into()),
                Tok::Punct("+="),
                Tok::Int(10, false),
                Tok::Punct(";"),
                Tok::Ident("z".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn tracks_positions() {
        let t = lex("a\n  b").unwrap();
        assert_eq!(t[1].span, Span { line: 2, col: 3 });
    }

    #[test]
    fn rejects_stray_character() {
        let e = lex("x @ y").unwrap_err();
        assert_eq!(e.code, ErrorCode::Syntax);
        assert_eq!((e.span.line, e.span.col), (1, 3));
    }
}

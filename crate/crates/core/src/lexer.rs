use std::fmt;

use thiserror::Error;

/// 1-based source position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// Lower-case identifier (variables, axiom names).
    Lower(String),
    /// Upper-case identifier (constructors, families, classes, constants).
    Upper(String),
    Num(usize),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Lower(s) | Tok::Upper(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Kw(k) | Tok::Sym(k) => write!(f, "`{k}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

pub const KEYWORDS: &[&str] = &[
    "data", "const", "family", "axiom", "term", "forall", "assume", "in", "sym", "nth", "refl", "total", "partial",
    "class", "closed", "instance", "where", "type", "sig",
];

// Longest first so that prefixes do not win.
const SYMBOLS: &[&str] = &[
    "{-#", "#-}", "->", "=>", "::", "/\\", "|>", "(", ")", "[", "]", "{", "}", ",", ";", ":", ".", "~", "|", "=", "\\",
    "@", "<", ">", "*",
];

pub fn lex(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
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
    let starts = |i: usize, s: &str| s.chars().enumerate().all(|(k, c)| chars.get(i + k) == Some(&c));
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if starts(i, "--") {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        if starts(i, "{-") && !starts(i, "{-#") {
            let span = Span { line, col };
            let mut depth = 0usize;
            loop {
                if i >= chars.len() {
                    return Err(ParseError { span, message: "unterminated block comment".into() });
                }
                if starts(i, "{-") {
                    depth += 1;
                    advance(&mut i, &mut line, &mut col, 2);
                } else if starts(i, "-}") {
                    depth -= 1;
                    advance(&mut i, &mut line, &mut col, 2);
                    if depth == 0 {
                        break;
                    }
                } else {
                    advance(&mut i, &mut line, &mut col, 1);
                }
            }
            continue;
        }
        let span = Span { line, col };
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let word: String = chars[start..i].iter().collect();
            let tok = if let Some(k) = KEYWORDS.iter().find(|k| **k == word) {
                Tok::Kw(k)
            } else if c.is_uppercase() {
                Tok::Upper(word)
            } else {
                Tok::Lower(word)
            };
            out.push((tok, span));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let digits: String = chars[start..i].iter().collect();
            let n =
                digits.parse().map_err(|_| ParseError { span, message: format!("number `{digits}` is too large") })?;
            out.push((Tok::Num(n), span));
            continue;
        }
        match SYMBOLS.iter().find(|s| starts(i, s)) {
            Some(s) => {
                advance(&mut i, &mut line, &mut col, s.chars().count());
                out.push((Tok::Sym(s), span));
            }
            None => return Err(ParseError { span, message: format!("unexpected character `{c}`") }),
        }
    }
    out.push((Tok::Eof, Span { line, col }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_symbols_keywords_and_comments() {
        let toks: Vec<Tok> = lex("axiom ax : F { -- c\n forall a'. F a ~ a } {- x {- y -} -} /\\ |> {-# TOTAL F #-}")
            .unwrap()
            .into_iter()
            .map(|(t, _)| t)
            .collect();
        assert_eq!(
            toks,
            vec![
                Tok::Kw("axiom"),
                Tok::Lower("ax".into()),
                Tok::Sym(":"),
                Tok::Upper("F".into()),
                Tok::Sym("{"),
                Tok::Kw("forall"),
                Tok::Lower("a'".into()),
                Tok::Sym("."),
                Tok::Upper("F".into()),
                Tok::Lower("a".into()),
                Tok::Sym("~"),
                Tok::Lower("a".into()),
                Tok::Sym("}"),
                Tok::Sym("/\\"),
                Tok::Sym("|>"),
                Tok::Sym("{-#"),
                Tok::Upper("TOTAL".into()),
                Tok::Upper("F".into()),
                Tok::Sym("#-}"),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn reports_position_of_bad_character() {
        let e = lex("data T : 0\n  $").unwrap_err();
        assert_eq!(e.span, Span { line: 2, col: 3 });
    }
}

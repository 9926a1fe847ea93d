//! Tokenizer shared by the term and formula parsers.

use num_bigint::BigInt;
use thiserror::Error;

/// Parse failure with the byte offset of the offending input and the set of
/// token descriptions that would have been accepted there.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
pub struct SyntaxError {
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl SyntaxError {
    pub(crate) fn new(offset: usize, expected: &[&str], found: impl Into<String>) -> SyntaxError {
        SyntaxError {
            offset,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: found.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(BigInt),
    LParen,
    RParen,
    Comma,
    Dot,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    IffArrow,
    Forall,
    Exists,
    In,
    Subseteq,
    Sqrt,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::IffArrow => "`<->`".into(),
            Tok::Forall => "`forall`".into(),
            Tok::Exists => "`exists`".into(),
            Tok::In => "`in`".into(),
            Tok::Subseteq => "`subseteq`".into(),
            Tok::Sqrt => "`sqrt`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

/// A token plus the byte offset where it starts.
#[derive(Debug)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub offset: usize,
}

pub(crate) fn tokenize(input: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let bytes = input.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match b {
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b',' => {
                i += 1;
                Tok::Comma
            }
            b'.' => {
                i += 1;
                Tok::Dot
            }
            b'+' => {
                i += 1;
                Tok::Plus
            }
            b'*' => {
                i += 1;
                Tok::Star
            }
            b'/' => {
                i += 1;
                Tok::Slash
            }
            b'^' => {
                i += 1;
                Tok::Caret
            }
            b'=' => {
                i += 1;
                Tok::Eq
            }
            b'~' => {
                i += 1;
                Tok::Tilde
            }
            b'&' => {
                i += 1;
                Tok::Amp
            }
            b'|' => {
                i += 1;
                Tok::Pipe
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 2;
                    Tok::Arrow
                } else {
                    i += 1;
                    Tok::Minus
                }
            }
            b'<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    i += 3;
                    Tok::IffArrow
                } else if bytes.get(i + 1) == Some(&b'=') {
                    i += 2;
                    Tok::Le
                } else {
                    i += 1;
                    Tok::Lt
                }
            }
            b'>' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 2;
                    Tok::Ge
                } else {
                    i += 1;
                    Tok::Gt
                }
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &input[start..i];
                Tok::Int(text.parse::<BigInt>().expect("digits parse as integer"))
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                match &input[start..i] {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    "in" => Tok::In,
                    "subseteq" => Tok::Subseteq,
                    "sqrt" => Tok::Sqrt,
                    name => Tok::Ident(name.to_string()),
                }
            }
            other => {
                return Err(SyntaxError::new(
                    start,
                    &["a token"],
                    format!("`{}`", char::from(other)),
                ))
            }
        };
        toks.push(Spanned { tok, offset: start });
    }
    toks.push(Spanned {
        tok: Tok::Eof,
        offset: input.len(),
    });
    Ok(toks)
}

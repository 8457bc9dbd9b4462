use crate::error::{Error, Location, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    /// Decimal literal; only meaningful inside gate angle arguments.
    Float(String),
    Circuit,
    Def,
    For,
    In,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    DotDot,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(v) => format!("integer `{v}`"),
            Tok::Float(s) => format!("number `{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Tok::Circuit => "circuit",
            Tok::Def => "def",
            Tok::For => "for",
            Tok::In => "in",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::DotDot => "..",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Ident(_) => "identifier",
            Tok::Int(_) => "integer",
            Tok::Float(_) => "number",
            Tok::Eof => "end of input",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    /// Byte offsets into the source.
    pub start: u32,
    pub end: u32,
    pub loc: Location,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut line_start = 0usize;

    while i < bytes.len() {
        let c = bytes[i];
        let loc = Location {
            line,
            col: (src[line_start..i].chars().count() + 1) as u32,
        };
        if c == b'\n' {
            line += 1;
            i += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'#' || (c == b'/' && bytes.get(i + 1) == Some(&b'/')) {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            match &src[start..i] {
                "circuit" => Tok::Circuit,
                "def" => Tok::Def,
                "for" => Tok::For,
                "in" => Tok::In,
                word => Tok::Ident(word.to_string()),
            }
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            // `1.5` is a decimal, `0..n` is a range
            if bytes.get(i) == Some(&b'.') && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit()) {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                Tok::Float(src[start..i].to_string())
            } else {
                let text = &src[start..i];
                let v = text.parse::<i64>().map_err(|_| Error::Syntax {
                    loc,
                    expected: vec!["integer literal".into()],
                    found: format!("`{text}` (too large)"),
                })?;
                Tok::Int(v)
            }
        } else {
            i += 1;
            match c {
                b'{' => Tok::LBrace,
                b'}' => Tok::RBrace,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'[' => Tok::LBracket,
                b']' => Tok::RBracket,
                b';' => Tok::Semi,
                b',' => Tok::Comma,
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'/' => Tok::Slash,
                b'.' if bytes.get(i) == Some(&b'.') => {
                    i += 1;
                    Tok::DotDot
                }
                _ => {
                    let ch = src[start..].chars().next().unwrap_or('?');
                    return Err(Error::Syntax {
                        loc,
                        expected: vec!["token".into()],
                        found: format!("character `{ch}`"),
                    });
                }
            }
        };
        out.push(Token {
            tok,
            start: start as u32,
            end: i as u32,
            loc,
        });
    }
    let loc = Location {
        line,
        col: (src[line_start..].chars().count() + 1) as u32,
    };
    out.push(Token {
        tok: Tok::Eof,
        start: src.len() as u32,
        end: src.len() as u32,
        loc,
    });
    Ok(out)
}

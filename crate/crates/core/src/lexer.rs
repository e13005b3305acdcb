//! Hand-rolled lexer for `.mabs` sources.

use crate::diag::{Diagnostic, Span};
use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    // keywords
    Interface,
    Class,
    Implements,
    New,
    Cog,
    Skip,
    If,
    Else,
    Return,
    Await,
    Get,
    This,
    Null,
    True,
    False,
    TInt,
    TBool,
    TUnit,
    TFut,
    // punctuation
    LBrace,
    RBrace,
    LParen,
    RParen,
    Lt,
    Gt,
    Le,
    Ge,
    EqEq,
    Ne,
    Assign,
    Semi,
    Comma,
    Dot,
    Bang,
    Question,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    AndAnd,
    OrOr,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Interface => "interface",
            Tok::Class => "class",
            Tok::Implements => "implements",
            Tok::New => "new",
            Tok::Cog => "cog",
            Tok::Skip => "skip",
            Tok::If => "if",
            Tok::Else => "else",
            Tok::Return => "return",
            Tok::Await => "await",
            Tok::Get => "get",
            Tok::This => "this",
            Tok::Null => "null",
            Tok::True => "True",
            Tok::False => "False",
            Tok::TInt => "Int",
            Tok::TBool => "Bool",
            Tok::TUnit => "Unit",
            Tok::TFut => "Fut",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Le => "<=",
            Tok::Ge => ">=",
            Tok::EqEq => "==",
            Tok::Ne => "!=",
            Tok::Assign => "=",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Bang => "!",
            Tok::Question => "?",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Percent => "%",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => unreachable!(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Lexed {
    pub tok: Tok,
    pub span: Span,
}

pub fn lex(src: &str) -> Result<Vec<Lexed>, Diagnostic> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! span1 {
        ($start:expr, $len:expr, $l:expr, $c:expr) => {
            Span::new($start, $start + $len, $l, $c)
        };
    }

    while i < bytes.len() {
        let b = bytes[i];
        let (l0, c0) = (line, col);
        match b {
            b' ' | b'\t' | b'\r' => {
                i += 1;
                col += 1;
            }
            b'\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            b'/' if i + 1 < bytes.len() && bytes[i + 1] == b'/' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'/' if i + 1 < bytes.len() && bytes[i + 1] == b'*' => {
                let start = i;
                i += 2;
                col += 2;
                loop {
                    if i + 1 >= bytes.len() {
                        return Err(Diagnostic::parse(
                            "unterminated block comment",
                            span1!(start, 2, l0, c0),
                        ));
                    }
                    if bytes[i] == b'*' && bytes[i + 1] == b'/' {
                        i += 2;
                        col += 2;
                        break;
                    }
                    if bytes[i] == b'\n' {
                        line += 1;
                        col = 1;
                    } else {
                        col += 1;
                    }
                    i += 1;
                }
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &src[start..i];
                let n: BigInt = text.parse().expect("digits parse as BigInt");
                let len = i - start;
                out.push(Lexed { tok: Tok::Int(n), span: span1!(start, len, l0, c0) });
                col += len as u32;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let text = &src[start..i];
                let tok = match text {
                    "interface" => Tok::Interface,
                    "class" => Tok::Class,
                    "implements" => Tok::Implements,
                    "new" => Tok::New,
                    "cog" => Tok::Cog,
                    "skip" => Tok::Skip,
                    "if" => Tok::If,
                    "else" => Tok::Else,
                    "return" => Tok::Return,
                    "await" => Tok::Await,
                    "get" => Tok::Get,
                    "this" => Tok::This,
                    "null" => Tok::Null,
                    "true" | "True" => Tok::True,
                    "false" | "False" => Tok::False,
                    "Int" => Tok::TInt,
                    "Bool" => Tok::TBool,
                    "Unit" => Tok::TUnit,
                    "Fut" => Tok::TFut,
                    _ => Tok::Ident(text.to_string()),
                };
                let len = i - start;
                out.push(Lexed { tok, span: span1!(start, len, l0, c0) });
                col += len as u32;
            }
            _ => {
                let two = if i + 1 < bytes.len() { &src[i..i + 2] } else { "" };
                let (tok, len) = match two {
                    "==" => (Tok::EqEq, 2),
                    "!=" => (Tok::Ne, 2),
                    "<=" => (Tok::Le, 2),
                    ">=" => (Tok::Ge, 2),
                    "&&" => (Tok::AndAnd, 2),
                    "||" => (Tok::OrOr, 2),
                    _ => {
                        let t = match b {
                            b'{' => Tok::LBrace,
                            b'}' => Tok::RBrace,
                            b'(' => Tok::LParen,
                            b')' => Tok::RParen,
                            b'<' => Tok::Lt,
                            b'>' => Tok::Gt,
                            b'=' => Tok::Assign,
                            b';' => Tok::Semi,
                            b',' => Tok::Comma,
                            b'.' => Tok::Dot,
                            b'!' => Tok::Bang,
                            b'?' => Tok::Question,
                            b'+' => Tok::Plus,
                            b'-' => Tok::Minus,
                            b'*' => Tok::Star,
                            b'/' => Tok::Slash,
                            b'%' => Tok::Percent,
                            _ => {
                                return Err(Diagnostic::parse(
                                    format!("unexpected character `{}`", b as char),
                                    span1!(i, 1, l0, c0),
                                ))
                            }
                        };
                        (t, 1)
                    }
                };
                out.push(Lexed { tok, span: span1!(i, len, l0, c0) });
                i += len;
                col += len as u32;
            }
        }
    }
    out.push(Lexed { tok: Tok::Eof, span: Span::new(src.len(), src.len(), line, col) });
    Ok(out)
}

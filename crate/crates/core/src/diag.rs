//! Diagnostics for the frontend: parse errors, type errors, and the
//! language-restriction checks.

use serde::Serialize;
use std::fmt;

/// Byte span in the source, plus the 1-based line/column of its start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(start: usize, end: usize, line: u32, col: u32) -> Self {
        Span { start, end, line, col }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagKind {
    Parse,
    Type,
    Restriction,
}

/// Stable diagnostic codes. Each language restriction maps to its own code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagCode {
    // parse
    ParseError,
    // type errors
    UnknownName,
    TypeMismatch,
    DuplicateName,
    ArityMismatch,
    MissingReturn,
    // restrictions
    FutureFieldAssign,
    MultiImpl,
    AwaitOnBool,
    ReturnContinuation,
    RecursiveRecord,
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DiagCode::ParseError => "parse-error",
            DiagCode::UnknownName => "unknown-name",
            DiagCode::TypeMismatch => "type-mismatch",
            DiagCode::DuplicateName => "duplicate-name",
            DiagCode::ArityMismatch => "arity-mismatch",
            DiagCode::MissingReturn => "missing-return",
            DiagCode::FutureFieldAssign => "future-field-assign",
            DiagCode::MultiImpl => "multi-impl",
            DiagCode::AwaitOnBool => "await-on-bool",
            DiagCode::ReturnContinuation => "return-continuation",
            DiagCode::RecursiveRecord => "recursive-record",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub kind: DiagKind,
    pub code: DiagCode,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn parse(message: impl Into<String>, span: Span) -> Self {
        Diagnostic { kind: DiagKind::Parse, code: DiagCode::ParseError, message: message.into(), span }
    }

    pub fn ty(code: DiagCode, message: impl Into<String>, span: Span) -> Self {
        Diagnostic { kind: DiagKind::Type, code, message: message.into(), span }
    }

    pub fn restriction(code: DiagCode, message: impl Into<String>, span: Span) -> Self {
        Diagnostic { kind: DiagKind::Restriction, code, message: message.into(), span }
    }

    /// Renders as `file:line:col: code: message`.
    pub fn render(&self, file: &str) -> String {
        format!("{}:{}:{}: {}: {}", file, self.span.line, self.span.col, self.code, self.message)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.span.line, self.span.col, self.code, self.message)
    }
}

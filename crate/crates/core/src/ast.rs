//! Surface AST produced by the parser, before type checking.

use crate::diag::Span;
use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Int,
    Bool,
    Unit,
    Fut(Box<Type>),
    Interface(String),
}

impl Type {
    pub fn is_future(&self) -> bool {
        matches!(self, Type::Fut(_))
    }

    pub fn is_primitive(&self) -> bool {
        matches!(self, Type::Int | Type::Bool | Type::Unit)
    }
}

impl std::fmt::Display for Type {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Type::Int => write!(f, "Int"),
            Type::Bool => write!(f, "Bool"),
            Type::Unit => write!(f, "Unit"),
            Type::Fut(t) => write!(f, "Fut<{t}>"),
            Type::Interface(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub ty: Type,
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodSig {
    pub ret: Type,
    pub name: String,
    pub params: Vec<Param>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterfaceDecl {
    pub name: String,
    pub methods: Vec<MethodSig>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: String,
    /// Constructor parameters; they become fields initialised at creation.
    pub params: Vec<Param>,
    pub implements: Vec<String>,
    /// Extra fields, left unset at creation.
    pub fields: Vec<Param>,
    pub methods: Vec<MethodDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub sig: MethodSig,
    pub locals: Vec<Param>,
    pub body: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MainBlock {
    pub locals: Vec<Param>,
    pub body: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub interfaces: Vec<InterfaceDecl>,
    pub classes: Vec<ClassDecl>,
    pub main: MainBlock,
}

/// Assignment target: a plain name (local, parameter, or field of `this`)
/// or an explicit `this.x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Name(String, Span),
    This(String, Span),
}

impl Target {
    pub fn span(&self) -> Span {
        match self {
            Target::Name(_, s) | Target::This(_, s) => *s,
        }
    }
    pub fn name(&self) -> &str {
        match self {
            Target::Name(n, _) | Target::This(n, _) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Skip(Span),
    Assign(Target, ExprZ),
    /// A bare expression-with-side-effects in statement position, e.g. `h.get;`.
    Expr(ExprZ),
    If { cond: Expr, then_branch: Vec<Stmt>, else_branch: Vec<Stmt>, span: Span },
    Return(Expr, Span),
    Await(Expr, Span),
}

impl Stmt {
    pub fn span(&self) -> Span {
        match self {
            Stmt::Skip(s) | Stmt::Return(_, s) | Stmt::Await(_, s) => *s,
            Stmt::Assign(t, _) => t.span(),
            Stmt::Expr(z) => z.span(),
            Stmt::If { span, .. } => *span,
        }
    }
}

/// Expressions with side effects (`z` in the grammar).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprZ {
    Pure(Expr),
    SyncCall { recv: Expr, method: String, args: Vec<Expr>, span: Span },
    AsyncCall { recv: Expr, method: String, args: Vec<Expr>, span: Span },
    New { class: String, args: Vec<Expr>, cog: bool, span: Span },
    Get { fut: Expr, span: Span },
}

impl ExprZ {
    pub fn span(&self) -> Span {
        match self {
            ExprZ::Pure(e) => e.span(),
            ExprZ::SyncCall { span, .. }
            | ExprZ::AsyncCall { span, .. }
            | ExprZ::New { span, .. }
            | ExprZ::Get { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
}

/// Pure expressions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt, Span),
    Bool(bool, Span),
    Null(Span),
    This(Span),
    Var(String, Span),
    Field(String, Span),
    Bin { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr>, span: Span },
    Un { op: UnOp, expr: Box<Expr>, span: Span },
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Int(_, s)
            | Expr::Bool(_, s)
            | Expr::Null(s)
            | Expr::This(s)
            | Expr::Var(_, s)
            | Expr::Field(_, s) => *s,
            Expr::Bin { span, .. } | Expr::Un { span, .. } => *span,
        }
    }
}

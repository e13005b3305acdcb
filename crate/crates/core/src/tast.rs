//! Typed AST: every expression carries its type and every call site its
//! resolved implementing class.

use crate::ast::{BinOp, Param, Type, UnOp};
use num_bigint::BigInt;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedProgram {
    pub classes: Vec<TClass>,
    pub main: TMain,
    /// interface name -> index of the unique implementing class
    pub impl_of: BTreeMap<String, usize>,
    /// class name -> index
    pub class_idx: BTreeMap<String, usize>,
}

impl TypedProgram {
    pub fn class(&self, name: &str) -> &TClass {
        &self.classes[self.class_idx[name]]
    }

    pub fn method(&self, class: &str, method: &str) -> &TMethod {
        self.class(class).methods.iter().find(|m| m.name == method).expect("resolved method")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TClass {
    pub name: String,
    /// Constructor parameters; initialised fields.
    pub params: Vec<Param>,
    /// Additional fields, unset at creation.
    pub fields: Vec<Param>,
    pub interfaces: Vec<String>,
    pub methods: Vec<TMethod>,
}

impl TClass {
    /// All fields of the object, constructor parameters first.
    pub fn all_fields(&self) -> impl Iterator<Item = &Param> {
        self.params.iter().chain(self.fields.iter())
    }

    pub fn field_type(&self, name: &str) -> Option<&Type> {
        self.all_fields().find(|p| p.name == name).map(|p| &p.ty)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TMethod {
    pub name: String,
    pub ret: Type,
    pub params: Vec<Param>,
    pub locals: Vec<Param>,
    pub body: Vec<TStmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TMain {
    pub locals: Vec<Param>,
    pub body: Vec<TStmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TTarget {
    Local(String),
    Field(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TStmt {
    Skip,
    Assign(TTarget, TExprZ),
    Expr(TExprZ),
    If { cond: TExpr, then_branch: Vec<TStmt>, else_branch: Vec<TStmt> },
    Return(TExpr),
    Await(TExpr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TExprZ {
    Pure(TExpr),
    SyncCall { recv: TExpr, class: String, method: String, args: Vec<TExpr>, ret: Type },
    AsyncCall { recv: TExpr, class: String, method: String, args: Vec<TExpr>, ret: Type },
    New { class: String, args: Vec<TExpr>, cog: bool },
    Get { fut: TExpr, inner: Type },
}

impl TExprZ {
    /// The type of the whole right-hand side.
    pub fn ty(&self) -> Type {
        match self {
            TExprZ::Pure(e) => e.ty.clone(),
            TExprZ::SyncCall { ret, .. } => ret.clone(),
            TExprZ::AsyncCall { ret, .. } => Type::Fut(Box::new(ret.clone())),
            TExprZ::New { class, .. } => Type::Interface(class.clone()),
            TExprZ::Get { inner, .. } => inner.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TExpr {
    pub kind: TExprKind,
    pub ty: Type,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TExprKind {
    Int(BigInt),
    Bool(bool),
    Null,
    This,
    Local(String),
    Field(String),
    Bin { op: BinOp, lhs: Box<TExpr>, rhs: Box<TExpr> },
    Un { op: UnOp, expr: Box<TExpr> },
}

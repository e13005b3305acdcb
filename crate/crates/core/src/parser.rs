//! Recursive-descent parser for the mabs surface syntax.
//!
//! Grammar sketch (statements are `;`-terminated, declarations precede
//! statements inside every method body and the main block):
//!
//! ```text
//! program   ::= interface* class* main
//! interface ::= "interface" ID "{" (sig ";")* "}"
//! class     ::= "class" ID ["(" params ")"] ["implements" ID ("," ID)*]
//!               "{" (type ID ";")* method* "}"
//! method    ::= type ID "(" params ")" "{" (type ID ";")* stmt* "}"
//! main      ::= "{" (type ID ";")* stmt* "}"
//! stmt      ::= "skip" ";" | "await" expr "?" ";" | "return" expr ";"
//!             | "if" "(" expr ")" block ["else" block]
//!             | target "=" rhs ";" | rhs ";"
//! rhs       ::= "new" ["cog"] ID "(" args ")"
//!             | expr "!" ID "(" args ")" | expr "." ID "(" args ")"
//!             | expr "." "get" | expr
//! ```

use crate::ast::*;
use crate::diag::{Diagnostic, Span};
use crate::lexer::{lex, Lexed, Tok};

pub fn parse(src: &str) -> Result<Program, Diagnostic> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    p.program()
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Lexed {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<Span, Diagnostic> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            Err(Diagnostic::parse(
                format!("expected {}, found {}", tok.describe(), self.peek().describe()),
                self.span(),
            ))
        }
    }

    fn ident(&mut self) -> Result<(String, Span), Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            other => Err(Diagnostic::parse(
                format!("expected identifier, found {}", other.describe()),
                self.span(),
            )),
        }
    }

    fn program(&mut self) -> Result<Program, Diagnostic> {
        let mut interfaces = Vec::new();
        let mut classes = Vec::new();
        loop {
            match self.peek() {
                Tok::Interface => interfaces.push(self.interface()?),
                Tok::Class => classes.push(self.class()?),
                _ => break,
            }
        }
        let main = self.main_block()?;
        self.expect(Tok::Eof)?;
        Ok(Program { interfaces, classes, main })
    }

    fn interface(&mut self) -> Result<InterfaceDecl, Diagnostic> {
        let span = self.expect(Tok::Interface)?;
        let (name, _) = self.ident()?;
        self.expect(Tok::LBrace)?;
        let mut methods = Vec::new();
        while *self.peek() != Tok::RBrace {
            let sig = self.method_sig()?;
            self.expect(Tok::Semi)?;
            methods.push(sig);
        }
        self.expect(Tok::RBrace)?;
        Ok(InterfaceDecl { name, methods, span })
    }

    fn method_sig(&mut self) -> Result<MethodSig, Diagnostic> {
        let span = self.span();
        let ret = self.ty()?;
        let (name, _) = self.ident()?;
        self.expect(Tok::LParen)?;
        let params = self.params()?;
        self.expect(Tok::RParen)?;
        Ok(MethodSig { ret, name, params, span })
    }

    fn params(&mut self) -> Result<Vec<Param>, Diagnostic> {
        let mut out = Vec::new();
        if *self.peek() == Tok::RParen {
            return Ok(out);
        }
        loop {
            let span = self.span();
            let ty = self.ty()?;
            let (name, _) = self.ident()?;
            out.push(Param { ty, name, span });
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        Ok(out)
    }

    fn class(&mut self) -> Result<ClassDecl, Diagnostic> {
        let span = self.expect(Tok::Class)?;
        let (name, _) = self.ident()?;
        let mut params = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            params = self.params()?;
            self.expect(Tok::RParen)?;
        }
        let mut implements = Vec::new();
        if *self.peek() == Tok::Implements {
            self.bump();
            loop {
                let (i, _) = self.ident()?;
                implements.push(i);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::LBrace)?;
        let fields = self.decls()?;
        let mut methods = Vec::new();
        while *self.peek() != Tok::RBrace {
            methods.push(self.method()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(ClassDecl { name, params, implements, fields, methods, span })
    }

    fn method(&mut self) -> Result<MethodDecl, Diagnostic> {
        let span = self.span();
        let sig = self.method_sig()?;
        self.expect(Tok::LBrace)?;
        let locals = self.decls()?;
        let body = self.stmts()?;
        self.expect(Tok::RBrace)?;
        Ok(MethodDecl { sig, locals, body, span })
    }

    fn main_block(&mut self) -> Result<MainBlock, Diagnostic> {
        let span = self.expect(Tok::LBrace)?;
        let locals = self.decls()?;
        let body = self.stmts()?;
        self.expect(Tok::RBrace)?;
        Ok(MainBlock { locals, body, span })
    }

    /// Leading `type name ;` declarations. Parsed with backtracking: a
    /// type-and-identifier prefix that is not followed by `;` (e.g. a
    /// method signature, or a statement) is rolled back.
    fn decls(&mut self) -> Result<Vec<Param>, Diagnostic> {
        let mut out = Vec::new();
        loop {
            let save = self.pos;
            let span = self.span();
            let Ok(ty) = self.ty() else {
                self.pos = save;
                break;
            };
            let Ok((name, _)) = self.ident() else {
                self.pos = save;
                break;
            };
            if *self.peek() != Tok::Semi {
                self.pos = save;
                break;
            }
            self.bump();
            out.push(Param { ty, name, span });
        }
        Ok(out)
    }

    fn ty(&mut self) -> Result<Type, Diagnostic> {
        match self.peek().clone() {
            Tok::TInt => {
                self.bump();
                Ok(Type::Int)
            }
            Tok::TBool => {
                self.bump();
                Ok(Type::Bool)
            }
            Tok::TUnit => {
                self.bump();
                Ok(Type::Unit)
            }
            Tok::TFut => {
                self.bump();
                self.expect(Tok::Lt)?;
                let inner = self.ty()?;
                self.expect(Tok::Gt)?;
                Ok(Type::Fut(Box::new(inner)))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Type::Interface(name))
            }
            other => Err(Diagnostic::parse(
                format!("expected type, found {}", other.describe()),
                self.span(),
            )),
        }
    }

    fn stmts(&mut self) -> Result<Vec<Stmt>, Diagnostic> {
        let mut out = Vec::new();
        while !matches!(self.peek(), Tok::RBrace | Tok::Eof) {
            out.push(self.stmt()?);
        }
        Ok(out)
    }

    fn block(&mut self) -> Result<Vec<Stmt>, Diagnostic> {
        self.expect(Tok::LBrace)?;
        let body = self.stmts()?;
        self.expect(Tok::RBrace)?;
        Ok(body)
    }

    fn stmt(&mut self) -> Result<Stmt, Diagnostic> {
        match self.peek().clone() {
            Tok::Skip => {
                let span = self.bump().span;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Skip(span))
            }
            Tok::Await => {
                let span = self.bump().span;
                let e = self.expr()?;
                self.expect(Tok::Question)?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Await(e, span))
            }
            Tok::Return => {
                let span = self.bump().span;
                let e = self.expr()?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Return(e, span))
            }
            Tok::If => {
                let span = self.bump().span;
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                let then_branch = self.block()?;
                let else_branch = if *self.peek() == Tok::Else {
                    self.bump();
                    self.block()?
                } else {
                    Vec::new()
                };
                Ok(Stmt::If { cond, then_branch, else_branch, span })
            }
            Tok::Ident(name) if *self.peek2() == Tok::Assign => {
                let span = self.bump().span;
                self.bump(); // `=`
                let rhs = self.rhs()?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Assign(Target::Name(name, span), rhs))
            }
            Tok::This if *self.peek2() == Tok::Dot => {
                // Could be `this.x = rhs;` or a call/get on `this`.
                let save = self.pos;
                let span = self.bump().span; // this
                self.bump(); // .
                if let Tok::Ident(field) = self.peek().clone() {
                    if *self.peek2() == Tok::Assign {
                        self.bump(); // field
                        self.bump(); // =
                        let rhs = self.rhs()?;
                        self.expect(Tok::Semi)?;
                        return Ok(Stmt::Assign(Target::This(field, span), rhs));
                    }
                }
                self.pos = save;
                let z = self.rhs()?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Expr(z))
            }
            _ => {
                let z = self.rhs()?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Expr(z))
            }
        }
    }

    /// Right-hand side of an assignment (or a bare expression statement).
    fn rhs(&mut self) -> Result<ExprZ, Diagnostic> {
        if *self.peek() == Tok::New {
            let span = self.bump().span;
            let cog = if *self.peek() == Tok::Cog {
                self.bump();
                true
            } else {
                false
            };
            let (class, _) = self.ident()?;
            self.expect(Tok::LParen)?;
            let args = self.args()?;
            self.expect(Tok::RParen)?;
            return Ok(ExprZ::New { class, args, cog, span });
        }
        let e = self.expr()?;
        match self.peek() {
            Tok::Bang => {
                let span = self.bump().span;
                let (method, _) = self.ident()?;
                self.expect(Tok::LParen)?;
                let args = self.args()?;
                self.expect(Tok::RParen)?;
                Ok(ExprZ::AsyncCall { recv: e, method, args, span })
            }
            Tok::Dot => {
                let span = self.bump().span;
                if *self.peek() == Tok::Get {
                    self.bump();
                    Ok(ExprZ::Get { fut: e, span })
                } else {
                    let (method, _) = self.ident()?;
                    self.expect(Tok::LParen)?;
                    let args = self.args()?;
                    self.expect(Tok::RParen)?;
                    Ok(ExprZ::SyncCall { recv: e, method, args, span })
                }
            }
            _ => Ok(ExprZ::Pure(e)),
        }
    }

    fn args(&mut self) -> Result<Vec<Expr>, Diagnostic> {
        let mut out = Vec::new();
        if *self.peek() == Tok::RParen {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        Ok(out)
    }

    // Pure expression precedence: || < && < comparisons < + - < * / % < unary.
    fn expr(&mut self) -> Result<Expr, Diagnostic> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.and_expr()?;
        while *self.peek() == Tok::OrOr {
            let span = self.bump().span;
            let rhs = self.and_expr()?;
            lhs = Expr::Bin { op: BinOp::Or, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.cmp_expr()?;
        while *self.peek() == Tok::AndAnd {
            let span = self.bump().span;
            let rhs = self.cmp_expr()?;
            lhs = Expr::Bin { op: BinOp::And, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn cmp_expr(&mut self) -> Result<Expr, Diagnostic> {
        let lhs = self.add_expr()?;
        let op = match self.peek() {
            Tok::EqEq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return Ok(lhs),
        };
        let span = self.bump().span;
        let rhs = self.add_expr()?;
        Ok(Expr::Bin { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span })
    }

    fn add_expr(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            let span = self.bump().span;
            let rhs = self.mul_expr()?;
            lhs = Expr::Bin { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn mul_expr(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.unary_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                Tok::Percent => BinOp::Mod,
                _ => break,
            };
            let span = self.bump().span;
            let rhs = self.unary_expr()?;
            lhs = Expr::Bin { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn unary_expr(&mut self) -> Result<Expr, Diagnostic> {
        match self.peek() {
            Tok::Minus => {
                let span = self.bump().span;
                let e = self.unary_expr()?;
                Ok(Expr::Un { op: UnOp::Neg, expr: Box::new(e), span })
            }
            Tok::Bang => {
                let span = self.bump().span;
                let e = self.unary_expr()?;
                Ok(Expr::Un { op: UnOp::Not, expr: Box::new(e), span })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr, Diagnostic> {
        match self.peek().clone() {
            Tok::Int(n) => {
                let span = self.bump().span;
                Ok(Expr::Int(n, span))
            }
            Tok::True => {
                let span = self.bump().span;
                Ok(Expr::Bool(true, span))
            }
            Tok::False => {
                let span = self.bump().span;
                Ok(Expr::Bool(false, span))
            }
            Tok::Null => {
                let span = self.bump().span;
                Ok(Expr::Null(span))
            }
            Tok::This => {
                let span = self.bump().span;
                // `this.field` in pure position (not followed by `=`, which
                // the statement parser already intercepted).
                if *self.peek() == Tok::Dot {
                    if let Tok::Ident(f) = self.peek2().clone() {
                        // Leave `this.m(...)` and `this.get` to the rhs parser.
                        let after = &self.toks[(self.pos + 2).min(self.toks.len() - 1)].tok;
                        if *after != Tok::LParen {
                            self.bump(); // .
                            self.bump(); // field
                            return Ok(Expr::Field(f, span));
                        }
                    }
                }
                Ok(Expr::This(span))
            }
            Tok::Ident(name) => {
                let span = self.bump().span;
                Ok(Expr::Var(name, span))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            other => Err(Diagnostic::parse(
                format!("expected expression, found {}", other.describe()),
                self.span(),
            )),
        }
    }
}

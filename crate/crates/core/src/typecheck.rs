//! Type checker and language-restriction checks.
//!
//! Beyond ordinary typing this enforces the analyzer's input restrictions:
//! every interface has at most one implementing class, fields of future type
//! are never assigned, `await` takes a future (boolean guards are rejected),
//! and `return` statements have empty continuations.

use crate::ast::{self, BinOp, Expr, ExprZ, Param, Program, Stmt, Target, Type, UnOp};
use crate::diag::{DiagCode, Diagnostic, Span};
use crate::tast::*;
use std::collections::BTreeMap;

pub fn typecheck(p: &Program) -> Result<TypedProgram, Vec<Diagnostic>> {
    let mut cx = Checker::new(p);
    cx.collect();
    let classes = cx.check_classes();
    let main = cx.check_main();
    if cx.diags.is_empty() {
        let (classes, main) = (classes.unwrap(), main.unwrap());
        Ok(TypedProgram { classes, main, impl_of: cx.impl_of, class_idx: cx.class_idx })
    } else {
        Err(cx.diags)
    }
}

struct Checker<'a> {
    prog: &'a Program,
    diags: Vec<Diagnostic>,
    class_idx: BTreeMap<String, usize>,
    iface_idx: BTreeMap<String, usize>,
    impl_of: BTreeMap<String, usize>,
}

/// Variable scope inside a method body or the main block.
struct Scope<'a> {
    vars: BTreeMap<String, Type>,
    /// Enclosing class, absent in the main block.
    class: Option<&'a ast::ClassDecl>,
    ret: Option<Type>,
}

impl<'a> Checker<'a> {
    fn new(prog: &'a Program) -> Self {
        Checker {
            prog,
            diags: Vec::new(),
            class_idx: BTreeMap::new(),
            iface_idx: BTreeMap::new(),
            impl_of: BTreeMap::new(),
        }
    }

    fn err(&mut self, d: Diagnostic) {
        self.diags.push(d);
    }

    fn collect(&mut self) {
        for (i, iface) in self.prog.interfaces.iter().enumerate() {
            if self.iface_idx.insert(iface.name.clone(), i).is_some() {
                self.err(Diagnostic::ty(
                    DiagCode::DuplicateName,
                    format!("duplicate interface `{}`", iface.name),
                    iface.span,
                ));
            }
            let mut seen = BTreeMap::new();
            for m in &iface.methods {
                if seen.insert(m.name.clone(), ()).is_some() {
                    self.err(Diagnostic::ty(
                        DiagCode::DuplicateName,
                        format!("duplicate method `{}` in interface `{}`", m.name, iface.name),
                        m.span,
                    ));
                }
            }
        }
        for (i, class) in self.prog.classes.iter().enumerate() {
            if self.class_idx.insert(class.name.clone(), i).is_some()
                || self.iface_idx.contains_key(&class.name)
            {
                self.err(Diagnostic::ty(
                    DiagCode::DuplicateName,
                    format!("duplicate declaration `{}`", class.name),
                    class.span,
                ));
            }
            let mut seen = BTreeMap::new();
            for p in class.params.iter().chain(class.fields.iter()) {
                if seen.insert(p.name.clone(), ()).is_some() {
                    self.err(Diagnostic::ty(
                        DiagCode::DuplicateName,
                        format!("duplicate field `{}` in class `{}`", p.name, class.name),
                        p.span,
                    ));
                }
            }
            let mut mseen = BTreeMap::new();
            for m in &class.methods {
                if mseen.insert(m.sig.name.clone(), ()).is_some() {
                    self.err(Diagnostic::ty(
                        DiagCode::DuplicateName,
                        format!("duplicate method `{}` in class `{}`", m.sig.name, class.name),
                        m.span,
                    ));
                }
            }
            for iname in &class.implements {
                match self.iface_idx.get(iname) {
                    None => self.err(Diagnostic::ty(
                        DiagCode::UnknownName,
                        format!("unknown interface `{iname}`"),
                        class.span,
                    )),
                    Some(&ii) => {
                        if let Some(&prev) = self.impl_of.get(iname) {
                            if prev != i {
                                self.err(Diagnostic::restriction(
                                    DiagCode::MultiImpl,
                                    format!(
                                        "interface `{iname}` is implemented by both `{}` and `{}`; \
                                         at most one implementing class is allowed",
                                        self.prog.classes[prev].name, class.name
                                    ),
                                    class.span,
                                ));
                            }
                        } else {
                            self.impl_of.insert(iname.clone(), i);
                            // Signature conformance.
                            let iface = &self.prog.interfaces[ii];
                            for sig in &iface.methods {
                                match class.methods.iter().find(|m| m.sig.name == sig.name) {
                                    None => self.err(Diagnostic::ty(
                                        DiagCode::UnknownName,
                                        format!(
                                            "class `{}` does not implement method `{}` of `{iname}`",
                                            class.name, sig.name
                                        ),
                                        class.span,
                                    )),
                                    Some(m) => {
                                        let ok = m.sig.ret == sig.ret
                                            && m.sig.params.len() == sig.params.len()
                                            && m.sig
                                                .params
                                                .iter()
                                                .zip(&sig.params)
                                                .all(|(a, b)| a.ty == b.ty);
                                        if !ok {
                                            self.err(Diagnostic::ty(
                                                DiagCode::TypeMismatch,
                                                format!(
                                                    "method `{}` of `{}` does not match its \
                                                     signature in `{iname}`",
                                                    sig.name, class.name
                                                ),
                                                m.span,
                                            ));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        // Validate all mentioned types.
        let known = |cx: &Self, t: &Type| cx.type_known(t);
        let mut bad: Vec<(String, Span)> = Vec::new();
        for iface in &self.prog.interfaces {
            for m in &iface.methods {
                if !known(self, &m.ret) {
                    bad.push((m.ret.to_string(), m.span));
                }
                for p in &m.params {
                    if !known(self, &p.ty) {
                        bad.push((p.ty.to_string(), p.span));
                    }
                }
            }
        }
        for class in &self.prog.classes {
            for p in class.params.iter().chain(class.fields.iter()) {
                if !known(self, &p.ty) {
                    bad.push((p.ty.to_string(), p.span));
                }
            }
            for m in &class.methods {
                if !known(self, &m.sig.ret) {
                    bad.push((m.sig.ret.to_string(), m.span));
                }
                for p in m.sig.params.iter().chain(m.locals.iter()) {
                    if !known(self, &p.ty) {
                        bad.push((p.ty.to_string(), p.span));
                    }
                }
            }
        }
        for l in &self.prog.main.locals {
            if !known(self, &l.ty) {
                bad.push((l.ty.to_string(), l.span));
            }
        }
        for (t, s) in bad {
            self.err(Diagnostic::ty(DiagCode::UnknownName, format!("unknown type `{t}`"), s));
        }
    }

    fn type_known(&self, t: &Type) -> bool {
        match t {
            Type::Int | Type::Bool | Type::Unit => true,
            Type::Fut(inner) => self.type_known(inner),
            Type::Interface(n) => {
                self.iface_idx.contains_key(n) || self.class_idx.contains_key(n)
            }
        }
    }

    /// Resolves an object type (interface or class used as a type) to the
    /// implementing class declaration.
    fn resolve_class(&self, ty: &Type) -> Option<&'a ast::ClassDecl> {
        match ty {
            Type::Interface(n) => {
                if let Some(&ci) = self.class_idx.get(n) {
                    Some(&self.prog.classes[ci])
                } else {
                    self.impl_of.get(n).map(|&ci| &self.prog.classes[ci])
                }
            }
            _ => None,
        }
    }

    /// `from` may be stored in a slot of type `to`.
    fn assignable(&self, from: &Type, to: &Type) -> bool {
        if from == to {
            return true;
        }
        match (from, to) {
            (Type::Interface(c), Type::Interface(i)) => {
                match self.class_idx.get(c) {
                    Some(&ci) => self.prog.classes[ci].implements.iter().any(|x| x == i),
                    None => false,
                }
            }
            (Type::Fut(a), Type::Fut(b)) => self.assignable(a, b),
            _ => false,
        }
    }

    fn check_classes(&mut self) -> Option<Vec<TClass>> {
        let mut out = Vec::new();
        for class in &self.prog.classes {
            let mut methods = Vec::new();
            for m in &class.methods {
                let mut vars = BTreeMap::new();
                for p in m.sig.params.iter().chain(m.locals.iter()) {
                    if vars.insert(p.name.clone(), p.ty.clone()).is_some() {
                        self.err(Diagnostic::ty(
                            DiagCode::DuplicateName,
                            format!("duplicate variable `{}` in method `{}`", p.name, m.sig.name),
                            p.span,
                        ));
                    }
                    // Locals and fields share the runtime store namespaces
                    // disjointly, so shadowing a field is rejected.
                    if class.params.iter().chain(class.fields.iter()).any(|f| f.name == p.name) {
                        self.err(Diagnostic::ty(
                            DiagCode::DuplicateName,
                            format!(
                                "variable `{}` of method `{}` shadows a field of `{}`",
                                p.name, m.sig.name, class.name
                            ),
                            p.span,
                        ));
                    }
                }
                let mut scope =
                    Scope { vars, class: Some(class), ret: Some(m.sig.ret.clone()) };
                let body = self.check_block(&m.body, &mut scope, true);
                self.check_return_continuations(&m.body);
                if m.sig.ret != Type::Unit && !Self::always_returns(&m.body) {
                    self.err(Diagnostic::ty(
                        DiagCode::MissingReturn,
                        format!(
                            "method `{}` of `{}` must return a value on every path",
                            m.sig.name, class.name
                        ),
                        m.span,
                    ));
                }
                methods.push(TMethod {
                    name: m.sig.name.clone(),
                    ret: m.sig.ret.clone(),
                    params: m.sig.params.clone(),
                    locals: m.locals.clone(),
                    body,
                });
            }
            out.push(TClass {
                name: class.name.clone(),
                params: class.params.clone(),
                fields: class.fields.clone(),
                interfaces: class.implements.clone(),
                methods,
            });
        }
        Some(out)
    }

    fn check_main(&mut self) -> Option<TMain> {
        let mut vars = BTreeMap::new();
        for l in &self.prog.main.locals {
            if vars.insert(l.name.clone(), l.ty.clone()).is_some() {
                self.err(Diagnostic::ty(
                    DiagCode::DuplicateName,
                    format!("duplicate variable `{}` in main block", l.name),
                    l.span,
                ));
            }
        }
        let mut scope = Scope { vars, class: None, ret: None };
        let body = self.check_block(&self.prog.main.body, &mut scope, true);
        self.check_return_continuations(&self.prog.main.body);
        Some(TMain { locals: self.prog.main.locals.clone(), body })
    }

    /// `return` must have an empty continuation: nothing may follow it,
    /// and an `if` containing a return in a non-tail position is rejected.
    fn check_return_continuations(&mut self, stmts: &[Stmt]) {
        for (i, s) in stmts.iter().enumerate() {
            let tail = i + 1 == stmts.len();
            match s {
                Stmt::Return(_, span) if !tail => {
                    self.err(Diagnostic::restriction(
                        DiagCode::ReturnContinuation,
                        "return statements must have empty continuations",
                        *span,
                    ));
                }
                Stmt::If { then_branch, else_branch, span, .. } => {
                    if tail {
                        self.check_return_continuations(then_branch);
                        self.check_return_continuations(else_branch);
                    } else if Self::contains_return(then_branch)
                        || Self::contains_return(else_branch)
                    {
                        self.err(Diagnostic::restriction(
                            DiagCode::ReturnContinuation,
                            "return inside a conditional followed by further statements",
                            *span,
                        ));
                    }
                }
                _ => {}
            }
        }
    }

    fn contains_return(stmts: &[Stmt]) -> bool {
        stmts.iter().any(|s| match s {
            Stmt::Return(..) => true,
            Stmt::If { then_branch, else_branch, .. } => {
                Self::contains_return(then_branch) || Self::contains_return(else_branch)
            }
            _ => false,
        })
    }

    fn always_returns(stmts: &[Stmt]) -> bool {
        match stmts.last() {
            Some(Stmt::Return(..)) => true,
            Some(Stmt::If { then_branch, else_branch, .. }) => {
                Self::always_returns(then_branch) && Self::always_returns(else_branch)
            }
            _ => false,
        }
    }

    fn check_block(&mut self, stmts: &[Stmt], scope: &mut Scope<'a>, _tail: bool) -> Vec<TStmt> {
        stmts.iter().filter_map(|s| self.check_stmt(s, scope)).collect()
    }

    fn check_stmt(&mut self, s: &Stmt, scope: &mut Scope<'a>) -> Option<TStmt> {
        match s {
            Stmt::Skip(_) => Some(TStmt::Skip),
            Stmt::Assign(target, rhs) => {
                let (tt, tty) = self.resolve_target(target, scope)?;
                let trhs = self.check_exprz(rhs, scope)?;
                let rty = trhs.ty();
                if !self.assignable(&rty, &tty) && !self.null_ok(rhs, &tty) {
                    self.err(Diagnostic::ty(
                        DiagCode::TypeMismatch,
                        format!("cannot assign `{rty}` to `{}` of type `{tty}`", target.name()),
                        target.span(),
                    ));
                    return None;
                }
                if matches!(tt, TTarget::Field(_)) && tty.is_future() {
                    self.err(Diagnostic::restriction(
                        DiagCode::FutureFieldAssign,
                        format!("assignment to field `{}` of future type is not allowed", target.name()),
                        target.span(),
                    ));
                    return None;
                }
                Some(TStmt::Assign(tt, trhs))
            }
            Stmt::Expr(z) => Some(TStmt::Expr(self.check_exprz(z, scope)?)),
            Stmt::If { cond, then_branch, else_branch, span } => {
                let c = self.check_expr(cond, scope)?;
                if c.ty != Type::Bool {
                    self.err(Diagnostic::ty(
                        DiagCode::TypeMismatch,
                        format!("if condition must be Bool, found `{}`", c.ty),
                        *span,
                    ));
                }
                let t = self.check_block(then_branch, scope, false);
                let e = self.check_block(else_branch, scope, false);
                Some(TStmt::If { cond: c, then_branch: t, else_branch: e })
            }
            Stmt::Return(e, span) => {
                let te = self.check_expr(e, scope)?;
                if let Some(ret) = scope.ret.clone() {
                    let null_ok = matches!(e, Expr::Null(_)) && self.nullable(&ret);
                    if !self.assignable(&te.ty, &ret) && !null_ok {
                        self.err(Diagnostic::ty(
                            DiagCode::TypeMismatch,
                            format!("return type mismatch: expected `{ret}`, found `{}`", te.ty),
                            *span,
                        ));
                    }
                }
                Some(TStmt::Return(te))
            }
            Stmt::Await(e, span) => {
                let te = self.check_expr(e, scope)?;
                match &te.ty {
                    Type::Fut(_) => Some(TStmt::Await(te)),
                    Type::Bool => {
                        self.err(Diagnostic::restriction(
                            DiagCode::AwaitOnBool,
                            "await on a boolean guard is not supported; await a future",
                            *span,
                        ));
                        None
                    }
                    other => {
                        self.err(Diagnostic::ty(
                            DiagCode::TypeMismatch,
                            format!("await expects a future, found `{other}`"),
                            *span,
                        ));
                        None
                    }
                }
            }
        }
    }

    fn nullable(&self, t: &Type) -> bool {
        matches!(t, Type::Interface(_))
    }

    fn null_ok(&self, rhs: &ExprZ, tty: &Type) -> bool {
        matches!(rhs, ExprZ::Pure(Expr::Null(_))) && self.nullable(tty)
    }

    fn resolve_target(&mut self, t: &Target, scope: &Scope<'a>) -> Option<(TTarget, Type)> {
        match t {
            Target::Name(n, span) => {
                if let Some(ty) = scope.vars.get(n) {
                    return Some((TTarget::Local(n.clone()), ty.clone()));
                }
                if let Some(class) = scope.class {
                    if let Some(p) =
                        class.params.iter().chain(class.fields.iter()).find(|p| p.name == *n)
                    {
                        return Some((TTarget::Field(n.clone()), p.ty.clone()));
                    }
                }
                self.err(Diagnostic::ty(
                    DiagCode::UnknownName,
                    format!("unknown variable `{n}`"),
                    *span,
                ));
                None
            }
            Target::This(f, span) => {
                let Some(class) = scope.class else {
                    self.err(Diagnostic::ty(
                        DiagCode::UnknownName,
                        "`this` is not available in the main block",
                        *span,
                    ));
                    return None;
                };
                match class.params.iter().chain(class.fields.iter()).find(|p| p.name == *f) {
                    Some(p) => Some((TTarget::Field(f.clone()), p.ty.clone())),
                    None => {
                        self.err(Diagnostic::ty(
                            DiagCode::UnknownName,
                            format!("class `{}` has no field `{f}`", class.name),
                            *span,
                        ));
                        None
                    }
                }
            }
        }
    }

    fn check_exprz(&mut self, z: &ExprZ, scope: &Scope<'a>) -> Option<TExprZ> {
        match z {
            ExprZ::Pure(e) => Some(TExprZ::Pure(self.check_expr(e, scope)?)),
            ExprZ::SyncCall { recv, method, args, span } => {
                let (r, class, m) = self.check_call(recv, method, args, scope, *span)?;
                Some(TExprZ::SyncCall { recv: r.0, class, method: method.clone(), args: r.1, ret: m })
            }
            ExprZ::AsyncCall { recv, method, args, span } => {
                let (r, class, m) = self.check_call(recv, method, args, scope, *span)?;
                Some(TExprZ::AsyncCall { recv: r.0, class, method: method.clone(), args: r.1, ret: m })
            }
            ExprZ::New { class, args, cog, span } => {
                let Some(&ci) = self.class_idx.get(class) else {
                    self.err(Diagnostic::ty(
                        DiagCode::UnknownName,
                        format!("unknown class `{class}`"),
                        *span,
                    ));
                    return None;
                };
                let decl = &self.prog.classes[ci];
                let targs = self.check_args(args, &decl.params.clone(), scope, *span)?;
                Some(TExprZ::New { class: class.clone(), args: targs, cog: *cog })
            }
            ExprZ::Get { fut, span } => {
                let tf = self.check_expr(fut, scope)?;
                match tf.ty.clone() {
                    Type::Fut(inner) => Some(TExprZ::Get { fut: tf, inner: *inner }),
                    other => {
                        self.err(Diagnostic::ty(
                            DiagCode::TypeMismatch,
                            format!("get expects a future, found `{other}`"),
                            *span,
                        ));
                        None
                    }
                }
            }
        }
    }

    #[allow(clippy::type_complexity)]
    fn check_call(
        &mut self,
        recv: &Expr,
        method: &str,
        args: &[Expr],
        scope: &Scope<'a>,
        span: Span,
    ) -> Option<((TExpr, Vec<TExpr>), String, Type)> {
        let trecv = self.check_expr(recv, scope)?;
        let class = match self.resolve_class(&trecv.ty) {
            Some(c) => c,
            None => {
                self.err(Diagnostic::ty(
                    DiagCode::TypeMismatch,
                    format!("cannot call methods on a value of type `{}`", trecv.ty),
                    span,
                ));
                return None;
            }
        };
        let Some(m) = class.methods.iter().find(|m| m.sig.name == method) else {
            self.err(Diagnostic::ty(
                DiagCode::UnknownName,
                format!("class `{}` has no method `{method}`", class.name),
                span,
            ));
            return None;
        };
        let (cname, params, ret) = (class.name.clone(), m.sig.params.clone(), m.sig.ret.clone());
        let targs = self.check_args(args, &params, scope, span)?;
        Some(((trecv, targs), cname, ret))
    }

    fn check_args(
        &mut self,
        args: &[Expr],
        params: &[Param],
        scope: &Scope<'a>,
        span: Span,
    ) -> Option<Vec<TExpr>> {
        if args.len() != params.len() {
            self.err(Diagnostic::ty(
                DiagCode::ArityMismatch,
                format!("expected {} argument(s), found {}", params.len(), args.len()),
                span,
            ));
            return None;
        }
        let mut out = Vec::new();
        for (a, p) in args.iter().zip(params) {
            let ta = self.check_expr(a, scope)?;
            let null_ok = matches!(a, Expr::Null(_)) && self.nullable(&p.ty);
            if !self.assignable(&ta.ty, &p.ty) && !null_ok {
                self.err(Diagnostic::ty(
                    DiagCode::TypeMismatch,
                    format!("argument `{}` expects `{}`, found `{}`", p.name, p.ty, ta.ty),
                    a.span(),
                ));
                return None;
            }
            out.push(ta);
        }
        Some(out)
    }

    fn check_expr(&mut self, e: &Expr, scope: &Scope<'a>) -> Option<TExpr> {
        match e {
            Expr::Int(n, _) => Some(TExpr { kind: TExprKind::Int(n.clone()), ty: Type::Int }),
            Expr::Bool(b, _) => Some(TExpr { kind: TExprKind::Bool(*b), ty: Type::Bool }),
            Expr::Null(span) => {
                // Bare `null` in a context that fixes no type keeps a
                // placeholder interface type; assignability treats it leniently.
                let _ = span;
                Some(TExpr { kind: TExprKind::Null, ty: Type::Interface("<null>".into()) })
            }
            Expr::This(span) => {
                let Some(class) = scope.class else {
                    self.err(Diagnostic::ty(
                        DiagCode::UnknownName,
                        "`this` is not available in the main block",
                        *span,
                    ));
                    return None;
                };
                Some(TExpr { kind: TExprKind::This, ty: Type::Interface(class.name.clone()) })
            }
            Expr::Var(n, span) => {
                if let Some(ty) = scope.vars.get(n) {
                    return Some(TExpr { kind: TExprKind::Local(n.clone()), ty: ty.clone() });
                }
                if let Some(class) = scope.class {
                    if let Some(p) =
                        class.params.iter().chain(class.fields.iter()).find(|p| p.name == *n)
                    {
                        return Some(TExpr { kind: TExprKind::Field(n.clone()), ty: p.ty.clone() });
                    }
                }
                self.err(Diagnostic::ty(
                    DiagCode::UnknownName,
                    format!("unknown variable `{n}`"),
                    *span,
                ));
                None
            }
            Expr::Field(f, span) => {
                let Some(class) = scope.class else {
                    self.err(Diagnostic::ty(
                        DiagCode::UnknownName,
                        "`this` is not available in the main block",
                        *span,
                    ));
                    return None;
                };
                match class.params.iter().chain(class.fields.iter()).find(|p| p.name == *f) {
                    Some(p) => Some(TExpr { kind: TExprKind::Field(f.clone()), ty: p.ty.clone() }),
                    None => {
                        self.err(Diagnostic::ty(
                            DiagCode::UnknownName,
                            format!("class `{}` has no field `{f}`", class.name),
                            *span,
                        ));
                        None
                    }
                }
            }
            Expr::Bin { op, lhs, rhs, span } => {
                let l = self.check_expr(lhs, scope)?;
                let r = self.check_expr(rhs, scope)?;
                let ty = match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod => {
                        self.expect_ty(&l, Type::Int, *span)?;
                        self.expect_ty(&r, Type::Int, *span)?;
                        Type::Int
                    }
                    BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                        self.expect_ty(&l, Type::Int, *span)?;
                        self.expect_ty(&r, Type::Int, *span)?;
                        Type::Bool
                    }
                    BinOp::And | BinOp::Or => {
                        self.expect_ty(&l, Type::Bool, *span)?;
                        self.expect_ty(&r, Type::Bool, *span)?;
                        Type::Bool
                    }
                    BinOp::Eq | BinOp::Ne => {
                        let comparable = self.assignable(&l.ty, &r.ty)
                            || self.assignable(&r.ty, &l.ty)
                            || matches!(l.kind, TExprKind::Null)
                            || matches!(r.kind, TExprKind::Null);
                        if !comparable {
                            self.err(Diagnostic::ty(
                                DiagCode::TypeMismatch,
                                format!("cannot compare `{}` with `{}`", l.ty, r.ty),
                                *span,
                            ));
                            return None;
                        }
                        Type::Bool
                    }
                };
                Some(TExpr {
                    kind: TExprKind::Bin { op: *op, lhs: Box::new(l), rhs: Box::new(r) },
                    ty,
                })
            }
            Expr::Un { op, expr, span } => {
                let inner = self.check_expr(expr, scope)?;
                let ty = match op {
                    UnOp::Neg => {
                        self.expect_ty(&inner, Type::Int, *span)?;
                        Type::Int
                    }
                    UnOp::Not => {
                        self.expect_ty(&inner, Type::Bool, *span)?;
                        Type::Bool
                    }
                };
                Some(TExpr { kind: TExprKind::Un { op: *op, expr: Box::new(inner) }, ty })
            }
        }
    }

    fn expect_ty(&mut self, e: &TExpr, want: Type, span: Span) -> Option<()> {
        if e.ty == want {
            Some(())
        } else {
            self.err(Diagnostic::ty(
                DiagCode::TypeMismatch,
                format!("expected `{want}`, found `{}`", e.ty),
                span,
            ));
            None
        }
    }
}

//! Pretty-printer for surface programs. `parse(pretty(parse(s)))` yields the
//! same AST as `parse(s)` up to spans.

use crate::ast::*;
use std::fmt::Write;

pub fn pretty(p: &Program) -> String {
    let mut out = String::new();
    for i in &p.interfaces {
        let _ = writeln!(out, "interface {} {{", i.name);
        for m in &i.methods {
            let _ = writeln!(out, "  {};", sig(m));
        }
        let _ = writeln!(out, "}}");
    }
    for c in &p.classes {
        let _ = write!(out, "class {}", c.name);
        if !c.params.is_empty() {
            let _ = write!(out, " ({})", params(&c.params));
        }
        if !c.implements.is_empty() {
            let _ = write!(out, " implements {}", c.implements.join(", "));
        }
        let _ = writeln!(out, " {{");
        for f in &c.fields {
            let _ = writeln!(out, "  {} {};", f.ty, f.name);
        }
        for m in &c.methods {
            let _ = writeln!(out, "  {} {{", sig(&m.sig));
            for l in &m.locals {
                let _ = writeln!(out, "    {} {};", l.ty, l.name);
            }
            for s in &m.body {
                stmt(&mut out, s, 2);
            }
            let _ = writeln!(out, "  }}");
        }
        let _ = writeln!(out, "}}");
    }
    let _ = writeln!(out, "{{");
    for l in &p.main.locals {
        let _ = writeln!(out, "  {} {};", l.ty, l.name);
    }
    for s in &p.main.body {
        stmt(&mut out, s, 1);
    }
    let _ = writeln!(out, "}}");
    out
}

fn sig(m: &MethodSig) -> String {
    format!("{} {}({})", m.ret, m.name, params(&m.params))
}

fn params(ps: &[Param]) -> String {
    ps.iter().map(|p| format!("{} {}", p.ty, p.name)).collect::<Vec<_>>().join(", ")
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    let pad = "  ".repeat(depth);
    match s {
        Stmt::Skip(_) => {
            let _ = writeln!(out, "{pad}skip;");
        }
        Stmt::Assign(t, z) => {
            let tgt = match t {
                Target::Name(n, _) => n.clone(),
                Target::This(f, _) => format!("this.{f}"),
            };
            let _ = writeln!(out, "{pad}{tgt} = {};", exprz(z));
        }
        Stmt::Expr(z) => {
            let _ = writeln!(out, "{pad}{};", exprz(z));
        }
        Stmt::If { cond, then_branch, else_branch, .. } => {
            let _ = writeln!(out, "{pad}if ({}) {{", expr(cond));
            for st in then_branch {
                stmt(out, st, depth + 1);
            }
            if else_branch.is_empty() {
                let _ = writeln!(out, "{pad}}}");
            } else {
                let _ = writeln!(out, "{pad}}} else {{");
                for st in else_branch {
                    stmt(out, st, depth + 1);
                }
                let _ = writeln!(out, "{pad}}}");
            }
        }
        Stmt::Return(e, _) => {
            let _ = writeln!(out, "{pad}return {};", expr(e));
        }
        Stmt::Await(e, _) => {
            let _ = writeln!(out, "{pad}await {}?;", expr(e));
        }
    }
}

fn exprz(z: &ExprZ) -> String {
    match z {
        ExprZ::Pure(e) => expr(e),
        ExprZ::SyncCall { recv, method, args, .. } => {
            format!("{}.{method}({})", expr(recv), args.iter().map(expr).collect::<Vec<_>>().join(", "))
        }
        ExprZ::AsyncCall { recv, method, args, .. } => {
            format!("{}!{method}({})", expr(recv), args.iter().map(expr).collect::<Vec<_>>().join(", "))
        }
        ExprZ::New { class, args, cog, .. } => {
            let kw = if *cog { "new cog" } else { "new" };
            format!("{kw} {class}({})", args.iter().map(expr).collect::<Vec<_>>().join(", "))
        }
        ExprZ::Get { fut, .. } => format!("{}.get", expr(fut)),
    }
}

fn expr(e: &Expr) -> String {
    match e {
        Expr::Int(n, _) => n.to_string(),
        Expr::Bool(b, _) => if *b { "true" } else { "false" }.to_string(),
        Expr::Null(_) => "null".to_string(),
        Expr::This(_) => "this".to_string(),
        Expr::Var(n, _) => n.clone(),
        Expr::Field(f, _) => format!("this.{f}"),
        Expr::Bin { op, lhs, rhs, .. } => {
            format!("({} {} {})", expr(lhs), binop(*op), expr(rhs))
        }
        Expr::Un { op, expr: inner, .. } => match op {
            UnOp::Neg => format!("(-{})", expr(inner)),
            UnOp::Not => format!("(!{})", expr(inner)),
        },
    }
}

fn binop(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => "+",
        BinOp::Sub => "-",
        BinOp::Mul => "*",
        BinOp::Div => "/",
        BinOp::Mod => "%",
        BinOp::Eq => "==",
        BinOp::Ne => "!=",
        BinOp::Lt => "<",
        BinOp::Le => "<=",
        BinOp::Gt => ">",
        BinOp::Ge => ">=",
        BinOp::And => "&&",
        BinOp::Or => "||",
    }
}

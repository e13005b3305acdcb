//! Future records, behavioral contracts, method contracts, and the
//! constraint language shared by the inference engine and both analysis
//! back-ends.

use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// A cog name: the distinguished `start` cog of the main block, or a
/// numbered variable. Header variables play the role of bound names; the
/// variables introduced by `new cog` stay free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Cog {
    Start,
    Var(u32),
}

impl fmt::Display for Cog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cog::Start => write!(f, "start"),
            Cog::Var(n) => write!(f, "c{n}"),
        }
    }
}

/// A future record: the abstract shape of a value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rec {
    /// The dummy value `_` for primitives.
    Unit,
    /// A record variable.
    Var(u32),
    /// An object record `[cog: c, x1: r1, ...]`.
    Obj { cog: Cog, fields: Vec<(String, Rec)> },
    /// `c ~> r`: reading `r` requires control of cog `c` (a method result).
    Awaited { cog: Cog, inner: Box<Rec> },
}

impl Rec {
    pub fn obj(cog: Cog, fields: Vec<(String, Rec)>) -> Rec {
        Rec::Obj { cog, fields }
    }

    pub fn awaited(cog: Cog, inner: Rec) -> Rec {
        Rec::Awaited { cog, inner: Box::new(inner) }
    }

    /// Root cog of an object or awaited record.
    pub fn root(&self) -> Option<Cog> {
        match self {
            Rec::Obj { cog, .. } | Rec::Awaited { cog, .. } => Some(*cog),
            _ => None,
        }
    }

    pub fn record_vars(&self, out: &mut Vec<u32>) {
        match self {
            Rec::Unit => {}
            Rec::Var(v) => out.push(*v),
            Rec::Obj { fields, .. } => {
                for (_, r) in fields {
                    r.record_vars(out);
                }
            }
            Rec::Awaited { inner, .. } => inner.record_vars(out),
        }
    }

    pub fn cogs(&self, out: &mut Vec<Cog>) {
        match self {
            Rec::Unit | Rec::Var(_) => {}
            Rec::Obj { cog, fields } => {
                out.push(*cog);
                for (_, r) in fields {
                    r.cogs(out);
                }
            }
            Rec::Awaited { cog, inner } => {
                out.push(*cog);
                inner.cogs(out);
            }
        }
    }

    pub fn contains_var(&self, v: u32) -> bool {
        match self {
            Rec::Unit => false,
            Rec::Var(x) => *x == v,
            Rec::Obj { fields, .. } => fields.iter().any(|(_, r)| r.contains_var(v)),
            Rec::Awaited { inner, .. } => inner.contains_var(v),
        }
    }

    pub fn map_cogs(&self, f: &impl Fn(Cog) -> Cog) -> Rec {
        match self {
            Rec::Unit => Rec::Unit,
            Rec::Var(v) => Rec::Var(*v),
            Rec::Obj { cog, fields } => Rec::Obj {
                cog: f(*cog),
                fields: fields.iter().map(|(n, r)| (n.clone(), r.map_cogs(f))).collect(),
            },
            Rec::Awaited { cog, inner } => {
                Rec::Awaited { cog: f(*cog), inner: Box::new(inner.map_cogs(f)) }
            }
        }
    }
}

impl fmt::Display for Rec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rec::Unit => write!(f, "_"),
            Rec::Var(v) => write!(f, "X{v}"),
            Rec::Obj { cog, fields } => {
                write!(f, "[cog:{cog}")?;
                for (n, r) in fields {
                    write!(f, ", {n}:{r}")?;
                }
                write!(f, "]")
            }
            Rec::Awaited { cog, inner } => write!(f, "{cog}~>{inner}"),
        }
    }
}

/// A cog dependency `(from, to)`, optionally await-flagged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Dep {
    pub from: Cog,
    pub to: Cog,
    pub awaited: bool,
}

impl Dep {
    pub fn get(from: Cog, to: Cog) -> Dep {
        Dep { from, to, awaited: false }
    }

    pub fn awaited(from: Cog, to: Cog) -> Dep {
        Dep { from, to, awaited: true }
    }

    pub fn map(self, f: &impl Fn(Cog) -> Cog) -> Dep {
        Dep { from: f(self.from), to: f(self.to), awaited: self.awaited }
    }
}

impl fmt::Display for Dep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.from, self.to)?;
        if self.awaited {
            write!(f, "^a")?;
        }
        Ok(())
    }
}

/// A behavioral contract.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Contract {
    Null,
    /// `0.(c,c')` and `0.(c,c')^a`: a bare dependency.
    Dep(Dep),
    /// A synchronous invocation `C.m r(rs) -> ret`.
    SyncInvk(Invk),
    /// An asynchronous invocation `C!m r(rs) -> ret`, optionally followed by
    /// the dependency its get/await synchronisation created.
    AsyncInvk(Invk, Option<Dep>),
    Seq(Box<Contract>, Box<Contract>),
    Plus(Box<Contract>, Box<Contract>),
    Par(Box<Contract>, Box<Contract>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Invk {
    pub class: String,
    pub method: String,
    pub recv: Rec,
    pub args: Vec<Rec>,
    pub ret: Rec,
}

impl Contract {
    /// Sequential composition, absorbing the `0` unit.
    pub fn seq(a: Contract, b: Contract) -> Contract {
        match (a, b) {
            (Contract::Null, b) => b,
            (a, Contract::Null) => a,
            (a, b) => Contract::Seq(Box::new(a), Box::new(b)),
        }
    }

    pub fn plus(a: Contract, b: Contract) -> Contract {
        Contract::Plus(Box::new(a), Box::new(b))
    }

    /// Parallel composition of a list of contracts; empty composes to `0`.
    pub fn par_all(mut items: Vec<Contract>) -> Contract {
        match items.len() {
            0 => Contract::Null,
            1 => items.pop().unwrap(),
            _ => {
                let mut it = items.into_iter();
                let first = it.next().unwrap();
                it.fold(first, |acc, c| Contract::Par(Box::new(acc), Box::new(c)))
            }
        }
    }

    /// Attaches the dependency created by a get/await to this contract,
    /// following the shapes of the contract grammar: an invocation gains a
    /// trailing dependency, `0` becomes the bare dependency form.
    pub fn with_dep(self, dep: Dep) -> Contract {
        match self {
            Contract::Null => Contract::Dep(dep),
            Contract::AsyncInvk(invk, None) => Contract::AsyncInvk(invk, Some(dep)),
            other => Contract::Seq(Box::new(other), Box::new(Contract::Dep(dep))),
        }
    }

    pub fn map_cogs(&self, f: &impl Fn(Cog) -> Cog) -> Contract {
        match self {
            Contract::Null => Contract::Null,
            Contract::Dep(d) => Contract::Dep(d.map(f)),
            Contract::SyncInvk(i) => Contract::SyncInvk(i.map_cogs(f)),
            Contract::AsyncInvk(i, d) => Contract::AsyncInvk(i.map_cogs(f), d.map(|d| d.map(f))),
            Contract::Seq(a, b) => {
                Contract::Seq(Box::new(a.map_cogs(f)), Box::new(b.map_cogs(f)))
            }
            Contract::Plus(a, b) => {
                Contract::Plus(Box::new(a.map_cogs(f)), Box::new(b.map_cogs(f)))
            }
            Contract::Par(a, b) => {
                Contract::Par(Box::new(a.map_cogs(f)), Box::new(b.map_cogs(f)))
            }
        }
    }

    pub fn cogs(&self, out: &mut Vec<Cog>) {
        match self {
            Contract::Null => {}
            Contract::Dep(d) => {
                out.push(d.from);
                out.push(d.to);
            }
            Contract::SyncInvk(i) => i.cogs(out),
            Contract::AsyncInvk(i, d) => {
                i.cogs(out);
                if let Some(d) = d {
                    out.push(d.from);
                    out.push(d.to);
                }
            }
            Contract::Seq(a, b) | Contract::Plus(a, b) | Contract::Par(a, b) => {
                a.cogs(out);
                b.cogs(out);
            }
        }
    }

    pub fn record_vars(&self, out: &mut Vec<u32>) {
        match self {
            Contract::Null | Contract::Dep(_) => {}
            Contract::SyncInvk(i) | Contract::AsyncInvk(i, _) => i.record_vars(out),
            Contract::Seq(a, b) | Contract::Plus(a, b) | Contract::Par(a, b) => {
                a.record_vars(out);
                b.record_vars(out);
            }
        }
    }

    /// All invocations, left to right.
    pub fn invocations(&self) -> Vec<&Invk> {
        let mut out = Vec::new();
        self.collect_invk(&mut out);
        out
    }

    fn collect_invk<'a>(&'a self, out: &mut Vec<&'a Invk>) {
        match self {
            Contract::Null | Contract::Dep(_) => {}
            Contract::SyncInvk(i) | Contract::AsyncInvk(i, _) => out.push(i),
            Contract::Seq(a, b) | Contract::Plus(a, b) | Contract::Par(a, b) => {
                a.collect_invk(out);
                b.collect_invk(out);
            }
        }
    }
}

impl Invk {
    pub fn map_cogs(&self, f: &impl Fn(Cog) -> Cog) -> Invk {
        Invk {
            class: self.class.clone(),
            method: self.method.clone(),
            recv: self.recv.map_cogs(f),
            args: self.args.iter().map(|r| r.map_cogs(f)).collect(),
            ret: self.ret.map_cogs(f),
        }
    }

    pub fn cogs(&self, out: &mut Vec<Cog>) {
        self.recv.cogs(out);
        for a in &self.args {
            a.cogs(out);
        }
        self.ret.cogs(out);
    }

    pub fn record_vars(&self, out: &mut Vec<u32>) {
        self.recv.record_vars(out);
        for a in &self.args {
            a.record_vars(out);
        }
        self.ret.record_vars(out);
    }
}

impl fmt::Display for Contract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Contract::Null => write!(f, "0"),
            Contract::Dep(d) => write!(f, "0.{d}"),
            Contract::SyncInvk(i) => write!(f, "{}.{} {}({}) -> {}", i.class, i.method, i.recv, recs(&i.args), i.ret),
            Contract::AsyncInvk(i, d) => {
                write!(f, "{}!{} {}({}) -> {}", i.class, i.method, i.recv, recs(&i.args), i.ret)?;
                if let Some(d) = d {
                    write!(f, ".{d}")?;
                }
                Ok(())
            }
            Contract::Seq(a, b) => write!(f, "({a} ; {b})"),
            Contract::Plus(a, b) => write!(f, "({a} + {b})"),
            Contract::Par(a, b) => write!(f, "({a} || {b})"),
        }
    }
}

fn recs(rs: &[Rec]) -> String {
    rs.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")
}

/// A method contract `r(s̄){ <sync, unsync> } ret`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MethodContract {
    pub class: String,
    pub method: String,
    pub recv: Rec,
    pub args: Vec<Rec>,
    pub sync: Contract,
    pub unsync: Contract,
    pub ret: Rec,
}

impl MethodContract {
    pub fn header_cogs(&self) -> Vec<Cog> {
        let mut out = Vec::new();
        self.recv.cogs(&mut out);
        for a in &self.args {
            a.cogs(&mut out);
        }
        out
    }

    /// Cogs of the body (and return record) not bound by the header; these
    /// correspond to `new cog` instructions.
    pub fn free_cogs(&self) -> Vec<Cog> {
        let header = self.header_cogs();
        let mut body = Vec::new();
        self.sync.cogs(&mut body);
        self.unsync.cogs(&mut body);
        self.ret.cogs(&mut body);
        let mut out = Vec::new();
        for c in body {
            if !header.contains(&c) && !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }
}

impl fmt::Display for MethodContract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.{} {}({}) {{ < {} , {} > }} {}",
            self.class, self.method, self.recv, recs(&self.args), self.sync, self.unsync, self.ret
        )
    }
}

/// The contract class table plus the main pair produced by inference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractTable {
    /// Keyed by `(class, method)`, deterministic order.
    pub methods: BTreeMap<(String, String), MethodContract>,
    pub main_sync: Contract,
    pub main_unsync: Contract,
}

/// Inference constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    CogEq(Cog, Cog),
    RecEq(Rec, Rec),
    /// Semi-unification `C.m <= r(rs) -> ret`: the signature of `C.m`
    /// (the left-hand side, looked up in the signature table) must match the
    /// call-site triple under a fresh instantiation.
    Semi { class: String, method: String, recv: Rec, args: Vec<Rec>, ret: Rec },
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::CogEq(a, b) => write!(f, "{a} = {b}"),
            Constraint::RecEq(a, b) => write!(f, "{a} = {b}"),
            Constraint::Semi { class, method, recv, args, ret } => {
                write!(f, "{class}.{method} <= {recv}({}) -> {ret}", recs(args))
            }
        }
    }
}

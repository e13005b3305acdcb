//! Small-step interpreter over runtime configurations: objects grouped in
//! cogs, futures, and pending invocation messages.

pub mod deadlock;
pub mod explore;
pub mod trace;

use crate::ast::{BinOp, Type, UnOp};
use crate::tast::*;
use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ObjId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CogId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FutId(pub u32);

impl fmt::Display for ObjId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.0)
    }
}
impl fmt::Display for CogId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}
impl fmt::Display for FutId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Value {
    /// Uninitialised field/local.
    Undef,
    Unit,
    Bool(bool),
    Int(BigInt),
    Null,
    Obj(ObjId),
    Fut(FutId),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Undef => write!(f, "undef"),
            Value::Unit => write!(f, "unit"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Null => write!(f, "null"),
            Value::Obj(o) => write!(f, "{o}"),
            Value::Fut(x) => write!(f, "{x}"),
        }
    }
}

/// Runtime statements: source statements plus the `cont(f)` continuation
/// marker introduced by synchronous calls, and the desugared remote sync
/// call helper assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RtStmt {
    Src(TStmt),
    Cont(FutId),
}

/// The reserved local used by the remote-sync-call desugaring.
pub const SYNC_HELPER: &str = "$sync";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Process {
    pub destiny: FutId,
    pub locals: BTreeMap<String, Value>,
    pub stmts: Vec<RtStmt>,
}

impl Process {
    /// True when the remaining work is done (modulo a trailing `cont`).
    fn body_done(&self) -> bool {
        self.stmts.is_empty() || matches!(self.stmts.as_slice(), [RtStmt::Cont(_)])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjState {
    /// Index into the program's class list; `None` for the start object.
    pub class: Option<usize>,
    pub cog: CogId,
    pub fields: BTreeMap<String, Value>,
    pub active: Option<Process>,
    pub queue: Vec<Process>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invoc {
    pub callee: ObjId,
    pub fut: FutId,
    pub method: String,
    pub args: Vec<Value>,
}

/// A runtime configuration. Name counters ride along so that fresh names
/// are drawn deterministically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub program: Rc<TypedProgram>,
    pub objects: BTreeMap<ObjId, ObjState>,
    pub cogs: BTreeMap<CogId, Option<ObjId>>,
    pub futures: BTreeMap<FutId, Option<Value>>,
    pub invocs: Vec<Invoc>,
    next_obj: u32,
    next_cog: u32,
    next_fut: u32,
}

pub const START_OBJ: ObjId = ObjId(0);
pub const START_COG: CogId = CogId(0);
pub const START_FUT: FutId = FutId(0);

/// Transition labels, one per rule of the operational semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule {
    Skip,
    AssignLocal,
    AssignField,
    CondTrue,
    CondFalse,
    AwaitTrue,
    AwaitFalse,
    ReleaseCog,
    Activate,
    ReadFut,
    NewObject,
    NewCogObject,
    AsyncCall,
    BindMtd,
    CogSyncCall,
    CogSyncReturnSched,
    SelfSyncCall,
    SelfSyncReturnSched,
    RemSyncCall,
    Return,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Skip => "Skip",
            Rule::AssignLocal => "Assign-Local",
            Rule::AssignField => "Assign-Field",
            Rule::CondTrue => "Cond-True",
            Rule::CondFalse => "Cond-False",
            Rule::AwaitTrue => "Await-True",
            Rule::AwaitFalse => "Await-False",
            Rule::ReleaseCog => "Release-Cog",
            Rule::Activate => "Activate",
            Rule::ReadFut => "Read-Fut",
            Rule::NewObject => "New-Object",
            Rule::NewCogObject => "New-Cog-Object",
            Rule::AsyncCall => "Async-Call",
            Rule::BindMtd => "Bind-Mtd",
            Rule::CogSyncCall => "Cog-Sync-Call",
            Rule::CogSyncReturnSched => "Cog-Sync-Return-Sched",
            Rule::SelfSyncCall => "Self-Sync-Call",
            Rule::SelfSyncReturnSched => "Self-Sync-Return-Sched",
            Rule::RemSyncCall => "Rem-Sync-Call",
            Rule::Return => "Return",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Label {
    pub rule: Rule,
    pub obj: ObjId,
    pub fut: Option<FutId>,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} obj={}", self.rule, self.obj)?;
        if let Some(x) = self.fut {
            write!(f, " fut={x}")?;
        }
        Ok(())
    }
}

/// The initial configuration: a single `start` object in the `start` cog
/// running the main block, with `destiny` bound to a fresh future.
pub fn init_config(program: Rc<TypedProgram>) -> Config {
    let mut locals = BTreeMap::new();
    for l in &program.main.locals {
        locals.insert(l.name.clone(), Value::Undef);
    }
    let process = Process {
        destiny: START_FUT,
        locals,
        stmts: program.main.body.iter().cloned().map(RtStmt::Src).collect(),
    };
    let start = ObjState {
        class: None,
        cog: START_COG,
        fields: BTreeMap::new(),
        active: Some(process),
        queue: Vec::new(),
    };
    let mut objects = BTreeMap::new();
    objects.insert(START_OBJ, start);
    let mut cogs = BTreeMap::new();
    cogs.insert(START_COG, Some(START_OBJ));
    let mut futures = BTreeMap::new();
    futures.insert(START_FUT, None);
    let mut cfg = Config {
        program,
        objects,
        cogs,
        futures,
        invocs: Vec::new(),
        next_obj: 1,
        next_cog: 1,
        next_fut: 1,
    };
    cfg.settle(START_OBJ);
    cfg
}

impl Config {
    /// Builds a configuration from explicitly given parts. Intended for
    /// constructing runtime states directly, e.g. in tests that exercise
    /// the deadlock predicates on hand-made configurations.
    pub fn synthetic(
        program: Rc<TypedProgram>,
        objects: BTreeMap<ObjId, ObjState>,
        cogs: BTreeMap<CogId, Option<ObjId>>,
        futures: BTreeMap<FutId, Option<Value>>,
        invocs: Vec<Invoc>,
    ) -> Config {
        let next_obj = objects.keys().map(|o| o.0 + 1).max().unwrap_or(0);
        let next_cog = cogs.keys().map(|c| c.0 + 1).max().unwrap_or(0);
        let next_fut = futures.keys().map(|f| f.0 + 1).max().unwrap_or(0);
        Config { program, objects, cogs, futures, invocs, next_obj, next_cog, next_fut }
    }
}

/// Pure-expression evaluation over the field map and local store.
fn eval(e: &TExpr, fields: &BTreeMap<String, Value>, locals: &BTreeMap<String, Value>, this: ObjId) -> Option<Value> {
    match &e.kind {
        TExprKind::Int(n) => Some(Value::Int(n.clone())),
        TExprKind::Bool(b) => Some(Value::Bool(*b)),
        TExprKind::Null => Some(Value::Null),
        TExprKind::This => Some(Value::Obj(this)),
        TExprKind::Local(n) => locals.get(n).cloned(),
        TExprKind::Field(n) => fields.get(n).cloned(),
        TExprKind::Bin { op, lhs, rhs } => {
            let l = eval(lhs, fields, locals, this)?;
            let r = eval(rhs, fields, locals, this)?;
            match op {
                BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod => {
                    let (Value::Int(a), Value::Int(b)) = (l, r) else { return None };
                    let v = match op {
                        BinOp::Add => a + b,
                        BinOp::Sub => a - b,
                        BinOp::Mul => a * b,
                        BinOp::Div => {
                            if b.is_zero() {
                                return None;
                            }
                            a / b
                        }
                        BinOp::Mod => {
                            if b.is_zero() {
                                return None;
                            }
                            a % b
                        }
                        _ => unreachable!(),
                    };
                    Some(Value::Int(v))
                }
                BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                    let (Value::Int(a), Value::Int(b)) = (l, r) else { return None };
                    let v = match op {
                        BinOp::Lt => a < b,
                        BinOp::Le => a <= b,
                        BinOp::Gt => a > b,
                        BinOp::Ge => a >= b,
                        _ => unreachable!(),
                    };
                    Some(Value::Bool(v))
                }
                BinOp::And | BinOp::Or => {
                    let (Value::Bool(a), Value::Bool(b)) = (l, r) else { return None };
                    Some(Value::Bool(if *op == BinOp::And { a && b } else { a || b }))
                }
                BinOp::Eq => Some(Value::Bool(l == r)),
                BinOp::Ne => Some(Value::Bool(l != r)),
            }
        }
        TExprKind::Un { op, expr } => {
            let v = eval(expr, fields, locals, this)?;
            match (op, v) {
                (UnOp::Neg, Value::Int(n)) => Some(Value::Int(-n)),
                (UnOp::Not, Value::Bool(b)) => Some(Value::Bool(!b)),
                _ => None,
            }
        }
    }
}

impl Config {
    fn fresh_obj(&mut self) -> ObjId {
        let id = ObjId(self.next_obj);
        self.next_obj += 1;
        id
    }

    fn fresh_cog(&mut self) -> CogId {
        let id = CogId(self.next_cog);
        self.next_cog += 1;
        id
    }

    fn fresh_fut(&mut self) -> FutId {
        let id = FutId(self.next_fut);
        self.next_fut += 1;
        id
    }

    pub fn obj(&self, o: ObjId) -> &ObjState {
        &self.objects[&o]
    }

    fn eval_in(&self, o: ObjId, e: &TExpr) -> Option<Value> {
        let ob = self.obj(o);
        let empty = BTreeMap::new();
        let locals = ob.active.as_ref().map(|p| &p.locals).unwrap_or(&empty);
        eval(e, &ob.fields, locals, o)
    }

    /// Builds the process for `bind(o, f, m, vs, class(o))`.
    fn bind(&self, o: ObjId, f: FutId, method: &str, args: &[Value]) -> Process {
        let class_idx = self.obj(o).class.expect("invocations target class objects");
        let class = &self.program.classes[class_idx];
        let m = class.methods.iter().find(|m| m.name == method).expect("bound method exists");
        let mut locals = BTreeMap::new();
        for (p, v) in m.params.iter().zip(args) {
            locals.insert(p.name.clone(), v.clone());
        }
        for l in &m.locals {
            locals.insert(l.name.clone(), Value::Undef);
        }
        Process {
            destiny: f,
            locals,
            stmts: m.body.iter().cloned().map(RtStmt::Src).collect(),
        }
    }

    /// Attribute map for a new object of `class` with constructor values.
    fn atts(&self, class_idx: usize, args: &[Value]) -> BTreeMap<String, Value> {
        let class = &self.program.classes[class_idx];
        let mut fields = BTreeMap::new();
        for (p, v) in class.params.iter().zip(args) {
            fields.insert(p.name.clone(), v.clone());
        }
        for f in &class.fields {
            fields.insert(f.name.clone(), Value::Undef);
        }
        fields
    }

    /// Post-transition bookkeeping on `o`: when the active process has run
    /// out of statements its destiny is resolved to `unit` (methods without
    /// a return) and the process leaves the active slot.
    fn settle(&mut self, o: ObjId) {
        let Some(ob) = self.objects.get_mut(&o) else { return };
        let Some(p) = &ob.active else { return };
        if p.body_done() {
            let destiny = p.destiny;
            let fut = self.futures.get_mut(&destiny).expect("destiny future exists");
            if fut.is_none() {
                *fut = Some(Value::Unit);
            }
            let ob = self.objects.get_mut(&o).unwrap();
            let p = ob.active.as_ref().unwrap();
            if p.stmts.is_empty() {
                ob.active = None;
            }
        }
    }

    /// Soundness (Prop. 1): the cog map is injective on objects and at most
    /// one object per cog has a non-idle active process.
    pub fn is_sound(&self) -> bool {
        let mut seen = BTreeMap::new();
        for (c, act) in &self.cogs {
            if let Some(o) = act {
                if seen.insert(*o, *c).is_some() {
                    return false;
                }
            }
        }
        let mut busy: BTreeMap<CogId, u32> = BTreeMap::new();
        for ob in self.objects.values() {
            if ob.active.is_some() {
                *busy.entry(ob.cog).or_default() += 1;
            }
        }
        busy.values().all(|&n| n <= 1)
    }

    /// Enumerates every enabled transition in a fixed structural order:
    /// objects by creation index with rules in figure order, then pending
    /// invocation bindings.
    pub fn enabled(&self) -> Vec<(Label, Config)> {
        let mut out = Vec::new();
        for (&o, ob) in &self.objects {
            self.object_steps(o, ob, &mut out);
        }
        for (idx, inv) in self.invocs.iter().enumerate() {
            let mut next = self.clone();
            next.invocs.remove(idx);
            let process = next.bind(inv.callee, inv.fut, &inv.method, &inv.args);
            next.objects.get_mut(&inv.callee).unwrap().queue.push(process);
            out.push((
                Label { rule: Rule::BindMtd, obj: inv.callee, fut: Some(inv.fut) },
                next,
            ));
        }
        debug_assert!(out.iter().all(|(_, cn)| cn.is_sound()), "Prop. 1 violated");
        out
    }

    fn object_steps(&self, o: ObjId, ob: &ObjState, out: &mut Vec<(Label, Config)>) {
        // Release-Cog: idle active slot while holding the cog.
        if ob.active.is_none() && self.cogs[&ob.cog] == Some(o) {
            let mut next = self.clone();
            next.cogs.insert(ob.cog, None);
            out.push((Label { rule: Rule::ReleaseCog, obj: o, fut: None }, next));
        }
        // Activate: idle object in a free cog, one successor per queued process.
        if ob.active.is_none() && self.cogs[&ob.cog].is_none() {
            for i in 0..ob.queue.len() {
                let mut next = self.clone();
                let nob = next.objects.get_mut(&o).unwrap();
                let p = nob.queue.remove(i);
                nob.active = Some(p);
                next.cogs.insert(ob.cog, Some(o));
                next.settle(o);
                out.push((Label { rule: Rule::Activate, obj: o, fut: None }, next));
            }
        }
        let Some(p) = &ob.active else { return };
        let Some(stmt) = p.stmts.first() else { return };
        match stmt {
            RtStmt::Cont(f) => {
                let f = *f;
                // Self-Sync-Return-Sched: the destiny-f process waits in the
                // own queue.
                if let Some(i) = ob.queue.iter().position(|q| q.destiny == f) {
                    let mut next = self.clone();
                    let nob = next.objects.get_mut(&o).unwrap();
                    let woken = nob.queue.remove(i);
                    nob.active = Some(woken);
                    next.settle(o);
                    out.push((
                        Label { rule: Rule::SelfSyncReturnSched, obj: o, fut: Some(f) },
                        next,
                    ));
                    return;
                }
                // Cog-Sync-Return-Sched: the destiny-f process waits in
                // another object of the same cog; control is handed over.
                if self.cogs[&ob.cog] == Some(o) {
                    for (&o2, ob2) in &self.objects {
                        if o2 == o || ob2.cog != ob.cog || ob2.active.is_some() {
                            continue;
                        }
                        if let Some(i) = ob2.queue.iter().position(|q| q.destiny == f) {
                            let mut next = self.clone();
                            next.objects.get_mut(&o).unwrap().active = None;
                            let nob2 = next.objects.get_mut(&o2).unwrap();
                            let woken = nob2.queue.remove(i);
                            nob2.active = Some(woken);
                            next.cogs.insert(ob.cog, Some(o2));
                            next.settle(o2);
                            out.push((
                                Label { rule: Rule::CogSyncReturnSched, obj: o, fut: Some(f) },
                                next,
                            ));
                            return;
                        }
                    }
                }
            }
            RtStmt::Src(s) => self.stmt_steps(o, ob, p, s, out),
        }
    }

    fn stmt_steps(
        &self,
        o: ObjId,
        ob: &ObjState,
        p: &Process,
        s: &TStmt,
        out: &mut Vec<(Label, Config)>,
    ) {
        match s {
            TStmt::Skip => {
                let mut next = self.advance(o);
                next.settle(o);
                out.push((Label { rule: Rule::Skip, obj: o, fut: None }, next));
            }
            TStmt::If { cond, then_branch, else_branch } => {
                let Some(Value::Bool(b)) = self.eval_in(o, cond) else { return };
                let mut next = self.advance(o);
                let branch = if b { then_branch } else { else_branch };
                let nob = next.objects.get_mut(&o).unwrap();
                let ap = nob.active.as_mut().unwrap();
                for st in branch.iter().rev() {
                    ap.stmts.insert(0, RtStmt::Src(st.clone()));
                }
                next.settle(o);
                let rule = if b { Rule::CondTrue } else { Rule::CondFalse };
                out.push((Label { rule, obj: o, fut: None }, next));
            }
            TStmt::Await(e) => {
                let Some(Value::Fut(f)) = self.eval_in(o, e) else { return };
                if self.futures[&f].is_some() {
                    let mut next = self.advance(o);
                    next.settle(o);
                    out.push((Label { rule: Rule::AwaitTrue, obj: o, fut: Some(f) }, next));
                } else {
                    // The process moves to the queue, still at the await.
                    let mut next = self.clone();
                    let nob = next.objects.get_mut(&o).unwrap();
                    let proc = nob.active.take().unwrap();
                    nob.queue.push(proc);
                    out.push((Label { rule: Rule::AwaitFalse, obj: o, fut: Some(f) }, next));
                }
            }
            TStmt::Return(e) => {
                let Some(v) = self.eval_in(o, e) else { return };
                let f = p.destiny;
                if self.futures[&f].is_some() {
                    return; // the future may be written once
                }
                let mut next = self.advance(o);
                next.futures.insert(f, Some(v));
                next.settle(o);
                out.push((Label { rule: Rule::Return, obj: o, fut: Some(f) }, next));
            }
            TStmt::Assign(target, rhs) => self.assign_steps(o, ob, p, Some(target), rhs, out),
            TStmt::Expr(rhs) => self.assign_steps(o, ob, p, None, rhs, out),
        }
    }

    fn assign_steps(
        &self,
        o: ObjId,
        ob: &ObjState,
        p: &Process,
        target: Option<&TTarget>,
        rhs: &TExprZ,
        out: &mut Vec<(Label, Config)>,
    ) {
        let store = |next: &mut Config, v: Value| {
            let nob = next.objects.get_mut(&o).unwrap();
            match target {
                Some(TTarget::Local(n)) => {
                    nob.active.as_mut().unwrap().locals.insert(n.clone(), v);
                }
                Some(TTarget::Field(n)) => {
                    nob.fields.insert(n.clone(), v);
                }
                None => {}
            }
        };
        let rule_for_target = || match target {
            Some(TTarget::Field(_)) => Rule::AssignField,
            _ => Rule::AssignLocal,
        };
        match rhs {
            TExprZ::Pure(e) => {
                let Some(v) = self.eval_in(o, e) else { return };
                let mut next = self.advance(o);
                store(&mut next, v);
                next.settle(o);
                out.push((Label { rule: rule_for_target(), obj: o, fut: None }, next));
            }
            TExprZ::Get { fut, .. } => {
                let Some(Value::Fut(f)) = self.eval_in(o, fut) else { return };
                let Some(v) = self.futures[&f].clone() else { return };
                let mut next = self.advance(o);
                store(&mut next, v);
                next.settle(o);
                out.push((Label { rule: Rule::ReadFut, obj: o, fut: Some(f) }, next));
            }
            TExprZ::AsyncCall { recv, method, args, .. } => {
                let Some(Value::Obj(callee)) = self.eval_in(o, recv) else { return };
                let Some(vals) = args.iter().map(|a| self.eval_in(o, a)).collect::<Option<Vec<_>>>()
                else {
                    return;
                };
                let mut next = self.advance(o);
                let f = next.fresh_fut();
                next.futures.insert(f, None);
                next.invocs.push(Invoc {
                    callee,
                    fut: f,
                    method: method.clone(),
                    args: vals,
                });
                store(&mut next, Value::Fut(f));
                next.settle(o);
                out.push((Label { rule: Rule::AsyncCall, obj: o, fut: Some(f) }, next));
            }
            TExprZ::New { class, args, cog } => {
                let Some(vals) = args.iter().map(|a| self.eval_in(o, a)).collect::<Option<Vec<_>>>()
                else {
                    return;
                };
                let class_idx = self.program.class_idx[class];
                let mut next = self.advance(o);
                let o2 = next.fresh_obj();
                let fields = next.atts(class_idx, &vals);
                let (cog_id, rule) = if *cog {
                    let c = next.fresh_cog();
                    // Object creation runs no code, so the new cog starts free.
                    next.cogs.insert(c, None);
                    (c, Rule::NewCogObject)
                } else {
                    (ob.cog, Rule::NewObject)
                };
                next.objects.insert(
                    o2,
                    ObjState {
                        class: Some(class_idx),
                        cog: cog_id,
                        fields,
                        active: None,
                        queue: Vec::new(),
                    },
                );
                store(&mut next, Value::Obj(o2));
                next.settle(o);
                out.push((Label { rule, obj: o, fut: None }, next));
            }
            TExprZ::SyncCall { recv, method, args, ret, .. } => {
                let Some(Value::Obj(callee)) = self.eval_in(o, recv) else { return };
                let Some(vals) = args.iter().map(|a| self.eval_in(o, a)).collect::<Option<Vec<_>>>()
                else {
                    return;
                };
                if callee == o {
                    // Self-Sync-Call: run the body now, queue the caller at
                    // an await/get of the fresh future.
                    let mut next = self.clone();
                    let f = next.fresh_fut();
                    next.futures.insert(f, None);
                    let destiny = p.destiny;
                    let mut body = next.bind(callee, f, method, &vals);
                    body.stmts.push(RtStmt::Cont(destiny));
                    let resumed = self.caller_resumption(o, target, f, ret);
                    let nob = next.objects.get_mut(&o).unwrap();
                    nob.queue.push(resumed);
                    nob.active = Some(body);
                    next.settle(o);
                    out.push((Label { rule: Rule::SelfSyncCall, obj: o, fut: Some(f) }, next));
                    return;
                }
                let callee_cog = self.obj(callee).cog;
                if callee_cog == ob.cog {
                    // Cog-Sync-Call: requires this object to hold the cog;
                    // the callee is idle by soundness.
                    if self.cogs[&ob.cog] != Some(o) || self.obj(callee).active.is_some() {
                        return;
                    }
                    let mut next = self.clone();
                    let f = next.fresh_fut();
                    next.futures.insert(f, None);
                    let destiny = p.destiny;
                    let mut body = next.bind(callee, f, method, &vals);
                    body.stmts.push(RtStmt::Cont(destiny));
                    let resumed = self.caller_resumption(o, target, f, ret);
                    let nob = next.objects.get_mut(&o).unwrap();
                    nob.active = None;
                    nob.queue.push(resumed);
                    let ncallee = next.objects.get_mut(&callee).unwrap();
                    ncallee.active = Some(body);
                    next.cogs.insert(ob.cog, Some(callee));
                    next.settle(callee);
                    out.push((Label { rule: Rule::CogSyncCall, obj: o, fut: Some(f) }, next));
                } else {
                    // Rem-Sync-Call: rewrite into an async call followed by a get.
                    let mut next = self.advance(o);
                    let nob = next.objects.get_mut(&o).unwrap();
                    let ap = nob.active.as_mut().unwrap();
                    let helper = TExpr {
                        kind: TExprKind::Local(SYNC_HELPER.to_string()),
                        ty: Type::Fut(Box::new(ret.clone())),
                    };
                    let get_stmt = match target {
                        Some(t) => TStmt::Assign(
                            t.clone(),
                            TExprZ::Get { fut: helper.clone(), inner: ret.clone() },
                        ),
                        None => {
                            TStmt::Expr(TExprZ::Get { fut: helper.clone(), inner: ret.clone() })
                        }
                    };
                    ap.stmts.insert(0, RtStmt::Src(get_stmt));
                    ap.stmts.insert(
                        0,
                        RtStmt::Src(TStmt::Assign(
                            TTarget::Local(SYNC_HELPER.to_string()),
                            TExprZ::AsyncCall {
                                recv: recv.clone(),
                                class: String::new(),
                                method: method.clone(),
                                args: args.clone(),
                                ret: ret.clone(),
                            },
                        )),
                    );
                    ap.locals.insert(SYNC_HELPER.to_string(), Value::Undef);
                    out.push((Label { rule: Rule::RemSyncCall, obj: o, fut: None }, next));
                }
            }
        }
    }

    /// The caller process parked by a sync call: `await f?; x = f.get; s`.
    fn caller_resumption(
        &self,
        o: ObjId,
        target: Option<&TTarget>,
        f: FutId,
        ret: &Type,
    ) -> Process {
        let ob = self.obj(o);
        let p = ob.active.as_ref().unwrap();
        let mut locals = p.locals.clone();
        locals.insert(SYNC_HELPER.to_string(), Value::Fut(f));
        let helper = TExpr {
            kind: TExprKind::Local(SYNC_HELPER.to_string()),
            ty: Type::Fut(Box::new(ret.clone())),
        };
        let get_stmt = match target {
            Some(t) => {
                TStmt::Assign(t.clone(), TExprZ::Get { fut: helper.clone(), inner: ret.clone() })
            }
            None => TStmt::Expr(TExprZ::Get { fut: helper.clone(), inner: ret.clone() }),
        };
        let mut stmts = vec![
            RtStmt::Src(TStmt::Await(helper)),
            RtStmt::Src(get_stmt),
        ];
        stmts.extend(p.stmts.iter().skip(1).cloned());
        Process { destiny: p.destiny, locals, stmts }
    }

    /// Clone with the active statement of `o` consumed.
    fn advance(&self, o: ObjId) -> Config {
        let mut next = self.clone();
        let nob = next.objects.get_mut(&o).unwrap();
        nob.active.as_mut().unwrap().stmts.remove(0);
        next
    }
}

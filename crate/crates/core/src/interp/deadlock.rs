//! Runtime deadlock detection: the deadlocked-configuration predicate over
//! chains of blocked processes, and the weaker dependency/circularity
//! notions used to validate the static analyses.

use super::*;
use crate::contract::{Cog, Dep};
use crate::lam::{get_closure_of, Relation};
use crate::tast::{TExprZ, TStmt};

fn cog_name(c: CogId) -> Cog {
    if c == START_COG {
        Cog::Start
    } else {
        Cog::Var(c.0)
    }
}

/// Where a process sits inside its object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    Active,
    Queued(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct ProcRef {
    obj: ObjId,
    slot: Slot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Wait {
    /// Blocked on `x = e.get` with the future unresolved.
    Get(FutId),
    /// Blocked on `await e?` with the future unresolved.
    Await(FutId),
    /// Not blocked on a future (may still be waiting for its cog if queued).
    None,
}

impl Config {
    fn proc_at(&self, r: ProcRef) -> &Process {
        let ob = self.obj(r.obj);
        match r.slot {
            Slot::Active => ob.active.as_ref().expect("active slot"),
            Slot::Queued(i) => &ob.queue[i],
        }
    }

    fn wait_of(&self, r: ProcRef) -> Wait {
        let p = self.proc_at(r);
        let ob = self.obj(r.obj);
        let Some(head) = p.stmts.first() else { return Wait::None };
        let RtStmt::Src(s) = head else { return Wait::None };
        let eval_fut = |e: &TExpr| match eval(e, &ob.fields, &p.locals, r.obj) {
            Some(Value::Fut(f)) => Some(f),
            _ => None,
        };
        match s {
            TStmt::Await(e) => match eval_fut(e) {
                Some(f) if self.futures[&f].is_none() => Wait::Await(f),
                _ => Wait::None,
            },
            TStmt::Assign(_, TExprZ::Get { fut, .. }) | TStmt::Expr(TExprZ::Get { fut, .. }) => {
                match eval_fut(fut) {
                    Some(f) if self.futures[&f].is_none() => Wait::Get(f),
                    _ => Wait::None,
                }
            }
            _ => Wait::None,
        }
    }

    fn all_procs(&self) -> Vec<ProcRef> {
        let mut out = Vec::new();
        for (&o, ob) in &self.objects {
            if ob.active.is_some() {
                out.push(ProcRef { obj: o, slot: Slot::Active });
            }
            for i in 0..ob.queue.len() {
                out.push(ProcRef { obj: o, slot: Slot::Queued(i) });
            }
        }
        out
    }

    fn owner_of(&self, f: FutId) -> Option<ProcRef> {
        self.all_procs().into_iter().find(|r| self.proc_at(*r).destiny == f)
    }

    /// The deadlocked-configuration predicate: a cyclic chain of waiting
    /// processes, at least one of which is an active process blocked on a
    /// `get`. Each blocked process waits for the owner of its future; a
    /// queued owner in turn waits for the active process that keeps its cog
    /// busy on a `get`.
    pub fn is_deadlocked(&self) -> bool {
        let procs = self.all_procs();
        let idx: BTreeMap<ProcRef, usize> =
            procs.iter().enumerate().map(|(i, r)| (*r, i)).collect();
        let n = procs.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut is_active_get = vec![false; n];

        for (i, &r) in procs.iter().enumerate() {
            match self.wait_of(r) {
                Wait::Get(f) => {
                    // Chain clause 1: get-blocked chain members are active.
                    if r.slot == Slot::Active {
                        is_active_get[i] = true;
                        if let Some(owner) = self.owner_of(f) {
                            adj[i].push(idx[&owner]);
                        }
                    }
                }
                Wait::Await(f) => {
                    if let Some(owner) = self.owner_of(f) {
                        adj[i].push(idx[&owner]);
                    }
                }
                Wait::None => {}
            }
            // A queued process additionally waits for its cog: it can only
            // run once the holder releases, which never happens if the
            // holder's active process is blocked on a get.
            if let Slot::Queued(_) = r.slot {
                let cog = self.obj(r.obj).cog;
                if let Some(holder) = self.cogs[&cog] {
                    let holder_ref = ProcRef { obj: holder, slot: Slot::Active };
                    if self.obj(holder).active.is_some() {
                        if let Wait::Get(_) = self.wait_of(holder_ref) {
                            adj[i].push(idx[&holder_ref]);
                        }
                    }
                }
            }
        }

        // A cycle through at least one active-get node.
        for (start, _) in is_active_get.iter().enumerate().filter(|(_, g)| **g) {
            // DFS from `start` looking for a path back to `start`.
            let mut stack = vec![start];
            let mut seen = vec![false; n];
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if w == start {
                        return true;
                    }
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        false
    }

    /// The dependency set of the configuration: `(c,c')` when an active
    /// process of a `c`-object gets an unresolved future whose task (or
    /// pending invocation message) sits on a `c'`-object, and `(c,c')^a`
    /// for awaits of any process.
    pub fn dependencies(&self) -> Relation {
        let mut out = Relation::new();
        for (&o, ob) in &self.objects {
            let c = cog_name(ob.cog);
            let push_deps = |f: FutId, awaited: bool, out: &mut Relation| {
                // (a): the process with destiny f, wherever it sits.
                if let Some(owner) = self.owner_of(f) {
                    let c2 = cog_name(self.obj(owner.obj).cog);
                    out.insert(Dep { from: c, to: c2, awaited });
                }
                // (b): a pending invocation message carrying f.
                for inv in &self.invocs {
                    if inv.fut == f {
                        let c2 = cog_name(self.obj(inv.callee).cog);
                        out.insert(Dep { from: c, to: c2, awaited });
                    }
                }
            };
            // (i): get dependencies arise from the active process only.
            if ob.active.is_some() {
                if let Wait::Get(f) = self.wait_of(ProcRef { obj: o, slot: Slot::Active }) {
                    push_deps(f, false, &mut out);
                }
            }
            // (ii): await dependencies arise from active and queued processes.
            let mut slots = Vec::new();
            if ob.active.is_some() {
                slots.push(Slot::Active);
            }
            for i in 0..ob.queue.len() {
                slots.push(Slot::Queued(i));
            }
            for slot in slots {
                if let Wait::Await(f) = self.wait_of(ProcRef { obj: o, slot }) {
                    push_deps(f, true, &mut out);
                }
            }
        }
        out
    }

    /// True iff the get-closure of the dependency set contains a plain
    /// reflexive pair.
    pub fn has_circularity(&self) -> bool {
        get_closure_of(&self.dependencies())
            .iter()
            .any(|d| !d.awaited && d.from == d.to)
    }
}

/// The get-closure of a dependency set (re-exported for the runtime side).
pub fn get_closure(deps: &Relation) -> Relation {
    get_closure_of(deps)
}

//! Breadth-first exploration of all schedules up to a depth bound, with
//! configurations hashed modulo injective renaming of fresh names.

use super::*;
use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, VecDeque};
use std::hash::{Hash, Hasher};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExploreError {
    #[error("state count exceeded the cap of {0}")]
    ResourceLimit(usize),
}

#[derive(Debug)]
pub struct ExploreResult {
    pub deadlock_reachable: bool,
    pub witness: Option<Vec<Label>>,
    pub witness_config: Option<Config>,
    /// Some schedule reaches a configuration with no transitions that is
    /// not deadlocked.
    pub termination_reachable: bool,
    pub states: usize,
    pub depth: usize,
}

pub struct ExploreOpts {
    pub depth: usize,
    pub state_cap: usize,
    /// Re-check soundness and deadlock persistence on every transition.
    pub check_invariants: bool,
}

impl Default for ExploreOpts {
    fn default() -> Self {
        ExploreOpts { depth: 30, state_cap: 200_000, check_invariants: false }
    }
}

pub fn explore(init: Config, opts: &ExploreOpts) -> Result<ExploreResult, ExploreError> {
    let mut visited: HashMap<u64, usize> = HashMap::new();
    let mut parents: Vec<Option<(usize, Label)>> = Vec::new();
    let mut queue: VecDeque<(Config, usize, usize)> = VecDeque::new(); // (cfg, id, depth)

    let mut result = ExploreResult {
        deadlock_reachable: false,
        witness: None,
        witness_config: None,
        termination_reachable: false,
        states: 0,
        depth: opts.depth,
    };

    let h0 = canonical_hash(&init);
    visited.insert(h0, 0);
    parents.push(None);
    let init_deadlocked = init.is_deadlocked();
    if init_deadlocked {
        result.deadlock_reachable = true;
        result.witness = Some(Vec::new());
        result.witness_config = Some(init.clone());
    }
    queue.push_back((init, 0, 0));

    while let Some((cfg, id, depth)) = queue.pop_front() {
        let succ = cfg.enabled();
        if succ.is_empty() {
            if !cfg.is_deadlocked() {
                result.termination_reachable = true;
            }
            continue;
        }
        if depth == opts.depth {
            continue;
        }
        let here_deadlocked = cfg.is_deadlocked();
        for (label, next) in succ {
            if opts.check_invariants {
                assert!(next.is_sound(), "soundness violated by {label}");
                if here_deadlocked {
                    assert!(next.is_deadlocked(), "deadlock not persistent under {label}");
                }
            }
            let h = canonical_hash(&next);
            if visited.contains_key(&h) {
                continue;
            }
            if visited.len() >= opts.state_cap {
                return Err(ExploreError::ResourceLimit(opts.state_cap));
            }
            let nid = parents.len();
            visited.insert(h, nid);
            parents.push(Some((id, label.clone())));
            if !result.deadlock_reachable && next.is_deadlocked() {
                result.deadlock_reachable = true;
                result.witness = Some(reconstruct(&parents, nid));
                result.witness_config = Some(next.clone());
            }
            queue.push_back((next, nid, depth + 1));
        }
    }
    result.states = visited.len();
    Ok(result)
}

fn reconstruct(parents: &[Option<(usize, Label)>], mut id: usize) -> Vec<Label> {
    let mut out = Vec::new();
    while let Some((p, label)) = &parents[id] {
        out.push(label.clone());
        id = *p;
    }
    out.reverse();
    out
}

pub fn canonical_hash(cfg: &Config) -> u64 {
    let s = canonical_string(cfg);
    let mut h = DefaultHasher::new();
    s.hash(&mut h);
    h.finish()
}

/// Canonical serialization: names are renamed in order of first occurrence
/// in a structure-driven traversal starting from the start object, so two
/// configurations differing only by an injective renaming of fresh names
/// serialize identically.
pub fn canonical_string(cfg: &Config) -> String {
    let mut canon = Canon {
        cfg,
        obj_rank: BTreeMap::new(),
        cog_rank: BTreeMap::new(),
        fut_rank: BTreeMap::new(),
    };
    canon.discover();
    canon.render()
}

struct Canon<'a> {
    cfg: &'a Config,
    obj_rank: BTreeMap<ObjId, usize>,
    cog_rank: BTreeMap<CogId, usize>,
    fut_rank: BTreeMap<FutId, usize>,
}

impl<'a> Canon<'a> {
    fn discover(&mut self) {
        let mut worklist: VecDeque<ObjId> = VecDeque::new();
        self.rank_obj(START_OBJ, &mut worklist);
        self.drain(&mut worklist);
        // Unreachable objects, most-distinct structure first for stability.
        loop {
            let mut rest: Vec<ObjId> = self
                .cfg
                .objects
                .keys()
                .filter(|o| !self.obj_rank.contains_key(o))
                .copied()
                .collect();
            if rest.is_empty() {
                break;
            }
            rest.sort_by_key(|o| self.object_key(*o));
            self.rank_obj(rest[0], &mut worklist);
            self.drain(&mut worklist);
        }
        // Invocation messages.
        let mut invocs: Vec<&Invoc> = self.cfg.invocs.iter().collect();
        invocs.sort_by_key(|inv| self.invoc_key(inv));
        for inv in invocs {
            self.rank_fut(inv.fut);
            for v in &inv.args {
                self.rank_value(v, &mut worklist);
            }
            self.drain(&mut worklist);
        }
        // Leftover futures and cogs.
        let mut futs: Vec<FutId> = self
            .cfg
            .futures
            .keys()
            .filter(|f| !self.fut_rank.contains_key(f))
            .copied()
            .collect();
        futs.sort_by_key(|f| self.value_key(self.cfg.futures[f].as_ref()));
        for f in futs {
            self.rank_fut(f);
            if let Some(v) = self.cfg.futures[&f].clone() {
                self.rank_value(&v, &mut worklist);
                self.drain(&mut worklist);
            }
        }
        let rest_cogs: Vec<CogId> = self
            .cfg
            .cogs
            .keys()
            .filter(|c| !self.cog_rank.contains_key(c))
            .copied()
            .collect();
        for c in rest_cogs {
            self.rank_cog(c);
        }
    }

    fn drain(&mut self, worklist: &mut VecDeque<ObjId>) {
        while let Some(o) = worklist.pop_front() {
            let ob = self.cfg.obj(o);
            self.rank_cog(ob.cog);
            for v in ob.fields.values() {
                self.rank_value(v, worklist);
            }
            if let Some(p) = &ob.active {
                self.rank_process(p, worklist);
            }
            let mut order: Vec<usize> = (0..ob.queue.len()).collect();
            order.sort_by_key(|&i| self.process_key(&ob.queue[i]));
            for i in order {
                self.rank_process(&ob.queue[i], worklist);
            }
        }
    }

    fn rank_obj(&mut self, o: ObjId, worklist: &mut VecDeque<ObjId>) {
        if !self.obj_rank.contains_key(&o) {
            self.obj_rank.insert(o, self.obj_rank.len());
            worklist.push_back(o);
        }
    }

    fn rank_cog(&mut self, c: CogId) {
        let n = self.cog_rank.len();
        self.cog_rank.entry(c).or_insert(n);
    }

    fn rank_fut(&mut self, f: FutId) {
        let n = self.fut_rank.len();
        self.fut_rank.entry(f).or_insert(n);
    }

    fn rank_value(&mut self, v: &Value, worklist: &mut VecDeque<ObjId>) {
        match v {
            Value::Obj(o) => self.rank_obj(*o, worklist),
            Value::Fut(f) => self.rank_fut(*f),
            _ => {}
        }
    }

    fn rank_process(&mut self, p: &Process, worklist: &mut VecDeque<ObjId>) {
        self.rank_fut(p.destiny);
        for v in p.locals.values() {
            self.rank_value(v, worklist);
        }
        for s in &p.stmts {
            if let RtStmt::Cont(f) = s {
                self.rank_fut(*f);
            }
        }
    }

    // ---- keys: serializations that use already-known ranks and local
    // placeholders for names not ranked yet, used only for ordering ----

    fn vname(&self, v: &Value) -> String {
        match v {
            Value::Obj(o) => match self.obj_rank.get(o) {
                Some(r) => format!("o{r}"),
                None => "o?".to_string(),
            },
            Value::Fut(f) => match self.fut_rank.get(f) {
                Some(r) => format!("f{r}"),
                None => "f?".to_string(),
            },
            other => other.to_string(),
        }
    }

    fn process_key(&self, p: &Process) -> String {
        let mut s = String::new();
        s.push_str(&match self.fut_rank.get(&p.destiny) {
            Some(r) => format!("d{r};"),
            None => "d?;".to_string(),
        });
        for (n, v) in &p.locals {
            s.push_str(&format!("{n}={};", self.vname(v)));
        }
        s.push_str(&stmts_string(&p.stmts, &|f| {
            match self.fut_rank.get(&f) {
                Some(r) => format!("f{r}"),
                None => "f?".to_string(),
            }
        }));
        s
    }

    fn object_key(&self, o: ObjId) -> String {
        let ob = self.cfg.obj(o);
        let mut s = format!("class={:?};", ob.class);
        for (n, v) in &ob.fields {
            s.push_str(&format!("{n}={};", self.vname(v)));
        }
        if let Some(p) = &ob.active {
            s.push_str(&format!("active[{}];", self.process_key(p)));
        }
        let mut qkeys: Vec<String> = ob.queue.iter().map(|p| self.process_key(p)).collect();
        qkeys.sort();
        for k in qkeys {
            s.push_str(&format!("q[{k}];"));
        }
        s
    }

    fn invoc_key(&self, inv: &Invoc) -> String {
        let callee = match self.obj_rank.get(&inv.callee) {
            Some(r) => format!("o{r}"),
            None => "o?".to_string(),
        };
        let args = inv.args.iter().map(|v| self.vname(v)).collect::<Vec<_>>().join(",");
        format!("invoc({callee},{},{args})", inv.method)
    }

    fn value_key(&self, v: Option<&Value>) -> String {
        match v {
            None => "bot".to_string(),
            Some(v) => self.vname(v),
        }
    }

    // ---- final rendering with complete rank tables ----

    fn render(&self) -> String {
        let mut s = String::new();
        let mut objs: Vec<(usize, ObjId)> =
            self.obj_rank.iter().map(|(o, r)| (*r, *o)).collect();
        objs.sort();
        for (r, o) in objs {
            let ob = self.cfg.obj(o);
            s.push_str(&format!(
                "ob(o{r},class={:?},cog=c{}",
                ob.class, self.cog_rank[&ob.cog]
            ));
            for (n, v) in &ob.fields {
                s.push_str(&format!(",{n}={}", self.vname(v)));
            }
            match &ob.active {
                Some(p) => s.push_str(&format!(",active[{}]", self.render_process(p))),
                None => s.push_str(",idle"),
            }
            let mut q: Vec<String> = ob.queue.iter().map(|p| self.render_process(p)).collect();
            q.sort();
            for item in q {
                s.push_str(&format!(",q[{item}]"));
            }
            s.push_str(")\n");
        }
        let mut cogs: Vec<(usize, CogId)> = self.cog_rank.iter().map(|(c, r)| (*r, *c)).collect();
        cogs.sort();
        for (r, c) in cogs {
            let act = match self.cfg.cogs[&c] {
                Some(o) => format!("o{}", self.obj_rank[&o]),
                None => "eps".to_string(),
            };
            s.push_str(&format!("cog(c{r},{act})\n"));
        }
        let mut futs: Vec<(usize, FutId)> = self.fut_rank.iter().map(|(f, r)| (*r, *f)).collect();
        futs.sort();
        for (r, f) in futs {
            s.push_str(&format!("fut(f{r},{})\n", self.value_key(self.cfg.futures[&f].as_ref())));
        }
        let mut invocs: Vec<String> = self
            .cfg
            .invocs
            .iter()
            .map(|inv| {
                format!(
                    "invoc(o{},f{},{},{})",
                    self.obj_rank[&inv.callee],
                    self.fut_rank[&inv.fut],
                    inv.method,
                    inv.args.iter().map(|v| self.vname(v)).collect::<Vec<_>>().join(",")
                )
            })
            .collect();
        invocs.sort();
        for i in invocs {
            s.push_str(&i);
            s.push('\n');
        }
        s
    }

    fn render_process(&self, p: &Process) -> String {
        let mut s = format!("destiny=f{};", self.fut_rank[&p.destiny]);
        for (n, v) in &p.locals {
            s.push_str(&format!("{n}={};", self.vname(v)));
        }
        s.push_str(&stmts_string(&p.stmts, &|f| format!("f{}", self.fut_rank[&f])));
        s
    }
}

/// Stable text for a statement list; runtime future names inside `cont`
/// are rendered through `fut_name`.
fn stmts_string(stmts: &[RtStmt], fut_name: &dyn Fn(FutId) -> String) -> String {
    let mut s = String::new();
    for st in stmts {
        match st {
            RtStmt::Cont(f) => s.push_str(&format!("cont({});", fut_name(*f))),
            RtStmt::Src(t) => s.push_str(&format!("{t:?};")),
        }
    }
    s
}

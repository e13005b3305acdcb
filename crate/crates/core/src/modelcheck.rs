//! Model-checking analysis of contracts: the main contract pair is
//! evaluated by unfolding method invocations, with recursive methods
//! unfolded as many times as twice the order of their cog-name mutation;
//! the resulting contract pair is flattened into lams and scanned for
//! circularities. Only linear recursive contract tables are supported.

use crate::contract::*;
use crate::fixpoint::{cog_map, extract, AnalysisVerdict, FixpointError};
use crate::lam::{Lam, LamPair};
use crate::solve::Fresh;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelCheckError {
    #[error(
        "contract table is not linear recursive (offending method(s): {0}); \
         use the fixpoint back-end for this program"
    )]
    Nonlinear(String),
    #[error("no contract for invoked method {0}.{1}")]
    MissingMethod(String, String),
    #[error("record {0} does not match the shape of {1}")]
    ShapeMismatch(String, String),
    #[error("evaluation exceeded {0} unfolding steps")]
    ResourceLimit(usize),
    #[error("mutation order search exceeded {0} iterations")]
    OrderSearchLimit(usize),
}

impl From<FixpointError> for ModelCheckError {
    fn from(e: FixpointError) -> Self {
        match e {
            FixpointError::MissingMethod(c, m) => ModelCheckError::MissingMethod(c, m),
            FixpointError::ShapeMismatch(a, b) => ModelCheckError::ShapeMismatch(a, b),
            FixpointError::ResourceLimit(n) => ModelCheckError::ResourceLimit(n),
            FixpointError::Lam(e) => ModelCheckError::ShapeMismatch(e.to_string(), String::new()),
        }
    }
}

/// One position of a mutation image: a reuse of a formal name or a fresh
/// slot (equal slot identifiers share the fresh name drawn per application).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Slot {
    Formal(usize),
    Fresh(usize),
}

/// A transformation of cog-name tuples induced by a recursive call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mutation {
    pub arity: usize,
    pub image: Vec<Slot>,
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let formal =
            (0..self.arity).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
        let image = self
            .image
            .iter()
            .map(|s| match s {
                Slot::Formal(i) => format!("x{i}"),
                Slot::Fresh(i) => format!("z{i}'"),
            })
            .collect::<Vec<_>>()
            .join(",");
        write!(f, "({formal}) ~> ({image})")
    }
}

/// Applies the mutation to a tuple, drawing fresh names for fresh slots
/// (equal slots share the name within one application).
pub fn apply_mutation(mu: &Mutation, tuple: &[Cog], fresh: &mut Fresh) -> Vec<Cog> {
    assert_eq!(tuple.len(), mu.arity, "mutation arity mismatch");
    let mut drawn: BTreeMap<usize, Cog> = BTreeMap::new();
    mu.image
        .iter()
        .map(|slot| match slot {
            Slot::Formal(i) => tuple[*i],
            Slot::Fresh(id) => *drawn.entry(*id).or_insert_with(|| fresh.cog_var()),
        })
        .collect()
}

/// A flashback: an injection `i` with `old = i(new)` pointwise that is the
/// identity on the names of `base`.
pub fn find_flashback(old: &[Cog], new: &[Cog], base: &[Cog]) -> Option<BTreeMap<Cog, Cog>> {
    if old.len() != new.len() {
        return None;
    }
    let mut map: BTreeMap<Cog, Cog> = BTreeMap::new();
    for (&o, &n) in old.iter().zip(new) {
        if base.contains(&n) && o != n {
            return None;
        }
        match map.get(&n) {
            Some(&prev) if prev != o => return None,
            _ => {
                map.insert(n, o);
            }
        }
    }
    // Injectivity.
    let mut seen = std::collections::BTreeSet::new();
    for v in map.values() {
        if !seen.insert(*v) {
            return None;
        }
    }
    Some(map)
}

const ORDER_SEARCH_CAP: usize = 4096;

/// The order of a mutation: the first `k` such that some earlier iterate
/// admits a flashback from the `k`-th.
pub fn mutation_order(mu: &Mutation) -> Result<usize, ModelCheckError> {
    let mut fresh = Fresh::starting_at(0, 1_000_000, 0);
    let mut tuples: Vec<Vec<Cog>> = vec![(0..mu.arity as u32)
        .map(|i| Cog::Var(2_000_000 + i))
        .collect()];
    for k in 1..=ORDER_SEARCH_CAP {
        let next = apply_mutation(mu, tuples.last().unwrap(), &mut fresh);
        tuples.push(next);
        for h in 0..k {
            let base = tuples[h].clone();
            if find_flashback(&tuples[h], &tuples[k], &base).is_some() {
                return Ok(k);
            }
        }
    }
    Err(ModelCheckError::OrderSearchLimit(ORDER_SEARCH_CAP))
}

#[derive(Debug, Clone, Serialize)]
pub struct RecursionInfo {
    pub recursive: bool,
    pub linear: bool,
    /// The cycle of methods this one recurses through, starting at itself.
    pub cycle: Vec<String>,
    pub mutation: Option<Mutation>,
    pub order: Option<usize>,
}

/// Call-graph analysis: detects (mutual) recursion, rejects nonlinear
/// tables, and computes the mutation and order of every recursive method.
pub fn check_linear(
    cct: &ContractTable,
) -> Result<BTreeMap<(String, String), RecursionInfo>, ModelCheckError> {
    let keys: Vec<(String, String)> = cct.methods.keys().cloned().collect();
    let idx: BTreeMap<&(String, String), usize> =
        keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    // Call edges, with the invocation that witnesses each edge.
    let mut edges: Vec<Vec<(usize, Invk)>> = vec![Vec::new(); keys.len()];
    for (i, key) in keys.iter().enumerate() {
        let mc = &cct.methods[key];
        for invk in mc.sync.invocations().into_iter().chain(mc.unsync.invocations()) {
            let callee = (invk.class.clone(), invk.method.clone());
            if let Some(&j) = idx.get(&callee) {
                edges[i].push((j, invk.clone()));
            }
        }
    }
    let scc_of = scc_ids(keys.len(), &edges);
    let scc_size = {
        let mut m: BTreeMap<usize, usize> = BTreeMap::new();
        for &s in &scc_of {
            *m.entry(s).or_default() += 1;
        }
        m
    };

    let mut out = BTreeMap::new();
    let mut offenders = Vec::new();
    for (i, key) in keys.iter().enumerate() {
        let in_cycle = scc_size[&scc_of[i]] > 1
            || edges[i].iter().any(|(j, _)| *j == i);
        let recursive_edges: Vec<&(usize, Invk)> =
            edges[i].iter().filter(|(j, _)| scc_of[*j] == scc_of[i] && in_cycle).collect();
        let linear = recursive_edges.len() <= 1;
        if !linear {
            offenders.push(format!("{}.{}", key.0, key.1));
        }
        let mut info = RecursionInfo {
            recursive: in_cycle,
            linear,
            cycle: Vec::new(),
            mutation: None,
            order: None,
        };
        if in_cycle && linear {
            // Follow the unique recursive edges around the cycle.
            let mut cycle = vec![i];
            let mut steps: Vec<Invk> = Vec::new();
            let mut cur = i;
            loop {
                let (next, invk) = {
                    let es: Vec<&(usize, Invk)> = edges[cur]
                        .iter()
                        .filter(|(j, _)| scc_of[*j] == scc_of[i])
                        .collect();
                    if es.len() != 1 {
                        offenders.push(format!("{}.{}", keys[cur].0, keys[cur].1));
                        break;
                    }
                    (es[0].0, es[0].1.clone())
                };
                steps.push(invk);
                if next == i {
                    break;
                }
                cycle.push(next);
                cur = next;
            }
            info.cycle = cycle.iter().map(|&j| format!("{}.{}", keys[j].0, keys[j].1)).collect();
            if offenders.is_empty() {
                let mu = mutation_of_cycle(cct, &keys, &cycle, &steps)?;
                info.order = Some(mutation_order(&mu)?);
                info.mutation = Some(mu);
            }
        }
        out.insert(key.clone(), info);
    }
    if !offenders.is_empty() {
        offenders.sort();
        offenders.dedup();
        return Err(ModelCheckError::Nonlinear(offenders.join(", ")));
    }
    Ok(out)
}

/// The mutation of a method's header tuple induced by one trip around its
/// recursion cycle: formal-name reuses stay positional, names outside the
/// formal set become fresh slots (equal names map to equal slots).
fn mutation_of_cycle(
    cct: &ContractTable,
    keys: &[(String, String)],
    cycle: &[usize],
    steps: &[Invk],
) -> Result<Mutation, ModelCheckError> {
    let entry = &cct.methods[&keys[cycle[0]]];
    let entry_recs: Vec<&Rec> = std::iter::once(&entry.recv).chain(entry.args.iter()).collect();
    let arity = extract(&entry_recs).len();
    let mut current: Vec<Slot> = (0..arity).map(Slot::Formal).collect();
    let mut next_fresh = 0usize;
    for (step_idx, invk) in steps.iter().enumerate() {
        let caller = &cct.methods[&keys[cycle[step_idx]]];
        let caller_recs: Vec<&Rec> =
            std::iter::once(&caller.recv).chain(caller.args.iter()).collect();
        let caller_formals = extract(&caller_recs);
        let call_recs: Vec<&Rec> = std::iter::once(&invk.recv).chain(invk.args.iter()).collect();
        let call_cogs = extract(&call_recs);
        let mut fresh_slots: BTreeMap<Cog, Slot> = BTreeMap::new();
        let image: Vec<Slot> = call_cogs
            .iter()
            .map(|c| match caller_formals.iter().position(|f| f == c) {
                Some(j) => current[j],
                None => *fresh_slots.entry(*c).or_insert_with(|| {
                    let s = Slot::Fresh(next_fresh);
                    next_fresh += 1;
                    s
                }),
            })
            .collect();
        current = image;
    }
    if current.len() != arity {
        return Err(ModelCheckError::ShapeMismatch(
            format!("cycle image arity {}", current.len()),
            format!("header arity {arity}"),
        ));
    }
    Ok(Mutation { arity, image: current })
}

/// Tarjan SCC identifiers over an adjacency structure.
fn scc_ids(n: usize, edges: &[Vec<(usize, Invk)>]) -> Vec<usize> {
    struct St {
        index: Vec<usize>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        counter: usize,
        scc: Vec<usize>,
        next_scc: usize,
    }
    let mut st = St {
        index: vec![usize::MAX; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        counter: 0,
        scc: vec![usize::MAX; n],
        next_scc: 0,
    };
    for start in 0..n {
        if st.index[start] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(start, 0)];
        st.index[start] = st.counter;
        st.low[start] = st.counter;
        st.counter += 1;
        st.stack.push(start);
        st.on_stack[start] = true;
        while let Some(&mut (v, ref mut ci)) = call.last_mut() {
            if *ci < edges[v].len() {
                let w = edges[v][*ci].0;
                *ci += 1;
                if st.index[w] == usize::MAX {
                    st.index[w] = st.counter;
                    st.low[w] = st.counter;
                    st.counter += 1;
                    st.stack.push(w);
                    st.on_stack[w] = true;
                    call.push((w, 0));
                } else if st.on_stack[w] {
                    st.low[v] = st.low[v].min(st.index[w]);
                }
            } else {
                call.pop();
                if let Some(&mut (p, _)) = call.last_mut() {
                    st.low[p] = st.low[p].min(st.low[v]);
                }
                if st.low[v] == st.index[v] {
                    loop {
                        let w = st.stack.pop().unwrap();
                        st.on_stack[w] = false;
                        st.scc[w] = st.next_scc;
                        if w == v {
                            break;
                        }
                    }
                    st.next_scc += 1;
                }
            }
        }
    }
    st.scc
}

/// Contract-pair evaluation terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cp {
    Zero,
    Dep(Dep),
    Invk { invk: Invk, sync: bool, dep: Option<Dep>, budget: Option<u32> },
    Pair { fst: Box<Cp>, snd: Box<Cp>, cog: Cog },
    Extend { inner: Box<Cp>, dep: Dep },
    Plus(Box<Cp>, Box<Cp>),
    Seq(Box<Cp>, Box<Cp>),
    Par(Box<Cp>, Box<Cp>),
}

impl fmt::Display for Cp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cp::Zero => write!(f, "0"),
            Cp::Dep(d) => write!(f, "0.{d}"),
            Cp::Invk { invk, sync, dep, .. } => {
                let bang = if *sync { "." } else { "!" };
                write!(
                    f,
                    "{}{bang}{} {}({}) -> {}",
                    invk.class,
                    invk.method,
                    invk.recv,
                    invk.args.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", "),
                    invk.ret
                )?;
                if let Some(d) = dep {
                    write!(f, ".{d}")?;
                }
                Ok(())
            }
            Cp::Pair { fst, snd, cog } => write!(f, "< {fst} , {snd} >_{cog}"),
            Cp::Extend { inner, dep } => write!(f, "({inner}) & {dep}"),
            Cp::Plus(a, b) => write!(f, "({a} + {b})"),
            Cp::Seq(a, b) => write!(f, "({a} ; {b})"),
            Cp::Par(a, b) => write!(f, "({a} || {b})"),
        }
    }
}

pub struct ModelChecker<'c> {
    cct: &'c ContractTable,
    info: BTreeMap<(String, String), RecursionInfo>,
    scc_of: BTreeMap<(String, String), usize>,
    fresh: Fresh,
    steps_cap: usize,
}

#[derive(Debug, Clone)]
pub struct ModelCheckAnalysis {
    pub verdict: AnalysisVerdict,
    pub lam: LamPair,
    pub witness: Option<Vec<Cog>>,
    pub steps: usize,
    pub final_cp: Cp,
    pub info: BTreeMap<(String, String), RecursionInfo>,
}

/// Evaluation order for redex selection: the deterministic default or a
/// seeded random order used by the differential tests.
#[derive(Debug, Clone, Copy)]
pub enum EvalOrder {
    LeftmostInnermost,
    Random(u64),
}

pub fn analyze(cct: &ContractTable) -> Result<ModelCheckAnalysis, ModelCheckError> {
    analyze_with(cct, EvalOrder::LeftmostInnermost, 0)
}

/// `extra_budget` adds unfoldings beyond twice the order (used to validate
/// the stopping criterion).
pub fn analyze_with(
    cct: &ContractTable,
    order: EvalOrder,
    extra_budget: u32,
) -> Result<ModelCheckAnalysis, ModelCheckError> {
    let info = check_linear(cct)?;
    let mut checker = ModelChecker {
        cct,
        scc_of: scc_map(cct),
        info,
        fresh: fresh_above_table(cct),
        steps_cap: 200_000,
    };
    let policy = BudgetPolicy::TopLevel { extra: extra_budget };
    let fst = checker.build_cp(&cct.main_sync, &policy);
    let snd = checker.build_cp(&cct.main_unsync, &policy);
    let mut cp = Cp::Pair { fst: Box::new(fst), snd: Box::new(snd), cog: Cog::Start };

    let mut steps = 0usize;
    match order {
        EvalOrder::LeftmostInnermost => loop {
            if !checker.step_leftmost(&mut cp, extra_budget)? {
                break;
            }
            steps += 1;
            if steps > checker.steps_cap {
                return Err(ModelCheckError::ResourceLimit(checker.steps_cap));
            }
        },
        EvalOrder::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            loop {
                let n = checker.count_redexes(&cp);
                if n == 0 {
                    break;
                }
                let pick = rng.gen_range(0..n);
                let mut skipped = 0usize;
                checker.step_nth(&mut cp, pick, &mut skipped, Cog::Start, extra_budget)?;
                steps += 1;
                if steps > checker.steps_cap {
                    return Err(ModelCheckError::ResourceLimit(checker.steps_cap));
                }
            }
        }
    }

    let lam = flatten(&cp).normalize();
    let witness = lam.circularity_witness();
    let verdict = if witness.is_some() {
        AnalysisVerdict::PotentialDeadlock
    } else {
        AnalysisVerdict::DeadlockFree
    };
    Ok(ModelCheckAnalysis { verdict, lam, witness, steps, final_cp: cp, info: checker.info })
}

fn scc_map(cct: &ContractTable) -> BTreeMap<(String, String), usize> {
    let keys: Vec<(String, String)> = cct.methods.keys().cloned().collect();
    let idx: BTreeMap<&(String, String), usize> =
        keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut edges: Vec<Vec<(usize, Invk)>> = vec![Vec::new(); keys.len()];
    for (i, key) in keys.iter().enumerate() {
        let mc = &cct.methods[key];
        for invk in mc.sync.invocations().into_iter().chain(mc.unsync.invocations()) {
            if let Some(&j) = idx.get(&(invk.class.clone(), invk.method.clone())) {
                edges[i].push((j, invk.clone()));
            }
        }
    }
    let ids = scc_ids(keys.len(), &edges);
    keys.into_iter().zip(ids).collect()
}

fn fresh_above_table(cct: &ContractTable) -> Fresh {
    let mut max_cog = 0u32;
    let mut max_rec = 0u32;
    let mut scan_cogs = |cs: &[Cog]| {
        for c in cs {
            if let Cog::Var(v) = c {
                max_cog = max_cog.max(v + 1);
            }
        }
    };
    let mut cogs = Vec::new();
    let mut vars = Vec::new();
    for mc in cct.methods.values() {
        cogs.extend(mc.header_cogs());
        mc.sync.cogs(&mut cogs);
        mc.unsync.cogs(&mut cogs);
        mc.ret.cogs(&mut cogs);
        mc.recv.record_vars(&mut vars);
        mc.sync.record_vars(&mut vars);
        mc.unsync.record_vars(&mut vars);
        mc.ret.record_vars(&mut vars);
    }
    cct.main_sync.cogs(&mut cogs);
    cct.main_unsync.cogs(&mut cogs);
    cct.main_sync.record_vars(&mut vars);
    cct.main_unsync.record_vars(&mut vars);
    scan_cogs(&cogs);
    for v in vars {
        max_rec = max_rec.max(v + 1);
    }
    Fresh::starting_at(max_rec, max_cog, 0)
}

/// How unfolding budgets are assigned to the invocation leaves of a
/// contract being turned into an evaluation term.
#[derive(Debug, Clone, Copy)]
enum BudgetPolicy {
    /// Top-level contracts: recursive callees start at twice their order.
    TopLevel { extra: u32 },
    /// A method body being inlined: callees inside the same recursion
    /// cycle inherit the decremented counter.
    Inlined { scc: usize, remaining: Option<u32>, extra: u32 },
}

impl<'c> ModelChecker<'c> {
    fn budget_for(&self, policy: &BudgetPolicy, class: &str, method: &str) -> Option<u32> {
        let key = (class.to_string(), method.to_string());
        let inf = &self.info[&key];
        let fresh_budget = |extra: u32| {
            inf.recursive
                .then(|| 2 * inf.order.expect("linear recursive methods have orders") as u32 + extra)
        };
        match policy {
            BudgetPolicy::TopLevel { extra } => fresh_budget(*extra),
            BudgetPolicy::Inlined { scc, remaining, extra } => {
                if self.scc_of[&key] == *scc {
                    if let Some(b) = remaining {
                        return Some(b.saturating_sub(1));
                    }
                }
                fresh_budget(*extra)
            }
        }
    }

    fn build_cp(&mut self, c: &Contract, policy: &BudgetPolicy) -> Cp {
        match c {
            Contract::Null => Cp::Zero,
            Contract::Dep(d) => Cp::Dep(*d),
            Contract::SyncInvk(i) => Cp::Invk {
                invk: i.clone(),
                sync: true,
                dep: None,
                budget: self.budget_for(policy, &i.class, &i.method),
            },
            Contract::AsyncInvk(i, d) => Cp::Invk {
                invk: i.clone(),
                sync: false,
                dep: *d,
                budget: self.budget_for(policy, &i.class, &i.method),
            },
            Contract::Seq(a, b) => Cp::Seq(
                Box::new(self.build_cp(a, policy)),
                Box::new(self.build_cp(b, policy)),
            ),
            Contract::Plus(a, b) => Cp::Plus(
                Box::new(self.build_cp(a, policy)),
                Box::new(self.build_cp(b, policy)),
            ),
            Contract::Par(a, b) => Cp::Par(
                Box::new(self.build_cp(a, policy)),
                Box::new(self.build_cp(b, policy)),
            ),
        }
    }

    fn unfoldable(cp: &Cp) -> bool {
        matches!(cp, Cp::Invk { budget, .. } if *budget != Some(0))
    }

    fn count_redexes(&self, cp: &Cp) -> usize {
        match cp {
            Cp::Zero | Cp::Dep(_) => 0,
            Cp::Invk { .. } => usize::from(Self::unfoldable(cp)),
            Cp::Pair { fst, snd, .. } => self.count_redexes(fst) + self.count_redexes(snd),
            Cp::Extend { inner, .. } => self.count_redexes(inner),
            Cp::Plus(a, b) | Cp::Seq(a, b) | Cp::Par(a, b) => {
                self.count_redexes(a) + self.count_redexes(b)
            }
        }
    }

    /// Unfolds the leftmost unfoldable invocation; returns false when none.
    fn step_leftmost(&mut self, cp: &mut Cp, extra: u32) -> Result<bool, ModelCheckError> {
        let mut skipped = 0usize;
        self.step_nth(cp, 0, &mut skipped, Cog::Start, extra)
    }

    /// Unfolds the `n`-th unfoldable invocation in leftmost order.
    fn step_nth(
        &mut self,
        cp: &mut Cp,
        n: usize,
        skipped: &mut usize,
        ctx: Cog,
        extra: u32,
    ) -> Result<bool, ModelCheckError> {
        match cp {
            Cp::Zero | Cp::Dep(_) => Ok(false),
            Cp::Invk { .. } => {
                if !Self::unfoldable(cp) {
                    return Ok(false);
                }
                if *skipped < n {
                    *skipped += 1;
                    return Ok(false);
                }
                let Cp::Invk { invk, sync, dep, budget } = cp.clone() else { unreachable!() };
                *cp = self.unfold(&invk, sync, dep, budget, ctx, extra)?;
                Ok(true)
            }
            Cp::Pair { fst, snd, cog } => {
                let c = *cog;
                if self.step_nth(fst, n, skipped, c, extra)? {
                    return Ok(true);
                }
                self.step_nth(snd, n, skipped, c, extra)
            }
            Cp::Extend { inner, .. } => self.step_nth(inner, n, skipped, ctx, extra),
            Cp::Plus(a, b) | Cp::Seq(a, b) | Cp::Par(a, b) => {
                if self.step_nth(a, n, skipped, ctx, extra)? {
                    return Ok(true);
                }
                self.step_nth(b, n, skipped, ctx, extra)
            }
        }
    }

    /// One reduction: inlines the callee's contract pair, with free names
    /// freshened and formals replaced by the call's records; same-cog
    /// synchronous calls gain `(c,c)^a`, remote ones `(c,c')`, and
    /// synchronised asynchronous calls keep their recorded dependency.
    fn unfold(
        &mut self,
        invk: &Invk,
        sync: bool,
        dep: Option<Dep>,
        budget: Option<u32>,
        ctx: Cog,
        extra: u32,
    ) -> Result<Cp, ModelCheckError> {
        let key = (invk.class.clone(), invk.method.clone());
        let mc = self
            .cct
            .methods
            .get(&key)
            .ok_or_else(|| ModelCheckError::MissingMethod(key.0.clone(), key.1.clone()))?;

        // Substitution: header formals to actuals, free names to fresh ones.
        let mut cmap: BTreeMap<Cog, Cog> = BTreeMap::new();
        for b in mc.free_cogs() {
            cmap.insert(b, self.fresh.cog_var());
        }
        cog_map(&invk.recv, &mc.recv, &mut cmap)?;
        for (actual, formal) in invk.args.iter().zip(&mc.args) {
            cog_map(actual, formal, &mut cmap)?;
        }
        let mut rmap: BTreeMap<u32, Rec> = BTreeMap::new();
        rec_match(&invk.recv, &mc.recv, &mut rmap);
        for (actual, formal) in invk.args.iter().zip(&mc.args) {
            rec_match(actual, formal, &mut rmap);
        }
        let body_sync = subst_contract(&mc.sync, &cmap, &rmap);
        let body_unsync = subst_contract(&mc.unsync, &cmap, &rmap);

        // Budgets: calls back into the unfolded method's recursion cycle
        // inherit the decremented counter; other recursive callees start
        // their own budget.
        let policy = BudgetPolicy::Inlined { scc: self.scc_of[&key], remaining: budget, extra };
        let fst = self.build_cp(&body_sync, &policy);
        let snd = self.build_cp(&body_unsync, &policy);

        let recv_cog = invk.recv.root().ok_or_else(|| {
            ModelCheckError::ShapeMismatch(invk.recv.to_string(), "object record".into())
        })?;
        let pair = |cog: Cog| Cp::Pair { fst: Box::new(fst.clone()), snd: Box::new(snd.clone()), cog };
        let out = if sync {
            if recv_cog == ctx {
                Cp::Extend { inner: Box::new(pair(ctx)), dep: Dep::awaited(ctx, ctx) }
            } else {
                Cp::Extend { inner: Box::new(pair(recv_cog)), dep: Dep::get(ctx, recv_cog) }
            }
        } else {
            match dep {
                None => pair(recv_cog),
                Some(d) => Cp::Extend { inner: Box::new(pair(recv_cog)), dep: d },
            }
        };
        Ok(out)
    }
}

/// Structural matching of an actual record against a header record,
/// binding the header's record variables.
fn rec_match(actual: &Rec, formal: &Rec, out: &mut BTreeMap<u32, Rec>) {
    match (actual, formal) {
        (a, Rec::Var(v)) => {
            out.entry(*v).or_insert_with(|| a.clone());
        }
        (Rec::Obj { fields: fa, .. }, Rec::Obj { fields: ff, .. }) if fa.len() == ff.len() => {
            for ((_, ra), (_, rf)) in fa.iter().zip(ff) {
                rec_match(ra, rf, out);
            }
        }
        (Rec::Awaited { inner: ia, .. }, Rec::Awaited { inner: if_, .. }) => {
            rec_match(ia, if_, out);
        }
        _ => {}
    }
}

fn subst_record(r: &Rec, cmap: &BTreeMap<Cog, Cog>, rmap: &BTreeMap<u32, Rec>) -> Rec {
    match r {
        Rec::Unit => Rec::Unit,
        Rec::Var(v) => rmap.get(v).cloned().unwrap_or(Rec::Var(*v)),
        Rec::Obj { cog, fields } => Rec::Obj {
            cog: cmap.get(cog).copied().unwrap_or(*cog),
            fields: fields
                .iter()
                .map(|(n, r)| (n.clone(), subst_record(r, cmap, rmap)))
                .collect(),
        },
        Rec::Awaited { cog, inner } => Rec::Awaited {
            cog: cmap.get(cog).copied().unwrap_or(*cog),
            inner: Box::new(subst_record(inner, cmap, rmap)),
        },
    }
}

fn subst_contract(c: &Contract, cmap: &BTreeMap<Cog, Cog>, rmap: &BTreeMap<u32, Rec>) -> Contract {
    let map_dep = |d: &Dep| Dep {
        from: cmap.get(&d.from).copied().unwrap_or(d.from),
        to: cmap.get(&d.to).copied().unwrap_or(d.to),
        awaited: d.awaited,
    };
    let map_invk = |i: &Invk| Invk {
        class: i.class.clone(),
        method: i.method.clone(),
        recv: subst_record(&i.recv, cmap, rmap),
        args: i.args.iter().map(|r| subst_record(r, cmap, rmap)).collect(),
        ret: subst_record(&i.ret, cmap, rmap),
    };
    match c {
        Contract::Null => Contract::Null,
        Contract::Dep(d) => Contract::Dep(map_dep(d)),
        Contract::SyncInvk(i) => Contract::SyncInvk(map_invk(i)),
        Contract::AsyncInvk(i, d) => {
            Contract::AsyncInvk(map_invk(i), d.as_ref().map(map_dep))
        }
        Contract::Seq(a, b) => Contract::Seq(
            Box::new(subst_contract(a, cmap, rmap)),
            Box::new(subst_contract(b, cmap, rmap)),
        ),
        Contract::Plus(a, b) => Contract::Plus(
            Box::new(subst_contract(a, cmap, rmap)),
            Box::new(subst_contract(b, cmap, rmap)),
        ),
        Contract::Par(a, b) => Contract::Par(
            Box::new(subst_contract(a, cmap, rmap)),
            Box::new(subst_contract(b, cmap, rmap)),
        ),
    }
}

/// Flattening: invocation leaves map to the zero pair (with their recorded
/// dependency, if any), evaluation pairs compose sequentially, and the
/// remaining operators act per the lam algebra.
pub fn flatten(cp: &Cp) -> LamPair {
    match cp {
        Cp::Zero => LamPair::zero(),
        Cp::Dep(d) => LamPair::zero().extend(*d),
        Cp::Invk { dep: None, .. } => LamPair::zero(),
        Cp::Invk { dep: Some(d), .. } => LamPair::zero().extend(*d),
        Cp::Pair { fst, snd, .. } => flatten(fst).seq(&flatten(snd)),
        Cp::Extend { inner, dep } => flatten(inner).extend(*dep),
        Cp::Plus(a, b) => flatten(a).plus(&flatten(b)),
        Cp::Seq(a, b) => flatten(a).seq(&flatten(b)),
        Cp::Par(a, b) => flatten(a).par(&flatten(b)),
    }
}

/// The flattening split into the list of lams of every evaluation pair,
/// before the final composition (the flat form of the pair tree).
pub fn flatten_list(cp: &Cp) -> Vec<Lam> {
    let pair = flatten(cp);
    vec![pair.present, pair.future]
}

//! Lams: sets of relations on cog names, the model in which contracts are
//! evaluated, together with the operations of the lam algebra, the
//! pre-order used for fixpoint detection, and circularity detection.

use crate::contract::{Cog, Dep};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A relation on cog names: a set of (possibly await-flagged) pairs.
pub type Relation = BTreeSet<Dep>;

/// A lam: a set of relations. Never empty; the unit `0` is `{ {} }`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Lam {
    pub relations: BTreeSet<Relation>,
}

impl Lam {
    /// The lam `0 = { {} }`.
    pub fn zero() -> Lam {
        let mut relations = BTreeSet::new();
        relations.insert(Relation::new());
        Lam { relations }
    }

    pub fn singleton(rel: Relation) -> Lam {
        let mut relations = BTreeSet::new();
        relations.insert(rel);
        Lam { relations }
    }

    pub fn from_deps(deps: &[Dep]) -> Lam {
        Lam::singleton(deps.iter().copied().collect())
    }

    pub fn is_zero(&self) -> bool {
        self.relations.len() == 1 && self.relations.iter().next().unwrap().is_empty()
    }

    /// `[extension]`: adds the pair to every relation.
    pub fn extend(&self, dep: Dep) -> Lam {
        Lam {
            relations: self
                .relations
                .iter()
                .map(|rel| {
                    let mut r = rel.clone();
                    r.insert(dep);
                    r
                })
                .collect(),
        }
    }

    /// `[parallel]`: pairwise unions of relations.
    pub fn par(&self, other: &Lam) -> Lam {
        let mut relations = BTreeSet::new();
        for a in &self.relations {
            for b in &other.relations {
                relations.insert(a.union(b).copied().collect());
            }
        }
        Lam { relations }
    }

    /// Set union of the two lams.
    pub fn union(&self, other: &Lam) -> Lam {
        Lam { relations: self.relations.union(&other.relations).cloned().collect() }
    }

    /// Removes relations subsumed by a superset relation. Subsumption keeps
    /// both the circularity verdict and the pre-order class unchanged.
    pub fn normalize(&self) -> Lam {
        let rels: Vec<&Relation> = self.relations.iter().collect();
        let mut keep = BTreeSet::new();
        for r in &rels {
            let subsumed =
                rels.iter().any(|other| r.len() < other.len() && r.is_subset(other));
            if !subsumed {
                keep.insert((*r).clone());
            }
        }
        if keep.is_empty() {
            keep.insert(Relation::new());
        }
        Lam { relations: keep }
    }

    pub fn cogs(&self) -> BTreeSet<Cog> {
        let mut out = BTreeSet::new();
        for rel in &self.relations {
            for d in rel {
                out.insert(d.from);
                out.insert(d.to);
            }
        }
        out
    }

    pub fn map_cogs(&self, f: &impl Fn(Cog) -> Cog) -> Lam {
        Lam {
            relations: self
                .relations
                .iter()
                .map(|rel| rel.iter().map(|d| d.map(f)).collect())
                .collect(),
        }
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    /// True iff some relation contains a circularity (Tarjan-based).
    pub fn has_circularity(&self) -> bool {
        self.relations.iter().any(relation_has_circularity)
    }

    /// A concrete cycle of cog names witnessing a circularity, if any.
    pub fn circularity_witness(&self) -> Option<Vec<Cog>> {
        self.relations.iter().find_map(relation_cycle_witness)
    }
}

impl fmt::Display for Lam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        write!(f, "{{")?;
        for (i, rel) in self.relations.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{{")?;
            for (j, d) in rel.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{d}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

/// A pair of lams `<present, future>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LamPair {
    pub present: Lam,
    pub future: Lam,
}

impl LamPair {
    pub fn zero() -> LamPair {
        LamPair { present: Lam::zero(), future: Lam::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.present.is_zero() && self.future.is_zero()
    }

    /// `[extension (on pairs of lams)]`: acts on the first component.
    pub fn extend(&self, dep: Dep) -> LamPair {
        LamPair { present: self.present.extend(dep), future: self.future.clone() }
    }

    /// `[parallel (on pairs of lams)]`:
    /// `<L1,L1'> |_ <L2,L2'> = <(L1 u L1') || (L2 u L2'), 0>`.
    pub fn par(&self, other: &LamPair) -> LamPair {
        LamPair {
            present: self.present.union(&self.future).par(&other.present.union(&other.future)),
            future: Lam::zero(),
        }
    }

    /// Componentwise parallel: `<L1 || L2, L1' || L2'>`. This is the
    /// composition the class-table transformation uses, keeping the
    /// behaviour of unsynchronised callees in the future component.
    pub fn par_componentwise(&self, other: &LamPair) -> LamPair {
        LamPair {
            present: self.present.par(&other.present),
            future: self.future.par(&other.future),
        }
    }

    /// `[sequence (on pairs of lams)]`.
    pub fn seq(&self, other: &LamPair) -> LamPair {
        if other.present.is_zero() {
            LamPair {
                present: self.present.clone(),
                future: self.future.par(&other.future),
            }
        } else {
            LamPair {
                present: self.present.union(&other.present.par(&self.future)),
                future: self.future.par(&other.future),
            }
        }
    }

    /// `[plus (on pairs of lams)]`: componentwise union.
    pub fn plus(&self, other: &LamPair) -> LamPair {
        LamPair {
            present: self.present.union(&other.present),
            future: self.future.union(&other.future),
        }
    }

    pub fn normalize(&self) -> LamPair {
        LamPair { present: self.present.normalize(), future: self.future.normalize() }
    }

    pub fn cogs(&self) -> BTreeSet<Cog> {
        let mut out = self.present.cogs();
        out.extend(self.future.cogs());
        out
    }

    pub fn map_cogs(&self, f: &impl Fn(Cog) -> Cog) -> LamPair {
        LamPair { present: self.present.map_cogs(f), future: self.future.map_cogs(f) }
    }

    pub fn relation_count(&self) -> usize {
        self.present.relation_count() + self.future.relation_count()
    }

    pub fn has_circularity(&self) -> bool {
        self.present.has_circularity() || self.future.has_circularity()
    }

    pub fn circularity_witness(&self) -> Option<Vec<Cog>> {
        self.present.circularity_witness().or_else(|| self.future.circularity_witness())
    }
}

impl fmt::Display for LamPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "< {} , {} >", self.present, self.future)
    }
}

/// A parameterised pair of lams `\c1..ck. <L, L'>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParamLamPair {
    pub params: Vec<Cog>,
    pub pair: LamPair,
}

impl ParamLamPair {
    pub fn zero(params: Vec<Cog>) -> ParamLamPair {
        ParamLamPair { params, pair: LamPair::zero() }
    }

    pub fn free_cogs(&self) -> Vec<Cog> {
        self.pair.cogs().into_iter().filter(|c| !self.params.contains(c)).collect()
    }
}

impl fmt::Display for ParamLamPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.params.is_empty() {
            write!(f, "\\")?;
            for (i, c) in self.params.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ". ")?;
        }
        write!(f, "{}", self.pair)
    }
}

/// The lam table: one parameterised pair per method.
pub type LamTable = BTreeMap<(String, String), ParamLamPair>;

/// Errors from the pre-order search.
#[derive(Debug, thiserror::Error)]
pub enum LamError {
    #[error("pre-order check exceeds the free-name cap: {0} free names (max {1})")]
    TooManyFreeNames(usize, usize),
}

const PREORDER_FREE_CAP: usize = 12;

/// `a ⋐ b` (Def. 7): an injective renaming `k`, identity on the bound
/// names, such that every relation of `a` maps into some relation of `b`.
/// The search is exponential in the number of free names and capped.
pub fn preorder_leq(a: &ParamLamPair, b: &ParamLamPair) -> Result<bool, LamError> {
    if a.params.len() != b.params.len() {
        return Ok(false);
    }
    // Bound names are matched positionally.
    let mut base: BTreeMap<Cog, Cog> = BTreeMap::new();
    for (x, y) in a.params.iter().zip(&b.params) {
        base.insert(*x, *y);
    }
    // Start is always fixed.
    base.insert(Cog::Start, Cog::Start);

    let a_names: Vec<Cog> = a
        .pair
        .cogs()
        .into_iter()
        .filter(|c| !base.contains_key(c))
        .collect();
    if a_names.len() > PREORDER_FREE_CAP {
        return Err(LamError::TooManyFreeNames(a_names.len(), PREORDER_FREE_CAP));
    }
    let b_names: Vec<Cog> = {
        let mut v: Vec<Cog> = b.pair.cogs().into_iter().collect();
        for c in base.values() {
            if !v.contains(c) {
                v.push(*c);
            }
        }
        v
    };

    fn rels_map_into(pair_a: &LamPair, pair_b: &LamPair, k: &BTreeMap<Cog, Cog>) -> bool {
        let comp = |la: &Lam, lb: &Lam| {
            la.relations.iter().all(|ra| {
                let mapped: Relation = ra.iter().map(|d| d.map(&|c| k[&c])).collect();
                lb.relations.iter().any(|rb| mapped.is_subset(rb))
            })
        };
        comp(&pair_a.present, &pair_b.present) && comp(&pair_a.future, &pair_b.future)
    }

    fn search(
        i: usize,
        a_names: &[Cog],
        b_names: &[Cog],
        k: &mut BTreeMap<Cog, Cog>,
        a: &LamPair,
        b: &LamPair,
    ) -> bool {
        if i == a_names.len() {
            return rels_map_into(a, b, k);
        }
        let src = a_names[i];
        for tgt in b_names {
            if k.values().any(|v| v == tgt) {
                continue;
            }
            k.insert(src, *tgt);
            if search(i + 1, a_names, b_names, k, a, b) {
                k.remove(&src);
                return true;
            }
            k.remove(&src);
        }
        false
    }

    let mut k = base;
    Ok(search(0, &a_names, &b_names, &mut k, &a.pair, &b.pair))
}

/// Equality up to an injective renaming fixing the bound names positionally.
pub fn param_pair_alpha_eq(a: &ParamLamPair, b: &ParamLamPair) -> bool {
    matches!(preorder_leq(a, b), Ok(true)) && matches!(preorder_leq(b, a), Ok(true))
}

pub fn table_leq(a: &LamTable, b: &LamTable) -> Result<bool, LamError> {
    if a.len() != b.len() {
        return Ok(false);
    }
    for (key, pa) in a {
        match b.get(key) {
            Some(pb) => {
                if !preorder_leq(pa, pb)? {
                    return Ok(false);
                }
            }
            None => return Ok(false),
        }
    }
    Ok(true)
}

pub fn table_alpha_eq(a: &LamTable, b: &LamTable) -> bool {
    matches!(table_leq(a, b), Ok(true)) && matches!(table_leq(b, a), Ok(true))
}

/// A relation contains a circularity iff the digraph of its pairs has a
/// cycle with at least one plain (non-await) edge: composing that plain
/// edge around the cycle puts a plain `(c,c)` in the get-closure.
fn relation_has_circularity(rel: &Relation) -> bool {
    scc_with_plain_edge(rel).is_some()
}

fn relation_cycle_witness(rel: &Relation) -> Option<Vec<Cog>> {
    let scc = scc_with_plain_edge(rel)?;
    // Reconstruct a short cycle inside the SCC starting from a plain edge.
    let plain = rel
        .iter()
        .find(|d| !d.awaited && scc.contains(&d.from) && scc.contains(&d.to))
        .expect("scc_with_plain_edge guarantees a plain edge");
    if plain.from == plain.to {
        return Some(vec![plain.from]);
    }
    // BFS from plain.to back to plain.from within the SCC.
    let mut prev: BTreeMap<Cog, Cog> = BTreeMap::new();
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(plain.to);
    while let Some(cur) = queue.pop_front() {
        if cur == plain.from {
            break;
        }
        for d in rel.iter().filter(|d| d.from == cur && scc.contains(&d.to)) {
            if !prev.contains_key(&d.to) && d.to != plain.to {
                prev.insert(d.to, cur);
                queue.push_back(d.to);
            }
        }
    }
    let mut path = vec![plain.from];
    let mut cur = plain.from;
    while cur != plain.to {
        cur = *prev.get(&cur)?;
        path.push(cur);
    }
    path.reverse(); // plain.to ... plain.from
    let mut cycle = vec![plain.from];
    cycle.extend(path);
    cycle.pop();
    Some(cycle)
}

/// Tarjan's strongly connected components over the relation's digraph;
/// returns the node set of an SCC that contains a plain edge, if any.
fn scc_with_plain_edge(rel: &Relation) -> Option<BTreeSet<Cog>> {
    let nodes: Vec<Cog> = {
        let mut s = BTreeSet::new();
        for d in rel {
            s.insert(d.from);
            s.insert(d.to);
        }
        s.into_iter().collect()
    };
    let index_of: BTreeMap<Cog, usize> = nodes.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for d in rel {
        adj[index_of[&d.from]].push(index_of[&d.to]);
    }

    // Iterative Tarjan.
    let n = nodes.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut sccs: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0usize;

    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        // (node, next child index)
        let mut call: Vec<(usize, usize)> = vec![(start, 0)];
        index[start] = counter;
        low[start] = counter;
        counter += 1;
        stack.push(start);
        on_stack[start] = true;
        while let Some(&mut (v, ref mut ci)) = call.last_mut() {
            if *ci < adj[v].len() {
                let w = adj[v][*ci];
                *ci += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&mut (parent, _)) = call.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    sccs.push(comp);
                }
            }
        }
    }

    for comp in sccs {
        let set: BTreeSet<usize> = comp.iter().copied().collect();
        // Any edge between two nodes of a non-trivial SCC lies on a cycle;
        // a one-node SCC needs a self-loop.
        let has_plain_cycle_edge = rel.iter().any(|d| {
            !d.awaited
                && set.contains(&index_of[&d.from])
                && set.contains(&index_of[&d.to])
                && (set.len() > 1 || d.from == d.to)
        });
        if has_plain_cycle_edge {
            return Some(comp.into_iter().map(|i| nodes[i]).collect());
        }
    }
    None
}

/// Brute-force circularity oracle: materializes the full get-closure per
/// Def. 3 and scans for a plain reflexive pair. Kept independent of the
/// Tarjan-based route; the test suite cross-checks the two.
pub fn has_circularity_bruteforce(rel: &Relation) -> bool {
    let closure = get_closure_of(rel);
    closure.iter().any(|d| !d.awaited && d.from == d.to)
}

/// The get-closure of a dependency set: `A` plus every composite
/// `(c,c'')` obtained from a plain `(c,c')` and any `(c',c'')^[a]`.
pub fn get_closure_of(rel: &Relation) -> Relation {
    let mut closure = rel.clone();
    loop {
        let mut added = Vec::new();
        for a in closure.iter().filter(|d| !d.awaited) {
            for b in closure.iter().filter(|d| d.from == a.to) {
                let composite = Dep::get(a.from, b.to);
                if !closure.contains(&composite) {
                    added.push(composite);
                }
            }
        }
        if added.is_empty() {
            return closure;
        }
        closure.extend(added);
    }
}

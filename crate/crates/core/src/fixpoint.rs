//! Fixpoint analysis of contracts: the abstract class table is computed by
//! Knaster-Tarski iteration with saturation, then the main contract pair is
//! evaluated in the lam model and scanned for circularities.
//!
//! Free cog names of method entries (created by `new cog`) are renamed
//! fresh at every unsaturated transformation step; from the saturation
//! point on the renaming is suppressed, which forces a finite fixpoint at
//! the cost of possible false positives.

use crate::contract::*;
use crate::lam::*;
use crate::solve::Fresh;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FixpointError {
    #[error("no contract for invoked method {0}.{1}")]
    MissingMethod(String, String),
    #[error("record {0} does not match the shape of {1}")]
    ShapeMismatch(String, String),
    #[error("lam exceeded the size cap of {0} relations")]
    ResourceLimit(usize),
    #[error(transparent)]
    Lam(#[from] LamError),
}

/// `extr`: the tuple of cog names read off a header record tuple.
pub fn extract(recs: &[&Rec]) -> Vec<Cog> {
    let mut out = Vec::new();
    for r in recs {
        extract_one(r, &mut out);
    }
    out
}

fn extract_one(r: &Rec, out: &mut Vec<Cog>) {
    match r {
        Rec::Unit | Rec::Var(_) => {}
        Rec::Obj { cog, fields } => {
            out.push(*cog);
            for (_, r) in fields {
                extract_one(r, out);
            }
        }
        Rec::Awaited { cog, inner } => {
            out.push(*cog);
            extract_one(inner, out);
        }
    }
}

/// `repl`: pairs the formal cog names of a header positionally with the
/// actual cog names of a call site.
pub fn cog_map(actual: &Rec, formal: &Rec, out: &mut BTreeMap<Cog, Cog>) -> Result<(), FixpointError> {
    match (actual, formal) {
        (_, Rec::Var(_)) => Ok(()),
        (Rec::Unit, Rec::Unit) => Ok(()),
        (Rec::Obj { cog: ca, fields: fa }, Rec::Obj { cog: cf, fields: ff })
            if fa.len() == ff.len() =>
        {
            out.insert(*cf, *ca);
            for ((_, ra), (_, rf)) in fa.iter().zip(ff) {
                cog_map(ra, rf, out)?;
            }
            Ok(())
        }
        (Rec::Awaited { cog: ca, inner: ia }, Rec::Awaited { cog: cf, inner: if_ }) => {
            out.insert(*cf, *ca);
            cog_map(ia, if_, out)
        }
        // A variable actual against a structured formal carries no cogs.
        (Rec::Var(_), _) => Ok(()),
        _ => Err(FixpointError::ShapeMismatch(actual.to_string(), formal.to_string())),
    }
}

/// State of one transformation pass.
pub struct TransformState<'t> {
    pub table: &'t LamTable,
    pub cct: &'t ContractTable,
    pub fresh: Fresh,
    /// When set, free names of instantiated entries are reused as-is.
    pub saturated: bool,
    /// Set when a saturated instantiation actually had free names to keep.
    pub suppressed_renaming: bool,
    pub lam_cap: usize,
}

impl<'t> TransformState<'t> {
    fn check_cap(&self, pair: &LamPair) -> Result<(), FixpointError> {
        if pair.relation_count() > self.lam_cap {
            return Err(FixpointError::ResourceLimit(self.lam_cap));
        }
        Ok(())
    }

    /// Instantiates the table entry of an invocation: free names renamed
    /// fresh (unless saturated), then formals replaced by actuals.
    fn instantiate(&mut self, invk: &Invk) -> Result<LamPair, FixpointError> {
        let key = (invk.class.clone(), invk.method.clone());
        let entry = self
            .table
            .get(&key)
            .ok_or_else(|| FixpointError::MissingMethod(invk.class.clone(), invk.method.clone()))?;
        let mc = self
            .cct
            .methods
            .get(&key)
            .ok_or_else(|| FixpointError::MissingMethod(invk.class.clone(), invk.method.clone()))?;

        let mut map: BTreeMap<Cog, Cog> = BTreeMap::new();
        let frees = entry.free_cogs();
        if self.saturated {
            if !frees.is_empty() {
                self.suppressed_renaming = true;
            }
        } else {
            for b in frees {
                map.insert(b, self.fresh.cog_var());
            }
        }
        cog_map(&invk.recv, &mc.recv, &mut map)?;
        for (actual, formal) in invk.args.iter().zip(&mc.args) {
            cog_map(actual, formal, &mut map)?;
        }
        let pair = entry.pair.map_cogs(&|c| map.get(&c).copied().unwrap_or(c));
        self.check_cap(&pair)?;
        Ok(pair)
    }

    /// The lam transformation of a contract at index cog `c`.
    pub fn transform(&mut self, contract: &Contract, c: Cog) -> Result<LamPair, FixpointError> {
        let pair = match contract {
            Contract::Null => LamPair::zero(),
            Contract::Dep(d) => LamPair::zero().extend(*d),
            Contract::SyncInvk(invk) => {
                let recv_cog = invk.recv.root().ok_or_else(|| {
                    FixpointError::ShapeMismatch(invk.recv.to_string(), "object record".into())
                })?;
                let inst = self.instantiate(invk)?;
                let dep = if recv_cog == c {
                    Dep::awaited(c, c)
                } else {
                    Dep::get(c, recv_cog)
                };
                inst.extend(dep)
            }
            Contract::AsyncInvk(invk, dep) => {
                let inst = self.instantiate(invk)?;
                match dep {
                    // Both components of the callee belong to the future.
                    None => LamPair {
                        present: Lam::zero(),
                        future: inst.present.union(&inst.future),
                    },
                    Some(d) => inst.extend(*d),
                }
            }
            Contract::Seq(a, b) => {
                let la = self.transform(a, c)?;
                let lb = self.transform(b, c)?;
                la.seq(&lb)
            }
            Contract::Plus(a, b) => {
                let la = self.transform(a, c)?;
                let lb = self.transform(b, c)?;
                la.plus(&lb)
            }
            Contract::Par(a, b) => {
                let la = self.transform(a, c)?;
                let lb = self.transform(b, c)?;
                la.par_componentwise(&lb)
            }
        };
        self.check_cap(&pair)?;
        Ok(pair)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FixpointReport {
    pub table: LamTableOut,
    /// Every approximant, index 0 being the all-zero table.
    #[serde(skip)]
    pub approximants: Vec<LamTable>,
    /// Iteration at which recomputation no longer changed the table.
    pub converged_at: usize,
    /// True when saturation actually suppressed fresh-name creation, so
    /// the verdict may be imprecise.
    pub saturated: bool,
    pub saturation_point: usize,
}

pub type LamTableOut = BTreeMap<String, String>;

fn table_out(t: &LamTable) -> LamTableOut {
    t.iter().map(|((c, m), p)| (format!("{c}.{m}"), p.to_string())).collect()
}

/// A fresh-name supply strictly above every cog variable of the table.
fn fresh_above(cct: &ContractTable) -> Fresh {
    let mut max = 0u32;
    let mut bump = |cogs: &[Cog]| {
        for c in cogs {
            if let Cog::Var(v) = c {
                max = max.max(v + 1);
            }
        }
    };
    for mc in cct.methods.values() {
        let mut cogs = mc.header_cogs();
        mc.sync.cogs(&mut cogs);
        mc.unsync.cogs(&mut cogs);
        mc.ret.cogs(&mut cogs);
        bump(&cogs);
    }
    let mut cogs = Vec::new();
    cct.main_sync.cogs(&mut cogs);
    cct.main_unsync.cogs(&mut cogs);
    bump(&cogs);
    Fresh::starting_at(0, max, 0)
}

/// Computes the abstract class table: approximant 0 maps every method to
/// the all-zero pair; each iteration recomputes every method from the
/// current table (callees first, so a method sees the newest value of the
/// methods it invokes); after `saturate_at` iterations fresh-name creation
/// stops and the iteration runs to the exact fixpoint.
pub fn fixpoint(
    cct: &ContractTable,
    saturate_at: usize,
    lam_cap: usize,
) -> Result<FixpointReport, FixpointError> {
    let keys: Vec<(String, String)> = cct.methods.keys().cloned().collect();
    let order = topo_order(cct, &keys);

    let mut table: LamTable = LamTable::new();
    for key in &keys {
        let mc = &cct.methods[key];
        let recs: Vec<&Rec> = std::iter::once(&mc.recv).chain(mc.args.iter()).collect();
        table.insert(key.clone(), ParamLamPair::zero(extract(&recs)));
    }
    let mut approximants = vec![table.clone()];
    let mut fresh = fresh_above(cct);
    let mut saturated_any = false;

    let mut iteration = 0usize;
    loop {
        iteration += 1;
        let saturated = iteration > saturate_at;
        let mut next = table.clone();
        for key in &order {
            let mc = &cct.methods[key];
            let index_cog = mc.recv.root().ok_or_else(|| {
                FixpointError::ShapeMismatch(mc.recv.to_string(), "object record".into())
            })?;
            let mut st = TransformState {
                table: &next,
                cct,
                fresh: fresh.clone(),
                saturated,
                suppressed_renaming: false,
                lam_cap,
            };
            let ls = st.transform(&mc.sync, index_cog)?;
            let lu = st.transform(&mc.unsync, index_cog)?;
            let pair = ls.seq(&lu).normalize();
            fresh = st.fresh.clone();
            saturated_any |= st.suppressed_renaming;
            let params = next[key].params.clone();
            next.insert(key.clone(), ParamLamPair { params, pair });
        }
        let done = table_alpha_eq(&next, &table);
        approximants.push(next.clone());
        table = next;
        if done {
            return Ok(FixpointReport {
                table: table_out(&table),
                approximants,
                converged_at: iteration,
                saturated: saturated_any,
                saturation_point: saturate_at,
            });
        }
    }
}

/// Callee-before-caller order over the contract call graph; ties keep the
/// table order. Methods inside a cycle stay in table order.
fn topo_order(cct: &ContractTable, keys: &[(String, String)]) -> Vec<(String, String)> {
    let idx: BTreeMap<&(String, String), usize> =
        keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut edges: Vec<Vec<usize>> = vec![Vec::new(); keys.len()]; // caller -> callees
    for (i, key) in keys.iter().enumerate() {
        let mc = &cct.methods[key];
        for invk in mc.sync.invocations().into_iter().chain(mc.unsync.invocations()) {
            let callee = (invk.class.clone(), invk.method.clone());
            if let Some(&j) = idx.get(&callee) {
                if j != i && !edges[i].contains(&j) {
                    edges[i].push(j);
                }
            }
        }
    }
    // Kahn over the callee->caller direction.
    let mut indeg = vec![0usize; keys.len()]; // number of callees not yet emitted
    for (i, es) in edges.iter().enumerate() {
        indeg[i] = es.len();
    }
    let mut out = Vec::new();
    let mut emitted = vec![false; keys.len()];
    loop {
        let mut progressed = false;
        for i in 0..keys.len() {
            if !emitted[i] && indeg[i] == 0 {
                emitted[i] = true;
                out.push(keys[i].clone());
                progressed = true;
                for (c, es) in edges.iter().enumerate() {
                    if !emitted[c] && es.contains(&i) {
                        indeg[c] -= 1;
                    }
                }
            }
        }
        if !progressed {
            break;
        }
    }
    // Cyclic leftovers in table order.
    for (i, key) in keys.iter().enumerate() {
        if !emitted[i] {
            out.push(key.clone());
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalysisVerdict {
    DeadlockFree,
    PotentialDeadlock,
}

impl std::fmt::Display for AnalysisVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AnalysisVerdict::DeadlockFree => write!(f, "deadlock-free"),
            AnalysisVerdict::PotentialDeadlock => write!(f, "potential-deadlock"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FixpointAnalysis {
    pub verdict: AnalysisVerdict,
    pub lam: LamPair,
    pub witness: Option<Vec<Cog>>,
    pub report: FixpointReport,
}

/// Evaluates the main contract pair against the computed table at cog
/// `start` and looks for circularities.
pub fn analyze(
    cct: &ContractTable,
    saturate_at: usize,
    lam_cap: usize,
) -> Result<FixpointAnalysis, FixpointError> {
    let report = fixpoint(cct, saturate_at, lam_cap)?;
    let table = report.approximants.last().expect("at least the zero approximant").clone();
    let mut st = TransformState {
        table: &table,
        cct,
        fresh: fresh_above(cct),
        saturated: true,
        suppressed_renaming: false,
        lam_cap,
    };
    let ls = st.transform(&cct.main_sync, Cog::Start)?;
    let lu = st.transform(&cct.main_unsync, Cog::Start)?;
    let lam = ls.seq(&lu).normalize();
    let witness = lam.circularity_witness();
    let verdict = if witness.is_some() {
        AnalysisVerdict::PotentialDeadlock
    } else {
        AnalysisVerdict::DeadlockFree
    };
    Ok(FixpointAnalysis { verdict, lam, witness, report })
}

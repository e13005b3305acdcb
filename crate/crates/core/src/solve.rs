//! First-order unification with occurs check, and the iterative
//! semi-unification solver for the constraints produced by inference.
//!
//! Each semi-unification constraint `C.m <= rhs` is solved by freshly
//! instantiating the current signature of `C.m` and unifying the instance
//! with the right-hand side, so distinct call sites of the same method are
//! matched independently. Solving one constraint can refine a signature
//! used by another, so the process iterates to a fixed point with an
//! explicit bound.

use crate::contract::{Cog, Constraint, Contract, Dep, Invk, MethodContract, Rec};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("record shapes do not unify: {0} vs {1}")]
    Clash(String, String),
    #[error("recursive record structure (occurs check failed on X{0})")]
    Occurs(u32),
    #[error("semi-unification did not converge within {0} iterations")]
    Divergence(usize),
    #[error("no contract signature for {0}.{1}")]
    MissingSignature(String, String),
}

/// Fresh-name supply shared by inference and the solver.
#[derive(Debug, Default, Clone)]
pub struct Fresh {
    rec: u32,
    cog: u32,
    fut: u32,
}

impl Fresh {
    /// A supply whose counters start above the given values, for drawing
    /// names that must not collide with an existing term.
    pub fn starting_at(rec: u32, cog: u32, fut: u32) -> Fresh {
        Fresh { rec, cog, fut }
    }

    pub fn rec_var(&mut self) -> Rec {
        let v = self.rec;
        self.rec += 1;
        Rec::Var(v)
    }

    pub fn cog_var(&mut self) -> Cog {
        let v = self.cog;
        self.cog += 1;
        Cog::Var(v)
    }

    pub fn fut_name(&mut self) -> u32 {
        let v = self.fut;
        self.fut += 1;
        v
    }
}

/// A contract signature `recv(args) -> ret`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub recv: Rec,
    pub args: Vec<Rec>,
    pub ret: Rec,
}

pub type SigTable = BTreeMap<(String, String), Signature>;

/// An idempotent substitution over record and cog variables.
#[derive(Debug, Default, Clone)]
pub struct Subst {
    recs: BTreeMap<u32, Rec>,
    cogs: BTreeMap<u32, Cog>,
}

impl Subst {
    pub fn apply_cog(&self, c: Cog) -> Cog {
        let mut cur = c;
        let mut steps = 0;
        while let Cog::Var(v) = cur {
            match self.cogs.get(&v) {
                Some(next) if *next != cur => {
                    cur = *next;
                    steps += 1;
                    debug_assert!(steps <= self.cogs.len() + 1);
                }
                _ => break,
            }
        }
        cur
    }

    pub fn apply(&self, r: &Rec) -> Rec {
        match r {
            Rec::Unit => Rec::Unit,
            Rec::Var(v) => match self.recs.get(v) {
                Some(next) => self.apply(next),
                None => Rec::Var(*v),
            },
            Rec::Obj { cog, fields } => Rec::Obj {
                cog: self.apply_cog(*cog),
                fields: fields.iter().map(|(n, r)| (n.clone(), self.apply(r))).collect(),
            },
            Rec::Awaited { cog, inner } => Rec::Awaited {
                cog: self.apply_cog(*cog),
                inner: Box::new(self.apply(inner)),
            },
        }
    }

    pub fn apply_dep(&self, d: Dep) -> Dep {
        Dep { from: self.apply_cog(d.from), to: self.apply_cog(d.to), awaited: d.awaited }
    }

    pub fn apply_invk(&self, i: &Invk) -> Invk {
        Invk {
            class: i.class.clone(),
            method: i.method.clone(),
            recv: self.apply(&i.recv),
            args: i.args.iter().map(|r| self.apply(r)).collect(),
            ret: self.apply(&i.ret),
        }
    }

    pub fn apply_contract(&self, c: &Contract) -> Contract {
        match c {
            Contract::Null => Contract::Null,
            Contract::Dep(d) => Contract::Dep(self.apply_dep(*d)),
            Contract::SyncInvk(i) => Contract::SyncInvk(self.apply_invk(i)),
            Contract::AsyncInvk(i, d) => {
                Contract::AsyncInvk(self.apply_invk(i), d.map(|d| self.apply_dep(d)))
            }
            Contract::Seq(a, b) => Contract::Seq(
                Box::new(self.apply_contract(a)),
                Box::new(self.apply_contract(b)),
            ),
            Contract::Plus(a, b) => Contract::Plus(
                Box::new(self.apply_contract(a)),
                Box::new(self.apply_contract(b)),
            ),
            Contract::Par(a, b) => Contract::Par(
                Box::new(self.apply_contract(a)),
                Box::new(self.apply_contract(b)),
            ),
        }
    }

    pub fn apply_method_contract(&self, m: &MethodContract) -> MethodContract {
        MethodContract {
            class: m.class.clone(),
            method: m.method.clone(),
            recv: self.apply(&m.recv),
            args: m.args.iter().map(|r| self.apply(r)).collect(),
            sync: self.apply_contract(&m.sync),
            unsync: self.apply_contract(&m.unsync),
            ret: self.apply(&m.ret),
        }
    }

    pub fn unify_cog(&mut self, a: Cog, b: Cog) -> Result<(), SolveError> {
        let a = self.apply_cog(a);
        let b = self.apply_cog(b);
        if a == b {
            return Ok(());
        }
        match (a, b) {
            (Cog::Var(v), other) | (other, Cog::Var(v)) => {
                self.cogs.insert(v, other);
                Ok(())
            }
            (x, y) => Err(SolveError::Clash(x.to_string(), y.to_string())),
        }
    }

    pub fn unify(&mut self, a: &Rec, b: &Rec) -> Result<(), SolveError> {
        let a = self.apply(a);
        let b = self.apply(b);
        match (&a, &b) {
            (Rec::Var(x), Rec::Var(y)) if x == y => Ok(()),
            (Rec::Var(x), other) | (other, Rec::Var(x)) => {
                if other.contains_var(*x) {
                    return Err(SolveError::Occurs(*x));
                }
                self.recs.insert(*x, other.clone());
                Ok(())
            }
            (Rec::Unit, Rec::Unit) => Ok(()),
            (Rec::Obj { cog: c1, fields: f1 }, Rec::Obj { cog: c2, fields: f2 }) => {
                if f1.len() != f2.len()
                    || f1.iter().zip(f2).any(|((n1, _), (n2, _))| n1 != n2)
                {
                    return Err(SolveError::Clash(a.to_string(), b.to_string()));
                }
                self.unify_cog(*c1, *c2)?;
                for ((_, r1), (_, r2)) in f1.iter().zip(f2) {
                    self.unify(r1, r2)?;
                }
                Ok(())
            }
            (Rec::Awaited { cog: c1, inner: i1 }, Rec::Awaited { cog: c2, inner: i2 }) => {
                self.unify_cog(*c1, *c2)?;
                self.unify(i1, i2)
            }
            _ => Err(SolveError::Clash(a.to_string(), b.to_string())),
        }
    }
}

/// Renames every variable of the signature to a fresh one.
fn instantiate(sig: &Signature, fresh: &mut Fresh) -> Signature {
    let mut rec_map: BTreeMap<u32, Rec> = BTreeMap::new();
    let mut cog_map: BTreeMap<u32, Cog> = BTreeMap::new();
    Signature {
        recv: rename_rec(&sig.recv, &mut rec_map, &mut cog_map, fresh),
        args: sig
            .args
            .iter()
            .map(|r| rename_rec(r, &mut rec_map, &mut cog_map, fresh))
            .collect(),
        ret: rename_rec(&sig.ret, &mut rec_map, &mut cog_map, fresh),
    }
}

fn rename_rec(
    r: &Rec,
    rec_map: &mut BTreeMap<u32, Rec>,
    cog_map: &mut BTreeMap<u32, Cog>,
    fresh: &mut Fresh,
) -> Rec {
    match r {
        Rec::Unit => Rec::Unit,
        Rec::Var(v) => rec_map.entry(*v).or_insert_with(|| fresh.rec_var()).clone(),
        Rec::Obj { cog, fields } => Rec::Obj {
            cog: rename_cog(*cog, cog_map, fresh),
            fields: fields
                .iter()
                .map(|(n, r)| (n.clone(), rename_rec(r, rec_map, cog_map, fresh)))
                .collect(),
        },
        Rec::Awaited { cog, inner } => Rec::Awaited {
            cog: rename_cog(*cog, cog_map, fresh),
            inner: Box::new(rename_rec(inner, rec_map, cog_map, fresh)),
        },
    }
}

fn rename_cog(c: Cog, cog_map: &mut BTreeMap<u32, Cog>, fresh: &mut Fresh) -> Cog {
    match c {
        Cog::Start => Cog::Start,
        Cog::Var(v) => *cog_map.entry(v).or_insert_with(|| fresh.cog_var()),
    }
}

/// Solves the constraint set against the signature table.
pub fn solve(
    constraints: &[Constraint],
    sigs: &SigTable,
    fresh: &mut Fresh,
) -> Result<Subst, SolveError> {
    let mut subst = Subst::default();
    let mut semis = Vec::new();
    for c in constraints {
        match c {
            Constraint::CogEq(a, b) => subst.unify_cog(*a, *b)?,
            Constraint::RecEq(a, b) => subst.unify(a, b)?,
            Constraint::Semi { .. } => semis.push(c),
        }
    }
    let bound = 4 * constraints.len().max(1);
    let mut last = fingerprint(&subst, sigs, &semis);
    for _ in 0..bound {
        for c in &semis {
            let Constraint::Semi { class, method, recv, args, ret } = c else { unreachable!() };
            let sig = sigs
                .get(&(class.clone(), method.clone()))
                .ok_or_else(|| SolveError::MissingSignature(class.clone(), method.clone()))?;
            let applied = Signature {
                recv: subst.apply(&sig.recv),
                args: sig.args.iter().map(|r| subst.apply(r)).collect(),
                ret: subst.apply(&sig.ret),
            };
            let inst = instantiate(&applied, fresh);
            if inst.args.len() != args.len() {
                return Err(SolveError::Clash(
                    format!("{class}.{method} arity {}", inst.args.len()),
                    format!("call arity {}", args.len()),
                ));
            }
            subst.unify(&inst.recv, recv)?;
            for (ia, ra) in inst.args.iter().zip(args) {
                subst.unify(ia, ra)?;
            }
            subst.unify(&inst.ret, ret)?;
        }
        let now = fingerprint(&subst, sigs, &semis);
        if now == last {
            return Ok(subst);
        }
        last = now;
    }
    Err(SolveError::Divergence(bound))
}

/// A stable rendering of every signature and call-site triple under the
/// current substitution; the iteration stops when it no longer changes.
fn fingerprint(subst: &Subst, sigs: &SigTable, semis: &[&Constraint]) -> String {
    let mut s = String::new();
    for ((c, m), sig) in sigs {
        s.push_str(&format!(
            "{c}.{m}:{}({})->{};",
            subst.apply(&sig.recv),
            sig.args.iter().map(|r| subst.apply(r).to_string()).collect::<Vec<_>>().join(","),
            subst.apply(&sig.ret)
        ));
    }
    for c in semis {
        if let Constraint::Semi { recv, args, ret, .. } = c {
            s.push_str(&format!(
                "<={}({})->{};",
                subst.apply(recv),
                args.iter().map(|r| subst.apply(r).to_string()).collect::<Vec<_>>().join(","),
                subst.apply(ret)
            ));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unify_binds_var() {
        let mut s = Subst::default();
        let obj = Rec::obj(Cog::Var(0), vec![("x".into(), Rec::Unit)]);
        s.unify(&Rec::Var(0), &obj).unwrap();
        assert_eq!(s.apply(&Rec::Var(0)), obj);
    }

    #[test]
    fn occurs_check_rejects_recursive_record() {
        // X = [cog:c, y:X]
        let mut s = Subst::default();
        let r = Rec::obj(Cog::Var(0), vec![("y".into(), Rec::Var(0))]);
        match s.unify(&Rec::Var(0), &r) {
            Err(SolveError::Occurs(0)) => {}
            other => panic!("expected occurs failure, got {other:?}"),
        }
    }

    #[test]
    fn shape_clash() {
        let mut s = Subst::default();
        let a = Rec::obj(Cog::Var(0), vec![("x".into(), Rec::Unit)]);
        assert!(matches!(s.unify(&a, &Rec::Unit), Err(SolveError::Clash(..))));
    }

    #[test]
    fn semi_unification_handles_independent_calls() {
        // Signature m: [cog:c, f:X]() -> _ invoked on receivers in two
        // different cogs; unification proper would reject this, while
        // semi-unification manages the calls independently.
        let mut fresh = Fresh::default();
        let c = fresh.cog_var();
        let x = fresh.rec_var();
        let mut sigs = SigTable::new();
        sigs.insert(
            ("C".into(), "m".into()),
            Signature {
                recv: Rec::obj(c, vec![("f".into(), x.clone())]),
                args: vec![],
                ret: Rec::Unit,
            },
        );
        let c1 = fresh.cog_var();
        let c2 = fresh.cog_var();
        let constraints = vec![
            Constraint::Semi {
                class: "C".into(),
                method: "m".into(),
                recv: Rec::obj(c1, vec![("f".into(), Rec::Unit)]),
                args: vec![],
                ret: fresh.rec_var(),
            },
            Constraint::Semi {
                class: "C".into(),
                method: "m".into(),
                recv: Rec::obj(c2, vec![("f".into(), Rec::Unit)]),
                args: vec![],
                ret: fresh.rec_var(),
            },
        ];
        let subst = solve(&constraints, &sigs, &mut fresh).unwrap();
        assert_ne!(subst.apply_cog(c1), subst.apply_cog(c2));
    }
}

//! Contract inference: walks the typed AST and produces a contract class
//! table, a main contract pair, and a constraint set; solving the
//! constraints and applying the substitution yields the analyzable table.
//!
//! Future-typed variables are tracked through future names so that aliases
//! share a single synchronisation state: the first get/await of a future
//! contributes the stored invocation contract plus a cog dependency and
//! check-marks the entry, later synchronisations of the same future
//! contribute nothing.

use crate::ast::Type;
use crate::contract::*;
use crate::solve::{self, Fresh, SigTable, Signature, SolveError};
use crate::tast::*;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InferError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("internal inference error: {0}")]
    Internal(String),
}

/// The raw result of inference, before constraint solving.
#[derive(Debug, Clone)]
pub struct InferenceResult {
    pub table: ContractTable,
    pub constraints: Vec<Constraint>,
    pub sigs: SigTable,
    pub fresh: Fresh,
}

/// Inference followed by semi-unification and substitution application.
pub fn infer_and_solve(program: &TypedProgram) -> Result<ContractTable, InferError> {
    let mut raw = infer_program(program)?;
    let subst = solve::solve(&raw.constraints, &raw.sigs, &mut raw.fresh)?;
    let mut methods = BTreeMap::new();
    for (key, mc) in &raw.table.methods {
        methods.insert(key.clone(), subst.apply_method_contract(mc));
    }
    Ok(ContractTable {
        methods,
        main_sync: subst.apply_contract(&raw.table.main_sync),
        main_unsync: subst.apply_contract(&raw.table.main_unsync),
    })
}

/// Header names normally occur linearly. Solving can merge header cogs
/// (e.g. when a conditional constrains the futures a variable holds in its
/// two branches against each other); the merged table stays sound, the
/// collapsed names just over-approximate.
pub fn header_is_linear(mc: &MethodContract) -> bool {
    let cogs = mc.header_cogs();
    let mut seen = std::collections::BTreeSet::new();
    if !cogs.iter().all(|c| seen.insert(*c)) {
        return false;
    }
    let mut vars = Vec::new();
    mc.recv.record_vars(&mut vars);
    for a in &mc.args {
        a.record_vars(&mut vars);
    }
    let mut vseen = std::collections::BTreeSet::new();
    vars.iter().all(|v| vseen.insert(*v))
}

/// Extended future record: a record or a future name.
#[derive(Debug, Clone, PartialEq, Eq)]
enum XVal {
    R(Rec),
    F(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct FutVal {
    rec: Rec,
    contract: Contract,
    checked: bool,
}

#[derive(Debug, Clone, Default)]
struct Env {
    vars: BTreeMap<String, XVal>,
    futs: BTreeMap<u32, FutVal>,
    /// `this`: the cog plus per-field extended values. Absent in main.
    this: Option<(Cog, Vec<(String, XVal)>)>,
    destiny: Option<Rec>,
}

impl Env {
    fn this_field(&self, name: &str) -> Option<&XVal> {
        self.this.as_ref().and_then(|(_, fs)| {
            fs.iter().find(|(n, _)| n == name).map(|(_, v)| v)
        })
    }

    /// Variables currently bound to future names.
    fn fut_vars(&self) -> Vec<String> {
        self.vars
            .iter()
            .filter(|(_, v)| matches!(v, XVal::F(_)))
            .map(|(n, _)| n.clone())
            .collect()
    }
}

struct Inference<'p> {
    program: &'p TypedProgram,
    sigs: SigTable,
    fresh: Fresh,
    constraints: Vec<Constraint>,
}

pub fn infer_program(program: &TypedProgram) -> Result<InferenceResult, InferError> {
    let mut cx = Inference {
        program,
        sigs: SigTable::new(),
        fresh: Fresh::default(),
        constraints: Vec::new(),
    };
    // Initial environment: one signature skeleton per method.
    for class in &program.classes {
        for m in &class.methods {
            let sig = Signature {
                recv: cx.fresh.rec_var(),
                args: m.params.iter().map(|_| cx.fresh.rec_var()).collect(),
                ret: cx.fresh.rec_var(),
            };
            cx.sigs.insert((class.name.clone(), m.name.clone()), sig);
        }
    }
    let mut methods = BTreeMap::new();
    for class in &program.classes {
        for m in &class.methods {
            let mc = cx.infer_method(class, m)?;
            methods.insert((class.name.clone(), m.name.clone()), mc);
        }
    }
    let (main_sync, main_unsync) = cx.infer_main(&program.main)?;
    Ok(InferenceResult {
        table: ContractTable { methods, main_sync, main_unsync },
        constraints: cx.constraints,
        sigs: cx.sigs,
        fresh: cx.fresh,
    })
}

impl<'p> Inference<'p> {
    /// The record shape of a freshly introduced binding of a given type:
    /// primitives carry the dummy value, object types a fresh variable.
    fn record_of_type(&mut self, ty: &Type) -> Rec {
        match ty {
            Type::Int | Type::Bool | Type::Unit => Rec::Unit,
            _ => self.fresh.rec_var(),
        }
    }

    /// Binds a declared variable: future-typed ones get a fresh future name
    /// holding a fresh record, the rest a plain record.
    fn bind_var(&mut self, env: &mut Env, name: &str, ty: &Type) {
        if ty.is_future() {
            let f = self.fresh.fut_name();
            let rec = self.fresh.rec_var();
            env.futs.insert(f, FutVal { rec, contract: Contract::Null, checked: false });
            env.vars.insert(name.to_string(), XVal::F(f));
        } else {
            let rec = self.record_of_type(ty);
            env.vars.insert(name.to_string(), XVal::R(rec));
        }
    }

    fn infer_method(
        &mut self,
        class: &TClass,
        m: &TMethod,
    ) -> Result<MethodContract, InferError> {
        let cog = self.fresh.cog_var();
        let mut env = Env::default();

        // `this`: non-future fields get record variables that also appear in
        // the header; future fields are routed through future names, their
        // value variable standing in the header.
        let mut this_fields = Vec::new();
        let mut header_fields = Vec::new();
        for p in class.all_fields() {
            if p.ty.is_future() {
                let f = self.fresh.fut_name();
                let val = self.fresh.rec_var();
                env.futs
                    .insert(f, FutVal { rec: val.clone(), contract: Contract::Null, checked: false });
                this_fields.push((p.name.clone(), XVal::F(f)));
                header_fields.push((p.name.clone(), val));
            } else {
                let rec = self.record_of_type(&p.ty);
                this_fields.push((p.name.clone(), XVal::R(rec.clone())));
                header_fields.push((p.name.clone(), rec));
            }
        }
        env.this = Some((cog, this_fields));
        let header_recv = Rec::Obj { cog, fields: header_fields };

        // Arguments, in declaration order.
        let mut header_args = Vec::new();
        for p in &m.params {
            if p.ty.is_future() {
                let f = self.fresh.fut_name();
                let val = self.fresh.rec_var();
                env.futs
                    .insert(f, FutVal { rec: val.clone(), contract: Contract::Null, checked: false });
                env.vars.insert(p.name.clone(), XVal::F(f));
                header_args.push(val);
            } else {
                let rec = self.record_of_type(&p.ty);
                env.vars.insert(p.name.clone(), XVal::R(rec.clone()));
                header_args.push(rec);
            }
        }
        for l in &m.locals {
            self.bind_var(&mut env, &l.name, &l.ty);
        }
        let ret = self.record_of_type(&m.ret);
        env.destiny = Some(ret.clone());

        let (body, env2) = self.infer_stmts(&m.body, env, cog)?;
        let unsync = unsync_contract(&env2);

        // The inferred header/return must match the method's signature.
        let sig = self.sigs[&(class.name.clone(), m.name.clone())].clone();
        self.constraints.push(Constraint::RecEq(sig.recv.clone(), header_recv.clone()));
        for (sa, ha) in sig.args.iter().zip(&header_args) {
            self.constraints.push(Constraint::RecEq(sa.clone(), ha.clone()));
        }
        self.constraints.push(Constraint::RecEq(sig.ret.clone(), ret.clone()));

        Ok(MethodContract {
            class: class.name.clone(),
            method: m.name.clone(),
            recv: header_recv,
            args: header_args,
            sync: body,
            unsync,
            ret,
        })
    }

    fn infer_main(&mut self, main: &TMain) -> Result<(Contract, Contract), InferError> {
        let mut env = Env::default();
        for l in &main.locals {
            self.bind_var(&mut env, &l.name, &l.ty);
        }
        env.destiny = Some(self.fresh.rec_var());
        let (sync, env2) = self.infer_stmts(&main.body, env, Cog::Start)?;
        let unsync = unsync_contract(&env2);
        Ok((sync, unsync))
    }

    fn infer_stmts(
        &mut self,
        stmts: &[TStmt],
        mut env: Env,
        cog: Cog,
    ) -> Result<(Contract, Env), InferError> {
        let mut acc = Contract::Null;
        for s in stmts {
            let (c, env2) = self.infer_stmt(s, env, cog)?;
            acc = Contract::seq(acc, c);
            env = env2;
        }
        Ok((acc, env))
    }

    fn infer_stmt(&mut self, s: &TStmt, env: Env, cog: Cog) -> Result<(Contract, Env), InferError> {
        match s {
            TStmt::Skip => Ok((Contract::Null, env)),
            TStmt::Expr(z) => {
                let (_, c, env2) = self.infer_exprz(z, env, cog)?;
                Ok((c, env2))
            }
            TStmt::Assign(target, rhs) => {
                let (val, c, mut env2) = self.infer_exprz(rhs, env, cog)?;
                match target {
                    TTarget::Field(x) => {
                        // Field records are unchanging: constrain instead of
                        // rebinding. Future-typed fields are never assigned.
                        let Some(XVal::R(field_rec)) = env2.this_field(x).cloned() else {
                            return Err(InferError::Internal(format!(
                                "assignment to future field `{x}` escaped the frontend"
                            )));
                        };
                        let rec = self.rec_of(&val, &env2);
                        self.constraints.push(Constraint::RecEq(field_rec, rec));
                        Ok((c, env2))
                    }
                    TTarget::Local(x) => {
                        match env2.vars.get(x).cloned() {
                            Some(XVal::R(_)) | None => {
                                let rec = self.rec_of(&val, &env2);
                                env2.vars.insert(x.clone(), XVal::R(rec));
                            }
                            Some(XVal::F(f)) => match val {
                                // Aliasing: copy the future name.
                                XVal::F(f2) => {
                                    env2.vars.insert(x.clone(), XVal::F(f2));
                                }
                                // A record value overwrites the future's
                                // stored value in place.
                                XVal::R(r) => {
                                    env2.futs.insert(
                                        f,
                                        FutVal { rec: r, contract: Contract::Null, checked: false },
                                    );
                                }
                            },
                        }
                        Ok((c, env2))
                    }
                }
            }
            TStmt::Return(e) => {
                let val = self.infer_pure(e, &env)?;
                let rec = self.rec_of(&val, &env);
                let destiny = env
                    .destiny
                    .clone()
                    .ok_or_else(|| InferError::Internal("return without destiny".into()))?;
                self.constraints.push(Constraint::RecEq(rec, destiny));
                Ok((Contract::Null, env))
            }
            TStmt::Await(e) => {
                let val = self.infer_pure(e, &env)?;
                let XVal::F(f) = val else {
                    return Err(InferError::Internal("await on a non-future value".into()));
                };
                let fut = env.futs[&f].clone();
                let x = self.fresh.rec_var();
                let objb = self.fresh.cog_var();
                self.constraints
                    .push(Constraint::RecEq(fut.rec.clone(), Rec::awaited(objb, x)));
                if fut.checked {
                    return Ok((Contract::Null, env));
                }
                let mut env2 = env;
                env2.futs.insert(
                    f,
                    FutVal { rec: fut.rec.clone(), contract: Contract::Null, checked: true },
                );
                let dep = Dep::awaited(cog, objb);
                let c = par_with_unsync(fut.contract.with_dep(dep), &env2);
                Ok((c, env2))
            }
            TStmt::If { cond, then_branch, else_branch } => {
                let _ = self.infer_pure(cond, &env)?;
                let (c1, env1) = self.infer_stmts(then_branch, env.clone(), cog)?;
                let (c2, env2) = self.infer_stmts(else_branch, env.clone(), cog)?;
                // The two branch environments agree on the pre-branch
                // variables and on the values of pre-branch futures.
                for (x, pre) in &env.vars {
                    let v1 = env1.vars.get(x);
                    let v2 = env2.vars.get(x);
                    match (pre, v1, v2) {
                        (_, Some(XVal::R(r1)), Some(XVal::R(r2))) => {
                            self.constraints.push(Constraint::RecEq(r1.clone(), r2.clone()));
                        }
                        (_, Some(XVal::F(f1)), Some(XVal::F(f2))) => {
                            let r1 = env1.futs[f1].rec.clone();
                            let r2 = env2.futs[f2].rec.clone();
                            self.constraints.push(Constraint::RecEq(r1, r2));
                        }
                        _ => {
                            return Err(InferError::Internal(format!(
                                "branches disagree on the kind of `{x}`"
                            )))
                        }
                    }
                }
                // Merge: the first branch wins; futures of the second branch
                // survive unless a pre-branch variable points at them. On
                // top of that, pending invocations must never be lost: a
                // variable-reachable future of the second branch holding an
                // unsynchronised invocation is kept as an unreachable
                // entry, and for futures known to both branches the entry
                // still awaiting synchronisation wins.
                let reachable2: Vec<u32> = env
                    .fut_vars()
                    .iter()
                    .filter_map(|x| match env2.vars.get(x) {
                        Some(XVal::F(f)) => Some(*f),
                        _ => None,
                    })
                    .collect();
                let mut merged = env1;
                for (f, v2) in &env2.futs {
                    match merged.futs.get(f) {
                        None => {
                            let pending = !v2.checked && v2.contract != Contract::Null;
                            if !reachable2.contains(f) || pending {
                                merged.futs.insert(*f, v2.clone());
                            }
                        }
                        Some(v1) => {
                            let v2_pessimistic = (v1.checked && !v2.checked)
                                || (v1.checked == v2.checked
                                    && v1.contract == Contract::Null
                                    && v2.contract != Contract::Null);
                            if v2_pessimistic {
                                merged.futs.insert(*f, v2.clone());
                            }
                        }
                    }
                }
                Ok((Contract::plus(c1, c2), merged))
            }
        }
    }

    fn infer_exprz(
        &mut self,
        z: &TExprZ,
        env: Env,
        cog: Cog,
    ) -> Result<(XVal, Contract, Env), InferError> {
        match z {
            TExprZ::Pure(e) => {
                let v = self.infer_pure(e, &env)?;
                Ok((v, Contract::Null, env))
            }
            TExprZ::Get { fut, .. } => {
                let val = self.infer_pure(fut, &env)?;
                let XVal::F(f) = val else {
                    return Err(InferError::Internal("get on a non-future value".into()));
                };
                let fut_val = env.futs[&f].clone();
                let x = self.fresh.rec_var();
                let objb = self.fresh.cog_var();
                self.constraints
                    .push(Constraint::RecEq(fut_val.rec.clone(), Rec::awaited(objb, x.clone())));
                if fut_val.checked {
                    return Ok((XVal::R(x), Contract::Null, env));
                }
                let mut env2 = env;
                env2.futs.insert(
                    f,
                    FutVal { rec: fut_val.rec.clone(), contract: Contract::Null, checked: true },
                );
                let dep = Dep::get(cog, objb);
                let c = par_with_unsync(fut_val.contract.with_dep(dep), &env2);
                Ok((XVal::R(x), c, env2))
            }
            TExprZ::New { class, args, cog: new_cog } => {
                let decl = self.program.class(class);
                let mut arg_recs = Vec::new();
                for a in args {
                    let v = self.infer_pure(a, &env)?;
                    arg_recs.push(self.rec_of(&v, &env));
                }
                let obj_cog = if *new_cog { self.fresh.cog_var() } else { cog };
                let mut fields = Vec::new();
                for (p, r) in decl.params.iter().zip(arg_recs) {
                    fields.push((p.name.clone(), r));
                }
                for f in &decl.fields {
                    let r = self.record_of_type(&f.ty.clone());
                    fields.push((f.name.clone(), r));
                }
                Ok((XVal::R(Rec::Obj { cog: obj_cog, fields }), Contract::Null, env))
            }
            TExprZ::AsyncCall { recv, class, method, args, .. } => {
                let (invk, objb, ret) = self.infer_call(recv, class, method, args, &env)?;
                let f = self.fresh.fut_name();
                let mut env2 = env;
                env2.futs.insert(
                    f,
                    FutVal {
                        rec: Rec::awaited(objb, ret.clone()),
                        contract: Contract::AsyncInvk(invk, None),
                        checked: false,
                    },
                );
                Ok((XVal::F(f), Contract::Null, env2))
            }
            TExprZ::SyncCall { recv, class, method, args, .. } => {
                let (invk, _objb, ret) = self.infer_call(recv, class, method, args, &env)?;
                let c = par_with_unsync(Contract::SyncInvk(invk), &env);
                Ok((XVal::R(ret), c, env))
            }
        }
    }

    /// Shared part of T-AInvk/T-SInvk: evaluates receiver and arguments,
    /// constrains the receiver shape, and emits the semi-unification
    /// constraint for the callee signature.
    fn infer_call(
        &mut self,
        recv: &TExpr,
        class: &str,
        method: &str,
        args: &[TExpr],
        env: &Env,
    ) -> Result<(Invk, Cog, Rec), InferError> {
        let recv_val = self.infer_pure(recv, env)?;
        let recv_rec = self.rec_of(&recv_val, env);
        let mut arg_recs = Vec::new();
        for a in args {
            let v = self.infer_pure(a, env)?;
            arg_recs.push(self.rec_of(&v, env));
        }
        let decl = self.program.class(class);
        let objb = self.fresh.cog_var();
        let mut shape_fields = Vec::new();
        for p in decl.all_fields() {
            let r = if p.ty.is_primitive() { Rec::Unit } else { self.fresh.rec_var() };
            shape_fields.push((p.name.clone(), r));
        }
        self.constraints.push(Constraint::RecEq(
            recv_rec.clone(),
            Rec::Obj { cog: objb, fields: shape_fields },
        ));
        let ret = self.fresh.rec_var();
        self.constraints.push(Constraint::Semi {
            class: class.to_string(),
            method: method.to_string(),
            recv: recv_rec.clone(),
            args: arg_recs.clone(),
            ret: ret.clone(),
        });
        let invk = Invk {
            class: class.to_string(),
            method: method.to_string(),
            recv: recv_rec,
            args: arg_recs,
            ret: ret.clone(),
        };
        Ok((invk, objb, ret))
    }

    fn infer_pure(&mut self, e: &TExpr, env: &Env) -> Result<XVal, InferError> {
        match &e.kind {
            TExprKind::Int(_) | TExprKind::Bool(_) => Ok(XVal::R(Rec::Unit)),
            TExprKind::Bin { .. } | TExprKind::Un { .. } => Ok(XVal::R(Rec::Unit)),
            TExprKind::Null => Ok(XVal::R(self.fresh.rec_var())),
            TExprKind::This => {
                let (cog, fields) = env
                    .this
                    .as_ref()
                    .ok_or_else(|| InferError::Internal("`this` outside a method".into()))?;
                let fields = fields
                    .iter()
                    .map(|(n, v)| (n.clone(), self.rec_of_ref(v, env)))
                    .collect();
                Ok(XVal::R(Rec::Obj { cog: *cog, fields }))
            }
            TExprKind::Local(x) => env
                .vars
                .get(x)
                .cloned()
                .ok_or_else(|| InferError::Internal(format!("unbound variable `{x}`"))),
            TExprKind::Field(x) => env
                .this_field(x)
                .cloned()
                .ok_or_else(|| InferError::Internal(format!("unbound field `{x}`"))),
        }
    }

    /// Dereference an extended value to a record (T-Value).
    fn rec_of(&self, v: &XVal, env: &Env) -> Rec {
        self.rec_of_ref(v, env)
    }

    fn rec_of_ref(&self, v: &XVal, env: &Env) -> Rec {
        match v {
            XVal::R(r) => r.clone(),
            XVal::F(f) => env.futs[f].rec.clone(),
        }
    }
}

/// The parallel composition of the contracts stored in unchecked future
/// names (the pending asynchronous invocations), in future-name order.
fn unsync_contract(env: &Env) -> Contract {
    let items: Vec<Contract> = env
        .futs
        .iter()
        .filter(|(_, v)| !v.checked && v.contract != Contract::Null)
        .map(|(_, v)| v.contract.clone())
        .collect();
    Contract::par_all(items)
}

/// `c || unsync(env)`, omitting the parallel composition when there are no
/// pending invocations.
fn par_with_unsync(c: Contract, env: &Env) -> Contract {
    let u = unsync_contract(env);
    if u == Contract::Null {
        c
    } else {
        Contract::Par(Box::new(c), Box::new(u))
    }
}

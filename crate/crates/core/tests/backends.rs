//! Back-end tests: the lam fixpoint (extraction, cog mapping,
//! transformation, approximant tables) and the model checker (linearity,
//! mutations, flashbacks, orders, evaluation, flattening).

mod common;

use common::{adep, canon, cv, dep};
use mabs_core::contract::*;
use mabs_core::fixpoint::{self, analyze as fix_analyze, cog_map, extract, AnalysisVerdict};
use mabs_core::infer::infer_and_solve;
use mabs_core::lam::{preorder_leq, table_leq, Lam, LamPair};
use mabs_core::modelcheck::{
    self, analyze_with, apply_mutation, check_linear, find_flashback, mutation_order, Cp,
    EvalOrder, ModelCheckError, Mutation, Slot,
};
use mabs_core::solve::Fresh;
use std::collections::BTreeMap;

fn load_cct(name: &str) -> ContractTable {
    let src = std::fs::read_to_string(common::program_path(name)).unwrap();
    let prog = common::compile(&src);
    infer_and_solve(&prog).expect("solvable")
}

// ---------- extraction and cog mapping ----------

#[test]
fn extract_examples() {
    assert!(extract(&[&Rec::Unit]).is_empty());
    assert!(extract(&[&Rec::Var(3)]).is_empty());
    let nested = Rec::obj(
        cv(0),
        vec![("x".into(), Rec::obj(cv(1), vec![("x".into(), Rec::Var(0))]))],
    );
    assert_eq!(extract(&[&nested]), vec![cv(0), cv(1)]);
    // The CpxSched.m1 header extracts to a three-name binder.
    let cct = load_cct("cpxsched.mabs");
    let m1 = &cct.methods[&("CpxSched".into(), "m1".into())];
    let recs: Vec<&Rec> = std::iter::once(&m1.recv).chain(m1.args.iter()).collect();
    assert_eq!(extract(&recs).len(), 3);
}

#[test]
fn cog_map_examples() {
    let mut out = BTreeMap::new();
    cog_map(&Rec::Unit, &Rec::Unit, &mut out).unwrap();
    assert!(out.is_empty());

    let actual = Rec::obj(cv(10), vec![("x".into(), Rec::obj(cv(11), vec![]))]);
    let formal = Rec::obj(cv(0), vec![("x".into(), Rec::obj(cv(1), vec![]))]);
    let mut out = BTreeMap::new();
    cog_map(&actual, &formal, &mut out).unwrap();
    assert_eq!(out, BTreeMap::from([(cv(0), cv(10)), (cv(1), cv(11))]));

    let mut out = BTreeMap::new();
    cog_map(&Rec::awaited(cv(9), Rec::Unit), &Rec::awaited(cv(2), Rec::Unit), &mut out)
        .unwrap();
    assert_eq!(out, BTreeMap::from([(cv(2), cv(9))]));

    // Structural disagreement is an error.
    let mut out = BTreeMap::new();
    assert!(cog_map(&Rec::Unit, &Rec::obj(cv(0), vec![]), &mut out).is_err());
}

// ---------- fixpoint tables ----------

#[test]
fn math_table_matches_figure() {
    let cct = load_cct("math.mabs");
    let report = fixpoint::fixpoint(&cct, 2, 100_000).expect("fixpoint");
    let fin = report.approximants.last().unwrap();
    let show = |c: &str, m: &str| canon(&fin[&(c.to_string(), m.to_string())].to_string());
    assert_eq!(show("Math", "fact_g"), "\\c0. < {{(c0,c0)}} , 0 >");
    assert_eq!(show("Math", "fact_ag"), "\\c0. < {{(c0,c0)^a}} , 0 >");
    assert_eq!(
        show("Math", "fact_nc"),
        "\\c0. < {{(c0,c1), (c1,c1), (c1,c2)}} , 0 >"
    );
    assert!(report.saturated);
    // fact_g and fact_ag reach their values at the first iteration and are
    // unchanged by iteration 3.
    for it in 1..=3 {
        let t = &report.approximants[it];
        assert_eq!(
            canon(&t[&("Math".into(), "fact_g".into())].to_string()),
            "\\c0. < {{(c0,c0)}} , 0 >",
            "iteration {it}"
        );
    }
}

#[test]
fn cpxsched_table_matches_figure() {
    let cct = load_cct("cpxsched.mabs");
    let report = fixpoint::fixpoint(&cct, 2, 100_000).expect("fixpoint");
    assert_eq!(report.converged_at, 2, "converges at iteration 2");
    assert!(!report.saturated, "no saturation needed");
    let fin = report.approximants.last().unwrap();
    let entry = |m: &str| &fin[&("CpxSched".to_string(), m.to_string())];
    // m1 = \c,c',c''. <0, {{(c',c''),(c'',c')}}>
    let (p0, p1, p2) = (cv(500), cv(501), cv(502));
    let m1_expect = common::param_pair(
        &[p0, p1, p2],
        &[&[]],
        &[&[dep(p1, p2), dep(p2, p1)]],
    );
    assert!(
        mabs_core::lam::param_pair_alpha_eq(entry("m1"), &m1_expect),
        "m1 = {}",
        entry("m1")
    );
    // m2 = \c,c'. <{{(c,c')}}, 0>
    let m2_expect = common::param_pair(&[p0, p1], &[&[dep(p0, p1)]], &[&[]]);
    assert!(
        mabs_core::lam::param_pair_alpha_eq(entry("m2"), &m2_expect),
        "m2 = {}",
        entry("m2")
    );
    // m3 = \c. <0,0>
    let m3_expect = common::param_pair(&[p0], &[&[]], &[&[]]);
    assert!(
        mabs_core::lam::param_pair_alpha_eq(entry("m3"), &m3_expect),
        "m3 = {}",
        entry("m3")
    );
}

#[test]
fn empty_program_has_empty_table() {
    let cct = load_cct("empty.mabs");
    let report = fixpoint::fixpoint(&cct, 0, 100_000).unwrap();
    assert!(report.approximants.last().unwrap().is_empty());
    let a = fix_analyze(&cct, 0, 100_000).unwrap();
    assert_eq!(a.verdict, AnalysisVerdict::DeadlockFree);
}

#[test]
fn approximant_chain_is_monotone() {
    for name in ["math.mabs", "cpxsched.mabs", "math_g.mabs"] {
        let cct = load_cct(name);
        let report = fixpoint::fixpoint(&cct, 2, 100_000).unwrap();
        for w in report.approximants.windows(2) {
            assert!(
                table_leq(&w[0], &w[1]).unwrap(),
                "{name}: non-monotone step"
            );
        }
    }
}

#[test]
fn fixpoint_verdicts_for_the_three_drivers() {
    // fact_g driver: potential deadlock with a reflexive cycle.
    let a = fix_analyze(&load_cct("math_g.mabs"), 2, 100_000).unwrap();
    assert_eq!(a.verdict, AnalysisVerdict::PotentialDeadlock);
    assert!(a.witness.is_some());
    // fact_ag driver: deadlock-free.
    let a = fix_analyze(&load_cct("math.mabs"), 2, 100_000).unwrap();
    assert_eq!(a.verdict, AnalysisVerdict::DeadlockFree);
    // fact_nc driver: flagged as a potential deadlock with saturation.
    let a = fix_analyze(&load_cct("math_nc.mabs"), 2, 100_000).unwrap();
    assert_eq!(a.verdict, AnalysisVerdict::PotentialDeadlock);
    assert!(a.report.saturated, "imprecision flag set");
}

#[test]
fn lam_cap_aborts_oversized_fixpoints() {
    let cct = load_cct("cpxsched.mabs");
    match fixpoint::fixpoint(&cct, 2, 1) {
        Err(fixpoint::FixpointError::ResourceLimit(1)) => {}
        other => panic!("expected resource limit, got {other:?}"),
    }
}

#[test]
fn fixpoint_verdict_invariant_under_renaming() {
    for name in ["math_g.mabs", "math_nc.mabs", "cpxsched.mabs", "math.mabs"] {
        let cct = load_cct(name);
        let renamed = rename_cct(&cct, 1000);
        let a = fix_analyze(&cct, 2, 100_000).unwrap();
        let b = fix_analyze(&renamed, 2, 100_000).unwrap();
        assert_eq!(a.verdict, b.verdict, "{name}");
    }
}

fn rename_cct(cct: &ContractTable, offset: u32) -> ContractTable {
    let f = |c: Cog| match c {
        Cog::Start => Cog::Start,
        Cog::Var(v) => Cog::Var(v + offset),
    };
    let methods = cct
        .methods
        .iter()
        .map(|(k, mc)| {
            (
                k.clone(),
                MethodContract {
                    class: mc.class.clone(),
                    method: mc.method.clone(),
                    recv: mc.recv.map_cogs(&f),
                    args: mc.args.iter().map(|r| r.map_cogs(&f)).collect(),
                    sync: mc.sync.map_cogs(&f),
                    unsync: mc.unsync.map_cogs(&f),
                    ret: mc.ret.map_cogs(&f),
                },
            )
        })
        .collect();
    ContractTable {
        methods,
        main_sync: cct.main_sync.map_cogs(&f),
        main_unsync: cct.main_unsync.map_cogs(&f),
    }
}

// ---------- mutations, flashbacks, orders ----------

fn mutation1() -> Mutation {
    // (x,y,z,u) ~> (y,x,z',z')
    Mutation {
        arity: 4,
        image: vec![Slot::Formal(1), Slot::Formal(0), Slot::Fresh(0), Slot::Fresh(0)],
    }
}

#[test]
fn apply_mutation_examples() {
    let mut fresh = Fresh::starting_at(0, 100, 0);
    // Identity mutation.
    let id = Mutation { arity: 2, image: vec![Slot::Formal(0), Slot::Formal(1)] };
    assert_eq!(apply_mutation(&id, &[cv(1), cv(2)], &mut fresh), vec![cv(1), cv(2)]);

    // The worked sequence: (c,c',c'',c''') -> (c',c,c1,c1) -> (c,c',c2,c2).
    let t0 = vec![cv(0), cv(1), cv(2), cv(3)];
    let t1 = apply_mutation(&mutation1(), &t0, &mut fresh);
    assert_eq!(t1[0], cv(1));
    assert_eq!(t1[1], cv(0));
    assert_eq!(t1[2], t1[3]);
    assert!(!t0.contains(&t1[2]), "third position is fresh");
    let t2 = apply_mutation(&mutation1(), &t1, &mut fresh);
    assert_eq!(t2[0], cv(0));
    assert_eq!(t2[1], cv(1));
    assert_eq!(t2[2], t2[3]);
    assert_ne!(t2[2], t1[2]);
}

#[test]
fn flashback_examples() {
    // Identical tuples: the identity injection.
    let t = vec![cv(0), cv(1)];
    assert!(find_flashback(&t, &t, &t).is_some());
    // (c,c) vs (c,c'): no injection (it would have to merge two names).
    assert!(find_flashback(&[cv(0), cv(0)], &[cv(0), cv(1)], &[cv(0)]).is_none());
    // The sequence (2): a flashback from the third iterate to the first.
    let mut fresh = Fresh::starting_at(0, 100, 0);
    let t0 = vec![cv(0), cv(1), cv(2), cv(3)];
    let t1 = apply_mutation(&mutation1(), &t0, &mut fresh);
    let t2 = apply_mutation(&mutation1(), &t1, &mut fresh);
    let t3 = apply_mutation(&mutation1(), &t2, &mut fresh);
    assert!(find_flashback(&t1, &t3, &t1).is_some(), "t3 flashes back to t1");
    assert!(find_flashback(&t0, &t1, &t0).is_none());
    assert!(find_flashback(&t0, &t2, &t0).is_none());
    assert!(find_flashback(&t1, &t2, &t1).is_none());
}

#[test]
fn mutation_orders() {
    // The worked mutation has order 3.
    assert_eq!(mutation_order(&mutation1()).unwrap(), 3);
    // fact_nc's (c) ~> (c') has order 1.
    let nc = Mutation { arity: 1, image: vec![Slot::Fresh(0)] };
    assert_eq!(mutation_order(&nc).unwrap(), 1);
    // The identity permutation has order 1.
    let id = Mutation { arity: 3, image: vec![Slot::Formal(0), Slot::Formal(1), Slot::Formal(2)] };
    assert_eq!(mutation_order(&id).unwrap(), 1);
    // A transposition has order 2.
    let swap = Mutation { arity: 2, image: vec![Slot::Formal(1), Slot::Formal(0)] };
    assert_eq!(mutation_order(&swap).unwrap(), 2);
}

/// Theorem 3 at desk scale: random mutations of arity <= 5 have an order,
/// and the witnessing flashback satisfies both clauses.
#[test]
fn random_mutations_have_orders_with_valid_flashbacks() {
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    for _ in 0..300 {
        let arity = rng.gen_range(1..=5usize);
        let mut n_fresh = 0usize;
        let image: Vec<Slot> = (0..arity)
            .map(|_| {
                if rng.gen_bool(0.6) {
                    Slot::Formal(rng.gen_range(0..arity))
                } else {
                    let s = Slot::Fresh(rng.gen_range(0..=n_fresh));
                    n_fresh += 1;
                    s
                }
            })
            .collect();
        let mu = Mutation { arity, image };
        let k = mutation_order(&mu).expect("order exists");
        // Recompute the iterates and re-verify the flashback clauses.
        let mut fresh = Fresh::starting_at(0, 500_000, 0);
        let mut tuples = vec![(0..arity as u32).map(|i| cv(900_000 + i)).collect::<Vec<_>>()];
        for _ in 0..k {
            let next = apply_mutation(&mu, tuples.last().unwrap(), &mut fresh);
            tuples.push(next);
        }
        let found = (0..k).find_map(|h| {
            find_flashback(&tuples[h], &tuples[k], &tuples[h].clone()).map(|i| (h, i))
        });
        let (h, inj) = found.expect("flashback at the order");
        for (o, n) in tuples[h].iter().zip(&tuples[k]) {
            assert_eq!(inj[n], *o, "pointwise (clause 1)");
            if tuples[h].contains(n) {
                assert_eq!(inj[n], *n, "identity on old names (clause 2)");
            }
        }
    }
}

// ---------- linearity ----------

#[test]
fn math_is_linear_recursive() {
    let info = check_linear(&load_cct("math.mabs")).expect("linear");
    for (key, i) in &info {
        assert!(i.recursive, "{key:?}");
        assert!(i.linear);
        assert_eq!(i.order, Some(1));
    }
    let nc = &info[&("Math".into(), "fact_nc".into())];
    assert_eq!(nc.mutation.as_ref().unwrap().to_string(), "(x0) ~> (z0')");
    let g = &info[&("Math".into(), "fact_g".into())];
    assert_eq!(g.mutation.as_ref().unwrap().to_string(), "(x0) ~> (x0)");
}

#[test]
fn cpxsched_has_no_recursion() {
    let info = check_linear(&load_cct("cpxsched.mabs")).expect("linear");
    assert!(info.values().all(|i| !i.recursive));
}

fn obj0(c: Cog) -> Rec {
    Rec::obj(c, vec![])
}

fn async_invk(class: &str, method: &str, recv: Rec, args: Vec<Rec>, d: Option<Dep>) -> Contract {
    Contract::AsyncInvk(
        Invk { class: class.into(), method: method.into(), recv, args, ret: Rec::Unit },
        d,
    )
}

/// The nonlinear mutual pair: m's contract invokes both m and n of its own
/// recursion cycle.
#[test]
fn nonlinear_mutual_recursion_rejected() {
    let c = cv(0);
    let c1 = cv(1);
    let c2 = cv(2);
    let m = MethodContract {
        class: "C".into(),
        method: "m".into(),
        recv: obj0(c),
        args: vec![],
        sync: Contract::Null,
        unsync: Contract::plus(
            async_invk("C", "m", obj0(c), vec![], Some(Dep::get(c, c1))),
            async_invk("C", "n", obj0(c2), vec![obj0(c)], None),
        ),
        ret: Rec::Unit,
    };
    let n = MethodContract {
        class: "C".into(),
        method: "n".into(),
        recv: obj0(cv(3)),
        args: vec![obj0(cv(4))],
        sync: async_invk("C", "m", obj0(cv(3)), vec![], Some(Dep::get(cv(3), cv(5)))),
        unsync: Contract::Null,
        ret: Rec::Unit,
    };
    let cct = ContractTable {
        methods: BTreeMap::from([
            (("C".into(), "m".into()), m),
            (("C".into(), "n".into()), n),
        ]),
        main_sync: Contract::Null,
        main_unsync: Contract::Null,
    };
    match check_linear(&cct) {
        Err(ModelCheckError::Nonlinear(who)) => assert!(who.contains("C.m"), "got {who}"),
        other => panic!("expected nonlinear rejection, got {other:?}"),
    }
}

/// The await-collection pattern: one source-level recursive call appears
/// twice in the contract, which is nonlinear.
#[test]
fn double_occurrence_of_recursive_call_rejected() {
    let c = cv(0);
    let c1 = cv(1);
    let print = async_invk("Print", "print", obj0(c1), vec![], None);
    let foo = |d: Option<Dep>| async_invk("Foo", "foo", obj0(c), vec![obj0(c1)], d);
    let body = Contract::plus(
        Contract::Null,
        Contract::seq(
            Contract::Par(
                Box::new(print.clone().with_dep(Dep::awaited(c, c1))),
                Box::new(foo(None)),
            ),
            foo(Some(Dep::awaited(c, c))),
        ),
    );
    let cct = ContractTable {
        methods: BTreeMap::from([
            (
                ("Foo".into(), "foo".into()),
                MethodContract {
                    class: "Foo".into(),
                    method: "foo".into(),
                    recv: obj0(c),
                    args: vec![obj0(c1)],
                    sync: body,
                    unsync: Contract::Null,
                    ret: Rec::Unit,
                },
            ),
            (
                ("Print".into(), "print".into()),
                MethodContract {
                    class: "Print".into(),
                    method: "print".into(),
                    recv: obj0(cv(2)),
                    args: vec![],
                    sync: Contract::Null,
                    unsync: Contract::Null,
                    ret: Rec::Unit,
                },
            ),
        ]),
        main_sync: Contract::Null,
        main_unsync: Contract::Null,
    };
    match check_linear(&cct) {
        Err(ModelCheckError::Nonlinear(who)) => assert!(who.contains("Foo.foo"), "got {who}"),
        other => panic!("expected nonlinear rejection, got {other:?}"),
    }
}

// ---------- evaluation and flattening ----------

#[test]
fn fact_nc_reduction_matches_the_figure() {
    let cct = load_cct("math_nc.mabs");
    let a = modelcheck::analyze(&cct).expect("modelcheck");
    // Two unfoldings for the order-1 mutation.
    assert_eq!(a.steps, 2);
    assert_eq!(a.verdict, AnalysisVerdict::DeadlockFree);
    assert_eq!(canon(&a.lam.to_string()), "< {{(c0,c1), (c1,c2)}} , 0 >");
    // The final term keeps the frozen residual invocation.
    let rendered = canon(&a.final_cp.to_string());
    assert!(rendered.contains("Math!fact_nc"), "got {rendered}");
}

/// Evaluating the F.f / F.g contracts: the final state has no method
/// invocations and the evaluation created no fresh names (all names in the
/// bodies are bound by headers).
#[test]
fn ff_fg_evaluation_terminates_without_fresh_names() {
    let (c, c1, c2) = (cv(0), cv(1), cv(2));
    let ff = MethodContract {
        class: "F".into(),
        method: "f".into(),
        recv: obj0(c),
        args: vec![obj0(c1), obj0(c2)],
        sync: Contract::plus(
            Contract::SyncInvk(Invk {
                class: "F".into(),
                method: "g".into(),
                recv: obj0(c1),
                args: vec![obj0(c2)],
                ret: Rec::Unit,
            }),
            Contract::Dep(Dep::get(c1, c2)),
        ),
        unsync: Contract::Null,
        ret: Rec::Unit,
    };
    let (d, d1) = (cv(3), cv(4));
    let fg = MethodContract {
        class: "F".into(),
        method: "g".into(),
        recv: obj0(d),
        args: vec![obj0(d1)],
        sync: Contract::plus(Contract::Dep(Dep::get(d, d1)), Contract::Dep(Dep::get(d1, d))),
        unsync: Contract::Null,
        ret: Rec::Unit,
    };
    let cct = ContractTable {
        methods: BTreeMap::from([
            (("F".into(), "f".into()), ff),
            (("F".into(), "g".into()), fg),
        ]),
        main_sync: Contract::Null,
        main_unsync: async_invk("F", "f", obj0(cv(10)), vec![obj0(cv(11)), obj0(cv(12))], None),
    };
    let a = modelcheck::analyze(&cct).expect("not recursive");
    fn has_invk(cp: &Cp) -> bool {
        match cp {
            Cp::Invk { .. } => true,
            Cp::Zero | Cp::Dep(_) => false,
            Cp::Pair { fst, snd, .. } => has_invk(fst) || has_invk(snd),
            Cp::Extend { inner, .. } => has_invk(inner),
            Cp::Plus(a, b) | Cp::Seq(a, b) | Cp::Par(a, b) => has_invk(a) || has_invk(b),
        }
    }
    assert!(!has_invk(&a.final_cp), "no invocations remain: {}", a.final_cp);
    // No fresh names: every cog in the final lam is one of the call-site names.
    let names = a.lam.cogs();
    for n in names {
        assert!(
            [cv(10), cv(11), cv(12), Cog::Start].contains(&n),
            "unexpected fresh name {n} in {}",
            a.lam
        );
    }
}

#[test]
fn trivial_main_stays_zero() {
    let cct = ContractTable {
        methods: BTreeMap::new(),
        main_sync: Contract::Null,
        main_unsync: Contract::Null,
    };
    let a = modelcheck::analyze(&cct).unwrap();
    assert_eq!(a.steps, 0);
    assert_eq!(a.verdict, AnalysisVerdict::DeadlockFree);
    assert!(a.lam.is_zero());
}

#[test]
fn modelcheck_verdicts_for_the_drivers() {
    let a = modelcheck::analyze(&load_cct("math_g.mabs")).unwrap();
    assert_eq!(a.verdict, AnalysisVerdict::PotentialDeadlock);
    let a = modelcheck::analyze(&load_cct("math.mabs")).unwrap();
    assert_eq!(a.verdict, AnalysisVerdict::DeadlockFree);
    let a = modelcheck::analyze(&load_cct("cpxsched.mabs")).unwrap();
    assert_eq!(a.verdict, AnalysisVerdict::PotentialDeadlock);
}

/// The regression the model checker exists for: fact_nc is deadlock-free
/// under model checking while the fixpoint reports a false positive.
#[test]
fn modelcheck_is_more_precise_than_fixpoint_on_fact_nc() {
    let cct = load_cct("math_nc.mabs");
    let mc = modelcheck::analyze(&cct).unwrap();
    let fx = fix_analyze(&cct, 2, 100_000).unwrap();
    assert_eq!(mc.verdict, AnalysisVerdict::DeadlockFree);
    assert_eq!(fx.verdict, AnalysisVerdict::PotentialDeadlock);
    assert!(fx.report.saturated);
}

/// Theorem 4 at desk scale: unfolding beyond the stopping point changes no
/// verdict.
#[test]
fn extra_unfoldings_do_not_change_verdicts() {
    for name in ["math.mabs", "math_g.mabs", "math_nc.mabs", "cpxsched.mabs"] {
        let cct = load_cct(name);
        let base = modelcheck::analyze(&cct).unwrap();
        let more = analyze_with(&cct, EvalOrder::LeftmostInnermost, 2).unwrap();
        assert_eq!(base.verdict, more.verdict, "{name}");
    }
}

/// The verdict does not depend on the redex selection order.
#[test]
fn random_redex_orders_agree() {
    for name in ["math_g.mabs", "math_nc.mabs", "cpxsched.mabs"] {
        let cct = load_cct(name);
        let base = modelcheck::analyze(&cct).unwrap();
        for seed in 0..10 {
            let alt = analyze_with(&cct, EvalOrder::Random(seed), 0).unwrap();
            assert_eq!(base.verdict, alt.verdict, "{name} seed {seed}");
        }
    }
}

#[test]
fn modelcheck_verdict_invariant_under_renaming() {
    for name in ["math_g.mabs", "math_nc.mabs", "cpxsched.mabs"] {
        let cct = load_cct(name);
        let renamed = rename_cct(&cct, 777);
        assert_eq!(
            modelcheck::analyze(&cct).unwrap().verdict,
            modelcheck::analyze(&renamed).unwrap().verdict,
            "{name}"
        );
    }
}

// ---------- pre-order sanity on real tables ----------

#[test]
fn preorder_on_fact_nc_approximants() {
    let cct = load_cct("math_nc.mabs");
    let report = fixpoint::fixpoint(&cct, 2, 100_000).unwrap();
    let key = ("Math".to_string(), "fact_nc".to_string());
    let a1 = &report.approximants[1][&key];
    let a2 = &report.approximants[2][&key];
    assert!(preorder_leq(a1, a2).unwrap());
    assert!(!preorder_leq(a2, a1).unwrap());
}

#[test]
fn transform_of_bare_dependency() {
    // The degenerate transformation of a bare dependency contract.
    let cct = ContractTable {
        methods: BTreeMap::new(),
        main_sync: Contract::Dep(dep(cv(0), cv(1))),
        main_unsync: Contract::Dep(adep(cv(2), cv(2))),
    };
    let a = fix_analyze(&cct, 0, 100_000).unwrap();
    assert_eq!(a.verdict, AnalysisVerdict::DeadlockFree);
    let shown = canon(&a.lam.to_string());
    assert_eq!(shown, "< {{(c0,c1)}, {(c2,c2)^a}} , 0 >");
    let lp: LamPair = a.lam.clone();
    assert!(!lp.has_circularity());
    let _: Lam = lp.present;
}

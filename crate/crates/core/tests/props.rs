//! Property tests over the lam algebra: monotonicity of the operations
//! with respect to the pre-order, agreement of the Tarjan-based
//! circularity check with the brute-force closure scan, and invariance
//! under injective renaming.

mod common;

use mabs_core::contract::{Cog, Dep};
use mabs_core::lam::*;
use proptest::prelude::*;

fn arb_dep(max_names: u32) -> impl Strategy<Value = Dep> {
    (0..max_names, 0..max_names, any::<bool>()).prop_map(|(a, b, awaited)| Dep {
        from: Cog::Var(a),
        to: Cog::Var(b),
        awaited,
    })
}

fn arb_relation(max_names: u32, max_deps: usize) -> impl Strategy<Value = Relation> {
    proptest::collection::btree_set(arb_dep(max_names), 0..=max_deps)
}

fn arb_lam(max_names: u32) -> impl Strategy<Value = Lam> {
    proptest::collection::btree_set(arb_relation(max_names, 3), 1..=3)
        .prop_map(|relations| Lam { relations })
}

fn arb_pair(max_names: u32) -> impl Strategy<Value = LamPair> {
    (arb_lam(max_names), arb_lam(max_names))
        .prop_map(|(present, future)| LamPair { present, future })
}

/// `a` together with an enlargement of `a` (extra pairs in every relation
/// plus extra relations), so `a ⋐ enlargement` holds by construction.
fn arb_leq_pair() -> impl Strategy<Value = (LamPair, LamPair)> {
    (arb_pair(4), arb_relation(4, 2), arb_relation(4, 2)).prop_map(|(a, extra_p, extra_f)| {
        let grow = |l: &Lam, extra: &Relation| Lam {
            relations: l
                .relations
                .iter()
                .map(|r| r.union(extra).copied().collect())
                .collect(),
        };
        let b = LamPair {
            present: grow(&a.present, &extra_p),
            future: grow(&a.future, &extra_f),
        };
        (a, b)
    })
}

fn plp(pair: LamPair) -> ParamLamPair {
    ParamLamPair { params: vec![], pair }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Extension, parallel, sequence and plus are monotone w.r.t. the
    /// pre-order.
    #[test]
    fn lam_operations_are_monotone(
        (a, b) in arb_leq_pair(),
        x in arb_pair(4),
        d in arb_dep(4),
    ) {
        prop_assume!(preorder_leq(&plp(a.clone()), &plp(b.clone())).unwrap());
        let ext = (a.extend(d), b.extend(d));
        prop_assert!(preorder_leq(&plp(ext.0), &plp(ext.1)).unwrap(), "extension");
        let par = (a.par(&x), b.par(&x));
        prop_assert!(preorder_leq(&plp(par.0), &plp(par.1)).unwrap(), "parallel");
        let seq = (a.seq(&x), b.seq(&x));
        prop_assert!(preorder_leq(&plp(seq.0), &plp(seq.1)).unwrap(), "sequence");
        let plus = (a.plus(&x), b.plus(&x));
        prop_assert!(preorder_leq(&plp(plus.0), &plp(plus.1)).unwrap(), "plus");
    }

    /// An injective cog substitution preserves the pre-order.
    #[test]
    fn substitution_preserves_preorder((a, b) in arb_leq_pair()) {
        prop_assume!(preorder_leq(&plp(a.clone()), &plp(b.clone())).unwrap());
        let subst = |c: Cog| match c {
            Cog::Var(v) => Cog::Var(v + 17),
            other => other,
        };
        let sa = a.map_cogs(&subst);
        let sb = b.map_cogs(&subst);
        prop_assert!(preorder_leq(&plp(sa), &plp(sb)).unwrap());
    }

    /// The Tarjan-based circularity check agrees with the brute-force
    /// get-closure materialization.
    #[test]
    fn circularity_agrees_with_bruteforce(rel in arb_relation(8, 10)) {
        let fast = Lam::singleton(rel.clone()).has_circularity();
        let slow = has_circularity_bruteforce(&rel);
        prop_assert_eq!(fast, slow, "relation {:?}", rel);
    }

    /// Circularity is invariant under injective renaming of cog names.
    #[test]
    fn circularity_invariant_under_renaming(pair in arb_pair(6), offset in 1u32..50) {
        let renamed = pair.map_cogs(&|c| match c {
            Cog::Var(v) => Cog::Var(v + offset),
            other => other,
        });
        prop_assert_eq!(pair.has_circularity(), renamed.has_circularity());
    }

    /// Normalization preserves the pre-order class and the verdict.
    #[test]
    fn normalization_is_conservative(pair in arb_pair(5)) {
        let norm = pair.normalize();
        prop_assert_eq!(pair.has_circularity(), norm.has_circularity());
        prop_assert!(preorder_leq(&plp(norm.clone()), &plp(pair.clone())).unwrap());
        prop_assert!(preorder_leq(&plp(pair), &plp(norm)).unwrap());
    }

    /// The closure is a closure: idempotent and extensive.
    #[test]
    fn get_closure_is_a_closure(rel in arb_relation(6, 8)) {
        let once = get_closure_of(&rel);
        prop_assert!(rel.is_subset(&once));
        let twice = get_closure_of(&once);
        prop_assert_eq!(once, twice);
    }
}

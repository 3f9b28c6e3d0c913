use std::collections::BTreeSet;
use std::sync::Arc;

use perindex_core::cochain_ops::{bockstein, bockstein_cochain, OperationContext};
use perindex_core::cohomology::{Cochain, CohomologyClass};
use perindex_core::complexes::build_space;
use perindex_core::linalg::Int;
use perindex_core::period_index::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ctx(spec: &str) -> OperationContext {
    OperationContext::new(Arc::new(build_space(spec).unwrap())).unwrap()
}

fn h3_generator(c: &OperationContext, i: usize) -> CohomologyClass {
    CohomologyClass::generator(c.group(3, 0).unwrap(), i).unwrap()
}

fn int(v: i64) -> Int {
    Int::from(v)
}

/// Smallest k >= 1 with k·c = 0, by repeated addition.
fn brute_order(c: &CohomologyClass) -> i64 {
    let mut acc = c.clone();
    for k in 1..1000 {
        if acc.is_zero() {
            return k;
        }
        acc = acc.add(c).unwrap();
    }
    panic!("no finite order below 1000");
}

fn beta_of_generator_sum(c: &OperationContext, n: u64) -> CohomologyClass {
    let g = c.group(2, n).unwrap();
    let xi = CohomologyClass::new(g.clone(), &vec![Int::ONE; g.ngens()]).unwrap();
    bockstein(c, &xi).unwrap()
}

#[test]
fn epsilon_values() {
    let e: Vec<Int> = (1..=6).map(|n| epsilon(&int(n))).collect();
    assert_eq!(e, [1, 4, 3, 8, 5, 12].map(int));
}

#[test]
fn periods() {
    let c = ctx("em2:2:6");
    assert_eq!(period(&c, &CohomologyClass::zero(c.group(3, 0).unwrap())).unwrap(), Int::ONE);
    assert_eq!(period(&c, &h3_generator(&c, 0)).unwrap(), int(2));

    let c = ctx("product(suspension(moore:3),suspension(moore:3))");
    let a = CohomologyClass::new(c.group(3, 0).unwrap(), &[Int::ONE, Int::ONE]).unwrap();
    assert_eq!(period(&c, &a).unwrap(), int(3));
    assert_eq!(brute_order(&a), 3);

    let c = ctx("suspension(suspension(circle))");
    let err = period(&c, &h3_generator(&c, 0)).unwrap_err();
    assert_eq!(err.kind(), "not-torsion");
}

#[test]
fn lifts() {
    let c = ctx("em2:2:6");
    let zero = CohomologyClass::zero(c.group(3, 0).unwrap());
    assert!(lift_to_mod_n(&c, &zero, 5).unwrap().is_zero());
    let alpha = h3_generator(&c, 0);
    let xi = lift_to_mod_n(&c, &alpha, 2).unwrap();
    let iota = Cochain::from_entries(c.space_id(), 2, 2, [(0, Int::ONE)]);
    assert_eq!(c.class_of(&xi).unwrap(), c.class_of(&iota).unwrap());
    assert_eq!(c.class_of(&bockstein_cochain(&c, &xi).unwrap()).unwrap(), alpha);
    // A multiple of the period also lifts.
    let xi4 = lift_to_mod_n(&c, &alpha, 4).unwrap();
    assert_eq!(c.class_of(&bockstein_cochain(&c, &xi4).unwrap()).unwrap(), alpha);
    assert_eq!(all_lifts(&c, &alpha, 2, DEFAULT_COSET_CAP).unwrap().len(), 1);

    let c = ctx("product(suspension(moore:3),suspension(moore:3))");
    let a = beta_of_generator_sum(&c, 3);
    assert_eq!(lift_to_mod_n(&c, &a, 2).unwrap_err().kind(), "no-lift");
}

#[test]
fn lifts_of_zero_are_the_image_of_reduction() {
    let c = ctx("moore:2");
    let zero = CohomologyClass::zero(c.group(3, 0).unwrap());
    let coset = all_lifts(&c, &zero, 2, DEFAULT_COSET_CAP).unwrap();
    let classes: BTreeSet<Vec<Int>> =
        coset.iter().map(|z| c.class_of(&z.unwrap()).unwrap().coords().to_vec()).collect();
    // Oracle: im ρ = ker β, enumerated over all of H²(X; Z/2).
    let g = c.group(2, 2).unwrap();
    let mut kernel = BTreeSet::new();
    let t: Vec<i64> = g.presentation().torsion().iter().map(|d| d.to_i64().unwrap()).collect();
    let total: i64 = t.iter().product();
    for k in 0..total {
        let mut r = k;
        let coords: Vec<Int> = t
            .iter()
            .map(|d| {
                let v = r % d;
                r /= d;
                int(v)
            })
            .collect();
        let x = CohomologyClass::new(g.clone(), &coords).unwrap();
        if bockstein(&c, &x).unwrap().is_zero() {
            kernel.insert(coords);
        }
    }
    assert_eq!(classes, kernel);
    assert_eq!(coset.len(), 2);
}

#[test]
fn coset_cap_is_enforced() {
    let c = ctx("moore:2");
    let zero = CohomologyClass::zero(c.group(3, 0).unwrap());
    assert_eq!(all_lifts(&c, &zero, 2, 1).unwrap_err().kind(), "coset-too-large");
}

#[test]
fn q_tilde_examples() {
    for n in 2..=5u64 {
        let c = ctx(&format!("suspension(moore:{n})"));
        let a = h3_generator(&c, 0);
        let xi = lift_to_mod_n(&c, &a, n).unwrap();
        assert_eq!(q_tilde(&c, &a, &xi).unwrap().order, Int::ONE);
    }
    let c = ctx("em2:2:6");
    let a = h3_generator(&c, 0);
    let xi = lift_to_mod_n(&c, &a, 2).unwrap();
    assert_eq!(q_tilde(&c, &a, &xi).unwrap().order, int(4));
    // ξ must lift α.
    let other = Cochain::zero(c.space_id(), 2, 2);
    assert_eq!(q_tilde(&c, &a, &other).unwrap_err().kind(), "shape");
}

#[test]
fn theorem_b_at_two() {
    let c = ctx("em2:2:6");
    let r = index_bound_audited(&c, &h3_generator(&c, 0), None, DEFAULT_COSET_CAP).unwrap();
    assert_eq!((r.per.clone(), r.ord_q.clone(), r.index.clone()), (int(2), int(4), int(8)));
    assert!(r.exact && r.epsilon_check);
    assert_eq!(r.lift_independence, LiftIndependence::Holds { lifts: 1 });
    let rec: serde_json::Value = serde_json::from_str(&r.record()).unwrap();
    for key in ["space", "alpha", "per", "ordQ", "index", "exact", "epsilonCheck", "liftIndependence"] {
        assert!(rec.get(key).is_some(), "{key}");
    }
    assert_eq!(rec["index"], 8);
}

#[test]
fn odd_period_product() {
    let c = ctx("product(suspension(moore:3),suspension(moore:3))");
    let a = beta_of_generator_sum(&c, 3);
    let r = index_bound(&c, &a).unwrap();
    assert_eq!((r.per.clone(), r.ord_q.clone(), r.index.clone()), (int(3), int(3), int(9)));
    assert!(r.exact);
}

#[test]
fn zero_class() {
    let c = ctx("em2:2:6");
    let r = index_bound(&c, &CohomologyClass::zero(c.group(3, 0).unwrap())).unwrap();
    assert_eq!((r.per.clone(), r.ord_q.clone(), r.index.clone()), (Int::ONE, Int::ONE, Int::ONE));
}

#[test]
fn low_dimensional_spaces_have_index_equal_to_period() {
    for spec in ["moore:2", "moore:5", "suspension(moore:2)", "suspension(moore:3)", "suspension(moore:4)", "suspension(moore:6)"] {
        let c = ctx(spec);
        let h3 = c.group(3, 0).unwrap();
        for i in 0..h3.ngens() {
            let a = CohomologyClass::generator(h3.clone(), i).unwrap();
            let r = index_bound_audited(&c, &a, None, DEFAULT_COSET_CAP).unwrap();
            assert_eq!(r.index, r.per, "{spec}");
            assert!(r.lift_independence.holds());
        }
    }
}

#[test]
fn quotient_by_alpha_cup_h2() {
    // H⁵ = Z/2 is spanned by α ⌣ [torus], so Q̃ always vanishes.
    let c = ctx("product(suspension(moore:2),torus)");
    let a = h3_generator(&c, 0);
    assert_eq!(c.group(5, 0).unwrap().describe(), "Z/2");
    let aq = AlphaQuotient::new(&c, &a).unwrap();
    assert_eq!(aq.describe(), "0");
    let audit = verify_lift_independence(&c, &a, 2, DEFAULT_COSET_CAP).unwrap();
    assert_eq!(audit.result, LiftIndependence::Holds { lifts: 2 });
}

#[test]
fn q_tilde_invariant_under_reduction_shifts() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (spec, n) in [("product(suspension(moore:2),torus)", 2u64), ("product(suspension(moore:2),torus)", 4), ("em2:2:6", 2)] {
        let c = ctx(spec);
        let a = h3_generator(&c, 0);
        let aq = AlphaQuotient::new(&c, &a).unwrap();
        let xi = lift_to_mod_n(&c, &a, n).unwrap();
        let base = aq.q_tilde(&c, &xi).unwrap();
        for _ in 0..4 {
            let mut shifted = xi.clone();
            for g in c.group(2, 0).unwrap().generators().unwrap() {
                let k = Int::from(rng.random_range(-5i64..5));
                shifted = shifted.add(&g.reduce(n).unwrap().scale(&k)).unwrap();
            }
            let w = Cochain::from_entries(c.space_id(), 1, n, (0..c.space().count(1) as u32).map(|i| (i, Int::from(rng.random_range(0i64..3)))));
            shifted = shifted.add(&c.coboundary(&w).unwrap()).unwrap();
            let q = aq.q_tilde(&c, &shifted).unwrap();
            assert_eq!((q.projected, q.order.clone()), (base.projected.clone(), base.order.clone()), "{spec}");
        }
    }
}

#[test]
fn six_skeleton_gives_the_same_report() {
    let x = "product(suspension(moore:3),suspension(suspension(moore:3)))";
    let full = ctx(x);
    let skel = ctx(&format!("skeleton({x};dim=6)"));
    let a_full = beta_of_generator_sum(&full, 3);
    let a_skel = beta_of_generator_sum(&skel, 3);
    assert_eq!(a_full.coords(), a_skel.coords());
    let (r, s) = (index_bound(&full, &a_full).unwrap(), index_bound(&skel, &a_skel).unwrap());
    assert_eq!((r.per, r.ord_q, r.index), (s.per, s.ord_q, s.index));
    assert!(!r.exact);
}

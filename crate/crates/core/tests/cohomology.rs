use std::sync::Arc;

use perindex_core::cohomology::{
    coboundary, shuffle_pullback, space_cohomology, subgroup_quotient, Cochain, CohomologyClass,
};
use perindex_core::complexes::{
    build_space, normalized_chain_complex, SimplicialSet, TensorComplex,
};
use perindex_core::linalg::{Int, Order};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn space(spec: &str) -> Arc<SimplicialSet> {
    Arc::new(build_space(spec).unwrap())
}

fn groups(x: &Arc<SimplicialSet>, degrees: std::ops::RangeInclusive<usize>, m: u64, backend: &str) -> Vec<String> {
    degrees.map(|k| space_cohomology(x, k, m, backend).unwrap().describe()).collect()
}

#[test]
fn em2_2_6_integral_cohomology() {
    let x = space("em2:2:6");
    assert_eq!(groups(&x, 0..=5, 0, "direct"), ["Z", "0", "0", "Z/2", "0", "Z/4"]);
}

#[test]
fn em2_3_4_has_h3_z3() {
    let x = space("em2:3:4");
    assert_eq!(space_cohomology(&x, 3, 0, "direct").unwrap().describe(), "Z/3");
}

#[test]
fn em2_mod_2_tautological_class() {
    let x = space("em2:2:3");
    let g = space_cohomology(&x, 2, 2, "direct").unwrap();
    assert_eq!(g.describe(), "Z/2");
    // The unique nondegenerate 2-simplex carries the tautological cocycle.
    let iota = Cochain::from_entries(x.space_id(), 2, 2, [(0, Int::ONE)]);
    assert_eq!(g.express(&iota).unwrap(), vec![Int::ONE]);
}

#[test]
fn wbar_and_moore() {
    let x = space("wbar:2:6");
    assert_eq!(groups(&x, 1..=2, 0, "direct"), ["0", "Z/2"]);
    let x = space("wbar:3:3");
    assert_eq!(space_cohomology(&x, 2, 0, "direct").unwrap().describe(), "Z/3");
    for n in 2..=5u64 {
        let m = space(&format!("moore:{n}"));
        assert_eq!(groups(&m, 0..=2, 0, "direct"), ["Z".to_string(), "0".into(), format!("Z/{n}")]);
        assert_eq!(space_cohomology(&m, 1, n, "direct").unwrap().describe(), format!("Z/{n}"));
        assert_eq!(space_cohomology(&m, 2, n, "direct").unwrap().describe(), format!("Z/{n}"));
        let s = space(&format!("suspension(moore:{n})"));
        assert_eq!(groups(&s, 0..=3, 0, "direct"), ["Z".to_string(), "0".into(), "0".into(), format!("Z/{n}")]);
    }
}

#[test]
fn suspension_of_points_and_circle() {
    assert_eq!(groups(&space("suspension(points:2)"), 0..=1, 0, "direct"), ["Z", "Z"]);
    assert_eq!(groups(&space("suspension(circle)"), 0..=2, 0, "direct"), ["Z", "0", "Z"]);
}

#[test]
fn tori_by_both_backends() {
    for spec in ["product(circle,circle)", "torus"] {
        let x = space(spec);
        for b in ["direct", "eilenberg-zilber"] {
            assert_eq!(groups(&x, 0..=2, 0, b), ["Z", "Z^2", "Z"], "{spec} {b}");
        }
    }
    // The one-vertex torus has three edges, so its 1-skeleton is a wedge of three circles.
    let x = space("skeleton(torus;dim=1)");
    assert_eq!(space_cohomology(&x, 1, 0, "direct").unwrap().describe(), "Z^3");
    let x = space("skeleton(product(circle,circle);dim=1)");
    assert_eq!(space_cohomology(&x, 1, 0, "direct").unwrap().describe(), "Z^19");
}

#[test]
fn product_of_suspended_moore_spaces() {
    let x = space("product(suspension(moore:3),suspension(moore:3))");
    let direct = groups(&x, 0..=6, 0, "direct");
    let ez = groups(&x, 0..=6, 0, "eilenberg-zilber");
    assert_eq!(direct, ["Z", "0", "0", "Z/3+Z/3", "0", "Z/3", "Z/3"]);
    assert_eq!(direct, ez);
    // The two backends assign the same classes to the same cocycles.
    for k in [3, 5] {
        let gd = space_cohomology(&x, k, 0, "direct").unwrap();
        let ge = space_cohomology(&x, k, 0, "eilenberg-zilber").unwrap();
        for z in gd.generators().unwrap() {
            let a = CohomologyClass::of(ge.clone(), z).unwrap();
            assert_eq!(a.order(), CohomologyClass::of(gd.clone(), z).unwrap().order());
        }
        for z in ge.generators().unwrap() {
            assert_eq!(ge.express(z).unwrap().iter().filter(|c| !c.is_zero()).count(), 1);
            gd.express(z).unwrap();
        }
    }
}

#[test]
fn shuffle_map_is_a_chain_map() {
    let x = space("product(suspension(moore:2),circle,circle-min)");
    let p = x.product().unwrap();
    let factors: Vec<_> = p.factors().iter().map(|f| normalized_chain_complex(f)).collect();
    let refs: Vec<_> = factors.iter().collect();
    let t = TensorComplex::new(&refs, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in 0..4 {
        let z = Cochain::from_entries(
            x.space_id(),
            d,
            0,
            (0..x.count(d) as u32).map(|i| (i, Int::from(rng.random_range(-3i64..=3)))),
        );
        let lhs = shuffle_pullback(&x, &t, &coboundary(&x, &z).unwrap()).unwrap();
        let ez = shuffle_pullback(&x, &t, &z).unwrap().lift();
        let rhs = t.complex().boundary(d + 1).vec_mul(&ez.to_dense(t.cells(d).len()).unwrap()).unwrap();
        assert_eq!(lhs.to_dense(t.cells(d + 1).len()).unwrap(), rhs, "degree {d}");
    }
}

#[test]
fn coboundaries_express_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for spec in ["em2:2:5", "suspension(moore:4)", "product(suspension(moore:2),circle)"] {
        let x = space(spec);
        for k in 1..x.dim() {
            for m in [0u64, 2, 3] {
                let g = space_cohomology(&x, k, m, "auto").unwrap();
                let w = Cochain::from_entries(
                    x.space_id(),
                    k - 1,
                    m,
                    (0..x.count(k - 1) as u32).map(|i| (i, Int::from(rng.random_range(0i64..5)))),
                );
                let dw = coboundary(&x, &w).unwrap();
                assert!(g.presentation().is_zero(&g.express(&dw).unwrap()), "{spec} H^{k} mod {m}");
                for (i, z) in g.generators().unwrap().iter().enumerate() {
                    let mut e = vec![Int::ZERO; g.ngens()];
                    e[i] = Int::ONE;
                    assert_eq!(g.express(&z.add(&dw).unwrap()).unwrap(), g.presentation().reduce(&e));
                }
            }
        }
    }
}

#[test]
fn non_cocycles_are_rejected() {
    let x = space("moore:3");
    let g = space_cohomology(&x, 1, 0, "direct").unwrap();
    let z = Cochain::from_entries(x.space_id(), 1, 0, [(0, Int::ONE)]);
    assert_eq!(g.express(&z).unwrap_err().kind(), "not-cocycle");
}

#[test]
fn universal_coefficients() {
    for spec in ["moore:3", "suspension(moore:2)", "em2:2:5", "product(circle,moore:2)"] {
        let x = space(spec);
        for k in 0..x.dim() {
            let hk = space_cohomology(&x, k, 0, "direct").unwrap();
            let hk1 = space_cohomology(&x, k + 1, 0, "direct").unwrap();
            for m in [2u64, 3, 4] {
                let mi = Int::from(m);
                let predicted = (0..hk.presentation().free_rank())
                    .map(|_| mi.clone())
                    .chain(hk.presentation().torsion().iter().map(|d| d.gcd(&mi)))
                    .chain(hk1.presentation().torsion().iter().map(|d| d.gcd(&mi)))
                    .fold(Int::ONE, |a, b| &a * &b);
                let hm = space_cohomology(&x, k, m, "direct").unwrap();
                assert_eq!(hm.presentation().order().unwrap(), predicted, "{spec} H^{k} mod {m}");
            }
        }
    }
}

#[test]
fn quotients_and_orders() {
    let x = space("product(suspension(moore:2),suspension(moore:4))");
    let g = space_cohomology(&x, 3, 0, "auto").unwrap();
    assert_eq!(g.describe(), "Z/2+Z/4");
    let c = CohomologyClass::new(g.clone(), &[Int::ONE, Int::ONE]).unwrap();
    assert_eq!(c.order(), Order::Finite(Int::from(4)));
    let sub = CohomologyClass::new(g.clone(), &[Int::ONE, Int::from(2)]).unwrap();
    let q = subgroup_quotient(&g, &[sub.clone()]).unwrap();
    assert_eq!(q.presentation().order(), Some(Int::from(4)));
    assert!(q.presentation().is_zero(&q.project(sub.coords()).unwrap()));
}

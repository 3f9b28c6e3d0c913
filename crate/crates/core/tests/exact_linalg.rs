use perindex_core::linalg::*;
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..6, 1usize..6).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-6i64..=6, c), r))
}

fn to_matrix(rows: &[Vec<i64>]) -> SparseIntMatrix {
    SparseIntMatrix::from_dense(&rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect::<Vec<_>>())
}

/// Order of the class of `v` in Z^n / colspan(m), by brute force over k·v.
fn brute_order(m: &SparseIntMatrix, v: &[Int], bound: i64) -> Option<i64> {
    (1..=bound).find(|&k| {
        let kv: Vec<Int> = v.iter().map(|x| x.clone() * Int::from(k)).collect();
        solve_linear(m, &kv, &Int::ZERO).is_ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_reconstructs(rows in matrix()) {
        let m = to_matrix(&rows);
        let s = decompose(&m, Tracking::ALL);
        let d = s.u().unwrap().mul(&m).unwrap().mul(s.v().unwrap()).unwrap();
        prop_assert_eq!(d, s.d());
        let f = s.invariant_factors();
        prop_assert!(f.iter().all(|x| !x.is_negative() && !x.is_zero()));
        prop_assert!(f.windows(2).all(|w| w[0].divides(&w[1])));
    }

    #[test]
    fn solutions_check_out(rows in matrix(), x in prop::collection::vec(-4i64..=4, 5)) {
        let m = to_matrix(&rows);
        let x: Vec<Int> = x[..m.cols()].iter().map(|&v| Int::from(v)).collect();
        let b = m.mul_vec(&x).unwrap();
        let y = solve_linear(&m, &b, &Int::ZERO).unwrap();
        prop_assert_eq!(m.mul_vec(&y).unwrap(), b.clone());
        let seven = Int::from(7);
        let y = solve_linear(&m, &b, &seven).unwrap();
        let got: Vec<Int> = m.mul_vec(&y).unwrap().iter().map(|v| v.modulo(&seven)).collect();
        let want: Vec<Int> = b.iter().map(|v| v.modulo(&seven)).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn cokernel_orders_match_brute_force(rows in matrix(), v in prop::collection::vec(-3i64..=3, 5)) {
        let m = to_matrix(&rows);
        let g = cokernel(&m);
        let v: Vec<Int> = v[..m.rows()].iter().map(|&x| Int::from(x)).collect();
        let coords = g.express(&v).unwrap();
        match g.element_order(&coords).unwrap() {
            Order::Finite(k) => {
                let k = k.to_i64().unwrap();
                prop_assert_eq!(brute_order(&m, &v, k), Some(k));
            }
            Order::Infinite => {
                prop_assert!(g.free_rank() > 0);
                prop_assert_eq!(brute_order(&m, &v, 50), None);
            }
        }
        // Zero in the cokernel exactly when v is in the column span.
        prop_assert_eq!(g.is_zero(&coords), solve_linear(&m, &v, &Int::ZERO).is_ok());
    }

    #[test]
    fn gcd_is_bezout(a in -1000i64..1000, b in -1000i64..1000) {
        let (a, b) = (Int::from(a), Int::from(b));
        let (g, s, t) = a.extended_gcd(&b);
        prop_assert_eq!(a.clone() * s + b.clone() * t, g.clone());
        prop_assert_eq!(g, a.gcd(&b));
    }
}

//! Seeded property batteries, one per module, reported as pass/fail results.

use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cochain_ops::{bockstein_cochain, cup, cup1, pontryagin_cochain, reduce_coeffs_cochain, OperationContext};
use crate::cohomology::{coboundary, space_cohomology, Cochain, CohomologyClass};
use crate::complexes::{build_space, normalized_chain_complex, SimplicialSet};
use crate::error::{Error, Result};
use crate::linalg::{cokernel, smith_normal_form, solve_linear, Int, SparseIntMatrix};
use crate::period_index::{epsilon, index_bound, verify_lift_independence, AlphaQuotient, LiftCoset, DEFAULT_COSET_CAP};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

pub const SCOPES: [&str; 5] = ["exact_linalg", "complexes", "cohomology", "cochain_ops", "period_index"];

/// Spaces the period–index suite audits.
pub const SHIPPED_SPACES: [&str; 14] = [
    "moore:2",
    "moore:3",
    "moore:4",
    "moore:5",
    "suspension(moore:2)",
    "suspension(moore:3)",
    "suspension(moore:4)",
    "suspension(moore:5)",
    "em2:2:6",
    "product(suspension(moore:3),suspension(moore:3))",
    "product(suspension(moore:2),suspension(moore:4))",
    "product(suspension(moore:2),torus)",
    "product(em2:2:6,torus;dmax=5)",
    "product(em2:2:6,circle,circle;dmax=5)",
];

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub module: &'static str,
    pub name: String,
    pub seed: u64,
    pub cases: usize,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

impl CheckResult {
    /// Deterministic summary line; timing is left out.
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("{status} {}::{} cases={} seed={}", self.module, self.name, self.cases, self.seed);
        if !self.detail.is_empty() {
            s.push_str(&format!(": {}", self.detail));
        }
        s
    }
}

type Outcome = std::result::Result<usize, String>;

fn check(module: &'static str, name: &str, seed: u64, f: impl FnOnce(&mut ChaCha8Rng) -> Outcome) -> CheckResult {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (passed, cases, detail) = match f(&mut rng) {
        Ok(n) => (true, n, String::new()),
        Err(e) => (false, 0, e),
    };
    CheckResult { module, name: name.to_string(), seed, cases, passed, detail, millis: start.elapsed().as_millis() }
}

fn fail(e: Error) -> String {
    e.to_string()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn space(spec: &str) -> std::result::Result<Arc<SimplicialSet>, String> {
    build_space(spec).map(Arc::new).map_err(fail)
}

fn context(spec: &str) -> std::result::Result<OperationContext, String> {
    OperationContext::new(space(spec)?).map_err(fail)
}

/// Runs one module's battery, or all of them for `"all"`.
pub fn run_suite(scope: &str, seed: u64) -> Result<Vec<CheckResult>> {
    match scope {
        "all" => Ok(SCOPES.iter().flat_map(|s| run_scope(s, seed)).collect()),
        s if SCOPES.contains(&s) => Ok(run_scope(s, seed)),
        s => Err(Error::Parse(format!("unknown verify scope '{s}' (expected one of {} or all)", SCOPES.join(", ")))),
    }
}

fn run_scope(scope: &str, seed: u64) -> Vec<CheckResult> {
    match scope {
        "exact_linalg" => vec![snf_invariants(seed, 1000), solve_roundtrip(seed, 200), cokernel_order(seed, 200)],
        "complexes" => vec![boundary_squared(seed), suspension_euler(seed)],
        "cohomology" => vec![coboundaries_vanish(seed), universal_coefficients(seed)],
        "cochain_ops" => vec![
            leibniz(seed, 100),
            cup1_commutator(seed, 100),
            bockstein_laws(seed),
            pontryagin_doubling(seed),
            pontryagin_quadratic(seed),
        ],
        "period_index" => vec![lift_independence(seed), epsilon_bound(seed), low_dimension_index(seed)],
        _ => unreachable!(),
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> SparseIntMatrix {
    let density = rng.random_range(0.2..1.0);
    let mut entries = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if rng.random_bool(density) {
                entries.push((r, c, Int::from(rng.random_range(-9i64..=9))));
            }
        }
    }
    SparseIntMatrix::from_triplets(rows, cols, &entries).expect("in range")
}

/// Fraction-free Gaussian elimination (Bareiss) determinant.
pub fn bareiss_det(m: &SparseIntMatrix) -> Int {
    let n = m.rows();
    assert_eq!(n, m.cols());
    let mut a = m.to_dense();
    let mut sign = Int::ONE;
    let mut prev = Int::ONE;
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return Int::ZERO;
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = v.div_exact(&prev).expect("Bareiss division is exact");
            }
            a[i][k] = Int::ZERO;
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        Int::ONE
    } else {
        &sign * &a[n - 1][n - 1]
    }
}

pub fn snf_invariants(seed: u64, count: usize) -> CheckResult {
    check("exact_linalg", "snf_invariants", seed, |rng| {
        for t in 0..count {
            let (rows, cols) = (rng.random_range(1..=8), rng.random_range(1..=8));
            let m = random_matrix(rng, rows, cols);
            let s = smith_normal_form(&m);
            let (u, v) = (s.u().map_err(fail)?, s.v().map_err(fail)?.clone());
            let d = s.d();
            let umv = u.mul(&m).and_then(|um| um.mul(&v)).map_err(fail)?;
            ensure(umv == d, || format!("matrix {t}: U·M·V != D"))?;
            ensure(u.mul(&s.u_inv().map_err(fail)?).map_err(fail)? == SparseIntMatrix::identity(rows), || {
                format!("matrix {t}: U·U^-1 != I")
            })?;
            ensure(bareiss_det(&u).abs().is_one(), || format!("matrix {t}: det U != ±1"))?;
            ensure(bareiss_det(&v).abs().is_one(), || format!("matrix {t}: det V != ±1"))?;
            let f = s.invariant_factors();
            ensure(f.iter().all(|x| !x.is_negative() && !x.is_zero()), || format!("matrix {t}: nonpositive factor"))?;
            ensure(f.windows(2).all(|w| w[0].divides(&w[1])), || format!("matrix {t}: divisibility chain broken"))?;
            for r in 0..rows {
                for c in 0..cols {
                    let expect = if r == c && r < f.len() { f[r].clone() } else { Int::ZERO };
                    ensure(d.get(r, c) == expect, || format!("matrix {t}: D is not diag(factors)"))?;
                }
            }
        }
        Ok(count)
    })
}

pub fn solve_roundtrip(seed: u64, count: usize) -> CheckResult {
    check("exact_linalg", "solve_roundtrip", seed, |rng| {
        for t in 0..count {
            let (rows, cols) = (rng.random_range(1..=7), rng.random_range(1..=7));
            let m = random_matrix(rng, rows, cols);
            let x: Vec<Int> = (0..cols).map(|_| Int::from(rng.random_range(-5i64..=5))).collect();
            let b = m.mul_vec(&x).map_err(fail)?;
            let y = solve_linear(&m, &b, &Int::ZERO).map_err(|e| format!("matrix {t}: {e}"))?;
            ensure(m.mul_vec(&y).map_err(fail)? == b, || format!("matrix {t}: M·y != b"))?;
            let modulus = Int::from(rng.random_range(2i64..=12));
            let y = solve_linear(&m, &b, &modulus).map_err(|e| format!("matrix {t} mod {modulus}: {e}"))?;
            let my = m.mul_vec(&y).map_err(fail)?;
            ensure(my.iter().zip(&b).all(|(p, q)| (p - q).modulo(&modulus).is_zero()), || {
                format!("matrix {t}: M·y != b mod {modulus}")
            })?;
        }
        Ok(count)
    })
}

pub fn cokernel_order(seed: u64, count: usize) -> CheckResult {
    check("exact_linalg", "cokernel_order", seed, |rng| {
        for t in 0..count {
            let n = rng.random_range(1..=6);
            let m = random_matrix(rng, n, n);
            let det = bareiss_det(&m).abs();
            let g = cokernel(&m);
            if det.is_zero() {
                ensure(g.free_rank() > 0, || format!("matrix {t}: singular but finite cokernel"))?;
            } else {
                ensure(g.order() == Some(det.clone()), || format!("matrix {t}: |coker| != |det| = {det}"))?;
            }
        }
        Ok(count)
    })
}

pub fn boundary_squared(seed: u64) -> CheckResult {
    check("complexes", "boundary_squared", seed, |_| {
        let specs = ["em2:2:6", "em2:3:4", "wbar:2:5", "torus", "suspension(moore:4)", "product(moore:2,circle)"];
        for spec in specs {
            normalized_chain_complex(&*space(spec)?).check_boundary_squared().map_err(|e| format!("{spec}: {e}"))?;
        }
        Ok(specs.len())
    })
}

pub fn suspension_euler(seed: u64) -> CheckResult {
    check("complexes", "suspension_euler", seed, |_| {
        let specs = ["moore:3", "torus", "circle", "em2:2:4", "points:3"];
        for spec in specs {
            let x = normalized_chain_complex(&*space(spec)?).euler_characteristic();
            let s = normalized_chain_complex(&*space(&format!("suspension({spec})"))?).euler_characteristic();
            ensure(s == 2 - x, || format!("{spec}: chi(SX) = {s}, chi(X) = {x}"))?;
        }
        Ok(specs.len())
    })
}

fn random_cochain(x: &SimplicialSet, rng: &mut ChaCha8Rng, d: usize, m: u64) -> Cochain {
    let hi = if m == 0 { 4 } else { m as i64 };
    let mut entries = Vec::new();
    for i in 0..x.count(d) as u32 {
        if rng.random_bool(0.5) {
            entries.push((i, Int::from(rng.random_range(-hi..hi))));
        }
    }
    Cochain::from_entries(x.space_id(), d, m, entries)
}

fn random_cocycle(c: &OperationContext, rng: &mut ChaCha8Rng, d: usize, m: u64) -> std::result::Result<Cochain, String> {
    let g = c.group(d, m).map_err(fail)?;
    let mut z = Cochain::zero(c.space_id(), d, m);
    for gen in g.generators().map_err(fail)? {
        z = z.add(&gen.scale(&Int::from(rng.random_range(0i64..5)))).map_err(fail)?;
    }
    if d > 0 {
        let w = random_cochain(c.space(), rng, d - 1, m);
        z = z.add(&c.coboundary(&w).map_err(fail)?).map_err(fail)?;
    }
    Ok(z)
}

pub fn coboundaries_vanish(seed: u64) -> CheckResult {
    check("cohomology", "coboundaries_vanish", seed, |rng| {
        let mut cases = 0;
        for spec in ["em2:2:5", "suspension(moore:4)", "product(suspension(moore:2),circle)"] {
            let x = space(spec)?;
            for k in 1..x.dim() {
                for m in [0u64, 2, 3] {
                    let g = space_cohomology(&x, k, m, "auto").map_err(fail)?;
                    let dw = coboundary(&x, &random_cochain(&x, rng, k - 1, m)).map_err(fail)?;
                    let e = g.express(&dw).map_err(fail)?;
                    ensure(g.presentation().is_zero(&e), || format!("{spec}: H^{k} mod {m}"))?;
                    cases += 1;
                }
            }
        }
        Ok(cases)
    })
}

pub fn universal_coefficients(seed: u64) -> CheckResult {
    check("cohomology", "universal_coefficients", seed, |_| {
        let mut cases = 0;
        for spec in ["moore:3", "suspension(moore:2)", "em2:2:5", "product(circle,moore:2)"] {
            let x = space(spec)?;
            for k in 0..x.dim() {
                let hk = space_cohomology(&x, k, 0, "direct").map_err(fail)?;
                let hk1 = space_cohomology(&x, k + 1, 0, "direct").map_err(fail)?;
                for m in [2u64, 3, 4] {
                    let mi = Int::from(m);
                    let predicted = (0..hk.presentation().free_rank())
                        .map(|_| mi.clone())
                        .chain(hk.presentation().torsion().iter().map(|d| d.gcd(&mi)))
                        .chain(hk1.presentation().torsion().iter().map(|d| d.gcd(&mi)))
                        .fold(Int::ONE, |a, b| &a * &b);
                    let hm = space_cohomology(&x, k, m, "direct").map_err(fail)?;
                    ensure(hm.presentation().order() == Some(predicted), || format!("{spec}: H^{k} mod {m}"))?;
                    cases += 1;
                }
            }
        }
        Ok(cases)
    })
}

fn sign(e: usize) -> Int {
    if e % 2 == 0 {
        Int::ONE
    } else {
        -Int::ONE
    }
}

/// `δ(x⌣y) = δx⌣y + (-1)^p x⌣δy` on random cochains.
pub fn leibniz(seed: u64, per_space: usize) -> CheckResult {
    check("cochain_ops", "leibniz", seed, |rng| {
        let specs = ["em2:2:5", "moore:3", "torus", "suspension(moore:2)", "product(circle,moore:2)"];
        for spec in specs {
            let c = context(spec)?;
            let dim = c.space().dim();
            for t in 0..per_space {
                let m = [0u64, 2, 3, 4][t % 4];
                let p = rng.random_range(0..dim);
                let q = rng.random_range(0..dim - p);
                let x = random_cochain(c.space(), rng, p, m);
                let y = random_cochain(c.space(), rng, q, m);
                let run = || -> Result<bool> {
                    let lhs = c.coboundary(&cup(&c, &x, &y)?)?;
                    let rhs = cup(&c, &c.coboundary(&x)?, &y)?.add(&cup(&c, &x, &c.coboundary(&y)?)?.scale(&sign(p)))?;
                    Ok(lhs == rhs)
                };
                ensure(run().map_err(fail)?, || format!("{spec}: p={p} q={q} m={m} trial {t}"))?;
            }
        }
        Ok(per_space * specs.len())
    })
}

/// `δ(x⌣₁y) = (-1)^{p+q+1} (x⌣y - (-1)^{pq} y⌣x)` on random cocycles.
pub fn cup1_commutator(seed: u64, per_space: usize) -> CheckResult {
    check("cochain_ops", "cup1_commutator", seed, |rng| {
        let specs = ["em2:2:6", "torus", "product(suspension(moore:2),suspension(moore:2))"];
        for spec in specs {
            let c = context(spec)?;
            let dim = c.space().dim();
            for t in 0..per_space {
                let m = [0u64, 2, 4][t % 3];
                let p = rng.random_range(1..dim);
                let q = rng.random_range(1..=dim - p);
                let x = random_cocycle(&c, rng, p, m)?;
                let y = random_cocycle(&c, rng, q, m)?;
                let run = || -> Result<bool> {
                    let lhs = c.coboundary(&cup1(&c, &x, &y)?)?;
                    let comm = cup(&c, &x, &y)?.sub(&cup(&c, &y, &x)?.scale(&sign(p * q)))?;
                    Ok(lhs == comm.scale(&sign(p + q + 1)))
                };
                ensure(run().map_err(fail)?, || format!("{spec}: p={p} q={q} m={m} trial {t}"))?;
            }
        }
        Ok(per_space * specs.len())
    })
}

/// Two integral lifts give the same Bockstein class, and `n·β_n(ξ) = 0`.
pub fn bockstein_laws(seed: u64) -> CheckResult {
    check("cochain_ops", "bockstein_lift_independence_and_torsion", seed, |rng| {
        let mut cases = 0;
        for (spec, degrees) in [
            ("em2:2:6", &[2usize, 3][..]),
            ("moore:4", &[1][..]),
            ("product(suspension(moore:2),suspension(moore:4))", &[2, 3, 4][..]),
        ] {
            let c = context(spec)?;
            for &d in degrees {
                for n in [2u64, 3, 4] {
                    for _ in 0..5 {
                        let z = random_cocycle(&c, rng, d, n)?;
                        let shift = random_cochain(c.space(), rng, d, 0).scale(&Int::from(n));
                        let run = || -> Result<bool> {
                            let b0 = c.class_of(&bockstein_cochain(&c, &z)?)?;
                            let other = z.lift().add(&shift)?;
                            let b1 = c.class_of(&c.coboundary(&other)?.div_exact(&Int::from(n))?)?;
                            Ok(b0 == b1 && b0.scale(&Int::from(n)).is_zero())
                        };
                        ensure(run().map_err(fail)?, || format!("{spec}: degree {d} mod {n}"))?;
                        cases += 1;
                    }
                }
            }
        }
        Ok(cases)
    })
}

const P2_SPACES: [(&str, u64); 3] = [
    ("em2:2:6", 2),
    ("product(suspension(moore:2),suspension(moore:2))", 2),
    ("product(suspension(moore:4),suspension(moore:2))", 4),
];

/// `2·P₂(ξ)` equals the image of `ξ²` under `Z/2m -> Z/4m`, at class level.
pub fn pontryagin_doubling(seed: u64) -> CheckResult {
    check("cochain_ops", "pontryagin_doubling", seed, |rng| {
        let mut cases = 0;
        for (spec, n) in P2_SPACES {
            let c = context(spec)?;
            for _ in 0..8 {
                let x = random_cocycle(&c, rng, 2, n)?;
                let run = || -> Result<bool> {
                    let p = c.class_of(&pontryagin_cochain(&c, &x)?)?;
                    let sq = c.class_of(&reduce_coeffs_cochain(&cup(&c, &x, &x)?, 2 * n)?)?;
                    Ok(p.scale(&Int::from(2)) == sq)
                };
                ensure(run().map_err(fail)?, || format!("{spec} mod {n}"))?;
                cases += 1;
            }
        }
        Ok(cases)
    })
}

/// `P₂(ξ+η) - P₂(ξ) - P₂(η)` equals the image of `ξ⌣η`, at class level.
pub fn pontryagin_quadratic(seed: u64) -> CheckResult {
    check("cochain_ops", "pontryagin_quadratic_law", seed, |rng| {
        let mut cases = 0;
        for (spec, n) in P2_SPACES {
            let c = context(spec)?;
            for _ in 0..8 {
                let x = random_cocycle(&c, rng, 2, n)?;
                let y = random_cocycle(&c, rng, 2, n)?;
                let run = || -> Result<bool> {
                    let p = |z: &Cochain| -> Result<CohomologyClass> { c.class_of(&pontryagin_cochain(&c, z)?) };
                    let lhs = p(&x.add(&y)?)?.add(&p(&x)?.neg())?.add(&p(&y)?.neg())?;
                    let rhs = c.class_of(&reduce_coeffs_cochain(&cup(&c, &x, &y)?, 2 * n)?)?;
                    Ok(lhs == rhs)
                };
                ensure(run().map_err(fail)?, || format!("{spec} mod {n}"))?;
                cases += 1;
            }
        }
        Ok(cases)
    })
}

/// Torsion classes of `H³(X; Z)` audited on a space: each generator and their sum.
pub fn audit_classes(c: &OperationContext) -> Result<Vec<CohomologyClass>> {
    let h3 = c.group(3, 0)?;
    let p = h3.presentation();
    let mut out = Vec::new();
    for i in p.free_rank()..p.ngens() {
        out.push(CohomologyClass::generator(h3.clone(), i)?);
    }
    if out.len() > 1 {
        let mut sum = CohomologyClass::zero(h3.clone());
        for a in &out {
            sum = sum.add(a)?;
        }
        out.push(sum);
    }
    Ok(out)
}

fn per_u64(per: &Int) -> Result<u64> {
    per.to_i64().map(|v| v as u64).ok_or_else(|| Error::Budget(format!("period {per} is too large")))
}

/// `Q̃` agrees over the full lift coset on every shipped space.
pub fn lift_independence(seed: u64) -> CheckResult {
    check("period_index", "lift_independence", seed, |_| {
        let mut cases = 0;
        for spec in SHIPPED_SPACES {
            let c = context(spec)?;
            for a in audit_classes(&c).map_err(fail)? {
                let run = || -> Result<(bool, u128)> {
                    let n = per_u64(&a.order().finite().cloned().ok_or(Error::NotTorsion)?)?;
                    let audit = verify_lift_independence(&c, &a, n, DEFAULT_COSET_CAP)?;
                    Ok((audit.result.holds(), audit.orders.len() as u128))
                };
                let (ok, lifts) = run().map_err(|e| format!("{spec}: {e}"))?;
                ensure(ok, || format!("{spec}: alpha {}", a.format()))?;
                cases += lifts as usize;
            }
        }
        Ok(cases)
    })
}

/// `ord Q̃(ξ) | ε(per)` for every audited class and every lift mod `per`.
pub fn epsilon_bound(seed: u64) -> CheckResult {
    check("period_index", "epsilon_bound", seed, |_| {
        let mut cases = 0;
        for spec in SHIPPED_SPACES {
            let c = context(spec)?;
            for a in audit_classes(&c).map_err(fail)? {
                let run = || -> Result<usize> {
                    let per = a.order().finite().cloned().ok_or(Error::NotTorsion)?;
                    let aq = AlphaQuotient::new(&c, &a)?;
                    let coset: LiftCoset = crate::period_index::all_lifts(&c, &a, per_u64(&per)?, DEFAULT_COSET_CAP)?;
                    let mut k = 0;
                    for xi in coset.iter() {
                        // q_tilde itself rejects orders not dividing ε(n).
                        let q = aq.q_tilde(&c, &xi?)?;
                        if !q.order.divides(&epsilon(&per)) {
                            return Err(Error::Internal(format!("ord {} does not divide eps({per})", q.order)));
                        }
                        k += 1;
                    }
                    Ok(k)
                };
                cases += run().map_err(|e| format!("{spec}: {e}"))?;
            }
        }
        Ok(cases)
    })
}

/// `index = per` on every shipped space of dimension at most 4.
pub fn low_dimension_index(seed: u64) -> CheckResult {
    check("period_index", "index_equals_period_below_dim_5", seed, |_| {
        let mut cases = 0;
        for spec in SHIPPED_SPACES {
            let c = context(spec)?;
            if c.space().nominal_dim() > 4 {
                continue;
            }
            let zero = CohomologyClass::zero(c.group(3, 0).map_err(fail)?);
            for a in std::iter::once(zero).chain(audit_classes(&c).map_err(fail)?) {
                let r = index_bound(&c, &a).map_err(|e| format!("{spec}: {e}"))?;
                ensure(r.index == r.per, || format!("{spec}: index {} != per {}", r.index, r.per))?;
                cases += 1;
            }
        }
        Ok(cases)
    })
}

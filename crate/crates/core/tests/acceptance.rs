//! Acceptance criteria 1-8, one PASS/FAIL line each.

use std::sync::Arc;
use std::time::{Duration, Instant};

use perindex_core::cochain_ops::{bockstein, pullback_projection, OperationContext};
use perindex_core::cohomology::{space_cohomology, CohomologyClass};
use perindex_core::complexes::{build_space, SimplexRef, SimplicialSet};
use perindex_core::linalg::Int;
use perindex_core::period_index::{index_bound, verify_lift_independence, LiftIndependence, DEFAULT_COSET_CAP};
use perindex_core::verify::{self, CheckResult, DEFAULT_SEED};

type Outcome = Result<String, String>;

fn ctx(spec: &str) -> Result<OperationContext, String> {
    let x = build_space(spec).map_err(|e| e.to_string())?;
    OperationContext::new(Arc::new(x)).map_err(|e| e.to_string())
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    if t <= limit {
        Ok(())
    } else {
        Err(format!("took {:.1}s, limit {}s", t.as_secs_f64(), limit.as_secs()))
    }
}

fn all_pass(results: &[CheckResult]) -> Outcome {
    let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| r.line()).collect();
    if failed.is_empty() {
        let names: Vec<String> = results.iter().map(|r| format!("{}({})", r.name, r.cases)).collect();
        Ok(names.join(" "))
    } else {
        Err(failed.join("; "))
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let x = Arc::new(build_space("em2:2:6").map_err(e)?);
    let expected: [(usize, &[i64]); 6] = [(1, &[]), (0, &[]), (0, &[]), (0, &[2]), (0, &[]), (0, &[4])];
    let mut seen = Vec::new();
    for (k, (free, torsion)) in expected.iter().enumerate() {
        let g = space_cohomology(&x, k, 0, "direct").map_err(e)?;
        let p = g.presentation();
        let t: Vec<Int> = torsion.iter().map(|&v| Int::from(v)).collect();
        if p.free_rank() != *free || p.torsion() != t.as_slice() {
            return Err(format!("H^{k} = {}", g.describe()));
        }
        seen.push(format!("H^{k}={}", g.describe()));
    }
    within(start, Duration::from_secs(300))?;
    Ok(seen.join(" "))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let c = ctx("em2:2:6")?;
    let a = CohomologyClass::generator(c.group(3, 0).map_err(e)?, 0).map_err(e)?;
    let r = index_bound(&c, &a).map_err(e)?;
    let got = (r.per.clone(), r.ord_q.clone(), r.index.clone(), r.exact);
    if got != (Int::from(2), Int::from(4), Int::from(8), true) {
        return Err(format!("per={} ordQ={} index={} exact={}", got.0, got.1, got.2, got.3));
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!("per=2 ordQ=4 index=8 exact=true ({:.1}s)", start.elapsed().as_secs_f64()))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let spec = "product(suspension(moore:3),suspension(moore:3))";
    let c = ctx(spec)?;
    let factor = ctx("suspension(moore:3)")?;
    let u = factor.group(2, 3).map_err(e)?.generators().map_err(e)?[0].clone();
    let xi = pullback_projection(&c, 0, &u)
        .and_then(|a| a.add(&pullback_projection(&c, 1, &u)?))
        .map_err(e)?;
    let alpha = bockstein(&c, &c.class_of(&xi).map_err(e)?).map_err(e)?;
    let r = index_bound(&c, &alpha).map_err(e)?;
    let engine = (r.per.to_i64().unwrap(), r.ord_q.to_i64().unwrap(), r.index.to_i64().unwrap());

    let f = build_space("suspension(moore:3)").map_err(e)?;
    let (per, ord_q) = oracle::period_and_ord_q(&f, 3)?;
    if engine != (per, ord_q, per * ord_q) {
        return Err(format!("engine {engine:?} vs oracle per={per} ordQ={ord_q}"));
    }
    if engine != (3, 3, 9) || 3 % ord_q != 0 {
        return Err(format!("engine and oracle agree on {engine:?}, expected (3, 3, 9)"));
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("engine = oracle: per=3 ordQ=3 index=9 ({:.1}s)", start.elapsed().as_secs_f64()))
}

fn criterion_4() -> Outcome {
    all_pass(&[verify::epsilon_bound(DEFAULT_SEED)])
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut out = Vec::new();
    for spec in ["product(em2:2:6,torus;dmax=5)", "product(em2:2:6,circle,circle;dmax=5)"] {
        let c = ctx(spec)?;
        let h3 = c.group(3, 0).map_err(e)?;
        let p = h3.presentation();
        if p.torsion().len() != 1 || p.torsion()[0] != Int::from(2) {
            return Err(format!("{spec}: unexpected H^3 = {}", h3.describe()));
        }
        let a = CohomologyClass::generator(h3.clone(), p.free_rank()).map_err(e)?;
        let audit = verify_lift_independence(&c, &a, 2, DEFAULT_COSET_CAP).map_err(e)?;
        match audit.result {
            LiftIndependence::Holds { lifts } => {
                let orders: Vec<String> = audit.orders.iter().map(|o| o.to_string()).collect();
                out.push(format!("{spec}: {lifts} lifts, ordQ {}", orders.join("/")));
            }
            other => return Err(format!("{spec}: {other:?}")),
        }
    }
    within(start, Duration::from_secs(600))?;
    Ok(out.join("; "))
}

fn criterion_6() -> Outcome {
    all_pass(&[verify::low_dimension_index(DEFAULT_SEED)])
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let s = DEFAULT_SEED;
    let results = [
        verify::leibniz(s, 100),
        verify::cup1_commutator(s, 100),
        verify::bockstein_laws(s),
        verify::pontryagin_doubling(s),
        verify::pontryagin_quadratic(s),
        verify::snf_invariants(s, 1000),
    ];
    let out = all_pass(&results)?;
    within(start, Duration::from_secs(300))?;
    Ok(out)
}

fn criterion_8() -> Outcome {
    // Out of scope by statement: the BPU_n cohomology computation, the AHSS
    // operation G, the variety constructions and the Clifford invariants.
    // Nothing above computes or compares against them.
    Ok("out of scope: BPU_n cohomology, AHSS operation G, variety constructions, Clifford invariants".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("Eilenberg-MacLane cohomology of em2(2,6)", criterion_1),
        ("Theorem B at n = 2", criterion_2),
        ("odd-period sharpness at n = 3 against the dense oracle", criterion_3),
        ("ordQ divides eps(per) on shipped spaces", criterion_4),
        ("lift independence on em2(2,6) x torus and em2(2,6) x circle^2", criterion_5),
        ("index = per in dimension <= 4", criterion_6),
        ("operation-level property suites", criterion_7),
        ("out-of-scope results are not claimed", criterion_8),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}

/// Dense brute-force model of `C(F) ⊗ C(F)` for `F × F`, independent of the
/// sparse engine: boundaries from raw face maps, the tensor diagonal with
/// Koszul signs, and integer diagonalization in `i128`.
mod oracle {
    use super::*;

    /// Normalized chains of `F`: boundary matrices and front/back faces.
    struct Factor {
        counts: Vec<usize>,
        /// `bd[d][id]`: (face id, sign) in degree `d-1`.
        bd: Vec<Vec<Vec<(usize, i128)>>>,
        x: SimplicialSet,
    }

    impl Factor {
        fn new(x: &SimplicialSet) -> Self {
            let counts: Vec<usize> = (0..=x.dim()).map(|d| x.count(d)).collect();
            let mut bd = vec![vec![]];
            for d in 1..=x.dim() {
                let col = (0..x.count(d))
                    .map(|id| {
                        let mut v = Vec::new();
                        for i in 0..=d {
                            let f = x.face_of(d, id as u32, i);
                            if !f.is_degenerate() {
                                v.push((f.id as usize, if i % 2 == 0 { 1 } else { -1 }));
                            }
                        }
                        v
                    })
                    .collect();
                bd.push(col);
            }
            Factor { counts, bd, x: x.clone() }
        }

        fn count(&self, d: usize) -> usize {
            self.counts.get(d).copied().unwrap_or(0)
        }

        /// Front `p`-face and back `(d-p)`-face of a `d`-simplex, by iterated face maps.
        fn split(&self, d: usize, id: usize, p: usize) -> (Option<usize>, Option<usize>) {
            let mut front = SimplexRef::nondegenerate(d, id as u32);
            for k in (p + 1..=d).rev() {
                front = self.x.face(front, k);
            }
            let mut back = SimplexRef::nondegenerate(d, id as u32);
            for _ in 0..p {
                back = self.x.face(back, 0);
            }
            let nd = |r: SimplexRef| (!r.is_degenerate()).then_some(r.id as usize);
            (nd(front), nd(back))
        }
    }

    /// Cells of `C(F)⊗C(F)` in degree `k`: `(i, a, b)` with `|a| = i`.
    struct Tensor<'a> {
        f: &'a Factor,
        cells: Vec<Vec<(usize, usize, usize)>>,
    }

    impl<'a> Tensor<'a> {
        fn new(f: &'a Factor, top: usize) -> Self {
            let cells = (0..=top)
                .map(|k| {
                    let mut v = Vec::new();
                    for i in 0..=k {
                        for a in 0..f.count(i) {
                            for b in 0..f.count(k - i) {
                                v.push((i, a, b));
                            }
                        }
                    }
                    v
                })
                .collect();
            Tensor { f, cells }
        }

        fn index(&self, k: usize, cell: (usize, usize, usize)) -> usize {
            self.cells[k].iter().position(|&c| c == cell).expect("cell exists")
        }

        /// Dense coboundary `δ: C^k -> C^{k+1}` as a `|T_{k+1}| x |T_k|` matrix.
        fn coboundary(&self, k: usize) -> Vec<Vec<i128>> {
            let mut m = vec![vec![0i128; self.cells[k].len()]; self.cells[k + 1].len()];
            for (row, &(i, a, b)) in self.cells[k + 1].iter().enumerate() {
                let j = k + 1 - i;
                if i > 0 {
                    for &(fa, s) in &self.f.bd[i][a] {
                        m[row][self.index(k, (i - 1, fa, b))] += s;
                    }
                }
                if j > 0 {
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    for &(fb, s) in &self.f.bd[j][b] {
                        m[row][self.index(k, (i, a, fb))] += sign * s;
                    }
                }
            }
            m
        }

        fn apply(&self, m: &[Vec<i128>], v: &[i128]) -> Vec<i128> {
            m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
        }

        /// Cup product of cochains of degrees `p`, `q` via the tensor diagonal
        /// `Δ(a⊗b) = Σ (-1)^{|a''||b'|} (a'⊗b') ⊗ (a''⊗b'')`.
        fn cup(&self, p: usize, x: &[i128], q: usize, y: &[i128]) -> Vec<i128> {
            self.cells[p + q]
                .iter()
                .map(|&(i, a, b)| {
                    let j = p + q - i;
                    let mut acc = 0i128;
                    for i1 in 0..=i.min(p) {
                        let j1 = p - i1;
                        if j1 > j {
                            continue;
                        }
                        let i2 = i - i1;
                        let (Some(a1), Some(a2)) = self.f.split(i, a, i1) else { continue };
                        let (Some(b1), Some(b2)) = self.f.split(j, b, j1) else { continue };
                        let xv = x[self.index(p, (i1, a1, b1))];
                        let yv = y[self.index(q, (i2, a2, b2))];
                        let sign = if (i2 * j1) % 2 == 0 { 1 } else { -1 };
                        acc += sign * xv * yv;
                    }
                    acc
                })
                .collect()
        }
    }

    /// `U·M` diagonal after column operations; returns `(U, diagonal)`.
    fn diagonalize(m: &[Vec<i128>]) -> (Vec<Vec<i128>>, Vec<i128>) {
        let rows = m.len();
        let cols = m.first().map_or(0, |r| r.len());
        let mut a = m.to_vec();
        let mut u: Vec<Vec<i128>> = (0..rows).map(|i| (0..rows).map(|j| (i == j) as i128).collect()).collect();
        let mut diag = Vec::new();
        let mut t = 0;
        while t < rows.min(cols) {
            let pivot = (t..rows)
                .flat_map(|r| (t..cols).map(move |c| (r, c)))
                .filter(|&(r, c)| a[r][c] != 0)
                .min_by_key(|&(r, c)| a[r][c].abs());
            let Some((pr, pc)) = pivot else { break };
            a.swap(t, pr);
            u.swap(t, pr);
            for row in a.iter_mut() {
                row.swap(t, pc);
            }
            let mut clean = true;
            for r in t + 1..rows {
                let q = a[r][t] / a[t][t];
                if q != 0 {
                    for c in 0..cols {
                        a[r][c] -= q * a[t][c];
                    }
                    for c in 0..rows {
                        u[r][c] -= q * u[t][c];
                    }
                }
                clean &= a[r][t] == 0;
            }
            for c in t + 1..cols {
                let q = a[t][c] / a[t][t];
                if q != 0 {
                    for row in a.iter_mut() {
                        row[c] -= q * row[t];
                    }
                }
                clean &= a[t][c] == 0;
            }
            if clean {
                diag.push(a[t][t]);
                t += 1;
            }
        }
        (u, diag)
    }

    /// Whether `m·y = b` has an integral solution.
    fn solvable(ud: &(Vec<Vec<i128>>, Vec<i128>), b: &[i128]) -> bool {
        let (u, diag) = ud;
        let c: Vec<i128> = u.iter().map(|row| row.iter().zip(b).map(|(x, y)| x * y).sum()).collect();
        c.iter().enumerate().all(|(i, &ci)| match diag.get(i) {
            Some(&d) => ci % d == 0,
            None => ci == 0,
        })
    }

    fn order(delta: &[Vec<i128>], z: &[i128]) -> Result<i64, String> {
        let ud = diagonalize(delta);
        for k in 1..=27i128 {
            let kz: Vec<i128> = z.iter().map(|v| k * v).collect();
            if solvable(&ud, &kz) {
                return Ok(k as i64);
            }
        }
        Err("class order exceeds 27".into())
    }

    /// Mod-`n` 2-cocycle on `F` not in the image of `δ` mod `n` (`n` prime).
    fn generator_mod(f: &Factor, n: i128) -> Result<Vec<i128>, String> {
        let c2 = f.count(2);
        let d2: Vec<Vec<i128>> = (0..f.count(3))
            .map(|s| {
                let mut row = vec![0i128; c2];
                for &(fa, sg) in &f.bd[3][s] {
                    row[fa] += sg;
                }
                row
            })
            .collect();
        let d1: Vec<Vec<i128>> = (0..c2)
            .map(|s| {
                let mut row = vec![0i128; f.count(1)];
                for &(fa, sg) in &f.bd[2][s] {
                    row[fa] += sg;
                }
                row
            })
            .collect();
        // Exhaustive search over (Z/n)^{c2}: a cocycle outside im δ mod n.
        let total = (n as usize).pow(c2 as u32);
        let images: Vec<Vec<i128>> = {
            let c1 = f.count(1);
            (0..(n as usize).pow(c1 as u32))
                .map(|k| {
                    let w: Vec<i128> = (0..c1).map(|i| ((k / (n as usize).pow(i as u32)) % n as usize) as i128).collect();
                    d1.iter().map(|row| row.iter().zip(&w).map(|(a, b)| a * b).sum::<i128>().rem_euclid(n)).collect()
                })
                .collect()
        };
        for k in 1..total {
            let v: Vec<i128> = (0..c2).map(|i| ((k / (n as usize).pow(i as u32)) % n as usize) as i128).collect();
            let cocycle = d2.iter().all(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum::<i128>().rem_euclid(n) == 0);
            if cocycle && !images.contains(&v) {
                return Ok(v);
            }
        }
        Err("no mod-n class in degree 2".into())
    }

    /// `(per(α), ord Q(ξ))` for `ξ = u⊗1 + 1⊗u`, `α = β_n(ξ)` on `C(F)⊗C(F)`.
    /// Also checks `H²(F×F; Z) = 0`, so that the quotient by `α⌣H²` is trivial.
    pub fn period_and_ord_q(x: &SimplicialSet, n: i128) -> Result<(i64, i64), String> {
        let f = Factor::new(x);
        let t = Tensor::new(&f, 5);
        let u = generator_mod(&f, n)?;
        let one = vec![1i128; f.count(0)];
        let xi: Vec<i128> = t.cells[2]
            .iter()
            .map(|&(i, a, b)| match i {
                2 => u[a] * one[b],
                0 => one[a] * u[b],
                _ => 0,
            })
            .map(|v| v.rem_euclid(n))
            .collect();
        let d2 = t.coboundary(2);
        let dxi = t.apply(&d2, &xi);
        if dxi.iter().any(|v| v % n != 0) {
            return Err("ξ is not a mod-n cocycle".into());
        }
        let alpha: Vec<i128> = dxi.iter().map(|v| v / n).collect();
        let per = order(&d2, &alpha)?;

        let d1 = t.coboundary(1);
        let (_, diag1) = diagonalize(&d1);
        let (_, diag2) = diagonalize(&d2);
        if diag1.len() + diag2.len() != t.cells[2].len() || diag1.iter().any(|d| d.abs() != 1) {
            return Err("H^2(F x F; Z) is not zero".into());
        }

        let sq: Vec<i128> = t.cup(2, &xi, 2, &xi).iter().map(|v| v.rem_euclid(n)).collect();
        let d4 = t.coboundary(4);
        let dsq = t.apply(&d4, &sq);
        if dsq.iter().any(|v| v % n != 0) {
            return Err("ξ² is not a mod-n cocycle".into());
        }
        let q: Vec<i128> = dsq.iter().map(|v| v / n).collect();
        let ord_q = order(&t.coboundary(4), &q)?;
        Ok((per, ord_q))
    }
}

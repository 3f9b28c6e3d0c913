//! Sparse Smith normal form over the integers.
//!
//! Elimination picks the active column with the fewest nonzeros and, inside it,
//! the entry of least absolute value (ties broken by the shorter row). A pivot is
//! retired once its row and column are clean, so unit pivots on boundary
//! matrices cost no fill beyond one row combination per column entry.
//!
//! Row operations are recorded as a log from which `U`, `U^{-1}` and their
//! products with vectors are evaluated on demand; column operations go into an
//! explicit `V`. Untracked column operations are applied implicitly when a pivot
//! row is retired.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::sparse::{axpy, sparse_get, MatrixDigest, SparseIntMatrix, SparseVec};
use super::Int;
use crate::error::{Error, Result};

/// Bumped whenever the pivoting policy changes; part of every cache key.
pub const ALGORITHM_VERSION: &str = "snf-markowitz-v3";

/// Which transforms to record.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tracking {
    pub left: bool,
    pub right: bool,
}

impl Tracking {
    pub const ALL: Tracking = Tracking { left: true, right: true };
    pub const LEFT: Tracking = Tracking { left: true, right: false };
    pub const NONE: Tracking = Tracking { left: false, right: false };

    pub fn covers(&self, other: Tracking) -> bool {
        (self.left || !other.left) && (self.right || !other.right)
    }
}

/// An elementary unimodular row operation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowOp {
    /// `row[target] += coef * row[source]`.
    Add { target: u32, source: u32, coef: Int },
    Negate(u32),
    /// `(row[a], row[b]) <- (m0 row[a] + m1 row[b], m2 row[a] + m3 row[b])`, determinant 1.
    Mix { a: u32, b: u32, m: [Int; 4] },
}

/// `U = P * E_s * … * E_1`, kept as the operation log `E_1, …, E_s` and the
/// final row order (`P` moves row `order[t]` to position `t`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeftTransform {
    n: usize,
    ops: Vec<RowOp>,
    order: Vec<u32>,
}

impl LeftTransform {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn op_count(&self) -> usize {
        self.ops.len()
    }

    /// `U * b` for a column vector `b`.
    pub fn apply(&self, b: &[Int]) -> Result<Vec<Int>> {
        self.check_len(b.len())?;
        let mut x = b.to_vec();
        for op in &self.ops {
            match op {
                RowOp::Add { target, source, coef } => {
                    let delta = coef * &x[*source as usize];
                    x[*target as usize] += &delta;
                }
                RowOp::Negate(r) => x[*r as usize] = -&x[*r as usize],
                RowOp::Mix { a, b, m } => {
                    let (xa, xb) = (&x[*a as usize], &x[*b as usize]);
                    let na = &(&m[0] * xa) + &(&m[1] * xb);
                    let nb = &(&m[2] * xa) + &(&m[3] * xb);
                    x[*a as usize] = na;
                    x[*b as usize] = nb;
                }
            }
        }
        Ok(self.order.iter().map(|&r| std::mem::take(&mut x[r as usize])).collect())
    }

    /// `z * U^{-1}` for a row vector `z`.
    pub fn apply_inverse_right(&self, z: &[Int]) -> Result<Vec<Int>> {
        self.check_len(z.len())?;
        let mut y = z.to_vec();
        for op in &self.ops {
            match op {
                RowOp::Add { target, source, coef } => {
                    let delta = coef * &y[*target as usize];
                    y[*source as usize] -= &delta;
                }
                RowOp::Negate(r) => y[*r as usize] = -&y[*r as usize],
                RowOp::Mix { a, b, m } => {
                    let (ya, yb) = (&y[*a as usize], &y[*b as usize]);
                    let na = &(ya * &m[3]) - &(yb * &m[2]);
                    let nb = &(yb * &m[0]) - &(ya * &m[1]);
                    y[*a as usize] = na;
                    y[*b as usize] = nb;
                }
            }
        }
        Ok(self.order.iter().map(|&r| std::mem::take(&mut y[r as usize])).collect())
    }

    /// Row `i` of `U`.
    pub fn row(&self, i: usize) -> SparseVec {
        let mut v = vec![Int::ZERO; self.n];
        v[self.order[i] as usize] = Int::ONE;
        for op in self.ops.iter().rev() {
            match op {
                RowOp::Add { target, source, coef } => {
                    if !v[*target as usize].is_zero() {
                        let delta = coef * &v[*target as usize];
                        v[*source as usize] += &delta;
                    }
                }
                RowOp::Negate(r) => v[*r as usize] = -&v[*r as usize],
                RowOp::Mix { a, b, m } => {
                    let (va, vb) = (&v[*a as usize], &v[*b as usize]);
                    let na = &(va * &m[0]) + &(vb * &m[2]);
                    let nb = &(va * &m[1]) + &(vb * &m[3]);
                    v[*a as usize] = na;
                    v[*b as usize] = nb;
                }
            }
        }
        to_sparse(v)
    }

    /// Column `i` of `U^{-1}`.
    pub fn inverse_column(&self, i: usize) -> SparseVec {
        let mut x = vec![Int::ZERO; self.n];
        x[self.order[i] as usize] = Int::ONE;
        for op in self.ops.iter().rev() {
            match op {
                RowOp::Add { target, source, coef } => {
                    if !x[*source as usize].is_zero() {
                        let delta = coef * &x[*source as usize];
                        x[*target as usize] -= &delta;
                    }
                }
                RowOp::Negate(r) => x[*r as usize] = -&x[*r as usize],
                RowOp::Mix { a, b, m } => {
                    let (xa, xb) = (&x[*a as usize], &x[*b as usize]);
                    let na = &(&m[3] * xa) - &(&m[1] * xb);
                    let nb = &(&m[0] * xb) - &(&m[2] * xa);
                    x[*a as usize] = na;
                    x[*b as usize] = nb;
                }
            }
        }
        to_sparse(x)
    }

    /// Explicit `U`.
    pub fn matrix(&self) -> SparseIntMatrix {
        let rows: Vec<SparseVec> = (0..self.n).map(|i| self.row(i)).collect();
        SparseIntMatrix::from_sorted_columns(self.n, rows).transpose()
    }

    /// Explicit `U^{-1}`.
    pub fn inverse_matrix(&self) -> SparseIntMatrix {
        SparseIntMatrix::from_sorted_columns(self.n, (0..self.n).map(|i| self.inverse_column(i)).collect())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::Shape(format!("vector of length {len} for a transform of size {}", self.n)));
        }
        Ok(())
    }
}

fn to_sparse(v: Vec<Int>) -> SparseVec {
    v.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i as u32, x)).collect()
}

/// `U * M * V = D` with `D` diagonal, its nonzero entries `d_1 | d_2 | ... | d_r`
/// positive and leading.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    rows: usize,
    cols: usize,
    diagonal: Vec<Int>,
    left: Option<LeftTransform>,
    v: Option<SparseIntMatrix>,
    digest: MatrixDigest,
}

impl SmithDecomposition {
    pub(crate) fn from_parts(
        rows: usize,
        cols: usize,
        diagonal: Vec<Int>,
        left: Option<LeftTransform>,
        v: Option<SparseIntMatrix>,
        digest: MatrixDigest,
    ) -> Self {
        SmithDecomposition { rows, cols, diagonal, left, v, digest }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// Nonzero diagonal entries in divisibility order.
    pub fn invariant_factors(&self) -> &[Int] {
        &self.diagonal
    }

    pub fn source_digest(&self) -> MatrixDigest {
        self.digest
    }

    pub fn tracking(&self) -> Tracking {
        Tracking { left: self.left.is_some(), right: self.v.is_some() }
    }

    pub fn left(&self) -> Result<&LeftTransform> {
        self.left.as_ref().ok_or_else(|| Error::Unsupported("left transform was not recorded".into()))
    }

    /// Explicit `U`; prefer [`Self::left`] on large matrices.
    pub fn u(&self) -> Result<SparseIntMatrix> {
        Ok(self.left()?.matrix())
    }

    pub fn u_inv(&self) -> Result<SparseIntMatrix> {
        Ok(self.left()?.inverse_matrix())
    }

    pub fn v(&self) -> Result<&SparseIntMatrix> {
        self.v.as_ref().ok_or_else(|| Error::Unsupported("right transform was not recorded".into()))
    }

    /// The diagonal matrix `D` with the shape of the source.
    pub fn d(&self) -> SparseIntMatrix {
        let mut cols: Vec<SparseVec> = vec![Vec::new(); self.cols];
        for (i, d) in self.diagonal.iter().enumerate() {
            cols[i].push((i as u32, d.clone()));
        }
        SparseIntMatrix::from_sorted_columns(self.rows, cols)
    }
}

/// Full decomposition with both transforms recorded.
pub fn smith_normal_form(m: &SparseIntMatrix) -> SmithDecomposition {
    decompose(m, Tracking::ALL)
}

pub fn decompose(m: &SparseIntMatrix, tracking: Tracking) -> SmithDecomposition {
    Engine::new(m, tracking).run(m.digest())
}

struct Engine {
    nrows: usize,
    ncols: usize,
    rows: Vec<SparseVec>,
    col_rows: Vec<Vec<u32>>,
    row_alive: Vec<bool>,
    col_alive: Vec<bool>,
    log: Option<Vec<RowOp>>,
    v: Option<Vec<SparseVec>>,
    heap: BinaryHeap<Reverse<(usize, u32)>>,
}

impl Engine {
    fn new(m: &SparseIntMatrix, tracking: Tracking) -> Self {
        let rows = m.row_vectors();
        let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); m.cols()];
        for (r, row) in rows.iter().enumerate() {
            for (c, _) in row {
                col_rows[*c as usize].push(r as u32);
            }
        }
        let unit = |n: usize| -> Vec<SparseVec> { (0..n).map(|i| vec![(i as u32, Int::ONE)]).collect() };
        let mut heap = BinaryHeap::with_capacity(m.cols());
        for (c, rs) in col_rows.iter().enumerate() {
            heap.push(Reverse((rs.len(), c as u32)));
        }
        Engine {
            nrows: m.rows(),
            ncols: m.cols(),
            rows,
            col_rows,
            row_alive: vec![true; m.rows()],
            col_alive: vec![true; m.cols()],
            log: tracking.left.then(Vec::new),
            v: tracking.right.then(|| unit(m.cols())),
            heap,
        }
    }

    fn entry(&self, r: u32, c: u32) -> Int {
        sparse_get(&self.rows[r as usize], c).cloned().unwrap_or(Int::ZERO)
    }

    fn detach(&mut self, r: u32, c: u32) {
        let list = &mut self.col_rows[c as usize];
        if let Some(pos) = list.iter().position(|&x| x == r) {
            list.swap_remove(pos);
        }
    }

    fn touch(&mut self, c: u32) {
        if self.col_alive[c as usize] {
            let len = self.col_rows[c as usize].len();
            self.heap.push(Reverse((len, c)));
        }
    }

    /// `row[target] += a * row[source]`.
    fn add_row(&mut self, target: u32, a: &Int, source: u32) {
        let old = std::mem::take(&mut self.rows[target as usize]);
        let src = std::mem::take(&mut self.rows[source as usize]);
        let mut out: SparseVec = Vec::with_capacity(old.len() + src.len());
        let mut touched = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < old.len() || j < src.len() {
            let oi = old.get(i).map(|e| e.0).unwrap_or(u32::MAX);
            let sj = src.get(j).map(|e| e.0).unwrap_or(u32::MAX);
            if oi < sj {
                out.push(old[i].clone());
                i += 1;
            } else if sj < oi {
                out.push((sj, a * &src[j].1));
                self.col_rows[sj as usize].push(target);
                touched.push(sj);
                j += 1;
            } else {
                let val = &old[i].1 + &(a * &src[j].1);
                if val.is_zero() {
                    self.detach(target, oi);
                    touched.push(oi);
                } else {
                    out.push((oi, val));
                }
                i += 1;
                j += 1;
            }
        }
        self.rows[target as usize] = out;
        self.rows[source as usize] = src;
        for c in touched {
            self.touch(c);
        }
        if let Some(log) = &mut self.log {
            log.push(RowOp::Add { target, source, coef: a.clone() });
        }
    }

    /// `col[target] += a * col[source]`, where `source` currently has a single entry.
    fn add_col_single(&mut self, target: u32, a: &Int, source: u32) {
        debug_assert_eq!(self.col_rows[source as usize].len(), 1);
        let r = self.col_rows[source as usize][0];
        let s = self.entry(r, source);
        let row = &mut self.rows[r as usize];
        let delta = a * &s;
        match row.binary_search_by_key(&target, |e| e.0) {
            Ok(p) => {
                row[p].1 += &delta;
                if row[p].1.is_zero() {
                    row.remove(p);
                    self.detach(r, target);
                }
            }
            Err(p) => {
                row.insert(p, (target, delta));
                self.col_rows[target as usize].push(r);
            }
        }
        self.touch(target);
        if let Some(v) = &mut self.v {
            v[target as usize] = axpy(&v[target as usize], a, &v[source as usize]);
        }
    }

    fn choose_pivot(&self, c: u32) -> u32 {
        *self.col_rows[c as usize]
            .iter()
            .min_by(|&&a, &&b| {
                let ka = (self.entry(a, c).abs(), self.rows[a as usize].len(), a);
                let kb = (self.entry(b, c).abs(), self.rows[b as usize].len(), b);
                ka.cmp(&kb)
            })
            .expect("nonempty column")
    }

    /// Eliminates starting from column `c`; returns the retired pivot.
    fn eliminate(&mut self, mut c: u32) -> (u32, u32, Int) {
        loop {
            let i = self.choose_pivot(c);
            let p = self.entry(i, c);
            let mut clean = true;
            let others: Vec<u32> = self.col_rows[c as usize].iter().copied().filter(|&r| r != i).collect();
            for r in others {
                let a = self.entry(r, c);
                let q = nearest_quotient(&a, &p);
                self.add_row(r, &-q, i);
                if !self.entry(r, c).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let offending = self.rows[i as usize]
                .iter()
                .find(|(cc, a)| *cc != c && !p.divides(a))
                .map(|(cc, a)| (*cc, a.clone()));
            match offending {
                Some((cc, a)) => {
                    let q = nearest_quotient(&a, &p);
                    self.add_col_single(cc, &-q, c);
                    // `c` keeps its entry; its heap slot was consumed by the caller.
                    self.touch(c);
                    c = cc;
                }
                None => return (i, c, p),
            }
        }
    }

    fn retire(&mut self, i: u32, c: u32, p: &Int) {
        let row = std::mem::take(&mut self.rows[i as usize]);
        if let Some(v) = &mut self.v {
            for (cc, a) in &row {
                if *cc != c {
                    let q = a.div_exact(p).expect("pivot divides its row");
                    v[*cc as usize] = axpy(&v[*cc as usize], &-q, &v[c as usize]);
                }
            }
        }
        for (cc, _) in &row {
            self.detach(i, *cc);
        }
        for (cc, _) in &row {
            self.touch(*cc);
        }
        self.row_alive[i as usize] = false;
        self.col_alive[c as usize] = false;
    }

    fn run(mut self, digest: MatrixDigest) -> SmithDecomposition {
        let mut pivots: Vec<(u32, u32, Int)> = Vec::new();
        while let Some(Reverse((len, c))) = self.heap.pop() {
            if !self.col_alive[c as usize] || self.col_rows[c as usize].len() != len {
                continue;
            }
            if len == 0 {
                self.col_alive[c as usize] = false;
                continue;
            }
            let (i, pc, p) = self.eliminate(c);
            self.retire(i, pc, &p);
            pivots.push((i, pc, p));
        }
        self.finish(pivots, digest)
    }

    fn finish(mut self, mut pivots: Vec<(u32, u32, Int)>, digest: MatrixDigest) -> SmithDecomposition {
        for (i, _, p) in pivots.iter_mut() {
            if p.is_negative() {
                *p = -&*p;
                if let Some(log) = &mut self.log {
                    log.push(RowOp::Negate(*i));
                }
            }
        }
        pivots.sort_by(|a, b| a.2.cmp(&b.2));

        // Enforce d_1 | d_2 | ... among the non-unit pivots.
        let nonunit: Vec<usize> = (0..pivots.len()).filter(|&t| !pivots[t].2.is_one()).collect();
        for (x, &t1) in nonunit.iter().enumerate() {
            for &t2 in &nonunit[x + 1..] {
                let a = pivots[t1].2.clone();
                let b = pivots[t2].2.clone();
                if a.divides(&b) {
                    continue;
                }
                let (g, s, t) = a.extended_gcd(&b);
                let ag = a.div_exact(&g).unwrap();
                let bg = b.div_exact(&g).unwrap();
                let (k1, k2) = (pivots[t1].0 as usize, pivots[t2].0 as usize);
                let (c1, c2) = (pivots[t1].1 as usize, pivots[t2].1 as usize);
                if let Some(log) = &mut self.log {
                    log.push(RowOp::Mix { a: k1 as u32, b: k2 as u32, m: [s.clone(), t.clone(), -&bg, ag.clone()] });
                }
                if let Some(v) = &mut self.v {
                    let n1 = axpy(&v[c1], &Int::ONE, &v[c2]);
                    let tbg = (&t * &b).div_exact(&g).unwrap();
                    let n2 = axpy(&v[c2], &-tbg, &n1);
                    v[c1] = n1;
                    v[c2] = n2;
                }
                pivots[t1].2 = g;
                pivots[t2].2 = &ag * &b;
            }
        }

        let mut row_order: Vec<usize> = pivots.iter().map(|p| p.0 as usize).collect();
        row_order.extend((0..self.nrows).filter(|&r| self.row_alive[r]));
        let mut col_order: Vec<usize> = pivots.iter().map(|p| p.1 as usize).collect();
        let mut used = vec![false; self.ncols];
        for &c in &col_order {
            used[c] = true;
        }
        col_order.extend((0..self.ncols).filter(|&c| !used[c]));

        let nrows = self.nrows;
        let left = self.log.map(|ops| LeftTransform {
            n: nrows,
            ops,
            order: row_order.iter().map(|&r| r as u32).collect(),
        });
        let v = self.v.map(|mut v| {
            let cols: Vec<SparseVec> = col_order.iter().map(|&c| std::mem::take(&mut v[c])).collect();
            SparseIntMatrix::from_sorted_columns(self.ncols, cols)
        });
        let diagonal = pivots.into_iter().map(|p| p.2).collect();
        SmithDecomposition { rows: self.nrows, cols: self.ncols, diagonal, left, v, digest }
    }
}

/// `q` minimising `|a - q*p|`.
fn nearest_quotient(a: &Int, p: &Int) -> Int {
    let q = a.div_floor(p);
    let r = a - &(&q * p);
    let twice = &r + &r;
    if twice.abs() > p.abs() {
        q + Int::ONE
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &SparseIntMatrix) -> SmithDecomposition {
        let s = smith_normal_form(m);
        let umv = s.u().unwrap().mul(m).unwrap().mul(s.v().unwrap()).unwrap();
        assert_eq!(umv, s.d(), "U M V != D");
        let uu = s.u().unwrap().mul(&s.u_inv().unwrap()).unwrap();
        assert_eq!(uu, SparseIntMatrix::identity(m.rows()));
        for w in s.invariant_factors().windows(2) {
            assert!(w[0].divides(&w[1]));
        }
        s
    }

    #[test]
    fn identity_and_zero() {
        let s = check(&SparseIntMatrix::identity(2));
        assert_eq!(s.invariant_factors(), &[Int::ONE, Int::ONE]);
        assert_eq!(s.u().unwrap(), SparseIntMatrix::identity(2));
        assert_eq!(s.v().unwrap(), &SparseIntMatrix::identity(2));
        let z = check(&SparseIntMatrix::zero(2, 3));
        assert_eq!(z.rank(), 0);
        assert!(z.d().is_zero());
    }

    #[test]
    fn two_by_two() {
        // Hand reduction: [[2,4],[6,8]] -> r2 -= 3 r1 -> [[2,4],[0,-4]] -> c2 -= 2 c1 -> diag(2,-4).
        let s = check(&SparseIntMatrix::from_i64(&[&[2, 4], &[6, 8]]));
        assert_eq!(s.invariant_factors(), &[Int::from(2), Int::from(4)]);
    }

    #[test]
    fn coprime_diagonal_merges() {
        let s = check(&SparseIntMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.invariant_factors(), &[Int::ONE, Int::from(6)]);
        let s = check(&SparseIntMatrix::from_i64(&[&[4, 0, 0], &[0, 6, 0], &[0, 0, 10]]));
        assert_eq!(s.invariant_factors(), &[Int::from(2), Int::from(2), Int::from(60)]);
    }

    #[test]
    fn left_only_tracking_is_consistent() {
        let m = SparseIntMatrix::from_i64(&[&[1, 1, 0, 2], &[0, 3, 3, 0], &[1, 4, 3, 2]]);
        let full = smith_normal_form(&m);
        let left = decompose(&m, Tracking::LEFT);
        assert_eq!(full.invariant_factors(), left.invariant_factors());
        assert!(left.v().is_err());
        // Rows of U beyond the rank span the left kernel.
        let u = left.u().unwrap();
        let ut = u.transpose();
        for k in left.rank()..m.rows() {
            let row: Vec<Int> = (0..m.rows()).map(|c| ut.get(c, k)).collect();
            assert!(m.vec_mul(&row).unwrap().iter().all(Int::is_zero));
        }
    }

    #[test]
    fn log_evaluation_matches_explicit_matrices() {
        let m = SparseIntMatrix::from_i64(&[&[4, 6, 0], &[6, 9, 2], &[0, 2, 10], &[2, 0, 8]]);
        let s = smith_normal_form(&m);
        let left = s.left().unwrap();
        let (u, ui) = (s.u().unwrap(), s.u_inv().unwrap());
        let b: Vec<Int> = [3, -1, 4, 1].iter().map(|&x| Int::from(x)).collect();
        assert_eq!(left.apply(&b).unwrap(), u.mul_vec(&b).unwrap());
        assert_eq!(left.apply_inverse_right(&b).unwrap(), ui.vec_mul(&b).unwrap());
    }
}

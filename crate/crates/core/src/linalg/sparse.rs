//! Immutable sparse integer matrices in compressed-column form.

use std::fmt::Write as _;

use rustc_hash::FxHashMap;
use sha2::{Digest, Sha256};

use super::Int;
use crate::error::{Error, Result};

/// A sparse vector: strictly increasing indices, no stored zeros.
pub type SparseVec = Vec<(u32, Int)>;

/// `target += a * src`, keeping `target` sorted and free of zeros.
pub fn axpy(target: &SparseVec, a: &Int, src: &[(u32, Int)]) -> SparseVec {
    if a.is_zero() {
        return target.clone();
    }
    let mut out = Vec::with_capacity(target.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < src.len() {
        let ti = target.get(i).map(|e| e.0).unwrap_or(u32::MAX);
        let sj = src.get(j).map(|e| e.0).unwrap_or(u32::MAX);
        if ti < sj {
            out.push(target[i].clone());
            i += 1;
        } else if sj < ti {
            out.push((sj, a * &src[j].1));
            j += 1;
        } else {
            let v = &target[i].1 + &(a * &src[j].1);
            if !v.is_zero() {
                out.push((ti, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn sparse_get(v: &[(u32, Int)], idx: u32) -> Option<&Int> {
    v.binary_search_by_key(&idx, |e| e.0).ok().map(|p| &v[p].1)
}

/// Content digest used as a cache key.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixDigest(pub [u8; 32]);

impl std::fmt::Debug for MatrixDigest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", hex::encode(&self.0[..8]))
    }
}

impl MatrixDigest {
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    vals: Vec<Int>,
}

impl std::fmt::Debug for SparseIntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SparseIntMatrix({}x{}, nnz={})", self.rows, self.cols, self.nnz())
    }
}

impl SparseIntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseIntMatrix { rows, cols, col_ptr: vec![0; cols + 1], row_idx: vec![], vals: vec![] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_sorted_columns(n, (0..n).map(|i| vec![(i as u32, Int::ONE)]).collect())
    }

    /// Builds from `(row, col, value)` triples. Zero values are skipped; duplicate
    /// positions and out-of-range indices are rejected.
    pub fn from_triplets(rows: usize, cols: usize, entries: &[(usize, usize, Int)]) -> Result<Self> {
        let mut columns: Vec<SparseVec> = vec![Vec::new(); cols];
        for (r, c, v) in entries {
            if *r >= rows || *c >= cols {
                return Err(Error::Shape(format!("entry ({r}, {c}) outside {rows}x{cols}")));
            }
            if !v.is_zero() {
                columns[*c].push((*r as u32, v.clone()));
            }
        }
        for (c, col) in columns.iter_mut().enumerate() {
            col.sort_by_key(|e| e.0);
            if col.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::Shape(format!("duplicate entry in column {c}")));
            }
        }
        Ok(Self::from_sorted_columns(rows, columns))
    }

    /// Builds from columns whose entries may be unsorted or repeated; repeated
    /// positions are summed and zeros dropped.
    pub fn from_columns_summing(rows: usize, columns: Vec<Vec<(u32, Int)>>) -> Self {
        let columns = columns
            .into_iter()
            .map(|mut col| {
                col.sort_by_key(|e| e.0);
                let mut out: SparseVec = Vec::with_capacity(col.len());
                for (r, v) in col {
                    match out.last_mut() {
                        Some(last) if last.0 == r => last.1 += &v,
                        _ => out.push((r, v)),
                    }
                }
                out.retain(|e| !e.1.is_zero());
                out
            })
            .collect();
        Self::from_sorted_columns(rows, columns)
    }

    /// Columns must already be sorted, duplicate-free and zero-free.
    pub fn from_sorted_columns(rows: usize, columns: Vec<SparseVec>) -> Self {
        let cols = columns.len();
        let mut col_ptr = Vec::with_capacity(cols + 1);
        let nnz: usize = columns.iter().map(Vec::len).sum();
        let mut row_idx = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        col_ptr.push(0);
        for col in columns {
            debug_assert!(col.windows(2).all(|w| w[0].0 < w[1].0));
            for (r, v) in col {
                debug_assert!((r as usize) < rows && !v.is_zero());
                row_idx.push(r);
                vals.push(v);
            }
            col_ptr.push(row_idx.len());
        }
        SparseIntMatrix { rows, cols, col_ptr, row_idx, vals }
    }

    pub fn from_dense(rows: &[Vec<Int>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map(Vec::len).unwrap_or(0);
        let columns = (0..ncols)
            .map(|c| {
                (0..nrows)
                    .filter(|&r| !rows[r][c].is_zero())
                    .map(|r| (r as u32, rows[r][c].clone()))
                    .collect()
            })
            .collect();
        Self::from_sorted_columns(nrows, columns)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let dense: Vec<Vec<Int>> = rows.iter().map(|r| r.iter().map(|&v| Int::from(v)).collect()).collect();
        if dense.is_empty() {
            return Self::zero(0, 0);
        }
        Self::from_dense(&dense)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn column(&self, c: usize) -> impl Iterator<Item = (usize, &Int)> + '_ {
        let (a, b) = (self.col_ptr[c], self.col_ptr[c + 1]);
        self.row_idx[a..b].iter().zip(&self.vals[a..b]).map(|(r, v)| (*r as usize, v))
    }

    pub fn column_vec(&self, c: usize) -> SparseVec {
        self.column(c).map(|(r, v)| (r as u32, v.clone())).collect()
    }

    pub fn get(&self, r: usize, c: usize) -> Int {
        let (a, b) = (self.col_ptr[c], self.col_ptr[c + 1]);
        match self.row_idx[a..b].binary_search(&(r as u32)) {
            Ok(p) => self.vals[a + p].clone(),
            Err(_) => Int::ZERO,
        }
    }

    /// All entries in column-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Int)> + '_ {
        (0..self.cols).flat_map(move |c| self.column(c).map(move |(r, v)| (r, c, v)))
    }

    pub fn transpose(&self) -> SparseIntMatrix {
        let mut columns: Vec<SparseVec> = vec![Vec::new(); self.rows];
        for c in 0..self.cols {
            for (r, v) in self.column(c) {
                columns[r].push((c as u32, v.clone()));
            }
        }
        Self::from_sorted_columns(self.cols, columns)
    }

    /// Rows as sparse vectors (a transposed view).
    pub fn row_vectors(&self) -> Vec<SparseVec> {
        let mut rows: Vec<SparseVec> = vec![Vec::new(); self.rows];
        for c in 0..self.cols {
            for (r, v) in self.column(c) {
                rows[r].push((c as u32, v.clone()));
            }
        }
        rows
    }

    pub fn to_dense(&self) -> Vec<Vec<Int>> {
        let mut out = vec![vec![Int::ZERO; self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            out[r][c] = v.clone();
        }
        out
    }

    pub fn mul(&self, rhs: &SparseIntMatrix) -> Result<SparseIntMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let columns = (0..rhs.cols)
            .map(|c| {
                let mut acc: FxHashMap<u32, Int> = FxHashMap::default();
                for (k, b) in rhs.column(c) {
                    for (r, a) in self.column(k) {
                        *acc.entry(r as u32).or_default() += &(a * b);
                    }
                }
                let mut col: SparseVec = acc.into_iter().filter(|e| !e.1.is_zero()).collect();
                col.sort_by_key(|e| e.0);
                col
            })
            .collect();
        Ok(Self::from_sorted_columns(self.rows, columns))
    }

    /// `self * x` for a dense vector `x`.
    pub fn mul_vec(&self, x: &[Int]) -> Result<Vec<Int>> {
        if x.len() != self.cols {
            return Err(Error::Shape(format!("vector of length {} against {} columns", x.len(), self.cols)));
        }
        let mut out = vec![Int::ZERO; self.rows];
        for (c, xc) in x.iter().enumerate() {
            if xc.is_zero() {
                continue;
            }
            for (r, v) in self.column(c) {
                out[r] += &(v * xc);
            }
        }
        Ok(out)
    }

    /// `y * self` for a dense row vector `y`.
    pub fn vec_mul(&self, y: &[Int]) -> Result<Vec<Int>> {
        if y.len() != self.rows {
            return Err(Error::Shape(format!("vector of length {} against {} rows", y.len(), self.rows)));
        }
        Ok((0..self.cols)
            .map(|c| {
                let mut acc = Int::ZERO;
                for (r, v) in self.column(c) {
                    if !y[r].is_zero() {
                        acc += &(v * &y[r]);
                    }
                }
                acc
            })
            .collect())
    }

    pub fn is_zero(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn digest(&self) -> MatrixDigest {
        let mut h = Sha256::new();
        h.update(format!("{} {}\n", self.rows, self.cols).as_bytes());
        for (r, c, v) in self.entries() {
            h.update(format!("{r} {c} {v}\n").as_bytes());
        }
        MatrixDigest(h.finalize().into())
    }

    /// Plain-text exchange format: `rows cols nnz` then one `row col value`
    /// line per entry, zero-based.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {}", self.rows, self.cols, self.nnz());
        let mut triples: Vec<_> = self.entries().collect();
        triples.sort_by_key(|t| (t.0, t.1));
        for (r, c, v) in triples {
            let _ = writeln!(s, "{r} {c} {v}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("matrix header: {e}"))))
            .collect::<Result<_>>()?;
        let [rows, cols, nnz] = nums[..] else {
            return Err(Error::Parse(format!("matrix header must be `rows cols nnz`, got `{header}`")));
        };
        let mut entries = Vec::with_capacity(nnz);
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(Error::Parse(format!("bad matrix entry `{line}`")));
            }
            let r = toks[0].parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?;
            let c = toks[1].parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?;
            let v = toks[2].parse::<Int>().map_err(|e| Error::Parse(e.to_string()))?;
            if v.is_zero() {
                return Err(Error::Parse(format!("stored zero at ({r}, {c})")));
            }
            entries.push((r, c, v));
        }
        if entries.len() != nnz {
            return Err(Error::Parse(format!("header announces {nnz} entries, found {}", entries.len())));
        }
        Self::from_triplets(rows, cols, &entries)
    }
}

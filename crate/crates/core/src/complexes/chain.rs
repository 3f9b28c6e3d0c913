use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::sset::SimplicialSet;
use crate::error::{Error, Result};
use crate::linalg::{Int, SparseIntMatrix, SparseVec};

/// Free chain complex with sparse boundary matrices `∂_d: C_d → C_{d-1}`.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    ranks: Vec<usize>,
    boundaries: Vec<SparseIntMatrix>,
}

impl ChainComplex {
    /// `boundaries[d - 1]` is `∂_d` for `d = 1..ranks.len()`.
    pub fn new(ranks: Vec<usize>, boundaries: Vec<SparseIntMatrix>) -> Result<Self> {
        if boundaries.len() + 1 != ranks.len().max(1) {
            return Err(Error::Shape("one boundary matrix per positive degree".into()));
        }
        for (i, b) in boundaries.iter().enumerate() {
            if b.rows() != ranks[i] || b.cols() != ranks[i + 1] {
                return Err(Error::Shape(format!("boundary in degree {} has the wrong shape", i + 1)));
            }
        }
        Ok(ChainComplex { ranks, boundaries })
    }

    pub fn top_degree(&self) -> usize {
        self.ranks.len().saturating_sub(1)
    }

    pub fn rank(&self, d: usize) -> usize {
        self.ranks.get(d).copied().unwrap_or(0)
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// `∂_d`, the zero matrix outside the stored range.
    pub fn boundary(&self, d: usize) -> SparseIntMatrix {
        match d.checked_sub(1).and_then(|i| self.boundaries.get(i)) {
            Some(b) => b.clone(),
            None => SparseIntMatrix::zero(if d == 0 { 0 } else { self.rank(d - 1) }, self.rank(d)),
        }
    }

    pub fn boundary_ref(&self, d: usize) -> Option<&SparseIntMatrix> {
        d.checked_sub(1).and_then(|i| self.boundaries.get(i))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.ranks.iter().enumerate().map(|(d, &r)| if d % 2 == 0 { r as i64 } else { -(r as i64) }).sum()
    }

    /// Checks `∂_{d} ∘ ∂_{d+1} = 0` in every degree.
    pub fn check_boundary_squared(&self) -> Result<()> {
        for d in 1..self.boundaries.len() {
            if !self.boundaries[d - 1].mul(&self.boundaries[d])?.is_zero() {
                return Err(Error::Internal(format!("boundary squares to a nonzero map in degree {}", d + 1)));
            }
        }
        Ok(())
    }
}

/// Column `j` of `∂_d` is `Σ_i (-1)^i [d_i σ_j]`, dropping degenerate faces.
pub fn normalized_chain_complex(x: &SimplicialSet) -> ChainComplex {
    let ranks = x.counts().to_vec();
    let boundaries = (1..ranks.len()).map(|d| normalized_boundary(x, d)).collect();
    ChainComplex { ranks, boundaries }
}

/// `∂_d` of the normalized chain complex alone; zero outside `1..=dim`.
pub fn normalized_boundary(x: &SimplicialSet, d: usize) -> SparseIntMatrix {
    if d == 0 || d > x.dim() {
        return SparseIntMatrix::zero(if d == 0 { 0 } else { x.count(d - 1) }, x.count(d));
    }
    let cols: Vec<SparseVec> = (0..x.count(d) as u32)
        .into_par_iter()
        .map(|id| {
            let mut acc: FxHashMap<u32, i64> = FxHashMap::default();
            for (i, f) in x.faces(d, id).iter().enumerate() {
                if !f.is_degenerate() {
                    *acc.entry(f.id).or_default() += if i % 2 == 0 { 1 } else { -1 };
                }
            }
            let mut col: SparseVec = acc.into_iter().filter(|(_, v)| *v != 0).map(|(r, v)| (r, Int::from(v))).collect();
            col.sort_unstable_by_key(|e| e.0);
            col
        })
        .collect();
    SparseIntMatrix::from_sorted_columns(x.count(d - 1), cols)
}

/// Tensor product `C^(1) ⊗ … ⊗ C^(k)` through degree `top`, with the Koszul
/// sign rule. A cell is a tuple of `(degree, id)` pairs, one per factor.
#[derive(Clone, Debug)]
pub struct TensorComplex {
    complex: ChainComplex,
    cells: Vec<Vec<Vec<(usize, u32)>>>,
    index: Vec<FxHashMap<Vec<(usize, u32)>, u32>>,
}

impl TensorComplex {
    pub fn new(factors: &[&ChainComplex], top: usize) -> Result<Self> {
        let mut cells: Vec<Vec<Vec<(usize, u32)>>> = Vec::new();
        for d in 0..=top {
            let mut out: Vec<Vec<(usize, u32)>> = vec![vec![]];
            let mut budget: Vec<usize> = vec![d];
            for (i, f) in factors.iter().enumerate() {
                let last = i + 1 == factors.len();
                let mut next = Vec::new();
                let mut next_budget = Vec::new();
                for (cell, left) in out.iter().zip(&budget) {
                    let degrees: Vec<usize> = if last { vec![*left] } else { (0..=*left).collect() };
                    for p in degrees {
                        for id in 0..f.rank(p) as u32 {
                            let mut c = cell.clone();
                            c.push((p, id));
                            next.push(c);
                            next_budget.push(left - p);
                        }
                    }
                }
                out = next;
                budget = next_budget;
            }
            out.sort_unstable();
            cells.push(out);
        }
        let index: Vec<FxHashMap<Vec<(usize, u32)>, u32>> = cells
            .iter()
            .map(|cs| cs.iter().enumerate().map(|(i, c)| (c.clone(), i as u32)).collect())
            .collect();
        let ranks: Vec<usize> = cells.iter().map(Vec::len).collect();
        let mut boundaries = Vec::new();
        for d in 1..=top {
            let cols: Vec<SparseVec> = cells[d]
                .par_iter()
                .map(|cell| {
                    let mut col: SparseVec = Vec::new();
                    let mut shift = 0;
                    for (i, &(p, id)) in cell.iter().enumerate() {
                        if p > 0 {
                            let b = factors[i].boundary_ref(p).expect("degree within the factor");
                            let sign = if shift % 2 == 0 { Int::ONE } else { -Int::ONE };
                            for (r, v) in b.column(id as usize) {
                                let mut c = cell.clone();
                                c[i] = (p - 1, r as u32);
                                col.push((index[d - 1][&c], &sign * v));
                            }
                        }
                        shift += p;
                    }
                    col.sort_unstable_by_key(|e| e.0);
                    col
                })
                .collect();
            boundaries.push(SparseIntMatrix::from_sorted_columns(ranks[d - 1], cols));
        }
        Ok(TensorComplex { complex: ChainComplex::new(ranks, boundaries)?, cells, index })
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn cell(&self, d: usize, i: u32) -> &[(usize, u32)] {
        &self.cells[d][i as usize]
    }

    pub fn cells(&self, d: usize) -> &[Vec<(usize, u32)>] {
        &self.cells[d]
    }

    pub fn index_of(&self, cell: &[(usize, u32)]) -> Option<u32> {
        let d = cell.iter().map(|c| c.0).sum::<usize>();
        self.index.get(d)?.get(cell).copied()
    }
}

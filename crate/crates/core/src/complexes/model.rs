//! Building a [`SimplicialSet`] from a levelwise model with explicit face and
//! degeneracy maps.

use std::hash::Hash;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::simplex::{SimplexRef, MAX_DIM};
use super::sset::SimplicialSet;
use crate::error::{Error, Result};

/// Cap on the number of simplices a generator may enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_simplices: u64,
}

impl Budget {
    pub const DEFAULT_MAX: u64 = 5_000_000;

    pub fn new(max_simplices: u64) -> Self {
        Budget { max_simplices }
    }

    pub fn check(&self, what: &str, needed: u64) -> Result<()> {
        if needed > self.max_simplices {
            return Err(Error::Budget(format!(
                "{what} needs {needed} simplices, budget is {}",
                self.max_simplices
            )));
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Self::DEFAULT_MAX)
    }
}

/// A simplicial set given levelwise. `candidates(d)` must contain every
/// nondegenerate `d`-simplex (degenerate ones are filtered out).
pub trait SimplicialModel: Sync {
    type Elem: Clone + Eq + Hash + Ord + Send + Sync;

    fn candidates(&self, d: usize) -> Vec<Self::Elem>;
    fn face(&self, d: usize, x: &Self::Elem, i: usize) -> Self::Elem;
    fn degeneracy(&self, d: usize, x: &Self::Elem, i: usize) -> Self::Elem;

    /// Number of candidates in dimension `d`, checked against the budget
    /// before enumeration.
    fn candidate_count(&self, d: usize) -> u64;
}

/// The mask `{i : x = s_i d_i x}` of a `d`-simplex.
fn degeneracy_mask<M: SimplicialModel>(m: &M, d: usize, x: &M::Elem) -> u16 {
    let mut mask = 0;
    for i in 0..d {
        if m.degeneracy(d - 1, &m.face(d, x, i), i) == *x {
            mask |= 1 << i;
        }
    }
    mask
}

pub fn build<M: SimplicialModel>(m: &M, dmax: usize, budget: Budget, label: String) -> Result<SimplicialSet> {
    if dmax > MAX_DIM {
        return Err(Error::Unsupported(format!("dimension {dmax} exceeds {MAX_DIM}")));
    }
    let total: u64 = (0..=dmax).map(|d| m.candidate_count(d)).fold(0u64, u64::saturating_add);
    budget.check(&label, total)?;
    let mut index: Vec<FxHashMap<M::Elem, u32>> = Vec::new();
    let mut counts = Vec::new();
    let mut faces = Vec::new();
    for d in 0..=dmax {
        let mut nondeg: Vec<M::Elem> = m
            .candidates(d)
            .into_par_iter()
            .filter(|x| d == 0 || degeneracy_mask(m, d, x) == 0)
            .collect();
        nondeg.par_sort_unstable();
        nondeg.dedup();
        let table: Vec<SimplexRef> = if d == 0 {
            Vec::new()
        } else {
            let lookup = &index;
            nondeg
                .par_iter()
                .flat_map_iter(|x| (0..=d).map(move |i| normalize(m, d - 1, m.face(d, x, i), lookup)))
                .collect::<Result<Vec<_>>>()?
        };
        counts.push(nondeg.len());
        faces.push(table);
        index.push(nondeg.into_iter().enumerate().map(|(k, x)| (x, k as u32)).collect());
    }
    SimplicialSet::assemble(label, counts, faces)
}

fn normalize<M: SimplicialModel>(
    m: &M,
    d: usize,
    x: M::Elem,
    index: &[FxHashMap<M::Elem, u32>],
) -> Result<SimplexRef> {
    let mask = degeneracy_mask(m, d, &x);
    let mut y = x;
    let mut dim = d;
    for j in (0..d).rev() {
        if mask & (1 << j) != 0 {
            y = m.face(dim, &y, j);
            dim -= 1;
        }
    }
    let id = *index[dim]
        .get(&y)
        .ok_or_else(|| Error::Internal(format!("face in dimension {dim} missing from the model")))?;
    Ok(SimplexRef { dim: d as u16, id, mask })
}

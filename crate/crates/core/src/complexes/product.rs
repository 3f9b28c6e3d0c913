//! Cartesian products of simplicial sets.

use std::sync::Arc;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::model::Budget;
use super::simplex::{SimplexRef, MAX_DIM};
use super::sset::SimplicialSet;
use crate::error::{Error, Result};

/// Component data of a product: simplex `(d, id)` is the tuple
/// `components[d][id*k .. id*k+k]` of factor references of dimension `d`.
#[derive(Debug)]
pub struct ProductStructure {
    factors: Vec<Arc<SimplicialSet>>,
    components: Vec<Vec<SimplexRef>>,
    index: Vec<FxHashMap<Vec<u64>, u32>>,
}

impl ProductStructure {
    pub fn factors(&self) -> &[Arc<SimplicialSet>] {
        &self.factors
    }

    pub fn arity(&self) -> usize {
        self.factors.len()
    }

    pub fn components(&self, d: usize, id: u32) -> &[SimplexRef] {
        let k = self.arity();
        &self.components[d][id as usize * k..id as usize * k + k]
    }

    /// Canonical reference of a tuple of factor references of equal dimension,
    /// or `None` when it lies above the materialized range.
    pub fn lookup(&self, comps: &[SimplexRef]) -> Option<SimplexRef> {
        let d = comps[0].dim();
        let mask = comps.iter().fold(u16::MAX, |m, c| m & c.mask) & ((1u32 << d) - 1) as u16;
        let base = d - mask.count_ones() as usize;
        let key: Vec<u64> = if mask == 0 {
            comps.iter().map(SimplexRef::pack).collect()
        } else {
            comps
                .iter()
                .zip(&self.factors)
                .map(|(c, f)| {
                    let mut y = *c;
                    for j in (0..d).rev() {
                        if mask & (1 << j) != 0 {
                            y = f.face(y, j);
                        }
                    }
                    y.pack()
                })
                .collect()
        };
        let id = *self.index.get(base)?.get(key.as_slice())?;
        Some(SimplexRef { dim: d as u16, id, mask })
    }

    pub(crate) fn restrict(&self, r: SimplexRef, verts: &[usize]) -> Option<SimplexRef> {
        if r.mask != 0 {
            return None;
        }
        let comps: Vec<SimplexRef> = self
            .components(r.dim(), r.id)
            .iter()
            .zip(&self.factors)
            .map(|(c, f)| f.restrict(*c, verts))
            .collect();
        self.lookup(&comps)
    }

    /// Id of the nondegenerate product simplex with the given components.
    pub fn id_of(&self, comps: &[SimplexRef]) -> Option<u32> {
        let key: Vec<u64> = comps.iter().map(SimplexRef::pack).collect();
        self.index.get(comps[0].dim())?.get(key.as_slice()).copied()
    }
}

/// All `k`-tuples of masks on `d` with the given popcounts and empty
/// intersection, in lexicographic order.
pub fn disjoint_mask_tuples(d: usize, sizes: &[usize]) -> Vec<Vec<u16>> {
    fn rec(d: usize, sizes: &[usize], inter: u16, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if cur.len() == sizes.len() {
            if inter == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let want = sizes[cur.len()];
        for m in 0..(1u32 << d) {
            let m = m as u16;
            if m.count_ones() as usize == want {
                cur.push(m);
                rec(d, sizes, inter & m, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    let full = ((1u32 << d) - 1) as u16;
    rec(d, sizes, full, &mut Vec::new(), &mut out);
    out
}

/// Base-dimension tuples `(m_1, …, m_k)` with `m_i <= dims[i]` and `m_i <= d`.
fn base_dim_tuples(d: usize, dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &top in dims {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..=top.min(d)).map(move |m| {
                    let mut t = t.clone();
                    t.push(m);
                    t
                })
            })
            .collect();
    }
    out
}

fn count_in_dim(factors: &[Arc<SimplicialSet>], d: usize) -> u64 {
    let dims: Vec<usize> = factors.iter().map(|f| f.dim()).collect();
    let mut total = 0u64;
    for ms in base_dim_tuples(d, &dims) {
        let simplices = ms.iter().zip(factors).fold(1u64, |acc, (&m, f)| acc.saturating_mul(f.count(m) as u64));
        if simplices == 0 {
            continue;
        }
        let sizes: Vec<usize> = ms.iter().map(|m| d - m).collect();
        total = total.saturating_add(simplices.saturating_mul(disjoint_mask_tuples(d, &sizes).len() as u64));
    }
    total
}

fn flatten(spaces: &[&SimplicialSet]) -> Result<Vec<Arc<SimplicialSet>>> {
    let mut out = Vec::new();
    for s in spaces {
        match s.product() {
            Some(_) if s.is_truncated() => {
                return Err(Error::Unsupported(format!("'{}' is a truncated product and cannot be a factor", s.label())))
            }
            Some(p) => out.extend(p.factors().iter().cloned()),
            None => out.push(Arc::new((*s).clone())),
        }
    }
    Ok(out)
}

/// Product of the given spaces (products among them are flattened), with
/// nondegenerate simplices enumerated by shuffles. Materialized through
/// `dmax` when given, otherwise through the full dimension.
pub fn product(spaces: &[&SimplicialSet], dmax: Option<usize>, budget: Budget) -> Result<SimplicialSet> {
    if spaces.is_empty() || spaces.iter().any(|s| s.is_empty()) {
        return Err(Error::Unsupported("product of empty spaces".into()));
    }
    let factors = flatten(spaces)?;
    let full: usize = factors.iter().map(|f| f.dim()).sum();
    let nominal: usize = factors.iter().map(|f| f.nominal_dim()).sum();
    let top = dmax.map_or(full, |m| m.min(full));
    if top > MAX_DIM {
        return Err(Error::Unsupported(format!("dimension {top} exceeds {MAX_DIM}")));
    }
    let names: Vec<&str> = spaces.iter().map(|s| s.label()).collect();
    let label = match dmax {
        Some(m) if m < full => format!("product({};dmax={m})", names.join(",")),
        _ => format!("product({})", names.join(",")),
    };
    let total = (0..=top).map(|d| count_in_dim(&factors, d)).fold(0u64, u64::saturating_add);
    budget.check(&label, total)?;

    let k = factors.len();
    let dims: Vec<usize> = factors.iter().map(|f| f.dim()).collect();
    let mut structure = ProductStructure { factors, components: Vec::new(), index: Vec::new() };
    let mut counts = Vec::new();
    let mut faces = vec![Vec::new()];
    for d in 0..=top {
        let mut tuples: Vec<Vec<u64>> = Vec::new();
        for ms in base_dim_tuples(d, &dims) {
            if ms.iter().zip(&structure.factors).any(|(&m, f)| f.count(m) == 0) {
                continue;
            }
            let sizes: Vec<usize> = ms.iter().map(|m| d - m).collect();
            for masks in disjoint_mask_tuples(d, &sizes) {
                let mut acc: Vec<Vec<u64>> = vec![Vec::with_capacity(k)];
                for (i, f) in structure.factors.iter().enumerate() {
                    let (mask, n) = (masks[i], f.count(ms[i]) as u32);
                    acc = acc
                        .into_iter()
                        .flat_map(|t| {
                            (0..n).map(move |id| {
                                let mut t = t.clone();
                                t.push(SimplexRef { dim: d as u16, id, mask }.pack());
                                t
                            })
                        })
                        .collect();
                }
                tuples.extend(acc);
            }
        }
        tuples.par_sort_unstable();
        counts.push(tuples.len());
        structure.components.push(tuples.iter().flatten().map(|&x| SimplexRef::unpack(x)).collect());
        structure.index.push(tuples.into_iter().enumerate().map(|(i, t)| (t, i as u32)).collect());
        if d > 0 {
            let s = &structure;
            let table: Vec<SimplexRef> = (0..counts[d] as u32)
                .into_par_iter()
                .flat_map_iter(|id| {
                    (0..=d).map(move |i| {
                        let comps: Vec<SimplexRef> =
                            s.components(d, id).iter().zip(&s.factors).map(|(c, f)| f.face(*c, i)).collect();
                        s.lookup(&comps).expect("faces of materialized simplices are materialized")
                    })
                })
                .collect();
            faces.push(table);
        }
    }
    Ok(SimplicialSet::assemble(label, counts, faces)?.with_product(structure, nominal))
}

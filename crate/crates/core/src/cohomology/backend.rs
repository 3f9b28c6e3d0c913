//! Interchangeable ways of computing cohomology groups of a simplicial set.

use std::collections::BTreeMap;
use std::sync::Arc;

use parking_lot::Mutex;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::cochain::{coboundary, Cochain};
use super::group::{group_from_boundaries, CocycleModel, CohomologyGroup};
use crate::complexes::{normalized_boundary, normalized_chain_complex, ProductStructure, SimplexRef, SimplicialSet, TensorComplex};
use crate::error::{Error, Result};
use crate::linalg::{Int, SparseIntMatrix};

pub trait CohomologyBackend: Send + Sync {
    fn name(&self) -> &'static str;

    fn supports(&self, x: &SimplicialSet) -> bool;

    fn group(&self, x: &Arc<SimplicialSet>, degree: usize, modulus: u64) -> Result<CohomologyGroup>;
}

/// Zero group in a degree without simplices, or an error when the degree is
/// within the nominal range of a truncated model.
fn beyond_top(x: &SimplicialSet, degree: usize, modulus: u64, name: &'static str) -> Result<CohomologyGroup> {
    if degree <= x.nominal_dim() {
        return Err(Error::Unsupported(format!(
            "'{}' is materialized only through dimension {}; H^{degree} needs dimension {}",
            x.label(),
            x.dim(),
            degree + 1
        )));
    }
    group_from_boundaries(
        x.space_id(),
        degree,
        modulus,
        name,
        &SparseIntMatrix::zero(x.count(degree.wrapping_sub(1)), 0),
        &SparseIntMatrix::zero(0, 0),
    )
}

/// Smith normal form on the normalized cochain complex of the space itself.
pub struct Direct;

impl CohomologyBackend for Direct {
    fn name(&self) -> &'static str {
        "direct"
    }

    fn supports(&self, _: &SimplicialSet) -> bool {
        true
    }

    fn group(&self, x: &Arc<SimplicialSet>, degree: usize, modulus: u64) -> Result<CohomologyGroup> {
        if degree >= x.dim() && x.is_truncated() || degree > x.dim() {
            return beyond_top(x, degree, modulus, self.name());
        }
        group_from_boundaries(
            x.space_id(),
            degree,
            modulus,
            self.name(),
            &normalized_boundary(x, degree),
            &normalized_boundary(x, degree + 1),
        )
    }
}

/// For products: computes on the tensor product of the factors' normalized
/// complexes and transports cocycles along the shuffle map (cocycles in) and
/// the Alexander–Whitney map (generators out). Needs the product only through
/// the degree asked for.
pub struct EilenbergZilber;

impl CohomologyBackend for EilenbergZilber {
    fn name(&self) -> &'static str {
        "eilenberg-zilber"
    }

    fn supports(&self, x: &SimplicialSet) -> bool {
        x.product().is_some()
    }

    fn group(&self, x: &Arc<SimplicialSet>, degree: usize, modulus: u64) -> Result<CohomologyGroup> {
        let p = x.product().ok_or_else(|| Error::Unsupported(format!("'{}' is not a product", x.label())))?;
        if degree > x.dim() {
            return beyond_top(x, degree, modulus, self.name());
        }
        let factors: Vec<_> = p.factors().iter().map(|f| normalized_chain_complex(f)).collect();
        let refs: Vec<_> = factors.iter().collect();
        let t = TensorComplex::new(&refs, degree + 1)?;
        let tag = x.space_id() ^ 0x7465_6e73_6f72;
        let inner = group_from_boundaries(
            tag,
            degree,
            modulus,
            self.name(),
            &t.complex().boundary(degree),
            &t.complex().boundary(degree + 1),
        )?;
        let (presentation, inner) = inner.into_parts();
        let model = EzModel { x: x.clone(), t: Arc::new(t), tag, degree, modulus, inner };
        Ok(CohomologyGroup::new(x.space_id(), degree, modulus, self.name(), presentation, Arc::new(model)))
    }
}

struct EzModel {
    x: Arc<SimplicialSet>,
    t: Arc<TensorComplex>,
    tag: u64,
    degree: usize,
    modulus: u64,
    inner: Arc<dyn CocycleModel>,
}

impl CocycleModel for EzModel {
    fn coordinates(&self, z: &Cochain) -> Result<Vec<Int>> {
        if self.degree < self.x.dim() && !coboundary(&self.x, z)?.is_zero() {
            return Err(Error::NotCocycle(format!("degree-{} cochain on '{}'", self.degree, self.x.label())));
        }
        let pulled = shuffle_pullback(&self.x, &self.t, z)?.with_space(self.tag);
        self.inner.coordinates(&pulled)
    }

    fn cocycles(&self, ambient: &[Vec<Int>]) -> Result<Vec<Cochain>> {
        let on_t = self.inner.cocycles(ambient)?;
        aw_pullback(&self.x, &self.t, &on_t, self.modulus)
    }
}

/// Step sequences of the shuffles of a tensor cell: at step `s` factor
/// `seq[s]` advances. Returned with the sign of the shuffle permutation.
pub fn shuffles(degrees: &[usize]) -> Vec<(Vec<u8>, i64)> {
    fn rec(left: &mut [usize], seq: &mut Vec<u8>, inv: usize, out: &mut Vec<(Vec<u8>, i64)>) {
        if left.iter().all(|&l| l == 0) {
            out.push((seq.clone(), if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for i in 0..left.len() {
            if left[i] > 0 {
                // Steps still to come from lower factors form inversions with this one.
                let add: usize = left[..i].iter().sum();
                left[i] -= 1;
                seq.push(i as u8);
                rec(left, seq, inv + add, out);
                seq.pop();
                left[i] += 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut degrees.to_vec(), &mut Vec::new(), 0, &mut out);
    out
}

/// Product simplex of a shuffle of nondegenerate factor simplices `ids`.
fn shuffle_simplex(p: &ProductStructure, seq: &[u8], ids: &[u32]) -> Option<u32> {
    let d = seq.len();
    let comps: Vec<SimplexRef> = ids
        .iter()
        .enumerate()
        .map(|(i, &id)| {
            let mask = (0..d).filter(|&s| seq[s] as usize != i).fold(0u16, |m, s| m | (1 << s));
            SimplexRef { dim: d as u16, id, mask }
        })
        .collect();
    p.id_of(&comps)
}

/// `EZ^* z` on the tensor complex.
pub fn shuffle_pullback(x: &SimplicialSet, t: &TensorComplex, z: &Cochain) -> Result<Cochain> {
    let p = x.product().ok_or_else(|| Error::Unsupported("shuffle map needs a product".into()))?;
    let d = z.degree();
    let dense = z.to_dense(x.count(d))?;
    let mut by_degrees: FxHashMap<Vec<usize>, Vec<(Vec<u8>, i64)>> = FxHashMap::default();
    for cell in t.cells(d) {
        let degs: Vec<usize> = cell.iter().map(|c| c.0).collect();
        by_degrees.entry(degs.clone()).or_insert_with(|| shuffles(&degs));
    }
    let values: Vec<Int> = t
        .cells(d)
        .par_iter()
        .map(|cell| {
            let degs: Vec<usize> = cell.iter().map(|c| c.0).collect();
            let ids: Vec<u32> = cell.iter().map(|c| c.1).collect();
            let mut acc = Int::ZERO;
            for (seq, sign) in &by_degrees[&degs] {
                let id = shuffle_simplex(p, seq, &ids).expect("shuffles of materialized cells are materialized");
                let v = &dense[id as usize];
                if !v.is_zero() {
                    if *sign > 0 {
                        acc += v;
                    } else {
                        acc -= v;
                    }
                }
            }
            acc
        })
        .collect();
    Ok(Cochain::from_dense(z.space(), d, z.modulus(), &values))
}

/// Compositions of `d` into `k` parts bounded by `dims`.
fn compositions(d: usize, dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for (i, &top) in dims.iter().enumerate() {
        let last = i + 1 == dims.len();
        out = out
            .into_iter()
            .flat_map(|c: Vec<usize>| {
                let used: usize = c.iter().sum();
                let rest = d - used;
                let range: Vec<usize> = if last { vec![rest] } else { (0..=rest).collect() };
                range.into_iter().filter(move |&a| a <= top).map(move |a| {
                    let mut c = c.clone();
                    c.push(a);
                    c
                })
            })
            .collect();
    }
    out
}

/// Tensor cells of the Alexander–Whitney image of product simplex `(d, id)`.
pub fn aw_terms(x: &SimplicialSet, t: &TensorComplex, d: usize, id: u32) -> Vec<u32> {
    let p = x.product().expect("product");
    let dims: Vec<usize> = p.factors().iter().map(|f| f.dim()).collect();
    let comps = p.components(d, id);
    let mut out = Vec::new();
    'outer: for parts in compositions(d, &dims) {
        let mut lo = 0;
        let mut cell = Vec::with_capacity(parts.len());
        for ((a, c), f) in parts.iter().zip(comps).zip(p.factors()) {
            let r = f.interval(*c, lo, lo + a);
            if r.is_degenerate() {
                continue 'outer;
            }
            cell.push((*a, r.id));
            lo += a;
        }
        out.push(t.index_of(&cell).expect("tensor cell in range"));
    }
    out
}

/// `AW^* g` for cochains `g` on the tensor complex.
pub fn aw_pullback(x: &SimplicialSet, t: &TensorComplex, gs: &[Cochain], modulus: u64) -> Result<Vec<Cochain>> {
    let Some(first) = gs.first() else { return Ok(vec![]) };
    let d = first.degree();
    let dense: Vec<Vec<Int>> = gs.iter().map(|g| g.to_dense(t.cells(d).len())).collect::<Result<_>>()?;
    let support: Vec<bool> = (0..t.cells(d).len()).map(|i| dense.iter().any(|g| !g[i].is_zero())).collect();
    let values: Vec<Vec<(u32, Int)>> = (0..x.count(d) as u32)
        .into_par_iter()
        .map(|id| {
            let terms = aw_terms(x, t, d, id);
            if !terms.iter().any(|&c| support[c as usize]) {
                return vec![];
            }
            dense
                .iter()
                .enumerate()
                .filter_map(|(k, g)| {
                    let mut acc = Int::ZERO;
                    for &c in &terms {
                        acc += &g[c as usize];
                    }
                    (!acc.is_zero()).then(|| (k as u32, acc))
                })
                .collect()
        })
        .collect();
    let mut entries: Vec<Vec<(u32, Int)>> = vec![Vec::new(); gs.len()];
    for (id, vs) in values.into_iter().enumerate() {
        for (k, v) in vs {
            entries[k as usize].push((id as u32, v));
        }
    }
    Ok(entries.into_iter().map(|e| Cochain::from_entries(x.space_id(), d, modulus, e)).collect())
}

/// Backends by name; `auto` picks `eilenberg-zilber` for products and
/// `direct` otherwise.
pub struct BackendRegistry {
    backends: BTreeMap<&'static str, Arc<dyn CohomologyBackend>>,
}

impl BackendRegistry {
    pub fn empty() -> Self {
        BackendRegistry { backends: BTreeMap::new() }
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(Direct));
        r.register(Arc::new(EilenbergZilber));
        r
    }

    pub fn register(&mut self, b: Arc<dyn CohomologyBackend>) {
        self.backends.insert(b.name(), b);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.backends.keys().copied()
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn CohomologyBackend>> {
        self.backends.get(name).cloned().ok_or_else(|| Error::Parse(format!("unknown cohomology backend '{name}'")))
    }

    pub fn select(&self, name: &str, x: &SimplicialSet) -> Result<Arc<dyn CohomologyBackend>> {
        let b = if name == "auto" {
            self.get(if x.product().is_some() { "eilenberg-zilber" } else { "direct" })?
        } else {
            self.get(name)?
        };
        if !b.supports(x) {
            return Err(Error::Unsupported(format!("backend '{}' cannot handle '{}'", b.name(), x.label())));
        }
        Ok(b)
    }
}

type GroupKey = ([u8; 32], usize, u64, &'static str);

/// Process-wide memo of computed groups, keyed by space digest, degree,
/// modulus and backend.
pub struct GroupCache {
    map: Mutex<FxHashMap<GroupKey, Arc<CohomologyGroup>>>,
}

impl GroupCache {
    pub fn global() -> &'static GroupCache {
        static CACHE: std::sync::OnceLock<GroupCache> = std::sync::OnceLock::new();
        CACHE.get_or_init(|| GroupCache { map: Mutex::new(FxHashMap::default()) })
    }

    pub fn get_or_compute(
        &self,
        backend: &dyn CohomologyBackend,
        x: &Arc<SimplicialSet>,
        degree: usize,
        modulus: u64,
    ) -> Result<Arc<CohomologyGroup>> {
        let key = (x.digest(), degree, modulus, backend.name());
        if let Some(g) = self.map.lock().get(&key) {
            return Ok(g.clone());
        }
        let g = Arc::new(backend.group(x, degree, modulus)?);
        Ok(self.map.lock().entry(key).or_insert(g).clone())
    }

    pub fn clear(&self) {
        self.map.lock().clear();
    }
}

/// `H^degree(X; Z/modulus)` through the named backend (or `auto`), memoized.
pub fn space_cohomology(x: &Arc<SimplicialSet>, degree: usize, modulus: u64, backend: &str) -> Result<Arc<CohomologyGroup>> {
    let b = BackendRegistry::standard().select(backend, x)?;
    GroupCache::global().get_or_compute(b.as_ref(), x, degree, modulus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shuffle_counts_and_signs() {
        let s = shuffles(&[1, 1]);
        assert_eq!(s, vec![(vec![0, 1], 1), (vec![1, 0], -1)]);
        assert_eq!(shuffles(&[2, 1, 2]).len(), 30);
        assert_eq!(shuffles(&[0, 3]).len(), 1);
    }

    #[test]
    fn compositions_respect_bounds() {
        assert_eq!(compositions(2, &[1, 6]), vec![vec![0, 2], vec![1, 1]]);
        assert_eq!(compositions(5, &[6, 1, 1]).len(), 4);
    }
}

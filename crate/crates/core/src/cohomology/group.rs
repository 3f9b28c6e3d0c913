use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::cochain::Cochain;
use crate::complexes::ChainComplex;
use crate::error::{Error, Result};
use crate::linalg::{
    cokernel, column_lattice_basis, decompose_cached, AbelianGroupPresentation, Int, Order, SmithDecomposition, SparseIntMatrix, SparseVec,
    Tracking,
};

/// How a backend realizes cocycles of one degree as vectors in the ambient
/// lattice of a presentation.
pub trait CocycleModel: Send + Sync {
    /// Ambient coordinates of a cocycle; rejects non-cocycles.
    fn coordinates(&self, z: &Cochain) -> Result<Vec<Int>>;

    /// Cocycles with the given ambient coordinates.
    fn cocycles(&self, ambient: &[Vec<Int>]) -> Result<Vec<Cochain>>;
}

/// `H^degree(X; Z/modulus)` together with generator cocycles and the map from
/// cocycles to canonical coordinates.
pub struct CohomologyGroup {
    space: u64,
    degree: usize,
    modulus: u64,
    backend: &'static str,
    presentation: AbelianGroupPresentation,
    model: Arc<dyn CocycleModel>,
    generators: OnceLock<Vec<Cochain>>,
}

impl std::fmt::Debug for CohomologyGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "H^{}(mod {}) = {} [{}]", self.degree, self.modulus, self.presentation.describe(), self.backend)
    }
}

impl CohomologyGroup {
    pub fn new(
        space: u64,
        degree: usize,
        modulus: u64,
        backend: &'static str,
        presentation: AbelianGroupPresentation,
        model: Arc<dyn CocycleModel>,
    ) -> Self {
        CohomologyGroup { space, degree, modulus, backend, presentation, model, generators: OnceLock::new() }
    }

    pub(crate) fn into_parts(self) -> (AbelianGroupPresentation, Arc<dyn CocycleModel>) {
        (self.presentation, self.model)
    }

    pub fn space(&self) -> u64 {
        self.space
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn backend(&self) -> &'static str {
        self.backend
    }

    pub fn presentation(&self) -> &AbelianGroupPresentation {
        &self.presentation
    }

    /// `Z`, `Z/4`, `0`, ...
    pub fn describe(&self) -> String {
        self.presentation.describe()
    }

    pub fn ngens(&self) -> usize {
        self.presentation.ngens()
    }

    /// One cocycle per canonical generator.
    pub fn generators(&self) -> Result<&[Cochain]> {
        if let Some(g) = self.generators.get() {
            return Ok(g);
        }
        let g = self.presentation.generator_map();
        let ambient: Vec<Vec<Int>> = (0..g.cols())
            .map(|j| {
                let mut v = vec![Int::ZERO; g.rows()];
                for (r, x) in g.column(j) {
                    v[r] = x.clone();
                }
                v
            })
            .collect();
        let cocycles = self.model.cocycles(&ambient)?;
        Ok(self.generators.get_or_init(|| cocycles))
    }

    /// Canonical coordinates of a cocycle.
    pub fn express(&self, z: &Cochain) -> Result<Vec<Int>> {
        if z.space() != self.space {
            return Err(Error::SpaceMismatch);
        }
        if z.degree() != self.degree {
            return Err(Error::Shape(format!("degree-{} cochain in H^{}", z.degree(), self.degree)));
        }
        if z.modulus() != self.modulus {
            return Err(Error::Modulus(format!("mod-{} cochain in a mod-{} group", z.modulus(), self.modulus)));
        }
        if self.presentation.is_trivial() {
            // Still reject non-cocycles.
            self.model.coordinates(z)?;
            return Ok(vec![]);
        }
        self.presentation.express(&self.model.coordinates(z)?)
    }

    /// A cocycle representing canonical coordinates.
    pub fn representative(&self, coords: &[Int]) -> Result<Cochain> {
        self.presentation.check_shape(coords)?;
        let mut out = Cochain::zero(self.space, self.degree, self.modulus);
        for (c, g) in coords.iter().zip(self.generators()?) {
            if !c.is_zero() {
                out = out.add(&g.scale(c))?;
            }
        }
        Ok(out)
    }
}

/// An element of a [`CohomologyGroup`], stored by reduced canonical coordinates.
#[derive(Clone, Debug)]
pub struct CohomologyClass {
    group: Arc<CohomologyGroup>,
    coords: Vec<Int>,
}

impl PartialEq for CohomologyClass {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.group, &other.group) && self.coords == other.coords
    }
}

impl CohomologyClass {
    pub fn new(group: Arc<CohomologyGroup>, coords: &[Int]) -> Result<Self> {
        group.presentation.check_shape(coords)?;
        let coords = group.presentation.reduce(coords);
        Ok(CohomologyClass { group, coords })
    }

    pub fn zero(group: Arc<CohomologyGroup>) -> Self {
        let coords = vec![Int::ZERO; group.ngens()];
        CohomologyClass { group, coords }
    }

    /// Class of a cocycle.
    pub fn of(group: Arc<CohomologyGroup>, z: &Cochain) -> Result<Self> {
        let coords = group.express(z)?;
        Ok(CohomologyClass { group, coords })
    }

    pub fn generator(group: Arc<CohomologyGroup>, i: usize) -> Result<Self> {
        if i >= group.ngens() {
            return Err(Error::Shape(format!("group {} has no generator {i}", group.describe())));
        }
        let mut coords = vec![Int::ZERO; group.ngens()];
        coords[i] = Int::ONE;
        Self::new(group, &coords)
    }

    pub fn group(&self) -> &Arc<CohomologyGroup> {
        &self.group
    }

    pub fn coords(&self) -> &[Int] {
        &self.coords
    }

    pub fn degree(&self) -> usize {
        self.group.degree
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Int::is_zero)
    }

    fn same_group(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.group, &other.group) {
            Ok(())
        } else {
            Err(Error::Shape("classes belong to different groups".into()))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        Ok(CohomologyClass { group: self.group.clone(), coords: self.group.presentation.add(&self.coords, &other.coords) })
    }

    pub fn scale(&self, k: &Int) -> Self {
        CohomologyClass { group: self.group.clone(), coords: self.group.presentation.scale(k, &self.coords) }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Int::ONE)
    }

    pub fn order(&self) -> Order {
        self.group.presentation.element_order(&self.coords).expect("shape checked on construction")
    }

    pub fn representative(&self) -> Result<Cochain> {
        self.group.representative(&self.coords)
    }

    /// `free: [..]; torsion: [..] (mod [..])`.
    pub fn format(&self) -> String {
        self.group.presentation.format_coords(&self.coords)
    }
}

/// `ord(c)` in `G`, `Infinite` when `c` has a free component.
pub fn torsion_class_order(g: &CohomologyGroup, c: &CohomologyClass) -> Result<Order> {
    if c.group.space != g.space || c.group.degree != g.degree || c.group.modulus != g.modulus {
        return Err(Error::Shape("class does not belong to the group".into()));
    }
    Ok(c.order())
}

/// `G / <gens>` with its projection from canonical coordinates of `G`.
#[derive(Clone, Debug)]
pub struct Quotient {
    presentation: AbelianGroupPresentation,
}

impl Quotient {
    pub fn presentation(&self) -> &AbelianGroupPresentation {
        &self.presentation
    }

    pub fn project(&self, coords: &[Int]) -> Result<Vec<Int>> {
        self.presentation.express(coords)
    }

    pub fn order_of(&self, coords: &[Int]) -> Result<Order> {
        self.presentation.element_order(&self.project(coords)?)
    }
}

pub fn subgroup_quotient(g: &CohomologyGroup, gens: &[CohomologyClass]) -> Result<Quotient> {
    let coords: Vec<Vec<Int>> = gens
        .iter()
        .map(|c| {
            if c.group.space != g.space || c.group.degree != g.degree || c.group.modulus != g.modulus {
                return Err(Error::Shape("generator does not belong to the group".into()));
            }
            Ok(c.coords.clone())
        })
        .collect::<Result<_>>()?;
    Ok(Quotient { presentation: g.presentation.quotient(&coords)? })
}

/// Direct computation from the coboundary `δ^k = ∂_{k+1}^T`.
///
/// With `U ∂_{k+1} V = D`, a row vector `z` is a cocycle mod `m` iff
/// `w = z U^{-1}` has `w_i d_i ≡ 0`. The cocycle lattice has basis
/// `λ_i U_i`, where `λ_i = m / gcd(d_i, m)` for `i < rank` (those with `λ_i = m`
/// are dropped, being `m`-multiples) and `λ_i = 1` otherwise; for `m = 0` only
/// `i >= rank` survive. Coboundaries and `m`-multiples are the relations.
struct DirectModel {
    space: u64,
    degree: usize,
    modulus: u64,
    next: SparseIntMatrix,
    smith: Arc<SmithDecomposition>,
    basis: Vec<(u32, Int)>,
}

impl DirectModel {
    fn cocycle_check(&self, z: &[Int]) -> Result<()> {
        let dz = self.next.vec_mul(z)?;
        let m = Int::from(self.modulus);
        if let Some((i, v)) = dz.iter().enumerate().find(|(_, v)| !(if self.modulus == 0 { (*v).clone() } else { v.modulo(&m) }).is_zero()) {
            return Err(Error::NotCocycle(format!("coboundary is {v} on {}-simplex {i}", self.degree + 1)));
        }
        Ok(())
    }

    fn ambient_of(&self, w: &[Int]) -> Result<Vec<Int>> {
        self.basis
            .iter()
            .map(|(i, lambda)| {
                w[*i as usize]
                    .div_exact(lambda)
                    .ok_or_else(|| Error::Internal("cocycle coordinate not divisible by its lattice scale".into()))
            })
            .collect()
    }
}

impl CocycleModel for DirectModel {
    fn coordinates(&self, z: &Cochain) -> Result<Vec<Int>> {
        let dense = z.to_dense(self.next.rows())?;
        self.cocycle_check(&dense)?;
        let w = self.smith.left()?.apply_inverse_right(&dense)?;
        self.ambient_of(&w)
    }

    fn cocycles(&self, ambient: &[Vec<Int>]) -> Result<Vec<Cochain>> {
        let left = self.smith.left()?;
        let needed: Vec<usize> =
            (0..self.basis.len()).filter(|&t| ambient.iter().any(|c| !c[t].is_zero())).collect();
        let rows: Vec<(usize, SparseVec)> =
            needed.par_iter().map(|&t| (t, left.row(self.basis[t].0 as usize))).collect();
        Ok(ambient
            .iter()
            .map(|c| {
                let mut entries = Vec::new();
                for (t, row) in &rows {
                    if !c[*t].is_zero() {
                        let k = &c[*t] * &self.basis[*t].1;
                        entries.extend(row.iter().map(|(j, x)| (*j, &k * x)));
                    }
                }
                Cochain::from_entries(self.space, self.degree, self.modulus, entries)
            })
            .collect())
    }
}

/// `H^k` from `∂_k` (`N_{k-1} x N_k`) and `∂_{k+1}` (`N_k x N_{k+1}`).
pub fn group_from_boundaries(
    space: u64,
    degree: usize,
    modulus: u64,
    backend: &'static str,
    boundary: &SparseIntMatrix,
    next: &SparseIntMatrix,
) -> Result<CohomologyGroup> {
    let n = next.rows();
    if boundary.cols() != n {
        return Err(Error::Shape("consecutive boundary matrices do not compose".into()));
    }
    // Only the column lattice of `∂_{k+1}` matters; wide matrices are first
    // reduced to a basis of it.
    let next = if next.cols() > next.rows() { column_lattice_basis(next) } else { next.clone() };
    let smith = decompose_cached(&next, Tracking::LEFT);
    let m = Int::from(modulus);
    let diag = smith.invariant_factors();
    let mut basis: Vec<(u32, Int)> = Vec::new();
    let mut rel: Vec<Int> = Vec::new();
    for i in 0..n {
        if i < smith.rank() {
            if modulus == 0 {
                continue;
            }
            let g = diag[i].gcd(&m);
            if g.is_one() {
                continue;
            }
            basis.push((i as u32, m.div_exact(&g).expect("gcd divides")));
            rel.push(g);
        } else {
            basis.push((i as u32, Int::ONE));
            rel.push(m.clone());
        }
    }
    let model = DirectModel { space, degree, modulus, next, smith, basis };
    let mut columns: Vec<SparseVec> = rel
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.is_zero())
        .map(|(t, r)| vec![(t as u32, r.clone())])
        .collect();
    let left = model.smith.left()?;
    let coboundaries: Vec<SparseVec> = boundary
        .row_vectors()
        .into_par_iter()
        .map(|row| -> Result<SparseVec> {
            let mut dense = vec![Int::ZERO; n];
            for (j, x) in row {
                dense[j as usize] = x;
            }
            let w = left.apply_inverse_right(&dense)?;
            let c = model.ambient_of(&w)?;
            Ok(c.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(t, x)| (t as u32, x)).collect())
        })
        .collect::<Result<_>>()?;
    columns.extend(coboundaries.into_iter().filter(|c| !c.is_empty()));
    let presentation = cokernel(&SparseIntMatrix::from_sorted_columns(model.basis.len(), columns));
    Ok(CohomologyGroup::new(space, degree, modulus, backend, presentation, Arc::new(model)))
}

/// Identity tag of a chain complex, used as the `space` of its cochains.
pub fn complex_id(c: &ChainComplex) -> u64 {
    let mut h = Sha256::new();
    for d in 0..=c.top_degree() {
        h.update(c.rank(d).to_le_bytes());
        if let Some(b) = c.boundary_ref(d) {
            h.update(b.digest().0);
        }
    }
    u64::from_le_bytes(h.finalize()[..8].try_into().unwrap())
}

/// `H^degree(C; Z/modulus)`, the zero group above the top degree.
pub fn cohomology_group(c: &ChainComplex, degree: usize, modulus: u64) -> Result<CohomologyGroup> {
    group_from_boundaries(complex_id(c), degree, modulus, "direct", &c.boundary(degree), &c.boundary(degree + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Vec<Int> {
        xs.iter().map(|&x| Int::from(x)).collect()
    }

    /// Cellular complex of RP^2: Z <-2- Z <-0- Z.
    fn rp2() -> ChainComplex {
        ChainComplex::new(
            vec![1, 1, 1],
            vec![SparseIntMatrix::from_i64(&[&[0]]), SparseIntMatrix::from_i64(&[&[2]])],
        )
        .unwrap()
    }

    #[test]
    fn rp2_integral_and_mod_2() {
        let c = rp2();
        let h: Vec<String> = (0..4).map(|k| cohomology_group(&c, k, 0).unwrap().describe()).collect();
        assert_eq!(h, ["Z", "0", "Z/2", "0"]);
        let h2: Vec<String> = (0..3).map(|k| cohomology_group(&c, k, 2).unwrap().describe()).collect();
        assert_eq!(h2, ["Z/2", "Z/2", "Z/2"]);
        let h3: Vec<String> = (0..3).map(|k| cohomology_group(&c, k, 3).unwrap().describe()).collect();
        assert_eq!(h3, ["Z/3", "0", "0"]);
    }

    #[test]
    fn express_rejects_non_cocycles_and_inverts_generators() {
        let c = rp2();
        let id = complex_id(&c);
        let g = Arc::new(cohomology_group(&c, 1, 2).unwrap());
        let gen = &g.generators().unwrap()[0];
        assert_eq!(g.express(gen).unwrap(), ints(&[1]));
        let h1 = cohomology_group(&c, 1, 0).unwrap();
        let bad = Cochain::from_entries(id, 1, 0, [(0, Int::ONE)]);
        assert_eq!(h1.express(&bad).unwrap_err().kind(), "not-cocycle");
        let cls = CohomologyClass::generator(g.clone(), 0).unwrap();
        assert_eq!(cls.order(), Order::Finite(Int::from(2)));
        assert!(cls.add(&cls).unwrap().is_zero());
    }
}

//! Finitely generated abelian groups presented as `Z^f ⊕ Z/d_1 ⊕ ... ⊕ Z/d_k`.

use std::fmt;

use serde::Serialize;

use super::smith::{decompose, Tracking};
use super::sparse::{SparseIntMatrix, SparseVec};
use super::Int;
use crate::error::{Error, Result};

/// Order of a group element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Order {
    Finite(Int),
    Infinite,
}

impl Order {
    pub fn finite(&self) -> Option<&Int> {
        match self {
            Order::Finite(k) => Some(k),
            Order::Infinite => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{k}"),
            Order::Infinite => write!(f, "infinite"),
        }
    }
}

/// A quotient `Z^ambient / R` in canonical form.
///
/// Canonical coordinates list the free part first, then one residue per torsion
/// coefficient. `coordinates` sends an ambient vector to unreduced canonical
/// coordinates; `generators` sends canonical basis vectors back to ambient
/// representatives, and `coordinates * generators = I`.
#[derive(Clone, Debug)]
pub struct AbelianGroupPresentation {
    free_rank: usize,
    torsion: Vec<Int>,
    coordinates: SparseIntMatrix,
    generators: SparseIntMatrix,
}

impl AbelianGroupPresentation {
    pub fn new(
        free_rank: usize,
        torsion: Vec<Int>,
        coordinates: SparseIntMatrix,
        generators: SparseIntMatrix,
    ) -> Result<Self> {
        let n = free_rank + torsion.len();
        if coordinates.rows() != n || generators.cols() != n || coordinates.cols() != generators.rows() {
            return Err(Error::Shape("presentation maps do not match the group shape".into()));
        }
        if torsion.iter().any(|d| *d < Int::from(2)) || torsion.windows(2).any(|w| !w[0].divides(&w[1])) {
            return Err(Error::Shape(format!("torsion {torsion:?} is not a divisibility chain")));
        }
        Ok(AbelianGroupPresentation { free_rank, torsion, coordinates, generators })
    }

    /// The trivial group on a zero-dimensional ambient lattice.
    pub fn trivial() -> Self {
        AbelianGroupPresentation {
            free_rank: 0,
            torsion: vec![],
            coordinates: SparseIntMatrix::zero(0, 0),
            generators: SparseIntMatrix::zero(0, 0),
        }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[Int] {
        &self.torsion
    }

    /// Number of canonical coordinates.
    pub fn ngens(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.coordinates.cols()
    }

    pub fn is_trivial(&self) -> bool {
        self.ngens() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Group order, if finite.
    pub fn order(&self) -> Option<Int> {
        self.is_finite().then(|| self.torsion.iter().fold(Int::ONE, |acc, d| &acc * d))
    }

    pub fn coordinate_map(&self) -> &SparseIntMatrix {
        &self.coordinates
    }

    pub fn generator_map(&self) -> &SparseIntMatrix {
        &self.generators
    }

    /// Reduces canonical coordinates into normal form.
    pub fn reduce(&self, coords: &[Int]) -> Vec<Int> {
        coords
            .iter()
            .enumerate()
            .map(|(i, c)| if i < self.free_rank { c.clone() } else { c.modulo(&self.torsion[i - self.free_rank]) })
            .collect()
    }

    /// Canonical coordinates of an ambient vector.
    pub fn express(&self, ambient: &[Int]) -> Result<Vec<Int>> {
        Ok(self.reduce(&self.coordinates.mul_vec(ambient)?))
    }

    /// Ambient representative of canonical coordinates.
    pub fn lift(&self, coords: &[Int]) -> Result<Vec<Int>> {
        self.generators.mul_vec(coords)
    }

    pub fn check_shape(&self, coords: &[Int]) -> Result<()> {
        if coords.len() != self.ngens() {
            return Err(Error::Shape(format!("{} coordinates for a group with {} generators", coords.len(), self.ngens())));
        }
        Ok(())
    }

    pub fn add(&self, a: &[Int], b: &[Int]) -> Vec<Int> {
        self.reduce(&a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>())
    }

    pub fn scale(&self, k: &Int, a: &[Int]) -> Vec<Int> {
        self.reduce(&a.iter().map(|x| k * x).collect::<Vec<_>>())
    }

    pub fn is_zero(&self, coords: &[Int]) -> bool {
        self.reduce(coords).iter().all(Int::is_zero)
    }

    /// Smallest `k >= 1` with `k * c = 0`.
    pub fn element_order(&self, coords: &[Int]) -> Result<Order> {
        self.check_shape(coords)?;
        let c = self.reduce(coords);
        if c[..self.free_rank].iter().any(|x| !x.is_zero()) {
            return Ok(Order::Infinite);
        }
        let mut order = Int::ONE;
        for (x, d) in c[self.free_rank..].iter().zip(&self.torsion) {
            let local = d.div_exact(&x.gcd(d)).expect("gcd divides");
            order = order.lcm(&local);
        }
        Ok(Order::Finite(order))
    }

    /// Quotient by the subgroup generated by `gens` (canonical coordinates).
    /// The returned presentation's ambient lattice is this group's canonical
    /// coordinate space, so its `express` is the projection.
    pub fn quotient(&self, gens: &[Vec<Int>]) -> Result<AbelianGroupPresentation> {
        let n = self.ngens();
        let mut columns: Vec<SparseVec> = Vec::new();
        for (i, d) in self.torsion.iter().enumerate() {
            columns.push(vec![((self.free_rank + i) as u32, d.clone())]);
        }
        for g in gens {
            self.check_shape(g)?;
            columns.push(
                g.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i as u32, x.clone())).collect(),
            );
        }
        Ok(cokernel(&SparseIntMatrix::from_sorted_columns(n, columns)))
    }

    pub fn describe(&self) -> String {
        describe_group(self.free_rank, &self.torsion)
    }

    /// `free: [..]; torsion: [..] (mod [..])` rendering of canonical coordinates.
    pub fn format_coords(&self, coords: &[Int]) -> String {
        let c = self.reduce(coords);
        let list = |xs: &[Int]| xs.iter().map(Int::to_string).collect::<Vec<_>>().join(",");
        format!(
            "free: [{}]; torsion: [{}] (mod [{}])",
            list(&c[..self.free_rank]),
            list(&c[self.free_rank..]),
            list(&self.torsion)
        )
    }
}

/// `Z`, `Z/4`, `Z^2+Z/2+Z/6`, `0`.
pub fn describe_group(free_rank: usize, torsion: &[Int]) -> String {
    let mut parts = Vec::new();
    match free_rank {
        0 => {}
        1 => parts.push("Z".to_string()),
        r => parts.push(format!("Z^{r}")),
    }
    parts.extend(torsion.iter().map(|d| format!("Z/{d}")));
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

/// Presentation of `Z^rows / colspan(m)`.
pub fn cokernel(m: &SparseIntMatrix) -> AbelianGroupPresentation {
    let s = decompose(m, Tracking::LEFT);
    let left = s.left().expect("tracked");
    let r = s.rank();
    let n = m.rows();
    let tors_idx: Vec<usize> = (0..r).filter(|&t| !s.invariant_factors()[t].is_one()).collect();
    let order: Vec<usize> = (r..n).chain(tors_idx.iter().copied()).collect();
    let coordinates =
        SparseIntMatrix::from_sorted_columns(n, order.iter().map(|&t| left.row(t)).collect()).transpose();
    let generators = SparseIntMatrix::from_sorted_columns(n, order.iter().map(|&t| left.inverse_column(t)).collect());
    let torsion = tors_idx.iter().map(|&t| s.invariant_factors()[t].clone()).collect();
    AbelianGroupPresentation { free_rank: n - r, torsion, coordinates, generators }
}

/// Smallest `k >= 1` with `k * c = 0` in `g`.
pub fn element_order(g: &AbelianGroupPresentation, coords: &[Int]) -> Result<Order> {
    g.element_order(coords)
}

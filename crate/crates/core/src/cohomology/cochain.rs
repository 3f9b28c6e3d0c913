use std::fmt::Write as _;

use rayon::prelude::*;

use crate::complexes::SimplicialSet;
use crate::error::{Error, Result};
use crate::linalg::{Int, SparseVec};

/// A cochain on the nondegenerate simplices of one degree.
///
/// `modulus == 0` means integer coefficients. Stored coefficients are nonzero
/// and, for `modulus > 0`, lie in `1..modulus`. `space` tags the simplicial
/// set (or chain complex) the simplex ids refer to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    space: u64,
    degree: usize,
    modulus: u64,
    coords: SparseVec,
}

fn normalize(x: Int, modulus: u64) -> Int {
    if modulus == 0 {
        x
    } else {
        x.modulo(&Int::from(modulus))
    }
}

impl Cochain {
    pub fn zero(space: u64, degree: usize, modulus: u64) -> Self {
        Cochain { space, degree, modulus, coords: Vec::new() }
    }

    /// Sums repeated ids and reduces coefficients.
    pub fn from_entries(space: u64, degree: usize, modulus: u64, entries: impl IntoIterator<Item = (u32, Int)>) -> Self {
        let mut v: Vec<(u32, Int)> = entries.into_iter().collect();
        v.sort_by_key(|e| e.0);
        let mut coords: SparseVec = Vec::with_capacity(v.len());
        for (i, x) in v {
            match coords.last_mut() {
                Some((j, acc)) if *j == i => *acc += &x,
                _ => coords.push((i, x)),
            }
        }
        let coords = coords
            .into_iter()
            .map(|(i, x)| (i, normalize(x, modulus)))
            .filter(|(_, x)| !x.is_zero())
            .collect();
        Cochain { space, degree, modulus, coords }
    }

    pub fn from_dense(space: u64, degree: usize, modulus: u64, values: &[Int]) -> Self {
        let coords = values
            .iter()
            .enumerate()
            .map(|(i, x)| (i as u32, normalize(x.clone(), modulus)))
            .filter(|(_, x)| !x.is_zero())
            .collect();
        Cochain { space, degree, modulus, coords }
    }

    /// Values on simplices `0..len`.
    pub fn to_dense(&self, len: usize) -> Result<Vec<Int>> {
        let mut out = vec![Int::ZERO; len];
        for (i, x) in &self.coords {
            *out.get_mut(*i as usize)
                .ok_or_else(|| Error::Shape(format!("simplex {i} out of range for a cochain on {len} simplices")))? =
                x.clone();
        }
        Ok(out)
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

    pub fn modulus_int(&self) -> Int {
        Int::from(self.modulus)
    }

    pub fn coords(&self) -> &[(u32, Int)] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, id: u32) -> Int {
        match self.coords.binary_search_by_key(&id, |e| e.0) {
            Ok(k) => self.coords[k].1.clone(),
            Err(_) => Int::ZERO,
        }
    }

    pub fn with_space(mut self, space: u64) -> Self {
        self.space = space;
        self
    }

    fn check_compatible(&self, other: &Cochain) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::Shape(format!("degrees {} and {} differ", self.degree, other.degree)));
        }
        if self.modulus != other.modulus {
            return Err(Error::Modulus(format!("moduli {} and {} differ", self.modulus, other.modulus)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        self.check_compatible(other)?;
        Ok(Self::from_entries(
            self.space,
            self.degree,
            self.modulus,
            self.coords.iter().chain(&other.coords).cloned(),
        ))
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Cochain {
        self.scale(&-Int::ONE)
    }

    pub fn scale(&self, k: &Int) -> Cochain {
        Self::from_entries(self.space, self.degree, self.modulus, self.coords.iter().map(|(i, x)| (*i, k * x)))
    }

    /// Integral representative with coefficients in `0..modulus`.
    pub fn lift(&self) -> Cochain {
        Cochain { modulus: 0, ..self.clone() }
    }

    /// Coefficient change to `Z/m` along reduction: allowed from integers and
    /// from `Z/n` with `m | n`.
    pub fn reduce(&self, m: u64) -> Result<Cochain> {
        if m == 0 || (self.modulus != 0 && self.modulus % m != 0) {
            return Err(Error::Modulus(format!("cannot reduce mod-{} coefficients mod {m}", self.modulus)));
        }
        Ok(Self::from_entries(self.space, self.degree, m, self.coords.iter().cloned()))
    }

    /// Coefficient change along the inclusion `Z/n -> Z/m`, `1 -> m/n`.
    pub fn include(&self, m: u64) -> Result<Cochain> {
        let n = self.modulus;
        if n == 0 || m == 0 || m % n != 0 {
            return Err(Error::Modulus(format!("no inclusion Z/{n} -> Z/{m}")));
        }
        let k = Int::from(m / n);
        Ok(Self::from_entries(self.space, self.degree, m, self.coords.iter().map(|(i, x)| (*i, &k * x))))
    }

    /// Exact division of every coefficient of an integral cochain.
    pub fn div_exact(&self, k: &Int) -> Result<Cochain> {
        if self.modulus != 0 {
            return Err(Error::Modulus("exact division needs integer coefficients".into()));
        }
        let coords = self
            .coords
            .iter()
            .map(|(i, x)| {
                x.div_exact(k)
                    .map(|q| (*i, q))
                    .ok_or_else(|| Error::NotCocycle(format!("coefficient {x} on simplex {i} is not divisible by {k}")))
            })
            .collect::<Result<_>>()?;
        Ok(Cochain { coords, ..self.clone() })
    }

    /// `cochain v1` text.
    pub fn to_text(&self) -> String {
        let mut s = format!("cochain v1\ndegree {} modulus {}\n", self.degree, self.modulus);
        for (i, x) in &self.coords {
            let _ = writeln!(s, "{i} {x}");
        }
        s
    }

    pub fn from_text(text: &str, space: u64) -> Result<Cochain> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next() != Some("cochain v1") {
            return Err(Error::Parse("missing 'cochain v1' header".into()));
        }
        let header = lines.next().unwrap_or("");
        let (degree, modulus) = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["degree", d, "modulus", m] => (
                d.parse().map_err(|_| Error::Parse(format!("bad degree '{d}'")))?,
                m.parse().map_err(|_| Error::Parse(format!("bad modulus '{m}'")))?,
            ),
            _ => return Err(Error::Parse(format!("expected 'degree d modulus m', found '{header}'"))),
        };
        let mut entries = Vec::new();
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [id, x] = parts.as_slice() else {
                return Err(Error::Parse(format!("expected 'simplexId coefficient', found '{line}'")));
            };
            let id: u32 = id.parse().map_err(|_| Error::Parse(format!("bad simplex id '{id}'")))?;
            let x: Int = x.parse().map_err(|_| Error::Parse(format!("bad coefficient '{x}'")))?;
            entries.push((id, x));
        }
        Ok(Self::from_entries(space, degree, modulus, entries))
    }

    /// Checks that the cochain belongs to `x` and its ids are in range.
    pub fn check_on(&self, x: &SimplicialSet) -> Result<()> {
        if self.space != x.space_id() {
            return Err(Error::SpaceMismatch);
        }
        if let Some((i, _)) = self.coords.last() {
            if *i as usize >= x.count(self.degree) {
                return Err(Error::Shape(format!("simplex {i} does not exist in degree {}", self.degree)));
            }
        }
        Ok(())
    }
}

/// `(δz)(σ) = Σ_i (-1)^i z(d_i σ)` on the nondegenerate simplices of `x`.
///
/// On a product materialized below the target degree the coboundary is
/// undefined and this fails with `Unsupported`.
pub fn coboundary(x: &SimplicialSet, z: &Cochain) -> Result<Cochain> {
    z.check_on(x)?;
    let d = z.degree() + 1;
    if d > x.dim() {
        if x.is_truncated() {
            return Err(Error::Unsupported(format!("'{}' is materialized only through dimension {}", x.label(), x.dim())));
        }
        return Ok(Cochain::zero(z.space(), d, z.modulus()));
    }
    let dense = z.to_dense(x.count(d - 1))?;
    let values: Vec<Int> = (0..x.count(d) as u32)
        .into_par_iter()
        .map(|id| {
            let mut acc = Int::ZERO;
            for (i, f) in x.faces(d, id).iter().enumerate() {
                if !f.is_degenerate() {
                    let v = &dense[f.id as usize];
                    if !v.is_zero() {
                        if i % 2 == 0 {
                            acc += v;
                        } else {
                            acc -= v;
                        }
                    }
                }
            }
            acc
        })
        .collect();
    Ok(Cochain::from_dense(z.space(), d, z.modulus(), &values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_reduces() {
        let a = Cochain::from_entries(1, 2, 4, [(3, Int::from(5)), (1, Int::from(2)), (3, Int::from(-1))]);
        assert_eq!(a.coords(), &[(1, Int::from(2))]);
        let b = a.add(&a).unwrap();
        assert!(b.is_zero());
        assert_eq!(a.include(8).unwrap().get(1), Int::from(4));
        assert_eq!(a.reduce(2).unwrap().get(1), Int::ZERO);
        assert!(a.reduce(3).is_err());
    }

    #[test]
    fn text_round_trip() {
        let a = Cochain::from_entries(7, 3, 0, [(0, Int::from(-2)), (9, Int::from(4))]);
        let t = a.to_text();
        assert_eq!(t, "cochain v1\ndegree 3 modulus 0\n0 -2\n9 4\n");
        assert_eq!(Cochain::from_text(&t, 7).unwrap(), a);
        assert!(Cochain::from_text("cochain v1\ndegree x modulus 0\n", 0).is_err());
    }
}

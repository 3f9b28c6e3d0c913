//! Canonical references to possibly degenerate simplices.
//!
//! A reference `(id, dim, mask)` denotes `η^* y` where `y` is the nondegenerate
//! simplex `id` of dimension `dim - popcount(mask)` and `η: [dim] → [base]` is
//! the surjection with `η(i) = η(i + 1)` exactly for the bits `i` of `mask`.
//! The set bits are the indices of the canonical word `s_{j_1} … s_{j_k}`,
//! `j_1 > … > j_k`.

use std::fmt;

/// Largest supported simplex dimension.
pub const MAX_DIM: usize = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplexRef {
    pub dim: u16,
    pub id: u32,
    pub mask: u16,
}

impl SimplexRef {
    pub fn nondegenerate(dim: usize, id: u32) -> Self {
        SimplexRef { dim: dim as u16, id, mask: 0 }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn base_dim(&self) -> usize {
        self.dim as usize - self.mask.count_ones() as usize
    }

    pub fn is_degenerate(&self) -> bool {
        self.mask != 0
    }

    /// Degeneracy indices in canonical decreasing order.
    pub fn word(&self) -> Vec<usize> {
        (0..16).rev().filter(|i| self.mask & (1 << i) != 0).collect()
    }

    pub fn from_word(dim: usize, id: u32, word: &[usize]) -> Option<Self> {
        if word.windows(2).any(|w| w[0] <= w[1]) || word.iter().any(|&j| j + 1 > dim) {
            return None;
        }
        let mask = word.iter().fold(0u16, |m, &j| m | (1 << j));
        Some(SimplexRef { dim: dim as u16, id, mask })
    }

    /// Packs into a single integer, ordered like the tuple `(dim, id, mask)`.
    pub fn pack(&self) -> u64 {
        ((self.dim as u64) << 48) | ((self.id as u64) << 16) | self.mask as u64
    }

    pub fn unpack(x: u64) -> Self {
        SimplexRef { dim: (x >> 48) as u16, id: (x >> 16) as u32, mask: x as u16 }
    }
}

impl fmt::Display for SimplexRef {
    /// `simplexId:word`, the face syntax of the text format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word: Vec<String> = self.word().iter().map(usize::to_string).collect();
        write!(f, "{}:{}", self.id, word.join(","))
    }
}

/// Values `η(0), …, η(dim)` of the surjection encoded by `mask`.
pub fn surjection_values(dim: usize, mask: u16) -> Vec<usize> {
    let mut out = Vec::with_capacity(dim + 1);
    let mut v = 0;
    out.push(0);
    for i in 0..dim {
        if mask & (1 << i) == 0 {
            v += 1;
        }
        out.push(v);
    }
    out
}

/// Mask of a monotone surjection given by its values.
pub fn mask_of_values(values: &[usize]) -> u16 {
    let mut mask = 0u16;
    for i in 0..values.len().saturating_sub(1) {
        if values[i] == values[i + 1] {
            mask |= 1 << i;
        }
    }
    mask
}

/// Outcome of composing a degeneracy operator with the coface `δ_i`.
pub enum FaceSplit {
    /// `η ∘ δ_i` is still surjective: the face is degenerate on the same base.
    Degenerate(u16),
    /// `η ∘ δ_i = δ_v ∘ η'`: take the `v`-th face of the base, then apply `η'`.
    Through { v: usize, mask: u16 },
}

/// Factors `η ∘ δ_i` for the surjection `η` encoded by `(dim, mask)`.
pub fn split_face(dim: usize, mask: u16, i: usize) -> FaceSplit {
    let vals = surjection_values(dim, mask);
    let v = vals[i];
    let alone = (i == 0 || vals[i - 1] != v) && (i == dim || vals[i + 1] != v);
    let mut rest: Vec<usize> = vals.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, &x)| x).collect();
    if alone {
        for x in rest.iter_mut() {
            if *x > v {
                *x -= 1;
            }
        }
        FaceSplit::Through { v, mask: mask_of_values(&rest) }
    } else {
        FaceSplit::Degenerate(mask_of_values(&rest))
    }
}

/// Mask of `θ ∘ η'` where `θ` has `inner` on `[inner_dim]` and `η'` has `outer` on `[outer_dim]`.
pub fn compose_masks(outer_dim: usize, outer: u16, inner_dim: usize, inner: u16) -> u16 {
    let eta = surjection_values(outer_dim, outer);
    let theta = surjection_values(inner_dim, inner);
    let vals: Vec<usize> = eta.iter().map(|&k| theta[k]).collect();
    mask_of_values(&vals)
}

/// Face of `η^* y` through the stored faces of `y`; `base_face(v)` must return
/// the `v`-th face of the nondegenerate base.
pub fn face_of_ref(r: SimplexRef, i: usize, base_face: impl Fn(usize) -> SimplexRef) -> SimplexRef {
    let d = r.dim();
    debug_assert!(d >= 1 && i <= d);
    if r.mask == 0 {
        return base_face(i);
    }
    match split_face(d, r.mask, i) {
        FaceSplit::Degenerate(mask) => SimplexRef { dim: r.dim - 1, id: r.id, mask },
        FaceSplit::Through { v, mask } => {
            let y = base_face(v);
            let composed = compose_masks(d - 1, mask, y.dim(), y.mask);
            SimplexRef { dim: r.dim - 1, id: y.id, mask: composed }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masks_round_trip_through_values() {
        for dim in 0..6 {
            for mask in 0..(1u16 << dim) {
                assert_eq!(mask_of_values(&surjection_values(dim, mask)), mask);
            }
        }
    }

    #[test]
    fn words_are_decreasing() {
        let r = SimplexRef::from_word(4, 7, &[3, 1]).unwrap();
        assert_eq!(r.word(), vec![3, 1]);
        assert_eq!(r.to_string(), "7:3,1");
        assert!(SimplexRef::from_word(4, 7, &[1, 3]).is_none());
        assert_eq!(SimplexRef::unpack(r.pack()), r);
    }

    #[test]
    fn faces_of_degenerate_edges() {
        // s_0 v for a vertex v: both faces are v.
        let r = SimplexRef { dim: 1, id: 5, mask: 1 };
        let base = |_: usize| -> SimplexRef { unreachable!() };
        assert_eq!(face_of_ref(r, 0, base), SimplexRef::nondegenerate(0, 5));
        assert_eq!(face_of_ref(r, 1, base), SimplexRef::nondegenerate(0, 5));
    }
}

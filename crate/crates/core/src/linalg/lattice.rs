//! Column-echelon bases of integer column lattices.

use super::sparse::{axpy, SparseIntMatrix, SparseVec};
use super::Int;

/// A basis of the lattice spanned by the columns of `m`, in echelon form:
/// the last nonzero rows of the basis columns are distinct.
///
/// Each column is reduced against the basis by its last entry; when the basis
/// pivot does not divide the incoming one, the pair is replaced by a unimodular
/// combination carrying their gcd. Only the incoming column fills in, so wide
/// matrices of small rank are handled without touching the full row space.
pub fn column_lattice_basis(m: &SparseIntMatrix) -> SparseIntMatrix {
    let mut basis: Vec<SparseVec> = Vec::new();
    let mut pivot_of: Vec<Option<u32>> = vec![None; m.rows()];
    for c in 0..m.cols() {
        let mut v = m.column_vec(c);
        while let Some((low, vl)) = v.last().cloned() {
            let Some(b) = pivot_of[low as usize] else {
                pivot_of[low as usize] = Some(basis.len() as u32);
                basis.push(v);
                break;
            };
            let col = &basis[b as usize];
            let bl = col.last().expect("basis columns are nonzero").1.clone();
            if let Some(q) = vl.div_exact(&bl) {
                v = axpy(&v, &-q, col);
            } else {
                let (g, s, t) = bl.extended_gcd(&vl);
                let new_b = axpy(&scale(col, &s), &t, &v);
                let vg = vl.div_exact(&g).expect("gcd divides");
                let bg = bl.div_exact(&g).expect("gcd divides");
                v = axpy(&scale(col, &vg), &-bg, &v);
                basis[b as usize] = new_b;
            }
        }
    }
    SparseIntMatrix::from_sorted_columns(m.rows(), basis)
}

fn scale(v: &SparseVec, k: &Int) -> SparseVec {
    v.iter().map(|(i, x)| (*i, k * x)).filter(|(_, x)| !x.is_zero()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::smith_normal_form;

    #[test]
    fn same_invariant_factors() {
        let m = SparseIntMatrix::from_i64(&[&[2, 4, 6, 0], &[6, 8, 10, 3], &[0, 0, 0, 9]]);
        let b = column_lattice_basis(&m);
        assert!(b.cols() <= 3);
        assert_eq!(smith_normal_form(&m).invariant_factors(), smith_normal_form(&b).invariant_factors());
    }

    #[test]
    fn gcd_step() {
        let m = SparseIntMatrix::from_i64(&[&[0, 0], &[4, 6]]);
        let b = column_lattice_basis(&m);
        assert_eq!(b.cols(), 1);
        assert_eq!(b.get(1, 0).abs(), Int::from(2));
    }
}

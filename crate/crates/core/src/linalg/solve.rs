use super::smith::{decompose, Tracking};
use super::sparse::SparseIntMatrix;
use super::Int;
use crate::error::{Error, Result};

/// Solves `m * x = b` over the integers (`modulus == 0`) or modulo `modulus`.
///
/// Inconsistency is reported as [`Error::NoSolution`], certified by the Smith
/// form: some transformed coordinate of `b` is not divisible by its invariant
/// factor, or is nonzero beyond the rank.
pub fn solve_linear(m: &SparseIntMatrix, b: &[Int], modulus: &Int) -> Result<Vec<Int>> {
    if b.len() != m.rows() {
        return Err(Error::Shape(format!("right-hand side of length {} for {} rows", b.len(), m.rows())));
    }
    if modulus.is_negative() {
        return Err(Error::Modulus(format!("negative modulus {modulus}")));
    }
    let s = decompose(m, Tracking::ALL);
    let c = s.left()?.apply(b)?;
    let r = s.rank();
    let mut y = vec![Int::ZERO; m.cols()];
    if modulus.is_zero() {
        for (t, d) in s.invariant_factors().iter().enumerate() {
            y[t] = c[t].div_exact(d).ok_or(Error::NoSolution)?;
        }
        if c[r..].iter().any(|x| !x.is_zero()) {
            return Err(Error::NoSolution);
        }
        return s.v()?.mul_vec(&y);
    }
    for (t, d) in s.invariant_factors().iter().enumerate() {
        let g = d.gcd(modulus);
        let ct = c[t].modulo(modulus);
        let reduced = ct.div_exact(&g).ok_or(Error::NoSolution)?;
        let m_g = modulus.div_exact(&g).unwrap();
        let d_g = d.div_exact(&g).unwrap();
        y[t] = if m_g.is_one() {
            Int::ZERO
        } else {
            let inv = d_g.mod_inverse(&m_g).expect("coprime after dividing by the gcd");
            (&reduced * &inv).modulo(&m_g)
        };
    }
    if c[r..].iter().any(|x| !x.modulo(modulus).is_zero()) {
        return Err(Error::NoSolution);
    }
    Ok(s.v()?.mul_vec(&y)?.iter().map(|x| x.modulo(modulus)).collect())
}

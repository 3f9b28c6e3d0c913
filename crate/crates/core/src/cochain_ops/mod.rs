//! Cochain-level operations: cup and cup-1 products, Bocksteins, coefficient
//! changes, the Pontryagin square and `Q`.

use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use crate::cohomology::{coboundary, BackendRegistry, Cochain, CohomologyBackend, CohomologyClass, CohomologyGroup, GroupCache};
use crate::complexes::{normalized_chain_complex, ChainComplex, SimplexRef, SimplicialSet};
use crate::error::{Error, Result};
use crate::linalg::Int;

/// A space with its chain complex and memoized cohomology groups.
pub struct OperationContext {
    space: Arc<SimplicialSet>,
    complex: OnceLock<ChainComplex>,
    backend: Arc<dyn CohomologyBackend>,
}

impl OperationContext {
    /// Uses the `auto` backend.
    pub fn new(space: Arc<SimplicialSet>) -> Result<Self> {
        Self::with_backend(space, "auto")
    }

    pub fn with_backend(space: Arc<SimplicialSet>, backend: &str) -> Result<Self> {
        let backend = BackendRegistry::standard().select(backend, &space)?;
        Ok(OperationContext { space, complex: OnceLock::new(), backend })
    }

    pub fn space(&self) -> &Arc<SimplicialSet> {
        &self.space
    }

    pub fn space_id(&self) -> u64 {
        self.space.space_id()
    }

    pub fn backend_name(&self) -> &'static str {
        self.backend.name()
    }

    /// The normalized chain complex, built on first use.
    pub fn complex(&self) -> &ChainComplex {
        self.complex.get_or_init(|| normalized_chain_complex(&self.space))
    }

    pub fn group(&self, degree: usize, modulus: u64) -> Result<Arc<CohomologyGroup>> {
        GroupCache::global().get_or_compute(self.backend.as_ref(), &self.space, degree, modulus)
    }

    pub fn class_of(&self, z: &Cochain) -> Result<CohomologyClass> {
        CohomologyClass::of(self.group(z.degree(), z.modulus())?, z)
    }

    pub fn class(&self, degree: usize, modulus: u64, coords: &[Int]) -> Result<CohomologyClass> {
        CohomologyClass::new(self.group(degree, modulus)?, coords)
    }

    pub fn coboundary(&self, z: &Cochain) -> Result<Cochain> {
        coboundary(&self.space, z)
    }

    /// Zero cochain of degree `d`, or an error when `d` lies in the
    /// unmaterialized range of a truncated model.
    fn target(&self, d: usize, modulus: u64) -> Result<Option<Cochain>> {
        if d <= self.space.dim() {
            return Ok(None);
        }
        if d <= self.space.nominal_dim() {
            return Err(Error::Unsupported(format!(
                "'{}' is materialized only through dimension {}",
                self.space.label(),
                self.space.dim()
            )));
        }
        Ok(Some(Cochain::zero(self.space_id(), d, modulus)))
    }

    fn check(&self, z: &Cochain) -> Result<()> {
        z.check_on(&self.space)
    }
}

/// Coefficient ring of a product of cochains with moduli `a` and `b`.
fn product_modulus(a: u64, b: u64) -> Result<u64> {
    match (a, b) {
        (0, m) | (m, 0) => Ok(m),
        (m, k) if m == k => Ok(m),
        _ => Err(Error::Modulus(format!("cannot multiply mod-{a} and mod-{b} cochains"))),
    }
}

/// Evaluates `f(σ)` on every nondegenerate simplex of degree `d`.
fn evaluate(x: &SimplicialSet, d: usize, f: impl Fn(SimplexRef) -> Int + Sync) -> Vec<Int> {
    (0..x.count(d) as u32).into_par_iter().map(|id| f(SimplexRef::nondegenerate(d, id))).collect()
}

fn value(dense: &[Int], r: SimplexRef) -> &Int {
    if r.is_degenerate() {
        &Int::ZERO
    } else {
        &dense[r.id as usize]
    }
}

/// Alexander–Whitney cup product `(x ⌣ y)(σ) = x(σ|[0..p]) · y(σ|[p..p+q])`.
/// An integral factor acts on a mod-`m` one through its reduction.
pub fn cup(ctx: &OperationContext, x: &Cochain, y: &Cochain) -> Result<Cochain> {
    ctx.check(x)?;
    ctx.check(y)?;
    let m = product_modulus(x.modulus(), y.modulus())?;
    let (p, q) = (x.degree(), y.degree());
    if let Some(z) = ctx.target(p + q, m)? {
        return Ok(z);
    }
    let s = &ctx.space;
    let dx = x.to_dense(s.count(p))?;
    let dy = y.to_dense(s.count(q))?;
    let values = evaluate(s, p + q, |sigma| {
        let a = value(&dx, s.interval(sigma, 0, p));
        if a.is_zero() {
            return Int::ZERO;
        }
        a * value(&dy, s.interval(sigma, p, p + q))
    });
    Ok(Cochain::from_dense(ctx.space_id(), p + q, m, &values))
}

/// Steenrod's cup-1 product. With `n = p + q - 1`,
///
/// `(x ⌣₁ y)(σ) = Σ_{i<p} (-1)^{(p-i)(q+1)} x(σ|[0..i] ∪ [i+q..n]) · y(σ|[i..i+q])`.
///
/// For cocycles, `δ(x ⌣₁ y) = (-1)^{p+q+1} (x ⌣ y - (-1)^{pq} y ⌣ x)` holds
/// with this sign (checked in the test suite). Zero when `p` or `q` is zero.
pub fn cup1(ctx: &OperationContext, x: &Cochain, y: &Cochain) -> Result<Cochain> {
    ctx.check(x)?;
    ctx.check(y)?;
    let m = product_modulus(x.modulus(), y.modulus())?;
    let (p, q) = (x.degree(), y.degree());
    if p == 0 || q == 0 {
        return Ok(Cochain::zero(ctx.space_id(), (p + q).saturating_sub(1), m));
    }
    let n = p + q - 1;
    if let Some(z) = ctx.target(n, m)? {
        return Ok(z);
    }
    let s = &ctx.space;
    let dx = x.to_dense(s.count(p))?;
    let dy = y.to_dense(s.count(q))?;
    let values = evaluate(s, n, |sigma| {
        let mut acc = Int::ZERO;
        for i in 0..p {
            let verts: Vec<usize> = (0..=i).chain(i + q..=n).collect();
            let a = value(&dx, s.restrict(sigma, &verts));
            if a.is_zero() {
                continue;
            }
            let b = value(&dy, s.interval(sigma, i, i + q));
            if b.is_zero() {
                continue;
            }
            let term = a * b;
            if ((p - i) * (q + 1)) % 2 == 0 {
                acc += &term;
            } else {
                acc -= &term;
            }
        }
        acc
    });
    Ok(Cochain::from_dense(ctx.space_id(), n, m, &values))
}

/// `δ(z̃) / n` for the integral lift `z̃` (coefficients in `0..n`) of a mod-`n`
/// cocycle. A failed exact division means `z` was not a cocycle.
pub fn bockstein_cochain(ctx: &OperationContext, z: &Cochain) -> Result<Cochain> {
    ctx.check(z)?;
    let n = z.modulus();
    if n < 2 {
        return Err(Error::Modulus(format!("Bockstein needs a modulus >= 2, got {n}")));
    }
    ctx.coboundary(&z.lift())?.div_exact(&Int::from(n))
}

/// Unreduced Bockstein `β_n: H^i(X; Z/n) -> H^{i+1}(X; Z)`.
pub fn bockstein(ctx: &OperationContext, xi: &CohomologyClass) -> Result<CohomologyClass> {
    let z = xi.representative()?;
    ctx.class_of(&bockstein_cochain(ctx, &z)?)
}

/// Coefficient change to `Z/m`: reduction from `Z` or from `Z/n` with `m | n`,
/// inclusion `Z/n -> Z/m` (`1 -> m/n`) when `n | m`.
pub fn reduce_coeffs_cochain(z: &Cochain, m: u64) -> Result<Cochain> {
    let n = z.modulus();
    if m < 2 {
        return Err(Error::Modulus(format!("target modulus must be >= 2, got {m}")));
    }
    if n == 0 || n % m == 0 {
        z.reduce(m)
    } else if m % n == 0 {
        z.include(m)
    } else {
        Err(Error::Modulus(format!("no coefficient map Z/{n} -> Z/{m}")))
    }
}

pub fn reduce_coeffs(ctx: &OperationContext, c: &CohomologyClass, m: u64) -> Result<CohomologyClass> {
    ctx.class_of(&reduce_coeffs_cochain(&c.representative()?, m)?)
}

/// `z̃ ⌣ z̃ + z̃ ⌣₁ δz̃` mod `4m` for a mod-`2m` 2-cocycle `z`. Since `δz̃`
/// is divisible by `2m`, the sign of the second term does not matter mod `4m`.
pub fn pontryagin_cochain(ctx: &OperationContext, z: &Cochain) -> Result<Cochain> {
    let n = z.modulus();
    if n == 0 || n % 2 != 0 {
        return Err(Error::Modulus(format!("Pontryagin square needs an even modulus, got {n}")));
    }
    if z.degree() != 2 {
        return Err(Error::Shape(format!("Pontryagin square is defined on degree 2, got {}", z.degree())));
    }
    let u = z.lift();
    let du = ctx.coboundary(&u)?;
    let sq = cup(ctx, &u, &u)?.add(&cup1(ctx, &u, &du)?)?;
    sq.reduce(2 * n)
}

/// `P₂: H²(X; Z/2m) -> H⁴(X; Z/4m)`.
pub fn pontryagin_square(ctx: &OperationContext, xi: &CohomologyClass) -> Result<CohomologyClass> {
    ctx.class_of(&pontryagin_cochain(ctx, &xi.representative()?)?)
}

/// Cocycle representing `Q(ξ)`: `β_n(ξ ⌣ ξ)` for odd `n`, `β_{2n}(P₂ ξ)` for even `n`.
pub fn q_cochain(ctx: &OperationContext, z: &Cochain) -> Result<Cochain> {
    let n = z.modulus();
    if n < 2 {
        return Err(Error::Modulus(format!("Q needs a modulus >= 2, got {n}")));
    }
    let square = if n % 2 == 1 { cup(ctx, z, z)? } else { pontryagin_cochain(ctx, z)? };
    bockstein_cochain(ctx, &square)
}

/// `Q(ξ) ∈ H⁵(X; Z)` for `ξ ∈ H²(X; Z/n)`.
pub fn q_class(ctx: &OperationContext, xi: &CohomologyClass) -> Result<CohomologyClass> {
    if xi.degree() != 2 {
        return Err(Error::Shape(format!("Q is defined on degree 2, got {}", xi.degree())));
    }
    ctx.class_of(&q_cochain(ctx, &xi.representative()?)?)
}

/// Pullback of a cochain on factor `i` along the projection of a product.
pub fn pullback_projection(ctx: &OperationContext, i: usize, z: &Cochain) -> Result<Cochain> {
    let p = ctx
        .space
        .product()
        .ok_or_else(|| Error::Unsupported(format!("'{}' is not a product", ctx.space.label())))?;
    let f = p.factors().get(i).ok_or_else(|| Error::Shape(format!("no factor {i}")))?;
    z.check_on(f)?;
    let d = z.degree();
    if let Some(zero) = ctx.target(d, z.modulus())? {
        return Ok(zero);
    }
    let dense = z.to_dense(f.count(d))?;
    let values: Vec<Int> =
        (0..ctx.space.count(d) as u32).into_par_iter().map(|id| value(&dense, p.components(d, id)[i]).clone()).collect();
    Ok(Cochain::from_dense(ctx.space_id(), d, z.modulus(), &values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::build_space;

    fn ctx(spec: &str) -> OperationContext {
        OperationContext::new(Arc::new(build_space(spec).unwrap())).unwrap()
    }

    #[test]
    fn unit_and_zero() {
        let c = ctx("moore:3");
        let one = Cochain::from_entries(c.space_id(), 0, 0, (0..c.space().count(0) as u32).map(|i| (i, Int::ONE)));
        let top = c.space().count(2) as u32 - 1;
        let y = Cochain::from_entries(c.space_id(), 2, 0, [(0, Int::from(2)), (top, Int::ONE)]);
        assert_eq!(cup(&c, &one, &y).unwrap(), y);
        assert_eq!(cup(&c, &y, &one).unwrap(), y);
        let zero = Cochain::zero(c.space_id(), 1, 0);
        assert!(cup(&c, &zero, &y).unwrap().is_zero());
        assert!(cup1(&c, &zero, &y).unwrap().is_zero());
    }

    #[test]
    fn moduli_must_agree() {
        let c = ctx("moore:2");
        let a = Cochain::zero(c.space_id(), 1, 2);
        let b = Cochain::zero(c.space_id(), 1, 3);
        assert_eq!(cup(&c, &a, &b).unwrap_err().kind(), "modulus");
        let other = Cochain::zero(1, 1, 2);
        assert_eq!(cup(&c, &a, &other).unwrap_err().kind(), "space-mismatch");
    }
}

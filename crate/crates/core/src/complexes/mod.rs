//! Finite simplicial sets, space generators and normalized chain complexes.

mod chain;
pub mod generators;
mod model;
mod product;
pub mod registry;
mod simplex;
mod sset;

pub use chain::{normalized_boundary, normalized_chain_complex, ChainComplex, TensorComplex};
pub use generators::{
    circle, circle_min, em_space_2, em_space_2_with, moore_polygon, point, points, suspension, torus, wbar_cyclic,
    wbar_cyclic_with,
};
pub use model::{build as build_model, Budget, SimplicialModel};
pub use product::{disjoint_mask_tuples, product, ProductStructure};
pub use registry::{build_space, SpaceGenerator, SpaceRegistry, SpaceSpec};
pub use simplex::{SimplexRef, MAX_DIM};
pub use sset::{SimplicialSet, VALIDATE_LIMIT};

/// `skeleton(X, d)`.
pub fn skeleton(x: &SimplicialSet, d: usize) -> SimplicialSet {
    x.skeleton(d)
}

//! Exact integer linear algebra: sparse matrices, Smith normal form, linear
//! systems and abelian group presentations.

pub mod cache;
pub mod group;
mod int;
pub mod lattice;
pub mod smith;
pub mod solve;
pub mod sparse;

pub use cache::{decompose_cached, SmithCache};
pub use group::{cokernel, describe_group, element_order, AbelianGroupPresentation, Order};
pub use int::Int;
pub use lattice::column_lattice_basis;
pub use smith::{decompose, smith_normal_form, LeftTransform, RowOp, SmithDecomposition, Tracking};
pub use solve::solve_linear;
pub use sparse::{MatrixDigest, SparseIntMatrix, SparseVec};

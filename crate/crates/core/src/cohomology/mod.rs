//! Cohomology groups with integer or `Z/m` coefficients, their classes, and
//! quotients by subgroups.

pub mod backend;
mod cochain;
mod group;

pub use backend::{
    aw_pullback, shuffle_pullback, shuffles, space_cohomology, BackendRegistry, CohomologyBackend, Direct,
    EilenbergZilber, GroupCache,
};
pub use cochain::{coboundary, Cochain};
pub use group::{
    cohomology_group, complex_id, group_from_boundaries, subgroup_quotient, torsion_class_order, CocycleModel,
    CohomologyClass, CohomologyGroup, Quotient,
};

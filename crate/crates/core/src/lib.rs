pub mod cochain_ops;
pub mod cohomology;
pub mod complexes;
pub mod error;
pub mod linalg;
pub mod period_index;

pub use error::{Error, Result};
pub mod verify;

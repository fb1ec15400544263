//! Exact query-complexity measures, reductions and composition limits for
//! possibly partial Boolean functions.

pub mod boolfn;
pub mod lasvegas;
pub mod limits;
pub mod error;
pub mod measures;
pub mod ratlp;
pub mod reductions;

pub use boolfn::{PartialAssignment, PartialFunction};
pub use error::{Error, Result};

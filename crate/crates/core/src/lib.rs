//! Exact enumeration of Weyl-type conical tessellations, closed-form
//! counts and expectations for their random cones, and Monte Carlo
//! estimators that check the two against each other.

pub mod combinatorics;
pub mod cone;
pub mod error;
pub mod estimators;
pub mod export;
pub mod linalg;
pub mod rng;
pub mod tessellation;

pub use combinatorics::{Family, StirlingKind};
pub use error::{Error, Result};

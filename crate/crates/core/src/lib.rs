//! Quantum marginal problems for Werner and isotropic qudit states:
//! three-party joinability, m-n sharability and a numerical feasibility
//! oracle for general marginal constraints.

pub mod classical;
pub mod cli;
mod convex;
pub mod error;
pub mod feasibility;
pub mod joinability;
pub mod perm;
pub mod random;
pub mod sharability;
pub mod states;
pub mod tensor;

pub use error::{Error, Result};

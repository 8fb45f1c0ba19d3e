//! Quantum speed limits for composite systems.
//!
//! Finite-dimensional states and Hamiltonians ([`qcore`]), exact time
//! evolution and first-orthogonality search ([`dynamics`]), speed-limit
//! bounds for separable and mixed states ([`bounds`]) and closed-form test
//! systems ([`constructions`]). Units have `hbar = 1`.

pub mod bounds;
pub mod constructions;
pub mod dynamics;
pub mod error;
pub mod qcore;
pub mod search;

pub use error::{QslError, Result};

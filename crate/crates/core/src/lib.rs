//! Finite-dimensional models for extensions of nonnegative symmetric
//! operators and Hermitian contractions.

pub mod boundary;
pub mod contractions;
pub mod error;
pub mod forms;
pub mod numeric;
pub mod pairs;
pub mod qfun;
pub mod random;
pub mod relations;

pub use error::{ExtError, Result};
pub use numeric::{CMatrix, CVector, Subspace, TolerancePolicy, C64};

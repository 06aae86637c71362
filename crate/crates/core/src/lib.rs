//! Elliptic dynamical R-matrices of `gl_N` type, their fusion into symmetric
//! and exterior powers of the vector representation, transfer matrices, and
//! the Ruijsenaars difference operators, with numerical checks of the
//! identities relating them.

pub mod error;
pub mod theta;
pub mod tensor;
pub mod rmatrix;
pub mod fusion;
pub mod emodule;
pub mod diffop;
pub mod transfer;
pub mod sampling;
pub mod checks;
pub mod report;
pub mod table;
pub mod cli;

pub use error::{Error, Result};

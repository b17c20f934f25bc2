//! Grows a unitary product ansatz over a Fock sector so that a reduced
//! density matrix of the evolved state approaches a target matrix.

pub mod error;
pub mod fock;
pub mod pool;
pub mod ansatz;
pub mod rdm;
pub mod models;
pub mod anneal;

mod linalg;

pub use error::{Error, Result};

//! Certified hypercyclic-subspace criteria for weighted backward shifts
//! `B_w e_k = w_k e_{k-1}` on sequence spaces.

pub mod certified;
pub mod cli;
pub mod criteria;
pub mod dynamics;
pub mod error;
pub mod spaces;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};

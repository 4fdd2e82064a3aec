//! Exact Weyl symbol calculus for polynomial phase-space symbols, paired with
//! a desk-scale numerical laboratory for spectral asymptotics and index theory.

pub mod error;
pub mod hermite;
pub mod index;
pub mod json;
pub mod linalg;
pub mod matrix_symbol;
pub mod multi_index;
pub mod parametrix;
pub mod rational;
pub mod quadrature;
pub mod spectral;
pub mod sweep;
pub mod symbol;
pub mod threads;
pub mod weights;

pub use error::{Error, Result};

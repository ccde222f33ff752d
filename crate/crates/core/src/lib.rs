//! Exact symbolic kernel for colored non-symmetric DG-operads over a field.
//!
//! Coefficients are exact rationals; homology ranks may be taken over a prime field.
//! Cohomological grading throughout: differentials raise degree by one.

pub mod adjunction;
pub mod barcobar;
pub mod cli;
pub mod coh;
pub mod complex;
pub mod diagram;
pub mod error;
pub mod lin;
pub mod linalg;
pub mod operad;
pub mod presentation;
pub mod tree;
pub mod twocat;

pub use error::{Error, Result};

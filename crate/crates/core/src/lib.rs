//! Construction of 6×6 complex Hadamard matrices by dilating a dephased 3×3
//! unimodular seed block `E(a,b,c,d)`.
//!
//! - [`triplet`]: statistics of three mutually orthogonal rows and the
//!   completion of their last three columns.
//! - [`dilation`]: the construction itself, from the fundamental polynomial
//!   of a seed to the finished matrices.
//! - [`classify`]: Hadamard verification and membership tests for the known
//!   degenerate families.
//! - [`oracle`]: independent cross-checks used by the test suites.

pub mod classify;
pub mod dilation;
pub mod error;
pub mod known;
pub mod matrix;
pub mod oracle;
pub mod triplet;
pub mod types;

#[cfg(test)]
mod testutil;

pub use dilation::{dilate, DilationReport, FoundMatrix, Outcome, Sextuple};
pub use error::{Error, Result};
pub use matrix::{CMat, CMat3, CMat6};
pub use types::{Quadruple, Tolerances, UScalar, C64};

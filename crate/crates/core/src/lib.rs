//! Exact computations in the metric projective geometry of a
//! pseudo-polarity over GF(2^k): regular subspaces, the Grassmannian-type
//! incidence structures built from them, their reconstruction formulas, and
//! a registry of executable checks.
#![no_std]

extern crate alloc;

pub mod algebra;
pub mod error;
pub mod metric;
pub mod oracle;
pub mod projspace;
pub mod reconstruct;
pub mod regular;
pub mod sample;
pub mod structures;
pub mod verify;
pub mod witness;

pub use error::{Error, Result};

//! Arithmetic in GF(2^k) and reduced-echelon linear algebra over it.

mod field;
mod linear;

pub use field::{field_arith, FieldCtx, FieldElem, FieldOp, MODULI};
pub use linear::{lattice, rref, LatticeOp, LatticeValue, Matrix, SubspaceBasis, Vector, MAX_N};

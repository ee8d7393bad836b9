//! Secure distributed Gram matrix multiplication over prime fields, its
//! analog counterpart over the complex numbers, and the supporting
//! exponent design, worker simulation, wire protocol, audit and cost model.

pub mod analog;
pub mod audit;
pub mod cmatrix;
pub mod cost;
pub mod csvio;
pub mod degree;
pub mod engine;
pub mod error;
pub mod exponents;
pub mod field;
pub mod linalg;
pub mod matdot;
pub mod matrix;
pub mod par;
pub mod pool;
pub mod wire;

pub use error::{Error, Result};
pub use field::{Fe, PrimeField, DEFAULT_MODULUS};
pub use matrix::{FieldMatrix, PackedLower};
pub use par::Backend;

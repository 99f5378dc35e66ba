//! Galois-equivariant bilinear complexity of multiplication in finite
//! field extensions.
//!
//! The crate builds symmetric bilinear decompositions of the product map
//! of `GF(q^n)/GF(q)` that commute with the Galois action on a normal
//! basis, together with the elliptic-curve machinery used to construct
//! short decompositions and the point-counting tools used to certify when
//! short decompositions cannot exist.

pub mod construction;
pub mod elliptic;
pub mod equivariant;
pub mod error;
pub mod field;
pub mod group_algebra;
pub mod zeta;

pub use error::{Error, Result};

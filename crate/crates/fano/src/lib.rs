//! Exact-arithmetic experiments on degree-ten Fano manifolds cut from G(2,5).
//!
//! The crate builds random instances `G(2,5) ∩ Q ∩ P(V)` over prime fields, computes the
//! two sextics attached to their quadric systems, and checks the geometry of their conics
//! and deformation spaces by finite linear algebra.

pub mod bott;
pub mod conic;
pub mod deform;
pub mod error;
pub mod field;
pub mod instance;
pub mod matrix;
pub mod poly;
pub mod report;
pub mod rng;
pub mod roots;
pub mod sextic;
pub mod wedge5;

pub use error::{Error, Result};
pub use field::{Field, FieldSpec, Fp, Fp2, Rationals};

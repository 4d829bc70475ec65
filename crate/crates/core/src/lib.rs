//! Exact de Rham complexes of singular symplectic quotients.
//!
//! Linear Hamiltonian actions of tori and finite groups on `ℂⁿ` are reduced
//! at a chosen level; differential forms on the (possibly singular) quotient
//! are modelled as invariant ambient forms whose restriction to the principal
//! stratum of the zero fibre is horizontal, taken modulo those restricting to
//! zero there. Everything symbolic is exact over ℚ; only [`integration`]
//! uses floating point.

pub mod actions;
pub mod error;
pub mod form;
pub mod homotopy;
pub mod induction;
pub mod integration;
pub mod linalg;
pub mod model;
pub mod poly;
pub mod quotient;
pub mod random;
pub mod stratification;

pub use error::{Error, Result};
pub use form::{AngleImage, Form, PolyMap, VectorField};
pub use poly::{q, qr, Layout, Monomial, Poly, Q};

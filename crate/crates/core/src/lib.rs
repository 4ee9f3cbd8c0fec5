//! Generalized Kantorovich liftings of fuzzy relations on finite
//! distributions, together with finite proof certificates for the lifted
//! distances in the theory of interpolative convex algebras.

pub mod cli;
pub mod error;
pub mod fuzzy;
pub mod lifting;
pub mod proofs;
pub mod rational;
pub mod real;
pub mod terms;
pub mod theories;

pub use error::{Error, Result};

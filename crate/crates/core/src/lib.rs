//! Maslov indices, focal points and index forms of geodesics in semi-Riemannian submersions.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod half;
pub mod jacobi_maslov;
pub mod jet;
pub mod linalg;
pub mod scenarios;
pub mod submersion;
pub mod symplectic;
pub mod tolerances;

pub use error::{Error, Result};
pub use half::HalfInteger;
pub use tolerances::Tolerances;

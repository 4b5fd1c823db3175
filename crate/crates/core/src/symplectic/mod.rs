//! Symplectic linear algebra: forms, Lagrangian frames, charts and Maslov indices.

pub mod form;
pub mod lagrangian;
pub mod maslov;

pub use form::{signature, Signature, SymmetricForm};
pub use lagrangian::{
    apply_symplectomorphism, canonical_omega, chart_value, chart_value_with_tol, omega_matrix, LagrangianFrame,
    SymplecticMatrix, FRAME_TOL,
};
pub use maslov::{
    direct_sum_split, maslov_index, maslov_index_with, ChartPiece, LagrangianPath, MaslovComputation, MaslovOptions,
};

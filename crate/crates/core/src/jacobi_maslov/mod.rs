//! Jacobi systems along geodesics: the initial Lagrangian `L_𝒬`, the Maslov index of the
//! evolved path, focal instants, index forms and conjugate-point counts.

pub mod boundary;
pub mod counts;
pub mod focal;
pub mod index_form;
pub mod system;

pub use boundary::{lagrangian_lq, BoundaryData};
pub use counts::{conjugate_counts, ConjugateCounts};
pub use focal::{
    detect_focal_instants, jacobi_space_evaluation, q_maslov_index, FocalInstant, FocalReport, JacobiEvaluation,
};
pub use index_form::{index_form, simpson, verify_index_identity, IndexFormContext, IndexIdentity};
pub use system::JacobiSystem;

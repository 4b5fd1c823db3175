//! Semi-Riemannian submersions: vertical and horizontal projectors, the fundamental tensors
//! `T` and `A`, horizontal lifts of curves and fields, the derived field `D(E)` and
//! second fundamental forms of lifted submanifolds.

pub mod lift;
pub mod spec;
pub mod submanifold;

pub use lift::{
    derived_field, derived_vector, horizontal_lift_curve, horizontal_lift_curve_maximal, lift_field_d_zero,
    lift_geodesic_check, project_curve, project_field, LiftDiagnostics,
};
pub use spec::{
    projectors, second_fundamental_form_distribution, tensor_a, tensor_t, PointSplit, PointTensors,
    SubmersionDiagnostics, SubmersionSpec,
};
pub use submanifold::{lift_submanifold, lifted_tangent_frame, second_fundamental_form_lift, SubmanifoldData};

#[cfg(test)]
mod tests;

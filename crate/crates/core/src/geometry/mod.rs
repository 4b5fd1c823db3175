//! Metric machinery on coordinate patches: Christoffel symbols, curvature, geodesics,
//! trivializations along curves and the symplectic system of the Jacobi equation.

pub mod field;
pub mod frame;
pub mod geodesic;
pub mod jacobi;
pub mod map;
pub mod metric;
pub mod system;

pub use field::{differentiate_samples, FieldAlongCurve};
pub use frame::{connection_form, parallel_transport_frame, FrameField};
pub use geodesic::{integrate_geodesic, integrate_geodesic_maximal, GeodesicPath};
pub use jacobi::jacobi_field_direct;
pub use map::{CoordinateMap, DynMap};
pub use metric::{christoffel, curvature_operator, Christoffel, DerivativeMode, MetricDerivatives, MetricField, Riemann};
pub use system::{
    assemble_symplectic_system, flow, geodesic_system_data, sp_residual, Flow, SampledCoefficients,
    SymplecticSystemData,
};

use super::boundary::{lagrangian_lq, BoundaryData};
use crate::error::{Error, Result};
use crate::geometry::{
    assemble_symplectic_system, geodesic_system_data, parallel_transport_frame, FrameField, Flow, GeodesicPath,
    MetricField,
};
use crate::linalg::{Mat, Vector};
use crate::submersion::SubmanifoldData;
use crate::symplectic::{LagrangianFrame, LagrangianPath};
use crate::tolerances::Tolerances;

/// A geodesic with a trivialization and the flow of its symplectic system.
#[derive(Debug, Clone)]
pub struct JacobiSystem {
    metric: MetricField,
    curve: GeodesicPath,
    frame: FrameField,
    flow: Flow,
    tol: Tolerances,
}

impl JacobiSystem {
    /// Uses the parallel transport of the coordinate basis at `γ(a)` when `frame` is `None`.
    pub fn new(metric: &MetricField, curve: &GeodesicPath, frame: Option<FrameField>, tol: &Tolerances) -> Result<Self> {
        let n = metric.dim();
        if curve.dim() != n {
            return Err(Error::InvalidDimension("curve and metric differ in dimension".into()));
        }
        let frame = match frame {
            Some(f) => f,
            None => parallel_transport_frame(metric, curve, &Mat::identity(n, n))?,
        };
        let data = geodesic_system_data(metric, curve, &frame)?;
        let coeff = assemble_symplectic_system(&data, tol.resid)?;
        let flow = Flow::new(coeff, tol.sympl)?;
        Ok(JacobiSystem {
            metric: metric.clone(),
            curve: curve.clone(),
            frame,
            flow,
            tol: *tol,
        })
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn curve(&self) -> &GeodesicPath {
        &self.curve
    }

    pub fn frame(&self) -> &FrameField {
        &self.frame
    }

    pub fn flow(&self) -> &Flow {
        &self.flow
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn half_dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn grid(&self) -> &[f64] {
        self.curve.grid()
    }

    /// `p(t)` by linear interpolation of the frame samples (exact on the grid).
    pub fn frame_at(&self, t: f64) -> Mat {
        let g = self.grid();
        let i = crate::geometry::geodesic::locate(g, t);
        let s = ((t - g[i]) / (g[i + 1] - g[i])).clamp(0.0, 1.0);
        &self.frame.frames()[i] * (1.0 - s) + &self.frame.frames()[i + 1] * s
    }

    /// Boundary data of `sub` (manifold coordinates at `γ(a)`) in this trivialization.
    pub fn boundary(&self, sub: &SubmanifoldData) -> Result<BoundaryData> {
        let x = self.curve.points()[0].as_slice();
        let g = self.metric.eval(x)?;
        let scale = (1.0 + sub.point.norm()) * 1e-6;
        if (&sub.point - &self.curve.points()[0]).norm() > scale {
            return Err(Error::InvalidBoundaryData("submanifold does not pass through γ(a)".into()));
        }
        BoundaryData::from_submanifold(sub, &self.frame.frames()[0], &g, &self.curve.velocities()[0], self.tol.rank.max(1e-7))
    }

    /// Boundary data of the point `γ(a)`.
    pub fn point_boundary(&self) -> Result<BoundaryData> {
        let p = &self.frame.frames()[0];
        let g = self.metric.eval(self.curve.points()[0].as_slice())?;
        Ok(BoundaryData::point(p.transpose() * g * p))
    }

    /// `ℓ(t) = Φ(t)[L]`.
    pub fn evolve(&self, l: &LagrangianFrame, t: f64) -> Result<LagrangianFrame> {
        let phi = self.flow.at(t)?;
        LagrangianFrame::with_tol(phi * l.columns(), 1e-8)
    }

    /// `ℓ(tᵢ)` at grid samples `from..=to`.
    pub fn lagrangian_path(&self, l: &LagrangianFrame, from: usize, to: usize) -> Result<LagrangianPath> {
        let samples = (from..=to)
            .map(|i| {
                let f = LagrangianFrame::with_tol(&self.flow.samples()[i] * l.columns(), 1e-8)?;
                Ok((self.grid()[i], f))
            })
            .collect::<Result<Vec<_>>>()?;
        LagrangianPath::new(samples)
    }

    /// `ℓ(t)` at the listed instants.
    pub fn lagrangian_path_at(&self, l: &LagrangianFrame, instants: &[f64]) -> Result<LagrangianPath> {
        let samples = instants
            .iter()
            .map(|&t| Ok((t, self.evolve(l, t)?)))
            .collect::<Result<Vec<_>>>()?;
        LagrangianPath::new(samples)
    }

    /// `L_𝒬` for `bd`.
    pub fn lq(&self, bd: &BoundaryData) -> Result<LagrangianFrame> {
        if bd.half_dim() != self.half_dim() {
            return Err(Error::InvalidDimension("boundary data does not match the system".into()));
        }
        lagrangian_lq(bd)
    }

    /// Jacobi field values `J(t) = p(t)·v(t)` for the initial state `(v, α)` on the grid.
    pub fn jacobi_values(&self, state: &Vector) -> Vec<Vector> {
        let n = self.half_dim();
        self.flow
            .samples()
            .iter()
            .zip(self.frame.frames())
            .map(|(phi, p)| p * (phi * state).rows(0, n))
            .collect()
    }
}

use crate::error::{Error, Result};
use crate::geometry::{Christoffel, CoordinateMap, DynMap, MetricField};
use crate::jet::Jet;
use crate::linalg::{null_space, rank, sym_eigen, Mat, Vector};
use std::fmt;
use std::sync::Arc;

/// A semi-Riemannian submersion `π: (M, g) → (B, h)` on coordinate patches.
#[derive(Clone)]
pub struct SubmersionSpec {
    total: MetricField,
    base: MetricField,
    proj: Arc<dyn DynMap>,
    fd_step: f64,
}

impl fmt::Debug for SubmersionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubmersionSpec")
            .field("total", &self.total)
            .field("base", &self.base)
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

/// Pointwise checks of the submersion axioms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubmersionDiagnostics {
    /// Rank of `dπ`.
    pub rank: usize,
    /// Smallest `|λ|/max|λ|` of `g` restricted to the fiber.
    pub fiber_conditioning: f64,
    /// `‖Lᵀ g L − h‖` where `L` is the horizontal lift.
    pub isometry_residual: f64,
}

/// Splitting data of `T_pM` at one point.
#[derive(Debug, Clone)]
pub struct PointSplit {
    pub g: Mat,
    pub dproj: Mat,
    pub vert: Mat,
    pub horiz: Mat,
    /// `L = g⁻¹dπᵀ(dπ g⁻¹ dπᵀ)⁻¹`: base vector ↦ horizontal lift.
    pub lift: Mat,
}

impl SubmersionSpec {
    /// `proj` maps total coordinates to base coordinates.
    pub fn new<P: CoordinateMap + 'static>(total: MetricField, base: MetricField, proj: P) -> Result<Self> {
        if CoordinateMap::input_dim(&proj) != total.dim() || CoordinateMap::output_len(&proj) != base.dim() {
            return Err(Error::InvalidSubmersion("projection dimensions do not match the metrics".into()));
        }
        if base.dim() >= total.dim() {
            return Err(Error::InvalidSubmersion("base must have smaller dimension than total space".into()));
        }
        Ok(SubmersionSpec {
            total,
            base,
            proj: Arc::new(proj),
            fd_step: 1e-5,
        })
    }

    /// Step for central differences of projector fields, relative to `1 + |p|`.
    pub fn with_fd_step(mut self, step: f64) -> Self {
        self.fd_step = step;
        self
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn total(&self) -> &MetricField {
        &self.total
    }

    pub fn base(&self) -> &MetricField {
        &self.base
    }

    pub fn total_dim(&self) -> usize {
        self.total.dim()
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn fiber_dim(&self) -> usize {
        self.total.dim() - self.base.dim()
    }

    pub fn project(&self, p: &[f64]) -> Vector {
        Vector::from_vec(self.proj.eval_f64(p))
    }

    /// `dπ` at `p` (m × n), exact through jets.
    pub fn dproj(&self, p: &[f64]) -> Mat {
        let jets = self.proj.eval_jet(&Jet::seed(p));
        Mat::from_fn(self.base_dim(), self.total_dim(), |i, j| jets[i].d[j])
    }

    /// `π(p)`, `dπ_p u` and `d²π_p(u, u) + dπ_p a`: the base image of a curve's
    /// position, velocity and acceleration.
    pub fn project_jet(&self, p: &[f64], u: &Vector, a: &Vector) -> (Vector, Vector, Vector) {
        let jets = self.proj.eval_jet(&Jet::seed(p));
        let n = self.total_dim();
        let m = self.base_dim();
        let x = Vector::from_fn(m, |i, _| jets[i].v);
        let v = Vector::from_fn(m, |i, _| (0..n).map(|j| jets[i].d[j] * u[j]).sum());
        let acc = Vector::from_fn(m, |i, _| {
            let mut s = 0.0;
            for j in 0..n {
                s += jets[i].d[j] * a[j];
                for k in 0..n {
                    s += jets[i].h[j][k] * u[j] * u[k];
                }
            }
            s
        });
        (x, v, acc)
    }

    /// `∂_u(dπ)` at `p`: the matrix `w ↦ d²π_p(u, w)`.
    pub fn dproj_derivative(&self, p: &[f64], u: &Vector) -> Mat {
        let jets = self.proj.eval_jet(&Jet::seed(p));
        let n = self.total_dim();
        Mat::from_fn(self.base_dim(), n, |i, k| (0..n).map(|j| jets[i].h[j][k] * u[j]).sum())
    }

    pub fn split(&self, p: &[f64]) -> Result<PointSplit> {
        let g = self.total.eval(p)?;
        let dproj = self.dproj(p);
        let ginv = g
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::DegenerateMetric(format!("singular metric at {p:?}")))?;
        let gram = &dproj * &ginv * dproj.transpose();
        let gram_inv = gram.clone().try_inverse().ok_or_else(|| {
            Error::InvalidSubmersion(format!("dπ not of maximal rank or fiber degenerate at {p:?}"))
        })?;
        let lift = &ginv * dproj.transpose() * gram_inv;
        let horiz = &lift * &dproj;
        let vert = Mat::identity(self.total_dim(), self.total_dim()) - &horiz;
        Ok(PointSplit {
            g,
            dproj,
            vert,
            horiz,
            lift,
        })
    }

    /// `(𝒱, ℋ)` at `p`.
    pub fn projectors(&self, p: &[f64]) -> Result<(Mat, Mat)> {
        let s = self.split(p)?;
        Ok((s.vert, s.horiz))
    }

    /// Checks rank, fiber non-degeneracy and horizontal isometry at `p`.
    pub fn diagnose(&self, p: &[f64], tol: f64) -> Result<SubmersionDiagnostics> {
        let g = self.total.eval(p)?;
        let d = self.dproj(p);
        let r = rank(&d, tol);
        if r != self.base_dim() {
            return Err(Error::InvalidSubmersion(format!("dπ has rank {r} at {p:?}")));
        }
        let ker = null_space(&d, tol);
        let (vals, _) = sym_eigen(&(ker.transpose() * &g * &ker));
        let big = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let small = vals.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
        let fiber_conditioning = if big > 0.0 { small / big } else { 0.0 };
        if fiber_conditioning <= tol {
            return Err(Error::InvalidSubmersion(format!("degenerate fiber at {p:?}")));
        }
        let s = self.split(p)?;
        let h = self.base.eval(self.project(p).as_slice())?;
        let isometry_residual = (s.lift.transpose() * &g * &s.lift - h).norm();
        Ok(SubmersionDiagnostics {
            rank: r,
            fiber_conditioning,
            isometry_residual,
        })
    }

    /// Central difference of a matrix field along `u` at `p`.
    pub fn directional<F>(&self, p: &[f64], u: &Vector, f: F) -> Result<Mat>
    where
        F: Fn(&[f64]) -> Result<Mat>,
    {
        let un = u.norm();
        if un == 0.0 {
            let z = f(p)?;
            return Ok(Mat::zeros(z.nrows(), z.ncols()));
        }
        let pn = p.iter().map(|c| c * c).sum::<f64>().sqrt();
        let eps = self.fd_step * (1.0 + pn) / un;
        let plus: Vec<f64> = p.iter().zip(u.iter()).map(|(a, b)| a + eps * b).collect();
        let minus: Vec<f64> = p.iter().zip(u.iter()).map(|(a, b)| a - eps * b).collect();
        Ok((f(&plus)? - f(&minus)?) / (2.0 * eps))
    }

    /// `(∂_u𝒱, ∂_uℋ)` at `p`.
    pub fn projector_derivative(&self, p: &[f64], u: &Vector) -> Result<(Mat, Mat)> {
        let dv = self.directional(p, u, |q| Ok(self.split(q)?.vert))?;
        Ok((dv.clone(), -dv))
    }

    /// `∂_u L` at `p` for the horizontal-lift matrix.
    pub fn lift_derivative(&self, p: &[f64], u: &Vector) -> Result<Mat> {
        self.directional(p, u, |q| Ok(self.split(q)?.lift))
    }

    /// Local tensor calculator at `p`.
    pub fn at(&self, p: &[f64]) -> Result<PointTensors<'_>> {
        Ok(PointTensors {
            spec: self,
            p: p.to_vec(),
            split: self.split(p)?,
            gamma: self.total.christoffel(p)?,
        })
    }

    pub fn tensor_t(&self, p: &[f64], e: &Vector, f: &Vector) -> Result<Vector> {
        self.at(p)?.t(e, f)
    }

    pub fn tensor_a(&self, p: &[f64], e: &Vector, f: &Vector) -> Result<Vector> {
        self.at(p)?.a(e, f)
    }

    /// `𝒮^ℋ(v, w) = A_v(w) + T_v(w)` for horizontal `w`.
    pub fn second_fundamental_form_distribution(&self, p: &[f64], v: &Vector, w: &Vector, tol: f64) -> Result<Vector> {
        let at = self.at(p)?;
        if (&at.split.vert * w).norm() > tol * (1.0 + w.norm()) {
            return Err(Error::InvalidArgument("second argument is not horizontal".into()));
        }
        Ok(at.a(v, w)? + at.t(v, w)?)
    }
}

/// Christoffel symbols and projectors at one point, for the fundamental tensors.
pub struct PointTensors<'a> {
    spec: &'a SubmersionSpec,
    p: Vec<f64>,
    pub split: PointSplit,
    pub gamma: Christoffel,
}

impl PointTensors<'_> {
    pub fn point(&self) -> &[f64] {
        &self.p
    }

    pub fn vert(&self, u: &Vector) -> Vector {
        &self.split.vert * u
    }

    pub fn horiz(&self, u: &Vector) -> Vector {
        &self.split.horiz * u
    }

    pub fn inner(&self, u: &Vector, w: &Vector) -> f64 {
        (u.transpose() * &self.split.g * w)[(0, 0)]
    }

    /// `∇_x(𝒱F)` and `∇_x(ℋF)` with `F` extended by constant coordinates.
    fn nabla_parts(&self, x: &Vector, f: &Vector) -> Result<(Vector, Vector)> {
        let (dv, dh) = self.spec.projector_derivative(&self.p, x)?;
        let nv = dv * f + self.gamma.contract(x, &self.vert(f));
        let nh = dh * f + self.gamma.contract(x, &self.horiz(f));
        Ok((nv, nh))
    }

    /// `T_E(F) = ℋ∇_{𝒱E}(𝒱F) + 𝒱∇_{𝒱E}(ℋF)`.
    pub fn t(&self, e: &Vector, f: &Vector) -> Result<Vector> {
        let (nv, nh) = self.nabla_parts(&self.vert(e), f)?;
        Ok(self.horiz(&nv) + self.vert(&nh))
    }

    /// `A_E(F) = ℋ∇_{ℋE}(𝒱F) + 𝒱∇_{ℋE}(ℋF)`.
    pub fn a(&self, e: &Vector, f: &Vector) -> Result<Vector> {
        let (nv, nh) = self.nabla_parts(&self.horiz(e), f)?;
        Ok(self.horiz(&nv) + self.vert(&nh))
    }
}

/// `(𝒱, ℋ)` of `spec` at `p`.
pub fn projectors(spec: &SubmersionSpec, p: &[f64]) -> Result<(Mat, Mat)> {
    spec.projectors(p)
}

/// O'Neill's `T_e(f)` at `p`.
pub fn tensor_t(spec: &SubmersionSpec, p: &[f64], e: &Vector, f: &Vector) -> Result<Vector> {
    spec.tensor_t(p, e, f)
}

/// O'Neill's `A_e(f)` at `p`.
pub fn tensor_a(spec: &SubmersionSpec, p: &[f64], e: &Vector, f: &Vector) -> Result<Vector> {
    spec.tensor_a(p, e, f)
}

/// `𝒮^ℋ(v, w)` for the horizontal distribution.
pub fn second_fundamental_form_distribution(spec: &SubmersionSpec, p: &[f64], v: &Vector, w: &Vector, tol: f64) -> Result<Vector> {
    spec.second_fundamental_form_distribution(p, v, w, tol)
}

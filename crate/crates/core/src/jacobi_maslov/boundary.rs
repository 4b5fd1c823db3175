use crate::error::{Error, Result};
use crate::linalg::{null_space, rank, Mat, Vector};
use crate::submersion::SubmanifoldData;
use crate::symplectic::{LagrangianFrame, SymmetricForm};

/// Initial submanifold of a geodesic in trivialization coordinates: a basis of
/// `W = p(a)⁻¹ T_{γ(a)}𝒬` and the form `s(v, w) = g(𝒮(v, γ̇(a)), w)` on it.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    tangent: Mat,
    shape: SymmetricForm,
    gtilde: Mat,
}

impl BoundaryData {
    /// `tangent` in trivialization coordinates, `gtilde = p(a)ᵀ g p(a)`, `gdot_tilde = p(a)⁻¹γ̇(a)`.
    pub fn new(tangent: Mat, shape: Mat, gtilde: Mat, gdot_tilde: &Vector, tol: f64) -> Result<Self> {
        let n = gtilde.nrows();
        let k = tangent.ncols();
        if tangent.nrows() != n || shape.shape() != (k, k) || gdot_tilde.len() != n {
            return Err(Error::InvalidBoundaryData("boundary data shapes are inconsistent".into()));
        }
        if k > n - 1 {
            return Err(Error::InvalidBoundaryData("submanifold must have positive codimension".into()));
        }
        if k > 0 {
            if rank(&tangent, tol) < k {
                return Err(Error::InvalidBoundaryData("tangent frame is not independent".into()));
            }
            let gram = tangent.transpose() * &gtilde * &tangent;
            if rank(&gram, tol) < k {
                return Err(Error::InvalidBoundaryData("metric is degenerate on the tangent space".into()));
            }
            let pair = (tangent.transpose() * &gtilde * gdot_tilde).norm();
            let scale = (1.0 + gdot_tilde.norm()) * (1.0 + tangent.norm()) * (1.0 + gtilde.norm());
            if pair > tol * scale {
                return Err(Error::InvalidBoundaryData(format!(
                    "initial velocity is not orthogonal to the submanifold (pairing {pair:.3e})"
                )));
            }
        }
        if (&shape - shape.transpose()).norm() > tol.max(1e-9) * (1.0 + shape.norm()) {
            return Err(Error::InvalidBoundaryData("shape form is not symmetric".into()));
        }
        Ok(BoundaryData {
            tangent,
            shape: SymmetricForm::new(shape, tol),
            gtilde,
        })
    }

    /// Converts manifold-coordinate data at `γ(a)` through the frame `p(a)`.
    pub fn from_submanifold(sub: &SubmanifoldData, p_a: &Mat, g_a: &Mat, gdot_a: &Vector, tol: f64) -> Result<Self> {
        let lu = p_a.clone().lu();
        let tangent = if sub.dim() == 0 {
            Mat::zeros(p_a.nrows(), 0)
        } else {
            lu.solve(&sub.tangent_frame)
                .ok_or_else(|| Error::InvalidFrame("frame at the initial instant is singular".into()))?
        };
        let gd = lu
            .solve(gdot_a)
            .ok_or_else(|| Error::InvalidFrame("frame at the initial instant is singular".into()))?;
        let gtilde = p_a.transpose() * g_a * p_a;
        BoundaryData::new(tangent, sub.shape.clone(), gtilde, &gd, tol)
    }

    /// The initial submanifold is the point `γ(a)`.
    pub fn point(gtilde: Mat) -> Self {
        let n = gtilde.nrows();
        BoundaryData {
            tangent: Mat::zeros(n, 0),
            shape: SymmetricForm::new(Mat::zeros(0, 0), 0.0),
            gtilde,
        }
    }

    pub fn half_dim(&self) -> usize {
        self.gtilde.nrows()
    }

    pub fn dim(&self) -> usize {
        self.tangent.ncols()
    }

    pub fn tangent(&self) -> &Mat {
        &self.tangent
    }

    pub fn shape(&self) -> &SymmetricForm {
        &self.shape
    }

    pub fn gtilde(&self) -> &Mat {
        &self.gtilde
    }
}

/// `L_𝒬 = {(v, α) : v ∈ W, α|_W = s(v, ·)}`.
pub fn lagrangian_lq(bd: &BoundaryData) -> Result<LagrangianFrame> {
    let n = bd.half_dim();
    let k = bd.dim();
    let b = &bd.tangent;
    let mut cols = Mat::zeros(2 * n, n);
    if k > 0 {
        let gram = b.transpose() * &bd.gtilde * b;
        let inv = gram
            .try_inverse()
            .ok_or_else(|| Error::InvalidBoundaryData("metric is degenerate on the tangent space".into()))?;
        // α = g̃B(Bᵀg̃B)⁻¹ s c satisfies Bᵀα = s c
        let alpha = &bd.gtilde * b * inv * bd.shape.entries();
        cols.view_mut((0, 0), (n, k)).copy_from(b);
        cols.view_mut((n, 0), (n, k)).copy_from(&alpha);
    }
    let ann = null_space(&b.transpose(), 1e-10);
    if ann.ncols() != n - k {
        return Err(Error::InvalidBoundaryData("tangent frame is not independent".into()));
    }
    cols.view_mut((n, k), (n, n - k)).copy_from(&ann);
    LagrangianFrame::with_tol(cols, 1e-8).map_err(|e| Error::InvalidBoundaryData(e.to_string()))
}

use super::spec::SubmersionSpec;
use crate::error::{Error, Result};
use crate::geometry::MetricField;
use crate::linalg::{null_space, rank, symmetrize, Mat, Vector};

/// A non-degenerate submanifold at one point, in manifold coordinates: a tangent basis,
/// a normal direction `N` and the form `s(X, Y) = ⟨𝒮(X, N), Y⟩` on the basis.
#[derive(Debug, Clone)]
pub struct SubmanifoldData {
    pub point: Vector,
    pub tangent_frame: Mat,
    pub normal: Vector,
    pub shape: Mat,
}

impl SubmanifoldData {
    pub fn new(metric: &MetricField, point: Vector, tangent_frame: Mat, normal: Vector, shape: Mat, tol: f64) -> Result<Self> {
        let n = metric.dim();
        let k = tangent_frame.ncols();
        if point.len() != n || normal.len() != n || tangent_frame.nrows() != n || shape.shape() != (k, k) {
            return Err(Error::InvalidBoundaryData("submanifold data shapes are inconsistent".into()));
        }
        if k > 0 && rank(&tangent_frame, tol) < k {
            return Err(Error::InvalidBoundaryData("tangent frame is not independent".into()));
        }
        let g = metric.eval(point.as_slice())?;
        if k > 0 {
            let gram = tangent_frame.transpose() * &g * &tangent_frame;
            if gram.clone().try_inverse().is_none() || rank(&gram, tol) < k {
                return Err(Error::InvalidBoundaryData("metric is degenerate on the tangent space".into()));
            }
            let normal_pairing = (tangent_frame.transpose() * &g * &normal).norm();
            if normal_pairing > tol * (1.0 + normal.norm()) * (1.0 + tangent_frame.norm()) {
                return Err(Error::InvalidBoundaryData("normal direction is not orthogonal to the submanifold".into()));
            }
        }
        if (&shape - shape.transpose()).norm() > tol * (1.0 + shape.norm()) {
            return Err(Error::InvalidBoundaryData("shape form is not symmetric".into()));
        }
        Ok(SubmanifoldData {
            point,
            tangent_frame,
            normal,
            shape: symmetrize(&shape),
        })
    }

    /// A single point with normal direction `normal`.
    pub fn point(point: Vector, normal: Vector) -> Self {
        let n = point.len();
        SubmanifoldData {
            point,
            tangent_frame: Mat::zeros(n, 0),
            normal,
            shape: Mat::zeros(0, 0),
        }
    }

    pub fn dim(&self) -> usize {
        self.tangent_frame.ncols()
    }

    /// `𝒮(x, c·N)` for tangent `x`, as a tangent vector.
    fn shape_vector(&self, g: &Mat, x: &Vector, c: f64, tol: f64) -> Result<Vector> {
        if self.dim() == 0 {
            if x.norm() > tol {
                return Err(Error::InvalidArgument("vector is not tangent to the submanifold".into()));
            }
            return Ok(Vector::zeros(self.point.len()));
        }
        let t = &self.tangent_frame;
        let coeffs = t
            .clone()
            .svd(true, true)
            .solve(x, 1e-14)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        if (t * &coeffs - x).norm() > tol * (1.0 + x.norm()) {
            return Err(Error::InvalidArgument("vector is not tangent to the submanifold".into()));
        }
        let gram = t.transpose() * g * t;
        let sol = gram
            .lu()
            .solve(&(&self.shape * coeffs))
            .ok_or_else(|| Error::InvalidBoundaryData("degenerate tangent metric".into()))?;
        Ok(t * sol * c)
    }
}

/// Tangent basis of `𝒬 = π⁻¹(𝒫)` at `p`: a fiber basis followed by the lifts of `𝒫`'s basis.
pub fn lifted_tangent_frame(spec: &SubmersionSpec, pdata: &SubmanifoldData, p: &[f64], tol: f64) -> Result<Mat> {
    let split = spec.split(p)?;
    let vert = null_space(&split.dproj, tol);
    let hor = &split.lift * &pdata.tangent_frame;
    let cols: Vec<Vector> = vert.column_iter().chain(hor.column_iter()).map(|c| c.into_owned()).collect();
    if cols.is_empty() {
        return Ok(Mat::zeros(spec.total_dim(), 0));
    }
    Ok(Mat::from_columns(&cols))
}

/// `g`-orthogonal projection onto the span of `basis`.
fn tangent_projector(g: &Mat, basis: &Mat) -> Result<Mat> {
    let gram = basis.transpose() * g * basis;
    let inv = gram
        .try_inverse()
        .ok_or_else(|| Error::InvalidBoundaryData("lifted submanifold is degenerate".into()))?;
    Ok(basis * inv * basis.transpose() * g)
}

/// `𝒮^𝒬(v, z)` for `𝒬 = π⁻¹(𝒫)`: `T_V(z) + A_z(V)^t + A_X(z) + 𝒮^𝒫(X, z)` projected to `T𝒬`,
/// where `v = V + X` and `z` is a horizontal normal whose projection is a multiple of `𝒫`'s normal.
pub fn second_fundamental_form_lift(
    spec: &SubmersionSpec,
    pdata: &SubmanifoldData,
    p: &[f64],
    v: &Vector,
    z: &Vector,
    tol: f64,
) -> Result<Vector> {
    let at = spec.at(p)?;
    let g = at.split.g.clone();
    let basis = lifted_tangent_frame(spec, pdata, p, tol)?;
    let scale = 1.0 + z.norm();
    if at.vert(z).norm() > tol * scale {
        return Err(Error::InvalidArgument("normal vector is not horizontal".into()));
    }
    if (basis.transpose() * &g * z).norm() > tol * scale * (1.0 + basis.norm()) {
        return Err(Error::InvalidArgument("vector is not normal to the lifted submanifold".into()));
    }
    let zb = &at.split.dproj * z;
    let nn = pdata.normal.norm_squared();
    let c = if nn > 0.0 { zb.dot(&pdata.normal) / nn } else { 0.0 };
    if (&zb - &pdata.normal * c).norm() > tol * scale {
        return Err(Error::InvalidArgument("normal does not project onto the stored normal direction".into()));
    }
    let vv = at.vert(v);
    let x = at.horiz(v);
    let xb = &at.split.dproj * &x;
    let h = spec.base().eval(spec.project(p).as_slice())?;
    let sp = &at.split.lift * pdata.shape_vector(&h, &xb, c, tol)?;
    let total = at.t(&vv, z)? + at.a(z, &vv)? + at.a(&x, z)? + sp;
    Ok(tangent_projector(&g, &basis)? * total)
}

/// Data of `𝒬 = π⁻¹(𝒫)` at `p` with normal direction `z` (a horizontal lift of `𝒫`'s normal).
pub fn lift_submanifold(spec: &SubmersionSpec, pdata: &SubmanifoldData, p: &[f64], z: &Vector, tol: f64) -> Result<SubmanifoldData> {
    let basis = lifted_tangent_frame(spec, pdata, p, tol)?;
    let g = spec.total().eval(p)?;
    let k = basis.ncols();
    let images = (0..k)
        .map(|j| second_fundamental_form_lift(spec, pdata, p, &basis.column(j).into_owned(), z, tol))
        .collect::<Result<Vec<_>>>()?;
    let shape = Mat::from_fn(k, k, |i, j| (images[i].transpose() * &g * basis.column(j))[(0, 0)]);
    SubmanifoldData::new(spec.total(), Vector::from_column_slice(p), basis, z.clone(), shape, tol.max(1e-6))
}

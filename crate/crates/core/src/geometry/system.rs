use super::field::differentiate_samples;
use super::frame::{connection_form, FrameField};
use super::geodesic::{locate, GeodesicPath};
use super::metric::MetricField;
use crate::error::{Error, Result};
use crate::linalg::{symmetrize, Mat, Vector};
use crate::symplectic::{omega_matrix, SymplecticMatrix};

/// Trivialized data `(g̃, ϖ, R̃)` of a geodesic on a grid.
#[derive(Debug, Clone)]
pub struct SymplecticSystemData {
    pub grid: Vec<f64>,
    pub gtilde: Vec<Mat>,
    pub varpi: Vec<Mat>,
    pub rtilde: Vec<Mat>,
}

impl SymplecticSystemData {
    pub fn half_dim(&self) -> usize {
        self.gtilde[0].nrows()
    }

    /// Largest `‖g̃R̃ − (g̃R̃)ᵀ‖`.
    pub fn curvature_symmetry_residual(&self) -> f64 {
        self.gtilde
            .iter()
            .zip(&self.rtilde)
            .map(|(g, r)| {
                let gr = g * r;
                (&gr - gr.transpose()).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `‖g̃' − (g̃ϖ + ϖᵀg̃)‖` with `g̃'` by finite differences on the grid.
    pub fn compatibility_residual(&self) -> Result<f64> {
        let n = self.half_dim();
        let flat: Vec<Vector> = self.gtilde.iter().map(|g| Vector::from_column_slice(g.as_slice())).collect();
        let d = differentiate_samples(&self.grid, &flat)?;
        Ok(d.iter()
            .enumerate()
            .map(|(i, di)| {
                let dg = Mat::from_column_slice(n, n, di.as_slice());
                let rhs = &self.gtilde[i] * &self.varpi[i] + self.varpi[i].transpose() * &self.gtilde[i];
                (dg - rhs).norm()
            })
            .fold(0.0, f64::max))
    }
}

/// `(g̃, ϖ, R̃)` of `curve` in the trivialization `frame`.
pub fn geodesic_system_data(metric: &MetricField, curve: &GeodesicPath, frame: &FrameField) -> Result<SymplecticSystemData> {
    let varpi = connection_form(frame, metric, curve)?;
    let mut gtilde = Vec::with_capacity(curve.len());
    let mut rtilde = Vec::with_capacity(curve.len());
    for i in 0..curve.len() {
        let x = curve.points()[i].as_slice();
        let p = &frame.frames()[i];
        let g = metric.eval(x)?;
        gtilde.push(p.transpose() * g * p);
        let r = metric.curvature_operator(x, &curve.velocities()[i])?;
        let lu = p.clone().lu();
        rtilde.push(lu.solve(&(r * p)).ok_or_else(|| Error::InvalidFrame("frame is singular".into()))?);
    }
    Ok(SymplecticSystemData {
        grid: curve.grid().to_vec(),
        gtilde,
        varpi,
        rtilde,
    })
}

/// `‖XᵀΩ + ΩX‖`, zero exactly when `X ∈ sp(2n)`.
pub fn sp_residual(x: &Mat) -> f64 {
    let om = omega_matrix(x.nrows() / 2);
    (x.transpose() * &om + &om * x).norm()
}

/// Coefficient samples `X(tᵢ)` with local cubic interpolation. Interpolation is linear in the
/// samples, so values stay in `sp(2n)`.
#[derive(Debug, Clone)]
pub struct SampledCoefficients {
    grid: Vec<f64>,
    xs: Vec<Mat>,
}

impl SampledCoefficients {
    pub fn new(grid: Vec<f64>, xs: Vec<Mat>) -> Result<Self> {
        if grid.len() != xs.len() || grid.len() < 2 {
            return Err(Error::InvalidArgument("coefficient samples do not match grid".into()));
        }
        Ok(SampledCoefficients { grid, xs })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn samples(&self) -> &[Mat] {
        &self.xs
    }

    pub fn half_dim(&self) -> usize {
        self.xs[0].nrows() / 2
    }

    pub fn at(&self, t: f64) -> Mat {
        let n = self.grid.len();
        let m = n.min(4);
        let i = locate(&self.grid, t);
        let j0 = i.saturating_sub(1).min(n - m);
        let nodes = &self.grid[j0..j0 + m];
        let mut out = Mat::zeros(self.xs[0].nrows(), self.xs[0].ncols());
        for k in 0..m {
            let mut w = 1.0;
            for l in 0..m {
                if l != k {
                    w *= (t - nodes[l]) / (nodes[k] - nodes[l]);
                }
            }
            out += &self.xs[j0 + k] * w;
        }
        out
    }
}

/// `X = [[−ϖ, g̃⁻¹], [−g̃R̃, ϖᵀ]]` at each sample. The blocks `g̃⁻¹` and `g̃R̃` are symmetrized
/// after their symmetry has been checked against `tol`.
pub fn assemble_symplectic_system(data: &SymplecticSystemData, tol: f64) -> Result<SampledCoefficients> {
    let n = data.half_dim();
    let mut xs = Vec::with_capacity(data.grid.len());
    for i in 0..data.grid.len() {
        let g = &data.gtilde[i];
        let ginv = g
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::DegenerateMetric(format!("g̃ singular at t = {}", data.grid[i])))?;
        let gr = g * &data.rtilde[i];
        let scale = 1.0 + gr.norm();
        if (&gr - gr.transpose()).norm() > tol * scale {
            return Err(Error::IntegrationFailure(format!(
                "R̃ is not g̃-symmetric at t = {}",
                data.grid[i]
            )));
        }
        let mut x = Mat::zeros(2 * n, 2 * n);
        x.view_mut((0, 0), (n, n)).copy_from(&(-&data.varpi[i]));
        x.view_mut((0, n), (n, n)).copy_from(&symmetrize(&ginv));
        x.view_mut((n, 0), (n, n)).copy_from(&(-symmetrize(&gr)));
        x.view_mut((n, n), (n, n)).copy_from(&data.varpi[i].transpose());
        xs.push(x);
    }
    SampledCoefficients::new(data.grid.clone(), xs)
}

const GL_SQRT3_6: f64 = 0.288_675_134_594_812_9;

/// One two-stage Gauss–Legendre step for `Φ' = X(t)Φ` from `t` to `t + h`, returned as the
/// propagator `S` with `Φ(t + h) = S Φ(t)`.
fn gauss_legendre_step<F: Fn(f64) -> Mat>(x: &F, t: f64, h: f64) -> Result<Mat> {
    let c1 = 0.5 - GL_SQRT3_6;
    let c2 = 0.5 + GL_SQRT3_6;
    let (a11, a12, a21, a22) = (0.25, 0.25 - GL_SQRT3_6, 0.25 + GL_SQRT3_6, 0.25);
    let x1 = x(t + c1 * h);
    let x2 = x(t + c2 * h);
    let d = x1.nrows();
    let id = Mat::identity(d, d);
    let mut big = Mat::zeros(2 * d, 2 * d);
    big.view_mut((0, 0), (d, d)).copy_from(&(&id - &x1 * (h * a11)));
    big.view_mut((0, d), (d, d)).copy_from(&(-&x1 * (h * a12)));
    big.view_mut((d, 0), (d, d)).copy_from(&(-&x2 * (h * a21)));
    big.view_mut((d, d), (d, d)).copy_from(&(&id - &x2 * (h * a22)));
    let mut rhs = Mat::zeros(2 * d, d);
    rhs.view_mut((0, 0), (d, d)).copy_from(&x1);
    rhs.view_mut((d, 0), (d, d)).copy_from(&x2);
    let k = big
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::IntegrationFailure("stage system singular; reduce the step".into()))?;
    let k1 = k.rows(0, d);
    let k2 = k.rows(d, d);
    Ok(id + (k1 + k2) * (0.5 * h))
}

/// Flow of a symplectic system on a grid, evaluable at any instant of its interval.
#[derive(Debug, Clone)]
pub struct Flow {
    coeff: SampledCoefficients,
    phis: Vec<Mat>,
}

impl Flow {
    /// Integrates `Φ' = XΦ`, `Φ(a) = Id` on the coefficient grid. Fails when the symplectic
    /// drift, relative to `max(1, ‖Φ‖²)`, exceeds `100 · sympl_tol`.
    pub fn new(coeff: SampledCoefficients, sympl_tol: f64) -> Result<Self> {
        let grid = coeff.grid.clone();
        let phis = flow(|t| coeff.at(t), &grid, sympl_tol)?
            .into_iter()
            .map(|m| m.into_entries())
            .collect();
        Ok(Flow { coeff, phis })
    }

    pub fn grid(&self) -> &[f64] {
        &self.coeff.grid
    }

    pub fn coefficients(&self) -> &SampledCoefficients {
        &self.coeff
    }

    pub fn samples(&self) -> &[Mat] {
        &self.phis
    }

    pub fn half_dim(&self) -> usize {
        self.coeff.half_dim()
    }

    /// `Φ(t)`, by one extra step from the nearest grid instant below `t`.
    pub fn at(&self, t: f64) -> Result<Mat> {
        let g = &self.coeff.grid;
        let i = locate(g, t);
        let h = t - g[i];
        if h == 0.0 {
            return Ok(self.phis[i].clone());
        }
        let s = gauss_legendre_step(&|s| self.coeff.at(s), g[i], h)?;
        Ok(s * &self.phis[i])
    }

    /// Largest `‖ΦᵀΩΦ − Ω‖_F` over the samples.
    pub fn max_drift(&self) -> f64 {
        let om = omega_matrix(self.half_dim());
        self.phis
            .iter()
            .map(|p| (p.transpose() * &om * p - &om).norm())
            .fold(0.0, f64::max)
    }
}

/// `Φ(tᵢ)` for `Φ' = X(t)Φ`, `Φ(t₀) = Id`, by two-stage Gauss–Legendre steps between grid instants.
pub fn flow<F: Fn(f64) -> Mat>(x: F, grid: &[f64], sympl_tol: f64) -> Result<Vec<SymplecticMatrix>> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    let d = x(grid[0]).nrows();
    if d % 2 != 0 || d == 0 {
        return Err(Error::InvalidDimension("coefficient matrix must be 2n × 2n".into()));
    }
    let om = omega_matrix(d / 2);
    let mut phi = Mat::identity(d, d);
    let mut out = vec![SymplecticMatrix::identity(d / 2)];
    for w in grid.windows(2) {
        phi = gauss_legendre_step(&x, w[0], w[1] - w[0])? * phi;
        let drift = (phi.transpose() * &om * &phi - &om).norm() / phi.norm_squared().max(1.0);
        if drift > 100.0 * sympl_tol {
            return Err(Error::IntegrationFailure(format!(
                "symplectic drift {drift:.3e} at t = {}; use a smaller step",
                w[1]
            )));
        }
        out.push(SymplecticMatrix::new_unchecked(phi.clone())?);
    }
    Ok(out)
}

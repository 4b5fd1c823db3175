use super::map::{CoordinateMap, DynMap};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::{sym_eigen, Mat, Vector};
use std::fmt;
use std::sync::Arc;

/// How partial derivatives of the metric are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMode {
    /// Exact first and second derivatives through jets.
    Exact,
    /// Central differences with step `step · (1 + |x|)`; second derivatives use
    /// a step ten times larger.
    FiniteDifference { step: f64 },
}

/// A semi-Riemannian metric on a coordinate patch.
#[derive(Clone)]
pub struct MetricField {
    dim: usize,
    index: usize,
    map: Arc<dyn DynMap>,
    mode: DerivativeMode,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("dim", &self.dim)
            .field("index", &self.index)
            .field("mode", &self.mode)
            .finish()
    }
}

/// `g`, `∂_k g` and `∂_k ∂_l g` at a point.
#[derive(Debug, Clone)]
pub struct MetricDerivatives {
    pub g: Mat,
    pub dg: Vec<Mat>,
    pub ddg: Vec<Vec<Mat>>,
}

/// Christoffel symbols `Γᵏᵢⱼ`, stored as `data[k][i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(n: usize) -> Self {
        Christoffel {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        let n = self.n;
        self.data[(k * n + i) * n + j] = v;
    }

    /// `Γ(u, w)ᵏ = Γᵏᵢⱼ uⁱ wʲ`.
    pub fn contract(&self, u: &Vector, w: &Vector) -> Vector {
        self.matrix(u) * w
    }

    /// The matrix `(Γᵏᵢⱼ uⁱ)ₖⱼ`, i.e. `w ↦ Γ(u, w)`.
    pub fn matrix(&self, u: &Vector) -> Mat {
        let n = self.n;
        Mat::from_fn(n, n, |k, j| (0..n).map(|i| self.get(k, i, j) * u[i]).sum())
    }
}

/// Riemann tensor components `Rⁱⱼₖₗ` with `R(∂ₖ, ∂ₗ)∂ⱼ = Rⁱⱼₖₗ ∂ᵢ`
/// and `R(X, Y) = [∇_X, ∇_Y] − ∇_[X,Y]`.
#[derive(Debug, Clone)]
pub struct Riemann {
    n: usize,
    data: Vec<f64>,
}

impl Riemann {
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n;
        self.data[((i * n + j) * n + k) * n + l]
    }

    /// `R(u, w)z`.
    pub fn apply(&self, u: &Vector, w: &Vector, z: &Vector) -> Vector {
        let n = self.n;
        Vector::from_fn(n, |i, _| {
            let mut s = 0.0;
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        s += self.get(i, j, k, l) * z[j] * u[k] * w[l];
                    }
                }
            }
            s
        })
    }
}

impl MetricField {
    /// Wraps a formula returning the `n × n` entries row-major. `index` is the expected
    /// number of negative eigenvalues.
    pub fn new<F: CoordinateMap + 'static>(formula: F, index: usize) -> Result<Self> {
        let dim = CoordinateMap::input_dim(&formula);
        if dim == 0 || dim > crate::jet::MAX_VARS {
            return Err(Error::InvalidDimension(format!("metric dimension {dim} unsupported")));
        }
        if CoordinateMap::output_len(&formula) != dim * dim {
            return Err(Error::InvalidDimension("metric formula must return n² entries".into()));
        }
        if index > dim {
            return Err(Error::InvalidDimension("index exceeds dimension".into()));
        }
        Ok(MetricField {
            dim,
            index,
            map: Arc::new(formula),
            mode: DerivativeMode::Exact,
        })
    }

    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().all(|c| c.is_finite()) && self.map.contains(x)
    }

    /// Metric matrix without validation.
    pub fn eval_unchecked(&self, x: &[f64]) -> Mat {
        Mat::from_row_slice(self.dim, self.dim, &self.map.eval_f64(x))
    }

    /// Metric matrix at `x`, checked for non-degeneracy and index.
    pub fn eval(&self, x: &[f64]) -> Result<Mat> {
        self.check_dim(x)?;
        let g = self.eval_unchecked(x);
        self.validate(&g, x)?;
        Ok(g)
    }

    /// `g(u, w)` at `x`.
    pub fn inner(&self, x: &[f64], u: &Vector, w: &Vector) -> Result<f64> {
        Ok((u.transpose() * self.eval(x)? * w)[(0, 0)])
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::InvalidDimension(format!(
                "point has {} coordinates, metric expects {}",
                x.len(),
                self.dim
            )));
        }
        Ok(())
    }

    fn validate(&self, g: &Mat, x: &[f64]) -> Result<()> {
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateMetric(format!("non-finite metric at {x:?}")));
        }
        let (vals, _) = sym_eigen(g);
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let small = vals.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        if scale == 0.0 || small <= 1e-12 * scale {
            return Err(Error::DegenerateMetric(format!("singular metric at {x:?}")));
        }
        let neg = vals.iter().filter(|v| **v < 0.0).count();
        if neg != self.index {
            return Err(Error::DegenerateMetric(format!(
                "metric at {x:?} has index {neg}, expected {}",
                self.index
            )));
        }
        Ok(())
    }

    /// Metric and its first two partial derivatives.
    pub fn derivatives(&self, x: &[f64]) -> Result<MetricDerivatives> {
        self.check_dim(x)?;
        let n = self.dim;
        let out = match self.mode {
            DerivativeMode::Exact => {
                let jets = self.map.eval_jet(&Jet::seed(x));
                let g = Mat::from_fn(n, n, |i, j| jets[i * n + j].v);
                let dg = (0..n).map(|k| Mat::from_fn(n, n, |i, j| jets[i * n + j].d[k])).collect();
                let ddg = (0..n)
                    .map(|k| (0..n).map(|l| Mat::from_fn(n, n, |i, j| jets[i * n + j].h[k][l])).collect())
                    .collect();
                MetricDerivatives { g, dg, ddg }
            }
            DerivativeMode::FiniteDifference { step } => {
                let g = self.eval_unchecked(x);
                let shifted = |k: usize, h: f64| {
                    let mut y = x.to_vec();
                    y[k] += h;
                    self.eval_unchecked(&y)
                };
                let hk = |k: usize, s: f64| s * (1.0 + x[k].abs());
                let dg: Vec<Mat> = (0..n)
                    .map(|k| {
                        let h = hk(k, step);
                        (shifted(k, h) - shifted(k, -h)) / (2.0 * h)
                    })
                    .collect();
                let ddg = (0..n)
                    .map(|k| {
                        (0..n)
                            .map(|l| {
                                let (a, b) = (hk(k, 10.0 * step), hk(l, 10.0 * step));
                                let at = |sa: f64, sb: f64| {
                                    let mut y = x.to_vec();
                                    y[k] += sa;
                                    y[l] += sb;
                                    self.eval_unchecked(&y)
                                };
                                (at(a, b) - at(a, -b) - at(-a, b) + at(-a, -b)) / (4.0 * a * b)
                            })
                            .collect()
                    })
                    .collect();
                MetricDerivatives { g, dg, ddg }
            }
        };
        self.validate(&out.g, x)?;
        Ok(out)
    }

    pub fn christoffel(&self, x: &[f64]) -> Result<Christoffel> {
        let d = self.derivatives(x)?;
        let ginv = inverse(&d.g, x)?;
        Ok(christoffel_from(&ginv, &d.dg))
    }

    /// Christoffel symbols and their partial derivatives `∂ₘΓ`.
    pub fn christoffel_with_derivative(&self, x: &[f64]) -> Result<(Christoffel, Vec<Christoffel>)> {
        let d = self.derivatives(x)?;
        let n = self.dim;
        let ginv = inverse(&d.g, x)?;
        let gamma = christoffel_from(&ginv, &d.dg);
        let mut dgamma = Vec::with_capacity(n);
        for m in 0..n {
            let dginv = -(&ginv * &d.dg[m] * &ginv);
            let mut c = Christoffel::zeros(n);
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut s = 0.0;
                        for l in 0..n {
                            let first = d.dg[i][(j, l)] + d.dg[j][(i, l)] - d.dg[l][(i, j)];
                            let second = d.ddg[m][i][(j, l)] + d.ddg[m][j][(i, l)] - d.ddg[m][l][(i, j)];
                            s += dginv[(k, l)] * first + ginv[(k, l)] * second;
                        }
                        c.set(k, i, j, 0.5 * s);
                    }
                }
            }
            dgamma.push(c);
        }
        Ok((gamma, dgamma))
    }

    pub fn riemann(&self, x: &[f64]) -> Result<Riemann> {
        let (g, dg) = self.christoffel_with_derivative(x)?;
        let n = self.dim;
        let mut data = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut s = dg[k].get(i, l, j) - dg[l].get(i, k, j);
                        for m in 0..n {
                            s += g.get(i, k, m) * g.get(m, l, j) - g.get(i, l, m) * g.get(m, k, j);
                        }
                        data[((i * n + j) * n + k) * n + l] = s;
                    }
                }
            }
        }
        Ok(Riemann { n, data })
    }

    /// The endomorphism `w ↦ R(w, v)v`, so that Jacobi fields solve `J'' + 𝐑J = 0`.
    pub fn curvature_operator(&self, x: &[f64], v: &Vector) -> Result<Mat> {
        let r = self.riemann(x)?;
        let n = self.dim;
        Ok(Mat::from_fn(n, n, |i, k| {
            let mut s = 0.0;
            for j in 0..n {
                for l in 0..n {
                    s += r.get(i, j, k, l) * v[j] * v[l];
                }
            }
            s
        }))
    }
}

fn inverse(g: &Mat, x: &[f64]) -> Result<Mat> {
    g.clone()
        .try_inverse()
        .ok_or_else(|| Error::DegenerateMetric(format!("singular metric at {x:?}")))
}

fn christoffel_from(ginv: &Mat, dg: &[Mat]) -> Christoffel {
    let n = ginv.nrows();
    let mut c = Christoffel::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                c.set(k, i, j, 0.5 * s);
                c.set(k, j, i, 0.5 * s);
            }
        }
    }
    c
}

/// Christoffel symbols of `metric` at `x`.
pub fn christoffel(metric: &MetricField, x: &[f64]) -> Result<Christoffel> {
    metric.christoffel(x)
}

/// `w ↦ R(w, v)v` at `x`.
pub fn curvature_operator(metric: &MetricField, x: &[f64], v: &Vector) -> Result<Mat> {
    metric.curvature_operator(x, v)
}

use super::geodesic::{locate, GeodesicPath};
use super::metric::MetricField;
use crate::error::{Error, Result};
use crate::linalg::Vector;

/// A vector field along a sampled curve: coordinate components and their ordinary
/// time derivatives at the curve's instants.
#[derive(Debug, Clone)]
pub struct FieldAlongCurve {
    t: Vec<f64>,
    values: Vec<Vector>,
    derivs: Vec<Vector>,
}

/// Derivative estimates of samples on a grid: fourth-order central stencils inside,
/// one-sided fourth-order stencils at the ends. Exact for quartics on uniform grids.
pub fn differentiate_samples(t: &[f64], y: &[Vector]) -> Result<Vec<Vector>> {
    let n = t.len();
    if n < 5 {
        return Err(Error::ResolutionError("need at least five samples to differentiate".into()));
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let j0 = i.saturating_sub(2).min(n - 5);
        let nodes = &t[j0..j0 + 5];
        let w = lagrange_derivative_weights(nodes, t[i]);
        let mut d = Vector::zeros(y[0].len());
        for (k, wk) in w.iter().enumerate() {
            d += &y[j0 + k] * *wk;
        }
        out.push(d);
    }
    Ok(out)
}

/// Weights `w` with `p'(tau) = Σ w_k y_k` for the interpolating polynomial through `nodes`.
fn lagrange_derivative_weights(nodes: &[f64], tau: f64) -> Vec<f64> {
    let m = nodes.len();
    (0..m)
        .map(|k| {
            let mut total = 0.0;
            for l in 0..m {
                if l == k {
                    continue;
                }
                let mut prod = 1.0 / (nodes[k] - nodes[l]);
                for j in 0..m {
                    if j != k && j != l {
                        prod *= (tau - nodes[j]) / (nodes[k] - nodes[j]);
                    }
                }
                total += prod;
            }
            total
        })
        .collect()
}

impl FieldAlongCurve {
    pub fn new(t: Vec<f64>, values: Vec<Vector>, derivs: Vec<Vector>) -> Result<Self> {
        if values.len() != t.len() || derivs.len() != t.len() {
            return Err(Error::InvalidField("field samples do not match the grid".into()));
        }
        Ok(FieldAlongCurve { t, values, derivs })
    }

    /// Field from values alone; derivatives by finite differences on the grid.
    pub fn from_values(t: Vec<f64>, values: Vec<Vector>) -> Result<Self> {
        let derivs = differentiate_samples(&t, &values)?;
        FieldAlongCurve::new(t, values, derivs)
    }

    /// Samples `t ↦ (E, Ė)` on the grid of `curve`.
    pub fn from_fn<F: FnMut(f64) -> (Vector, Vector)>(curve: &GeodesicPath, mut f: F) -> Self {
        let mut values = Vec::with_capacity(curve.len());
        let mut derivs = Vec::with_capacity(curve.len());
        for &t in curve.grid() {
            let (e, de) = f(t);
            values.push(e);
            derivs.push(de);
        }
        FieldAlongCurve {
            t: curve.grid().to_vec(),
            values,
            derivs,
        }
    }

    pub fn grid(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[Vector] {
        &self.values
    }

    pub fn derivs(&self) -> &[Vector] {
        &self.derivs
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `(E, Ė)` at `tau` by cubic Hermite interpolation.
    pub fn interpolate(&self, tau: f64) -> (Vector, Vector) {
        let i = locate(&self.t, tau);
        let h = self.t[i + 1] - self.t[i];
        let s = ((tau - self.t[i]) / h).clamp(0.0, 1.0);
        let (s2, s3) = (s * s, s * s * s);
        let (h00, h10, h01, h11) = (2.0 * s3 - 3.0 * s2 + 1.0, s3 - 2.0 * s2 + s, -2.0 * s3 + 3.0 * s2, s3 - s2);
        let (d00, d10, d01, d11) = (6.0 * s2 - 6.0 * s, 3.0 * s2 - 4.0 * s + 1.0, -6.0 * s2 + 6.0 * s, 3.0 * s2 - 2.0 * s);
        let (y0, y1, m0, m1) = (&self.values[i], &self.values[i + 1], &self.derivs[i], &self.derivs[i + 1]);
        let val = y0 * h00 + m0 * (h10 * h) + y1 * h01 + m1 * (h11 * h);
        let der = (y0 * d00 + m0 * (d10 * h) + y1 * d01 + m1 * (d11 * h)) / h;
        (val, der)
    }

    /// `DE/dt = Ė + Γ(ẋ, E)` along `curve`.
    pub fn covariant_derivative(&self, metric: &MetricField, curve: &GeodesicPath) -> Result<Vec<Vector>> {
        self.check_grid(curve)?;
        (0..self.len())
            .map(|i| {
                let c = metric.christoffel(curve.points()[i].as_slice())?;
                Ok(&self.derivs[i] + c.contract(&curve.velocities()[i], &self.values[i]))
            })
            .collect()
    }

    pub(crate) fn check_grid(&self, curve: &GeodesicPath) -> Result<()> {
        let same = self.t.len() == curve.len()
            && self
                .t
                .iter()
                .zip(curve.grid())
                .all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        if same {
            Ok(())
        } else {
            Err(Error::InvalidField("field and curve grids differ".into()))
        }
    }

    /// Pointwise linear combination `self + c · other` on a shared grid.
    pub fn add_scaled(&self, other: &FieldAlongCurve, c: f64) -> Result<FieldAlongCurve> {
        if self.t.len() != other.t.len() {
            return Err(Error::InvalidField("grids differ".into()));
        }
        Ok(FieldAlongCurve {
            t: self.t.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b * c).collect(),
            derivs: self.derivs.iter().zip(&other.derivs).map(|(a, b)| a + b * c).collect(),
        })
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_are_exact_for_quartics() {
        let t: Vec<f64> = (0..9).map(|k| 0.3 * k as f64 + 0.01 * (k * k) as f64).collect();
        let y: Vec<Vector> = t.iter().map(|s| Vector::from_vec(vec![s.powi(4) - 2.0 * s])).collect();
        let d = differentiate_samples(&t, &y).unwrap();
        for (s, di) in t.iter().zip(&d) {
            assert!((di[0] - (4.0 * s.powi(3) - 2.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let t: Vec<f64> = (0..5).map(|k| k as f64 * 0.5).collect();
        let f = |s: f64| (Vector::from_vec(vec![s.powi(3)]), Vector::from_vec(vec![3.0 * s * s]));
        let field = FieldAlongCurve::new(t.clone(), t.iter().map(|s| f(*s).0).collect(), t.iter().map(|s| f(*s).1).collect()).unwrap();
        let (v, d) = field.interpolate(1.3);
        assert!((v[0] - 1.3f64.powi(3)).abs() < 1e-12);
        assert!((d[0] - 3.0 * 1.69).abs() < 1e-12);
    }
}

use crate::error::{Error, Result};
use crate::geometry::{FieldAlongCurve, GeodesicPath, MetricField};
use crate::linalg::{Mat, Vector};
use crate::submersion::{derived_field, lift_submanifold, project_curve, project_field, SubmanifoldData, SubmersionSpec};

/// Composite Simpson rule on a uniform grid; the 3/8 rule closes an odd number of intervals.
pub fn simpson(t: &[f64], f: &[f64]) -> f64 {
    let n = t.len() - 1;
    if n == 0 {
        return 0.0;
    }
    if n == 1 {
        return 0.5 * (t[1] - t[0]) * (f[0] + f[1]);
    }
    let h = (t[n] - t[0]) / n as f64;
    let even = if n % 2 == 0 { n } else { n - 3 };
    let mut s = 0.0;
    let mut k = 0;
    while k < even {
        s += h / 3.0 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
        k += 2;
    }
    if even < n {
        s += 3.0 * h / 8.0 * (f[n - 3] + 3.0 * f[n - 2] + 3.0 * f[n - 1] + f[n]);
    }
    s
}

/// A geodesic, the initial submanifold (manifold coordinates, `None` for the point `γ(a)`)
/// and the boundary tolerance.
#[derive(Debug, Clone)]
pub struct IndexFormContext {
    pub metric: MetricField,
    pub curve: GeodesicPath,
    pub boundary: Option<SubmanifoldData>,
    pub tol: f64,
}

impl IndexFormContext {
    pub fn new(metric: &MetricField, curve: &GeodesicPath, boundary: Option<SubmanifoldData>, tol: f64) -> Self {
        IndexFormContext {
            metric: metric.clone(),
            curve: curve.clone(),
            boundary,
            tol,
        }
    }

    /// Coefficients of `e` in the tangent frame of the initial submanifold.
    fn tangent_coefficients(&self, e: &Vector) -> Result<Vector> {
        let scale = self.tol * (1.0 + e.norm());
        match &self.boundary {
            None => {
                if e.norm() > scale {
                    return Err(Error::InvalidField("field does not vanish at the initial point".into()));
                }
                Ok(Vector::zeros(0))
            }
            Some(sub) => {
                if sub.dim() == 0 {
                    if e.norm() > scale {
                        return Err(Error::InvalidField("field does not vanish at the initial point".into()));
                    }
                    return Ok(Vector::zeros(0));
                }
                let t = &sub.tangent_frame;
                let c = t
                    .clone()
                    .svd(true, true)
                    .solve(e, 1e-14)
                    .map_err(|m| Error::InvalidField(m.to_string()))?;
                if (t * &c - e).norm() > scale {
                    return Err(Error::InvalidField("initial value is not tangent to the submanifold".into()));
                }
                Ok(c)
            }
        }
    }

    fn shape(&self) -> Mat {
        match &self.boundary {
            Some(sub) => sub.shape.clone(),
            None => Mat::zeros(0, 0),
        }
    }
}

/// `I(E, F) = ∫ [g(E', F') − g(R(E, γ̇)γ̇, F)] dt + g(𝒮(E(a), γ̇(a)), F(a))` by Simpson quadrature.
pub fn index_form(ctx: &IndexFormContext, e: &FieldAlongCurve, f: &FieldAlongCurve) -> Result<f64> {
    let curve = &ctx.curve;
    e.check_grid(curve)?;
    f.check_grid(curve)?;
    let last = curve.len() - 1;
    for field in [e, f] {
        let end = &field.values()[last];
        if end.norm() > ctx.tol * (1.0 + field.max_norm()) {
            return Err(Error::InvalidField("field does not vanish at the final instant".into()));
        }
    }
    let ce = ctx.tangent_coefficients(&e.values()[0])?;
    let cf = ctx.tangent_coefficients(&f.values()[0])?;
    let de = e.covariant_derivative(&ctx.metric, curve)?;
    let df = f.covariant_derivative(&ctx.metric, curve)?;
    let integrand = (0..curve.len())
        .map(|i| {
            let x = curve.points()[i].as_slice();
            let g = ctx.metric.eval(x)?;
            let r = ctx.metric.curvature_operator(x, &curve.velocities()[i])?;
            let re = r * &e.values()[i];
            Ok((de[i].transpose() * &g * &df[i])[(0, 0)] - (re.transpose() * &g * &f.values()[i])[(0, 0)])
        })
        .collect::<Result<Vec<f64>>>()?;
    let boundary = if ce.is_empty() {
        0.0
    } else {
        (ce.transpose() * ctx.shape() * cf)[(0, 0)]
    };
    Ok(simpson(curve.grid(), &integrand) + boundary)
}

/// The two sides of `I_{γ,𝒬}(E, F) = I_{x,𝒫}(E_*, F_*) + ∫ g(D(E), D(F)) dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexIdentity {
    pub total: f64,
    pub base: f64,
    pub correction: f64,
    pub residual: f64,
}

/// Evaluates both sides of the index-form splitting for `𝒬 = π⁻¹(𝒫)` along a horizontal geodesic.
pub fn verify_index_identity(
    spec: &SubmersionSpec,
    gamma: &GeodesicPath,
    pdata: &SubmanifoldData,
    e: &FieldAlongCurve,
    f: &FieldAlongCurve,
    tol: f64,
) -> Result<IndexIdentity> {
    let p = gamma.points()[0].as_slice();
    let gdot = &gamma.velocities()[0];
    let qdata = lift_submanifold(spec, pdata, p, gdot, tol)?;
    let total_ctx = IndexFormContext::new(spec.total(), gamma, Some(qdata), tol);
    let total = index_form(&total_ctx, e, f)?;
    let x = project_curve(spec, gamma)?;
    let base_ctx = IndexFormContext::new(spec.base(), &x, Some(pdata.clone()), tol);
    let base = index_form(&base_ctx, &project_field(spec, gamma, e)?, &project_field(spec, gamma, f)?)?;
    let de = derived_field(spec, gamma, e)?;
    let df = derived_field(spec, gamma, f)?;
    let integrand = (0..gamma.len())
        .map(|i| spec.total().inner(gamma.points()[i].as_slice(), &de.values()[i], &df.values()[i]))
        .collect::<Result<Vec<f64>>>()?;
    let correction = simpson(gamma.grid(), &integrand);
    Ok(IndexIdentity {
        total,
        base,
        correction,
        residual: (total - base - correction).abs(),
    })
}

use super::spec::SubmersionSpec;
use crate::error::{Error, Result};
use crate::geometry::{differentiate_samples, FieldAlongCurve, GeodesicPath};
use crate::linalg::Vector;

/// Horizontality and projection checks of a geodesic in the total space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftDiagnostics {
    /// `max ‖𝒱γ̇‖ / (1 + ‖γ̇‖)` over the grid (coordinate norm).
    pub max_verticality: f64,
    /// Geodesic residual of `π∘γ` in the base.
    pub projection_residual: f64,
}

/// `π∘α` with velocities and accelerations from the jets of `π`.
pub fn project_curve(spec: &SubmersionSpec, curve: &GeodesicPath) -> Result<GeodesicPath> {
    curve.map(|x, v, a| Ok(spec.project_jet(x.as_slice(), v, a)))
}

fn lift_rhs(spec: &SubmersionSpec, base: &GeodesicPath, tau: f64, y: &Vector) -> Result<Vector> {
    if !spec.total().contains(y.as_slice()) {
        return Err(Error::PatchExit { t: tau });
    }
    let (_, xdot, _) = base.interpolate(tau);
    match spec.split(y.as_slice()) {
        Ok(s) => Ok(s.lift * xdot),
        Err(Error::DegenerateMetric(_)) | Err(Error::InvalidSubmersion(_)) => Err(Error::PatchExit { t: tau }),
        Err(e) => Err(e),
    }
}

/// Horizontal lift of `base_curve` through `p0`; stops at the patch boundary and
/// returns the exit instant in that case.
pub fn horizontal_lift_curve_maximal(
    spec: &SubmersionSpec,
    base_curve: &GeodesicPath,
    p0: &[f64],
    tol: f64,
) -> Result<(GeodesicPath, Option<f64>)> {
    if p0.len() != spec.total_dim() || base_curve.dim() != spec.base_dim() {
        return Err(Error::InvalidDimension("lift data does not match the submersion".into()));
    }
    let x0 = &base_curve.points()[0];
    let mismatch = (spec.project(p0) - x0).norm();
    if mismatch > tol * (1.0 + x0.norm()) {
        return Err(Error::InvalidArgument(format!("π(p0) misses the curve start by {mismatch:.3e}")));
    }
    let t = base_curve.grid();
    let mut ys = vec![Vector::from_column_slice(p0)];
    let mut exit = None;
    for k in 0..t.len() - 1 {
        let h = t[k + 1] - t[k];
        let y = &ys[k];
        let step = || -> Result<Vector> {
            let k1 = lift_rhs(spec, base_curve, t[k], y)?;
            let k2 = lift_rhs(spec, base_curve, t[k] + 0.5 * h, &(y + &k1 * (0.5 * h)))?;
            let k3 = lift_rhs(spec, base_curve, t[k] + 0.5 * h, &(y + &k2 * (0.5 * h)))?;
            let k4 = lift_rhs(spec, base_curve, t[k + 1], &(y + &k3 * h))?;
            let next = y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            lift_rhs(spec, base_curve, t[k + 1], &next)?;
            Ok(next)
        };
        match step() {
            Ok(next) => ys.push(next),
            Err(Error::PatchExit { t }) => {
                exit = Some(t);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    if ys.len() < 2 {
        return Err(Error::MaximalLiftShorter { end: t[0] });
    }
    let mut vs = Vec::with_capacity(ys.len());
    let mut accs = Vec::with_capacity(ys.len());
    for (i, y) in ys.iter().enumerate() {
        let p = y.as_slice();
        let lift = spec.split(p)?.lift;
        let xv = &base_curve.velocities()[i];
        let v = &lift * xv;
        let dl = spec.lift_derivative(p, &v)?;
        accs.push(dl * xv + lift * &base_curve.accelerations()[i]);
        vs.push(v);
    }
    let path = GeodesicPath::new(t[..ys.len()].to_vec(), ys, vs, accs)?;
    Ok((path, exit))
}

/// Horizontal lift over the whole base interval; a lift leaving the patch is an error
/// carrying the instant it stopped at.
pub fn horizontal_lift_curve(spec: &SubmersionSpec, base_curve: &GeodesicPath, p0: &[f64], tol: f64) -> Result<GeodesicPath> {
    let (path, exit) = horizontal_lift_curve_maximal(spec, base_curve, p0, tol)?;
    match exit {
        Some(_) => Err(Error::MaximalLiftShorter { end: path.end() }),
        None => Ok(path),
    }
}

/// Verticality of `γ̇` and geodesic residual of `π∘γ`.
pub fn lift_geodesic_check(spec: &SubmersionSpec, gamma: &GeodesicPath) -> Result<LiftDiagnostics> {
    let mut worst: f64 = 0.0;
    for (x, v) in gamma.points().iter().zip(gamma.velocities()) {
        let (vert, _) = spec.projectors(x.as_slice())?;
        worst = worst.max((vert * v).norm() / (1.0 + v.norm()));
    }
    let base = project_curve(spec, gamma)?;
    Ok(LiftDiagnostics {
        max_verticality: worst,
        projection_residual: base.geodesic_residual(spec.base())?,
    })
}

/// `D(E) = 𝒱(DV/dt) − T_V(γ̇) + 2A_γ̇(H)` at one point, given `E` and its ordinary derivative.
pub fn derived_vector(spec: &SubmersionSpec, p: &[f64], gdot: &Vector, e: &Vector, edot: &Vector) -> Result<Vector> {
    let at = spec.at(p)?;
    let (dvert, _) = spec.projector_derivative(p, gdot)?;
    let v = at.vert(e);
    let h = at.horiz(e);
    let vdot = dvert * e + at.vert(edot);
    let cov_v = vdot + at.gamma.contract(gdot, &v);
    Ok(at.vert(&cov_v) - at.t(&v, gdot)? + at.a(gdot, &h)? * 2.0)
}

fn check_resolution(e: &FieldAlongCurve) -> Result<()> {
    let scale = e.max_norm();
    if scale == 0.0 {
        return Ok(());
    }
    for w in e.values().windows(2) {
        if (&w[1] - &w[0]).norm() > 0.5 * scale {
            return Err(Error::ResolutionError("field changes by more than half its size between samples".into()));
        }
    }
    Ok(())
}

/// The derived field `D(E)` along a horizontal curve; vertical-valued.
pub fn derived_field(spec: &SubmersionSpec, gamma: &GeodesicPath, e: &FieldAlongCurve) -> Result<FieldAlongCurve> {
    e.check_grid(gamma)?;
    check_resolution(e)?;
    let values = (0..gamma.len())
        .map(|i| {
            derived_vector(
                spec,
                gamma.points()[i].as_slice(),
                &gamma.velocities()[i],
                &e.values()[i],
                &e.derivs()[i],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let derivs = differentiate_samples(gamma.grid(), &values)?;
    FieldAlongCurve::new(gamma.grid().to_vec(), values, derivs)
}

/// `E_* = dπ E` along `π∘γ`.
pub fn project_field(spec: &SubmersionSpec, gamma: &GeodesicPath, e: &FieldAlongCurve) -> Result<FieldAlongCurve> {
    e.check_grid(gamma)?;
    let mut values = Vec::with_capacity(e.len());
    let mut derivs = Vec::with_capacity(e.len());
    for i in 0..e.len() {
        let p = gamma.points()[i].as_slice();
        let d = spec.dproj(p);
        let dd = spec.dproj_derivative(p, &gamma.velocities()[i]);
        values.push(&d * &e.values()[i]);
        derivs.push(dd * &e.values()[i] + d * &e.derivs()[i]);
    }
    FieldAlongCurve::new(gamma.grid().to_vec(), values, derivs)
}

/// Right side of the vertical equation `D(H + V) = 0` with `H` the horizontal lift of `P(t)`.
fn vertical_rhs(spec: &SubmersionSpec, gamma: &GeodesicPath, base_field: &FieldAlongCurve, tau: f64, v: &Vector) -> Result<Vector> {
    let (x, gdot, _) = gamma.interpolate(tau);
    let p = x.as_slice();
    let at = spec.at(p)?;
    let (pv, _) = base_field.interpolate(tau);
    let h = &at.split.lift * pv;
    let (dvert, _) = spec.projector_derivative(p, &gdot)?;
    let along = at.horiz(&(dvert * v));
    let vv = at.vert(v);
    Ok(along + at.t(&vv, &gdot)? - at.a(&gdot, &h)? * 2.0 - at.vert(&at.gamma.contract(&gdot, &vv)))
}

/// The unique field `E` along `γ` with `E_* = P`, `D(E) = 0` and `E(t_{i0}) = z`.
pub fn lift_field_d_zero(
    spec: &SubmersionSpec,
    gamma: &GeodesicPath,
    base_field: &FieldAlongCurve,
    z: &Vector,
    i0: usize,
    tol: f64,
) -> Result<FieldAlongCurve> {
    base_field.check_grid(gamma)?;
    if i0 >= gamma.len() {
        return Err(Error::InvalidArgument("seed index outside the grid".into()));
    }
    let p0 = gamma.points()[i0].as_slice();
    let split0 = spec.split(p0)?;
    let p_t0 = &base_field.values()[i0];
    let mismatch = (&split0.dproj * z - p_t0).norm();
    if mismatch > tol * (1.0 + p_t0.norm() + z.norm()) {
        return Err(Error::IncompatibleSeed(mismatch));
    }
    let t = gamma.grid();
    let n = t.len();
    let mut vs: Vec<Option<Vector>> = vec![None; n];
    vs[i0] = Some(&split0.vert * z);
    let rk4 = |from: usize, to: usize, v: &Vector| -> Result<Vector> {
        let (ta, tb) = (t[from], t[to]);
        let h = tb - ta;
        let k1 = vertical_rhs(spec, gamma, base_field, ta, v)?;
        let k2 = vertical_rhs(spec, gamma, base_field, ta + 0.5 * h, &(v + &k1 * (0.5 * h)))?;
        let k3 = vertical_rhs(spec, gamma, base_field, ta + 0.5 * h, &(v + &k2 * (0.5 * h)))?;
        let k4 = vertical_rhs(spec, gamma, base_field, tb, &(v + &k3 * h))?;
        Ok(v + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
    };
    for i in i0..n - 1 {
        let next = rk4(i, i + 1, vs[i].as_ref().unwrap())?;
        vs[i + 1] = Some(next);
    }
    for i in (1..=i0).rev() {
        let prev = rk4(i, i - 1, vs[i].as_ref().unwrap())?;
        vs[i - 1] = Some(prev);
    }
    let mut values = Vec::with_capacity(n);
    let mut derivs = Vec::with_capacity(n);
    for (i, v) in vs.into_iter().enumerate() {
        let v = v.unwrap();
        let p = gamma.points()[i].as_slice();
        let gdot = &gamma.velocities()[i];
        let lift = spec.split(p)?.lift;
        let (pv, pd) = (&base_field.values()[i], &base_field.derivs()[i]);
        let h = &lift * pv;
        let hdot = spec.lift_derivative(p, gdot)? * pv + lift * pd;
        let vdot = vertical_rhs(spec, gamma, base_field, t[i], &v)?;
        values.push(h + v);
        derivs.push(hdot + vdot);
    }
    FieldAlongCurve::new(t.to_vec(), values, derivs)
}

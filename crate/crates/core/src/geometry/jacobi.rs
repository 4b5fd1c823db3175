use super::field::FieldAlongCurve;
use super::geodesic::GeodesicPath;
use super::metric::MetricField;
use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Jacobi field along the geodesic starting at `curve`'s initial data, with `J(a) = j_a` and
/// `DJ/dt(a) = jdot_a`.
///
/// The geodesic is re-integrated together with `(J, DJ/dt)` by RK4 on the curve's grid, so the
/// result does not depend on any trivialization.
pub fn jacobi_field_direct(metric: &MetricField, curve: &GeodesicPath, j_a: &Vector, jdot_a: &Vector) -> Result<FieldAlongCurve> {
    let n = metric.dim();
    if j_a.len() != n || jdot_a.len() != n {
        return Err(Error::InvalidDimension("Jacobi data does not match metric dimension".into()));
    }
    // state: x, v, J, W = DJ/dt
    let rhs = |t: f64, s: &[Vector; 4]| -> Result<([Vector; 4], Vector)> {
        let [x, v, j, w] = s;
        if !metric.contains(x.as_slice()) {
            return Err(Error::PatchExit { t });
        }
        let c = metric.christoffel(x.as_slice())?;
        let r = metric.curvature_operator(x.as_slice(), v)?;
        let jdot = w - c.contract(v, j);
        let wdot = -(c.contract(v, w) + r * j);
        Ok(([v.clone(), -c.contract(v, v), jdot.clone(), wdot], jdot))
    };
    let t = curve.grid();
    let mut state = [
        curve.points()[0].clone(),
        curve.velocities()[0].clone(),
        j_a.clone(),
        jdot_a.clone(),
    ];
    let (_, d0) = rhs(t[0], &state)?;
    let mut values = vec![j_a.clone()];
    let mut derivs = vec![d0];
    let axpy = |s: &[Vector; 4], k: &[Vector; 4], h: f64| -> [Vector; 4] {
        [&s[0] + &k[0] * h, &s[1] + &k[1] * h, &s[2] + &k[2] * h, &s[3] + &k[3] * h]
    };
    for i in 0..t.len() - 1 {
        let h = t[i + 1] - t[i];
        let (k1, _) = rhs(t[i], &state)?;
        let (k2, _) = rhs(t[i] + 0.5 * h, &axpy(&state, &k1, 0.5 * h))?;
        let (k3, _) = rhs(t[i] + 0.5 * h, &axpy(&state, &k2, 0.5 * h))?;
        let (k4, _) = rhs(t[i + 1], &axpy(&state, &k3, h))?;
        for c in 0..4 {
            state[c] += (&k1[c] + &k2[c] * 2.0 + &k3[c] * 2.0 + &k4[c]) * (h / 6.0);
        }
        let (_, d) = rhs(t[i + 1], &state)?;
        values.push(state[2].clone());
        derivs.push(d);
    }
    FieldAlongCurve::new(t.to_vec(), values, derivs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::geodesic::integrate_geodesic;
    use crate::geometry::map::CoordinateMap;
    use crate::jet::Real;
    use std::f64::consts::PI;

    struct Sphere;
    impl CoordinateMap for Sphere {
        fn input_dim(&self) -> usize {
            2
        }
        fn output_len(&self) -> usize {
            4
        }
        fn eval<R: Real>(&self, x: &[R]) -> Vec<R> {
            let s = x[0].sin();
            vec![R::cst(1.0), R::cst(0.0), R::cst(0.0), s * s]
        }
    }

    struct Flat;
    impl CoordinateMap for Flat {
        fn input_dim(&self) -> usize {
            2
        }
        fn output_len(&self) -> usize {
            4
        }
        fn eval<R: Real>(&self, _x: &[R]) -> Vec<R> {
            vec![R::cst(1.0), R::cst(0.0), R::cst(0.0), R::cst(1.0)]
        }
    }

    #[test]
    fn flat_jacobi_fields_are_affine() {
        let m = MetricField::new(Flat, 0).unwrap();
        let c = integrate_geodesic(&m, &[0.0, 0.0], &[1.0, 0.5], 0.0, 2.0, 40).unwrap();
        let (ja, jd) = (Vector::from_vec(vec![0.3, -1.0]), Vector::from_vec(vec![1.0, 2.0]));
        let j = jacobi_field_direct(&m, &c, &ja, &jd).unwrap();
        for (t, v) in j.grid().iter().zip(j.values()) {
            assert!((v - (&ja + &jd * *t)).norm() < 1e-13);
        }
    }

    #[test]
    fn sphere_jacobi_field_is_sine() {
        let m = MetricField::new(Sphere, 0).unwrap();
        let c = integrate_geodesic(&m, &[PI / 2.0, 0.0], &[0.0, 1.0], 0.0, 1.5 * PI, 1500).unwrap();
        let j = jacobi_field_direct(&m, &c, &Vector::zeros(2), &Vector::from_vec(vec![1.0, 0.0])).unwrap();
        for (i, t) in j.grid().iter().enumerate() {
            let x = c.points()[i].as_slice();
            let norm = m.inner(x, &j.values()[i], &j.values()[i]).unwrap().sqrt();
            assert!((norm - t.sin().abs()).abs() < 1e-9);
        }
        assert!(j.values()[1000].norm() < 1e-9);
    }

    #[test]
    fn velocity_is_jacobi() {
        let m = MetricField::new(Sphere, 0).unwrap();
        let c = integrate_geodesic(&m, &[1.2, 0.0], &[0.3, 0.8], 0.0, 3.0, 600).unwrap();
        let j = jacobi_field_direct(&m, &c, &c.velocities()[0], &Vector::zeros(2)).unwrap();
        for (v, w) in j.values().iter().zip(c.velocities()) {
            assert!((v - w).norm() < 1e-9);
        }
    }
}

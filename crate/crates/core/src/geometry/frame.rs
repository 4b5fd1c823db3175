use super::field::differentiate_samples;
use super::geodesic::GeodesicPath;
use super::metric::MetricField;
use crate::error::{Error, Result};
use crate::linalg::{Mat, Vector};

/// A trivialization `p(t): ℝⁿ → T_{γ(t)}M` sampled on the grid of a curve, with the ordinary
/// time derivative of its coordinate matrix.
#[derive(Debug, Clone)]
pub struct FrameField {
    t: Vec<f64>,
    frames: Vec<Mat>,
    derivs: Vec<Mat>,
}

const FRAME_DET_TOL: f64 = 1e-12;

fn check_invertible(p: &Mat) -> Result<()> {
    let sv = p.singular_values();
    let max = sv.max();
    if !(max > 0.0) || sv.min() <= FRAME_DET_TOL * max {
        return Err(Error::InvalidFrame("frame is singular".into()));
    }
    Ok(())
}

impl FrameField {
    pub fn new(t: Vec<f64>, frames: Vec<Mat>, derivs: Vec<Mat>) -> Result<Self> {
        if frames.len() != t.len() || derivs.len() != t.len() {
            return Err(Error::InvalidFrame("frame samples do not match the grid".into()));
        }
        for p in &frames {
            check_invertible(p)?;
        }
        Ok(FrameField { t, frames, derivs })
    }

    /// Frame from samples alone; derivatives by finite differences.
    pub fn from_frames(t: Vec<f64>, frames: Vec<Mat>) -> Result<Self> {
        let n = frames[0].nrows();
        let flat: Vec<Vector> = frames.iter().map(|p| Vector::from_column_slice(p.as_slice())).collect();
        let d = differentiate_samples(&t, &flat)?;
        let derivs = d.into_iter().map(|v| Mat::from_column_slice(n, n, v.as_slice())).collect();
        FrameField::new(t, frames, derivs)
    }

    pub fn grid(&self) -> &[f64] {
        &self.t
    }

    pub fn frames(&self) -> &[Mat] {
        &self.frames
    }

    pub fn derivs(&self) -> &[Mat] {
        &self.derivs
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `p(t)·M(t)` where `gauge(t) = (M(t), M'(t))`.
    pub fn gauge<F: Fn(f64) -> (Mat, Mat)>(&self, gauge: F) -> Result<FrameField> {
        let mut frames = Vec::with_capacity(self.len());
        let mut derivs = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let (m, dm) = gauge(self.t[i]);
            frames.push(&self.frames[i] * &m);
            derivs.push(&self.derivs[i] * &m + &self.frames[i] * dm);
        }
        FrameField::new(self.t.clone(), frames, derivs)
    }

    /// `g̃ = pᵀ g p` at each sample.
    pub fn pulled_back_metric(&self, metric: &MetricField, curve: &GeodesicPath) -> Result<Vec<Mat>> {
        (0..self.len())
            .map(|i| {
                let g = metric.eval(curve.points()[i].as_slice())?;
                Ok(self.frames[i].transpose() * g * &self.frames[i])
            })
            .collect()
    }
}

/// Parallel transport of `p_a` along `curve` (RK4 on the curve's grid, midpoints by interpolation).
pub fn parallel_transport_frame(metric: &MetricField, curve: &GeodesicPath, p_a: &Mat) -> Result<FrameField> {
    let n = metric.dim();
    if p_a.nrows() != n || p_a.ncols() != n {
        return Err(Error::InvalidFrame("initial frame has wrong shape".into()));
    }
    check_invertible(p_a)?;
    let rhs = |tau: f64, p: &Mat| -> Result<Mat> {
        let (x, v, _) = curve.interpolate(tau);
        let c = metric.christoffel(x.as_slice())?;
        Ok(-(c.matrix(&v) * p))
    };
    let t = curve.grid();
    let mut frames = vec![p_a.clone()];
    let mut derivs = vec![rhs(t[0], p_a)?];
    for k in 0..t.len() - 1 {
        let h = t[k + 1] - t[k];
        let p = &frames[k];
        let k1 = derivs[k].clone();
        let k2 = rhs(t[k] + 0.5 * h, &(p + &k1 * (0.5 * h)))?;
        let k3 = rhs(t[k] + 0.5 * h, &(p + &k2 * (0.5 * h)))?;
        let k4 = rhs(t[k + 1], &(p + &k3 * h))?;
        let next = p + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        derivs.push(rhs(t[k + 1], &next)?);
        frames.push(next);
    }
    FrameField::new(t.to_vec(), frames, derivs)
}

/// `ϖ = p⁻¹(ṗ + Γ(ẋ)p)`, so that `D/dt[p ṽ] = p ṽ' + p ϖ ṽ`.
pub fn connection_form(frame: &FrameField, metric: &MetricField, curve: &GeodesicPath) -> Result<Vec<Mat>> {
    if frame.len() != curve.len() {
        return Err(Error::InvalidFrame("frame and curve grids differ".into()));
    }
    (0..frame.len())
        .map(|i| {
            let c = metric.christoffel(curve.points()[i].as_slice())?;
            let p = &frame.frames[i];
            let cov = &frame.derivs[i] + c.matrix(&curve.velocities()[i]) * p;
            p.clone()
                .lu()
                .solve(&cov)
                .ok_or_else(|| Error::InvalidFrame("frame is singular".into()))
        })
        .collect()
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

    struct Polar;
    impl CoordinateMap for Polar {
        fn input_dim(&self) -> usize {
            2
        }
        fn output_len(&self) -> usize {
            4
        }
        fn eval<R: Real>(&self, x: &[R]) -> Vec<R> {
            vec![R::cst(1.0), R::cst(0.0), R::cst(0.0), x[0] * x[0]]
        }
    }

    fn tilted_circle(steps: usize) -> (MetricField, GeodesicPath) {
        let m = MetricField::new(Sphere, 0).unwrap();
        let inc: f64 = 0.5;
        let c = integrate_geodesic(&m, &[PI / 2.0, 0.0], &[-inc.sin(), inc.cos()], 0.0, 2.0 * PI, steps).unwrap();
        (m, c)
    }

    #[test]
    fn flat_transport_in_polar_coordinates() {
        // the Cartesian frame expressed in polar coordinates is parallel
        let m = MetricField::new(Polar, 0).unwrap();
        let c = integrate_geodesic(&m, &[1.0, 0.0], &[0.3, 1.0], 0.0, 2.0, 400).unwrap();
        let cart = |x: &Vector| {
            let (r, th) = (x[0], x[1]);
            Mat::from_row_slice(2, 2, &[th.cos(), th.sin(), -th.sin() / r, th.cos() / r])
        };
        let f = parallel_transport_frame(&m, &c, &cart(&c.points()[0])).unwrap();
        for (p, x) in f.frames().iter().zip(c.points()) {
            assert!((p - cart(x)).norm() < 1e-9);
        }
        for w in connection_form(&f, &m, &c).unwrap() {
            assert!(w.norm() < 1e-12);
        }
    }

    #[test]
    fn great_circle_transport_returns_after_a_period() {
        let (m, c) = tilted_circle(2000);
        let x0 = c.points()[0].clone();
        let v0 = c.velocities()[0].clone();
        // (velocity, unit normal) at the start
        let normal = Vector::from_vec(vec![v0[1] * x0[0].sin(), -v0[0] / x0[0].sin()]);
        let p_a = Mat::from_columns(&[v0.clone(), normal]);
        let f = parallel_transport_frame(&m, &c, &p_a).unwrap();
        let last = &f.frames()[f.len() - 1];
        assert!((last - &p_a).norm() < 1e-8);
        // tangent column stays the velocity; pairings are preserved
        let g = f.pulled_back_metric(&m, &c).unwrap();
        for (i, gi) in g.iter().enumerate() {
            assert!((f.frames()[i].column(0) - &c.velocities()[i]).norm() < 1e-8);
            assert!((gi - Mat::identity(2, 2)).norm() < 1e-9);
        }
    }

    #[test]
    fn gauge_connection_form() {
        let (m, c) = tilted_circle(800);
        let p_a = Mat::from_row_slice(2, 2, &[1.0, 0.2, 0.0, 1.0]);
        let par = parallel_transport_frame(&m, &c, &p_a).unwrap();
        // rotation gauge keeps g̃ constant and makes ϖ antisymmetric
        let rot = par
            .gauge(|t| {
                let (s, co) = (0.7 * t).sin_cos();
                let r = Mat::from_row_slice(2, 2, &[co, -s, s, co]);
                let dr = Mat::from_row_slice(2, 2, &[-s, -co, co, -s]) * 0.7;
                (r, dr)
            })
            .unwrap();
        let w = connection_form(&rot, &m, &c).unwrap();
        let expect = Mat::from_row_slice(2, 2, &[0.0, -0.7, 0.7, 0.0]);
        for wi in &w {
            assert!((wi - &expect).norm() < 1e-9);
        }
        // constant rescaling leaves ϖ unchanged
        let scaled = rot.gauge(|_| (Mat::identity(2, 2) * 3.0, Mat::zeros(2, 2))).unwrap();
        for (a, b) in connection_form(&scaled, &m, &c).unwrap().iter().zip(&w) {
            assert!((a - b).norm() < 1e-9);
        }
        // finite-difference derivatives agree with the analytic ones
        let fd = FrameField::from_frames(rot.grid().to_vec(), rot.frames().to_vec()).unwrap();
        for (a, b) in connection_form(&fd, &m, &c).unwrap().iter().zip(&w) {
            assert!((a - b).norm() < 1e-7);
        }
    }

    #[test]
    fn singular_frames_are_rejected() {
        let (m, c) = tilted_circle(10);
        assert!(matches!(
            parallel_transport_frame(&m, &c, &Mat::zeros(2, 2)),
            Err(Error::InvalidFrame(_))
        ));
    }
}

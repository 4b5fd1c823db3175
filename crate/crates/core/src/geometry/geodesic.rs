use super::metric::MetricField;
use crate::error::{Error, Result};
use crate::linalg::Vector;

/// A curve sampled as `(t, x, ẋ, ẍ)` with quintic Hermite interpolation between samples.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    t: Vec<f64>,
    x: Vec<Vector>,
    v: Vec<Vector>,
    acc: Vec<Vector>,
    /// Largest endpoint discrepancy against a run at half the step, scaled by 1/15.
    pub richardson_error: Option<f64>,
}

/// Quintic Hermite basis and its first two derivatives at `s ∈ [0, 1]`.
fn hermite5(s: f64) -> [[f64; 6]; 3] {
    let (s2, s3, s4, s5) = (s * s, s * s * s, s.powi(4), s.powi(5));
    [
        [
            1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
            s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
            0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5),
            10.0 * s3 - 15.0 * s4 + 6.0 * s5,
            -4.0 * s3 + 7.0 * s4 - 3.0 * s5,
            0.5 * (s3 - 2.0 * s4 + s5),
        ],
        [
            -30.0 * s2 + 60.0 * s3 - 30.0 * s4,
            1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
            0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4),
            30.0 * s2 - 60.0 * s3 + 30.0 * s4,
            -12.0 * s2 + 28.0 * s3 - 15.0 * s4,
            0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4),
        ],
        [
            -60.0 * s + 180.0 * s2 - 120.0 * s3,
            -36.0 * s + 96.0 * s2 - 60.0 * s3,
            0.5 * (2.0 - 18.0 * s + 36.0 * s2 - 20.0 * s3),
            60.0 * s - 180.0 * s2 + 120.0 * s3,
            -24.0 * s + 84.0 * s2 - 60.0 * s3,
            0.5 * (6.0 * s - 24.0 * s2 + 20.0 * s3),
        ],
    ]
}

/// Index `i` with `t[i] ≤ tau ≤ t[i + 1]`, clamped to the grid.
pub(crate) fn locate(t: &[f64], tau: f64) -> usize {
    let n = t.len();
    if tau <= t[0] {
        return 0;
    }
    if tau >= t[n - 1] {
        return n - 2;
    }
    t.partition_point(|s| *s <= tau).saturating_sub(1).min(n - 2)
}

impl GeodesicPath {
    /// Builds a path from samples; accelerations may come from the geodesic equation or from any curve.
    pub fn new(t: Vec<f64>, x: Vec<Vector>, v: Vec<Vector>, acc: Vec<Vector>) -> Result<Self> {
        let n = t.len();
        if n < 2 || x.len() != n || v.len() != n || acc.len() != n {
            return Err(Error::InvalidArgument("path needs at least two consistent samples".into()));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("path instants must be strictly increasing".into()));
        }
        let d = x[0].len();
        if x.iter().chain(&v).chain(&acc).any(|p| p.len() != d) {
            return Err(Error::InvalidDimension("path samples differ in dimension".into()));
        }
        Ok(GeodesicPath {
            t,
            x,
            v,
            acc,
            richardson_error: None,
        })
    }

    /// Samples a curve given in closed form as `t ↦ (x, ẋ, ẍ)` on a uniform grid.
    pub fn from_fn<F>(a: f64, b: f64, steps: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> (Vector, Vector, Vector),
    {
        let steps = steps.max(1);
        let mut t = Vec::with_capacity(steps + 1);
        let (mut x, mut v, mut acc) = (Vec::new(), Vec::new(), Vec::new());
        for k in 0..=steps {
            let tk = a + (b - a) * k as f64 / steps as f64;
            let (p, q, r) = f(tk);
            t.push(tk);
            x.push(p);
            v.push(q);
            acc.push(r);
        }
        GeodesicPath::new(t, x, v, acc)
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x[0].len()
    }

    pub fn grid(&self) -> &[f64] {
        &self.t
    }

    pub fn points(&self) -> &[Vector] {
        &self.x
    }

    pub fn velocities(&self) -> &[Vector] {
        &self.v
    }

    pub fn accelerations(&self) -> &[Vector] {
        &self.acc
    }

    pub fn start(&self) -> f64 {
        self.t[0]
    }

    pub fn end(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    /// `(x, ẋ, ẍ)` at `tau` by quintic Hermite interpolation.
    pub fn interpolate(&self, tau: f64) -> (Vector, Vector, Vector) {
        let i = locate(&self.t, tau);
        let h = self.t[i + 1] - self.t[i];
        let s = ((tau - self.t[i]) / h).clamp(0.0, 1.0);
        let b = hermite5(s);
        let comb = |row: &[f64; 6], scale: f64| -> Vector {
            (&self.x[i] * row[0]
                + &self.v[i] * (row[1] * h)
                + &self.acc[i] * (row[2] * h * h)
                + &self.x[i + 1] * row[3]
                + &self.v[i + 1] * (row[4] * h)
                + &self.acc[i + 1] * (row[5] * h * h))
                * scale
        };
        (comb(&b[0], 1.0), comb(&b[1], 1.0 / h), comb(&b[2], 1.0 / (h * h)))
    }

    /// Position at `tau`.
    pub fn point_at(&self, tau: f64) -> Vector {
        self.interpolate(tau).0
    }

    /// `g(ẋ, ẋ)` at every sample.
    pub fn energies(&self, metric: &MetricField) -> Result<Vec<f64>> {
        self.x
            .iter()
            .zip(&self.v)
            .map(|(x, v)| metric.inner(x.as_slice(), v, v))
            .collect()
    }

    /// `max |g(ẋ, ẋ) − g(ẋ(a), ẋ(a))|`.
    pub fn energy_drift(&self, metric: &MetricField) -> Result<f64> {
        let e = self.energies(metric)?;
        Ok(e.iter().map(|x| (x - e[0]).abs()).fold(0.0, f64::max))
    }

    /// Largest `‖ẍ + Γ(ẋ, ẋ)‖` at interior midpoints, with `x`, `ẋ` and `ẍ` estimated from
    /// position and velocity samples by fourth-order stencils. Needs a uniform grid.
    pub fn geodesic_residual(&self, metric: &MetricField) -> Result<f64> {
        let n = self.len();
        if n < 4 {
            return Ok(0.0);
        }
        let mut worst: f64 = 0.0;
        for i in 1..n - 2 {
            let h = self.t[i + 1] - self.t[i];
            let xm = (&self.x[i] * 9.0 + &self.x[i + 1] * 9.0 - &self.x[i - 1] - &self.x[i + 2]) / 16.0;
            let vm = (&self.x[i - 1] - &self.x[i] * 27.0 + &self.x[i + 1] * 27.0 - &self.x[i + 2]) / (24.0 * h);
            let am = (&self.v[i - 1] - &self.v[i] * 27.0 + &self.v[i + 1] * 27.0 - &self.v[i + 2]) / (24.0 * h);
            let c = metric.christoffel(xm.as_slice())?;
            worst = worst.max((am + c.contract(&vm, &vm)).norm());
        }
        Ok(worst)
    }

    /// Applies `f(x, ẋ, ẍ) ↦ (y, ẏ, ÿ)` pointwise, e.g. a projection with its derivatives.
    pub fn map<F>(&self, mut f: F) -> Result<GeodesicPath>
    where
        F: FnMut(&Vector, &Vector, &Vector) -> Result<(Vector, Vector, Vector)>,
    {
        let mut x = Vec::with_capacity(self.len());
        let mut v = Vec::with_capacity(self.len());
        let mut acc = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let (p, q, r) = f(&self.x[i], &self.v[i], &self.acc[i])?;
            x.push(p);
            v.push(q);
            acc.push(r);
        }
        GeodesicPath::new(self.t.clone(), x, v, acc)
    }

    /// Samples with indices `0..=last`.
    pub fn truncate(&self, last: usize) -> Result<GeodesicPath> {
        GeodesicPath::new(
            self.t[..=last].to_vec(),
            self.x[..=last].to_vec(),
            self.v[..=last].to_vec(),
            self.acc[..=last].to_vec(),
        )
    }
}

fn geodesic_rhs(metric: &MetricField, x: &Vector, v: &Vector, t: f64) -> Result<Vector> {
    if !metric.contains(x.as_slice()) {
        return Err(Error::PatchExit { t });
    }
    match metric.christoffel(x.as_slice()) {
        Ok(c) => Ok(-c.contract(v, v)),
        Err(Error::DegenerateMetric(_)) => Err(Error::PatchExit { t }),
        Err(e) => Err(e),
    }
}

/// Classical RK4 run; returns the samples reached and the exit instant if the patch was left.
fn rk4_run(
    metric: &MetricField,
    x0: &Vector,
    v0: &Vector,
    a: f64,
    b: f64,
    steps: usize,
) -> Result<(GeodesicPath, Option<f64>)> {
    let h = (b - a) / steps as f64;
    let mut t = vec![a];
    let mut xs = vec![x0.clone()];
    let mut vs = vec![v0.clone()];
    let mut acc = vec![geodesic_rhs(metric, x0, v0, a)?];
    let mut exit = None;
    for k in 0..steps {
        let tk = a + h * k as f64;
        let (x, v) = (&xs[k], &vs[k]);
        let step = || -> Result<(Vector, Vector)> {
            let k1x = v.clone();
            let k1v = acc[k].clone();
            let x2 = x + &k1x * (0.5 * h);
            let v2 = v + &k1v * (0.5 * h);
            let k2v = geodesic_rhs(metric, &x2, &v2, tk + 0.5 * h)?;
            let x3 = x + &v2 * (0.5 * h);
            let v3 = v + &k2v * (0.5 * h);
            let k3v = geodesic_rhs(metric, &x3, &v3, tk + 0.5 * h)?;
            let x4 = x + &v3 * h;
            let v4 = v + &k3v * h;
            let k4v = geodesic_rhs(metric, &x4, &v4, tk + h)?;
            let xn = x + (k1x + &v2 * 2.0 + &v3 * 2.0 + &v4) * (h / 6.0);
            let vn = v + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
            Ok((xn, vn))
        };
        let next = step().and_then(|(xn, vn)| {
            let an = geodesic_rhs(metric, &xn, &vn, tk + h)?;
            Ok((xn, vn, an))
        });
        match next {
            Ok((xn, vn, an)) => {
                t.push(if k + 1 == steps { b } else { a + h * (k + 1) as f64 });
                xs.push(xn);
                vs.push(vn);
                acc.push(an);
            }
            Err(Error::PatchExit { t }) => {
                exit = Some(t);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    if t.len() < 2 {
        return Err(Error::PatchExit { t: a });
    }
    Ok((GeodesicPath::new(t, xs, vs, acc)?, exit))
}

/// Geodesic with `x(a) = x0`, `ẋ(a) = v0` on `[a, b]` with `steps` fixed RK4 steps,
/// checked against a run at half the step.
pub fn integrate_geodesic(metric: &MetricField, x0: &[f64], v0: &[f64], a: f64, b: f64, steps: usize) -> Result<GeodesicPath> {
    let (path, exit) = integrate_geodesic_maximal(metric, x0, v0, a, b, steps)?;
    match exit {
        Some(t) => Err(Error::PatchExit { t }),
        None => Ok(path),
    }
}

/// Like [`integrate_geodesic`] but returns the part computed before leaving the patch,
/// together with the exit instant.
pub fn integrate_geodesic_maximal(
    metric: &MetricField,
    x0: &[f64],
    v0: &[f64],
    a: f64,
    b: f64,
    steps: usize,
) -> Result<(GeodesicPath, Option<f64>)> {
    let n = metric.dim();
    if x0.len() != n || v0.len() != n {
        return Err(Error::InvalidDimension("initial data does not match metric dimension".into()));
    }
    if !(b > a) || steps == 0 {
        return Err(Error::InvalidArgument("need a < b and at least one step".into()));
    }
    metric.eval(x0).map_err(|_| Error::PatchExit { t: a })?;
    let x0 = Vector::from_column_slice(x0);
    let v0 = Vector::from_column_slice(v0);
    let (mut path, exit) = rk4_run(metric, &x0, &v0, a, b, steps)?;
    let fine_end = path.end();
    let (fine, _) = rk4_run(metric, &x0, &v0, a, fine_end, 2 * (path.len() - 1))?;
    let mut err: f64 = 0.0;
    for i in 0..path.len() {
        if 2 * i < fine.len() {
            err = err.max((&path.x[i] - &fine.x[2 * i]).norm());
        }
    }
    path.richardson_error = Some(err / 15.0);
    Ok((path, exit))
}

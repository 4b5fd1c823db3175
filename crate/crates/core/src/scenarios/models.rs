//! Coordinate formulas of the built-in manifolds and projections.

use crate::geometry::{CoordinateMap, MetricField};
use crate::submersion::SubmersionSpec;
use crate::error::Error;
use crate::jet::Real;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// `ℝⁿ` with a constant diagonal metric `diag(signs)`.
#[derive(Debug, Clone)]
pub struct ConstantDiagonal {
    pub diag: Vec<f64>,
}

impl CoordinateMap for ConstantDiagonal {
    fn input_dim(&self) -> usize {
        self.diag.len()
    }
    fn output_len(&self) -> usize {
        self.diag.len() * self.diag.len()
    }
    fn eval<R: Real>(&self, _x: &[R]) -> Vec<R> {
        let n = self.diag.len();
        let mut out = vec![R::cst(0.0); n * n];
        for (i, d) in self.diag.iter().enumerate() {
            out[i * n + i] = R::cst(*d);
        }
        out
    }
}

/// Drops the last `drop` coordinates.
#[derive(Debug, Clone)]
pub struct DropLast {
    pub dim: usize,
    pub drop: usize,
}

impl CoordinateMap for DropLast {
    fn input_dim(&self) -> usize {
        self.dim
    }
    fn output_len(&self) -> usize {
        self.dim - self.drop
    }
    fn eval<R: Real>(&self, x: &[R]) -> Vec<R> {
        x[..self.dim - self.drop].to_vec()
    }
}

/// Round sphere of radius `r` in `(θ, φ)`: `r²(dθ² + sin²θ dφ²)`, patch `0 < θ < π`.
#[derive(Debug, Clone, Copy)]
pub struct RoundSphere {
    pub radius: f64,
}

impl CoordinateMap for RoundSphere {
    fn input_dim(&self) -> usize {
        2
    }
    fn output_len(&self) -> usize {
        4
    }
    fn eval<R: Real>(&self, x: &[R]) -> Vec<R> {
        let r2 = R::cst(self.radius * self.radius);
        let s = x[0].sin();
        vec![r2, R::cst(0.0), R::cst(0.0), r2 * s * s]
    }
    fn contains(&self, x: &[f64]) -> bool {
        x[0] > 1e-3 && x[0] < std::f64::consts::PI - 1e-3
    }
}

/// Unit `S³` in Hopf coordinates `(η, ξ₁, ξ₂)`: `dη² + sin²η dξ₁² + cos²η dξ₂²`, patch `0 < η < π/2`.
#[derive(Debug, Clone, Copy)]
pub struct HopfSphere;

impl CoordinateMap for HopfSphere {
    fn input_dim(&self) -> usize {
        3
    }
    fn output_len(&self) -> usize {
        9
    }
    fn eval<R: Real>(&self, x: &[R]) -> Vec<R> {
        let z = R::cst(0.0);
        let (s, c) = (x[0].sin(), x[0].cos());
        vec![R::cst(1.0), z, z, z, s * s, z, z, z, c * c]
    }
    fn contains(&self, x: &[f64]) -> bool {
        x[0] > 1e-3 && x[0] < FRAC_PI_2 - 1e-3
    }
}

/// Hopf map in coordinates: `(η, ξ₁, ξ₂) ↦ (2η, ξ₁ − ξ₂)` onto `S²(½)`.
#[derive(Debug, Clone, Copy)]
pub struct HopfProjection;

impl CoordinateMap for HopfProjection {
    fn input_dim(&self) -> usize {
        3
    }
    fn output_len(&self) -> usize {
        2
    }
    fn eval<R: Real>(&self, x: &[R]) -> Vec<R> {
        vec![x[0] * R::cst(2.0), x[1] - x[2]]
    }
}

/// Spatial part of a standard stationary spacetime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StationaryBase {
    /// `ℝ²` with `δ = (d₁, d₂)` and `β` constant.
    Plane { d: [f64; 2], beta: f64 },
    /// Unit `S²` with `δ = tilt·sinθ ∂φ` and `β = β₀ + β₁ cosθ`.
    Sphere { tilt: f64, beta0: f64, beta1: f64 },
    /// `ℝ²` (or unit `S²` when `round`) with
    /// `g₀ = [[1 + e₀ sin x₂, e₂ s sin(x₁ + x₂)], [·, s²(1 + e₁ cos x₁)]]`, `s = sin x₁` or 1,
    /// `δ = (d₀ + d₂ cos x₂, d₁ + d₃ sin x₁)` and `β = b₀ + b₁ sin x₁ + b₂ cos x₂`.
    General {
        round: bool,
        eps: [f64; 3],
        delta: [f64; 4],
        beta: [f64; 3],
    },
}

impl StationaryBase {
    /// `(g₀, δ, β)` at a spatial point.
    fn data<R: Real>(&self, x: &[R]) -> ([[R; 2]; 2], [R; 2], R) {
        let z = R::cst(0.0);
        match *self {
            StationaryBase::Plane { d, beta } => (
                [[R::cst(1.0), z], [z, R::cst(1.0)]],
                [R::cst(d[0]), R::cst(d[1])],
                R::cst(beta),
            ),
            StationaryBase::Sphere { tilt, beta0, beta1 } => {
                let (s, c) = (x[0].sin(), x[0].cos());
                (
                    [[R::cst(1.0), z], [z, s * s]],
                    [z, R::cst(tilt) * s],
                    R::cst(beta0) + R::cst(beta1) * c,
                )
            }
            StationaryBase::General { round, eps, delta, beta } => {
                let s = if round { x[0].sin() } else { R::cst(1.0) };
                let g00 = R::cst(1.0) + R::cst(eps[0]) * x[1].sin();
                let g01 = R::cst(eps[2]) * s * (x[0] + x[1]).sin();
                let g11 = s * s * (R::cst(1.0) + R::cst(eps[1]) * x[0].cos());
                let d = [
                    R::cst(delta[0]) + R::cst(delta[2]) * x[1].cos(),
                    R::cst(delta[1]) + R::cst(delta[3]) * x[0].sin(),
                ];
                let b = R::cst(beta[0]) + R::cst(beta[1]) * x[0].sin() + R::cst(beta[2]) * x[1].cos();
                ([[g00, g01], [g01, g11]], d, b)
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let sphere = x[0] > 1e-3 && x[0] < std::f64::consts::PI - 1e-3;
        match self {
            StationaryBase::Plane { .. } => true,
            StationaryBase::Sphere { .. } => sphere,
            StationaryBase::General { round, .. } => !round || sphere,
        }
    }

    /// Rejects data for which `β` can vanish or `g₀` can degenerate.
    pub fn validate(&self) -> crate::Result<()> {
        let bad = |m: String| Err(Error::InvalidStationaryData(m));
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match *self {
            StationaryBase::Plane { d, beta } => {
                if !finite(&d) || !finite(&[beta]) {
                    return bad("non-finite parameter".into());
                }
                if beta <= 0.0 {
                    return bad(format!("beta must be positive, got {beta}"));
                }
            }
            StationaryBase::Sphere { tilt, beta0, beta1 } => {
                if !finite(&[tilt, beta0, beta1]) {
                    return bad("non-finite parameter".into());
                }
                if beta0 - beta1.abs() <= 0.0 {
                    return bad(format!("beta = {beta0} + {beta1} cos(theta) is not positive"));
                }
            }
            StationaryBase::General { eps, delta, beta, .. } => {
                if !finite(&eps) || !finite(&delta) || !finite(&beta) {
                    return bad("non-finite parameter".into());
                }
                if beta[0] - beta[1].abs() - beta[2].abs() <= 0.0 {
                    return bad(format!("beta with coefficients {beta:?} is not bounded away from 0"));
                }
                let (a, b) = (1.0 - eps[0].abs(), 1.0 - eps[1].abs());
                if a <= 0.0 || b <= 0.0 || eps[2] * eps[2] >= a * b {
                    return bad(format!("metric perturbation {eps:?} can make g0 degenerate"));
                }
            }
        }
        Ok(())
    }
}

/// `g = g₀ + 2 g₀(δ, ·) dτ − β dτ²` on `S × ℝ`, coordinates `(x₁, x₂, τ)`.
#[derive(Debug, Clone, Copy)]
pub struct StationaryTotal(pub StationaryBase);

impl CoordinateMap for StationaryTotal {
    fn input_dim(&self) -> usize {
        3
    }
    fn output_len(&self) -> usize {
        9
    }
    fn eval<R: Real>(&self, x: &[R]) -> Vec<R> {
        let (g0, d, beta) = self.0.data(x);
        let w = [g0[0][0] * d[0] + g0[0][1] * d[1], g0[1][0] * d[0] + g0[1][1] * d[1]];
        vec![g0[0][0], g0[0][1], w[0], g0[1][0], g0[1][1], w[1], w[0], w[1], -beta]
    }
    fn contains(&self, x: &[f64]) -> bool {
        self.0.contains(x)
    }
}

/// Induced metric `g₀ + g₀(δ, ·)²/β` on the space of orbits of `∂τ`.
#[derive(Debug, Clone, Copy)]
pub struct StationaryQuotient(pub StationaryBase);

impl CoordinateMap for StationaryQuotient {
    fn input_dim(&self) -> usize {
        2
    }
    fn output_len(&self) -> usize {
        4
    }
    fn eval<R: Real>(&self, x: &[R]) -> Vec<R> {
        let (g0, d, beta) = self.0.data(x);
        let w = [g0[0][0] * d[0] + g0[0][1] * d[1], g0[1][0] * d[0] + g0[1][1] * d[1]];
        vec![
            g0[0][0] + w[0] * w[0] / beta,
            g0[0][1] + w[0] * w[1] / beta,
            g0[1][0] + w[1] * w[0] / beta,
            g0[1][1] + w[1] * w[1] / beta,
        ]
    }
    fn contains(&self, x: &[f64]) -> bool {
        self.0.contains(x)
    }
}

/// `−dτ² + dθ² + sin²θ dφ²` on `ℝ × S²`, coordinates `(τ, θ, φ)`.
#[derive(Debug, Clone, Copy)]
pub struct StaticSphere;

impl CoordinateMap for StaticSphere {
    fn input_dim(&self) -> usize {
        3
    }
    fn output_len(&self) -> usize {
        9
    }
    fn eval<R: Real>(&self, x: &[R]) -> Vec<R> {
        let z = R::cst(0.0);
        let s = x[1].sin();
        vec![R::cst(-1.0), z, z, z, R::cst(1.0), z, z, z, s * s]
    }
    fn contains(&self, x: &[f64]) -> bool {
        x[1] > 1e-3 && x[1] < std::f64::consts::PI - 1e-3
    }
}

/// `h + s²(dy + c cosθ dφ)²` on `(ℝ × S²) × S¹`, coordinates `(τ, θ, φ, y)`.
#[derive(Debug, Clone, Copy)]
pub struct KaluzaKlein {
    pub scale: f64,
    pub charge: f64,
}

impl CoordinateMap for KaluzaKlein {
    fn input_dim(&self) -> usize {
        4
    }
    fn output_len(&self) -> usize {
        16
    }
    fn eval<R: Real>(&self, x: &[R]) -> Vec<R> {
        let z = R::cst(0.0);
        let s2 = R::cst(self.scale * self.scale);
        let (sn, cs) = (x[1].sin(), x[1].cos());
        let w = R::cst(self.charge) * cs;
        vec![
            R::cst(-1.0),
            z,
            z,
            z,
            z,
            R::cst(1.0),
            z,
            z,
            z,
            z,
            sn * sn + s2 * w * w,
            s2 * w,
            z,
            z,
            s2 * w,
            s2,
        ]
    }
    fn contains(&self, x: &[f64]) -> bool {
        x[1] > 1e-3 && x[1] < std::f64::consts::PI - 1e-3
    }
}

/// `ℝ³ → ℝ²` forgetting the last coordinate, Euclidean metrics.
pub fn flat_product_spec() -> crate::Result<SubmersionSpec> {
    SubmersionSpec::new(
        MetricField::new(ConstantDiagonal { diag: vec![1.0; 3] }, 0)?,
        MetricField::new(ConstantDiagonal { diag: vec![1.0; 2] }, 0)?,
        DropLast { dim: 3, drop: 1 },
    )
}

/// Hopf fibration `S³ → S²(½)`.
pub fn hopf_spec() -> crate::Result<SubmersionSpec> {
    SubmersionSpec::new(
        MetricField::new(HopfSphere, 0)?,
        MetricField::new(RoundSphere { radius: 0.5 }, 0)?,
        HopfProjection,
    )
}

/// Standard stationary spacetime over `base`, projected onto its space of `∂τ`-orbits.
pub fn stationary_spec(base: StationaryBase) -> crate::Result<SubmersionSpec> {
    base.validate()?;
    SubmersionSpec::new(
        MetricField::new(StationaryTotal(base), 1)?,
        MetricField::new(StationaryQuotient(base), 0)?,
        DropLast { dim: 3, drop: 1 },
    )
}

/// Kaluza–Klein circle bundle over `ℝ × S²`.
pub fn kaluza_klein_spec(scale: f64, charge: f64) -> crate::Result<SubmersionSpec> {
    if !(scale > 0.0 && scale.is_finite()) || !charge.is_finite() {
        return Err(Error::InvalidKkData(format!("fiber scale must be positive and finite, got {scale}")));
    }
    SubmersionSpec::new(
        MetricField::new(KaluzaKlein { scale, charge }, 1)?,
        MetricField::new(StaticSphere, 1)?,
        DropLast { dim: 4, drop: 1 },
    )
}

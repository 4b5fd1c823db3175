//! Serializable descriptions of a submersion, a horizontal geodesic seed and a base submanifold.

use super::models::{flat_product_spec, hopf_spec, kaluza_klein_spec, stationary_spec, StationaryBase};
use crate::cli::expr::ExprMap;
use crate::error::{Error, Result};
use crate::geometry::MetricField;
use crate::linalg::{Mat, Vector};
use crate::submersion::{SubmanifoldData, SubmersionSpec};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// Which submersion to build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    FlatProduct {},
    Hopf {},
    Stationary {
        base: StationaryBase,
    },
    KaluzaKlein {
        scale: f64,
        charge: f64,
    },
    /// Metrics as rows of expressions in `x0, x1, …` and the projection as one expression per
    /// base coordinate.
    Custom {
        total_metric: Vec<Vec<String>>,
        #[serde(default)]
        total_index: usize,
        base_metric: Vec<Vec<String>>,
        #[serde(default)]
        base_index: usize,
        projection: Vec<String>,
    },
}

fn metric_from_rows(rows: &[Vec<String>], index: usize, what: &str) -> Result<MetricField> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidDimension(format!("{what} must be a square array of expressions")));
    }
    let flat: Vec<&String> = rows.iter().flatten().collect();
    let map = ExprMap::parse(n, &flat).map_err(|e| Error::Expression(format!("{what}: {e}")))?;
    MetricField::new(map, index)
}

impl ModelSpec {
    pub fn build(&self) -> Result<SubmersionSpec> {
        match self {
            ModelSpec::FlatProduct {} => flat_product_spec(),
            ModelSpec::Hopf {} => hopf_spec(),
            ModelSpec::Stationary { base } => stationary_spec(*base),
            ModelSpec::KaluzaKlein { scale, charge } => kaluza_klein_spec(*scale, *charge),
            ModelSpec::Custom {
                total_metric,
                total_index,
                base_metric,
                base_index,
                projection,
            } => {
                let total = metric_from_rows(total_metric, *total_index, "total_metric")?;
                let base = metric_from_rows(base_metric, *base_index, "base_metric")?;
                if projection.len() != base.dim() {
                    return Err(Error::InvalidDimension(format!(
                        "projection has {} components but the base has dimension {}",
                        projection.len(),
                        base.dim()
                    )));
                }
                let proj = ExprMap::parse(total.dim(), projection).map_err(|e| Error::Expression(format!("projection: {e}")))?;
                SubmersionSpec::new(total, base, proj)
            }
        }
    }
}

/// Initial data of the horizontal geodesic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSpec {
    /// `γ(a)` in total-space coordinates.
    pub point: Vec<f64>,
    /// `γ̇(a)`; must be horizontal. Exclusive with `base_velocity`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity: Option<Vec<f64>>,
    /// `ẋ(a)`; `γ̇(a)` is its horizontal lift.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_velocity: Option<Vec<f64>>,
    pub interval: [f64; 2],
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_steps() -> usize {
    2000
}

impl SeedSpec {
    /// `(γ(a), γ̇(a))`, checked for dimension, patch membership and horizontality.
    pub fn initial_data(&self, spec: &SubmersionSpec, tol: f64) -> Result<(Vector, Vector)> {
        let n = spec.total_dim();
        if self.point.len() != n {
            return Err(Error::InvalidDimension(format!("seed point has {} coordinates, expected {n}", self.point.len())));
        }
        if !(self.interval[1] > self.interval[0]) || !self.interval.iter().all(|t| t.is_finite()) {
            return Err(Error::InvalidArgument(format!("interval {:?} is empty", self.interval)));
        }
        if self.steps < 8 {
            return Err(Error::InvalidArgument("at least 8 steps are required".into()));
        }
        if !spec.total().contains(&self.point) {
            return Err(Error::PatchExit { t: self.interval[0] });
        }
        let split = spec.split(&self.point)?;
        let v = match (&self.velocity, &self.base_velocity) {
            (Some(v), None) => {
                if v.len() != n {
                    return Err(Error::InvalidDimension(format!("seed velocity has {} components, expected {n}", v.len())));
                }
                let v = Vector::from_column_slice(v);
                let vert = (&split.vert * &v).norm();
                if vert > tol * (1.0 + v.norm()) {
                    return Err(Error::InvalidArgument(format!("seed velocity is not horizontal (vertical part {vert:.3e})")));
                }
                v
            }
            (None, Some(w)) => {
                if w.len() != spec.base_dim() {
                    return Err(Error::InvalidDimension(format!(
                        "base velocity has {} components, expected {}",
                        w.len(),
                        spec.base_dim()
                    )));
                }
                &split.lift * Vector::from_column_slice(w)
            }
            _ => return Err(Error::InvalidArgument("give exactly one of `velocity` and `base_velocity`".into())),
        };
        if v.norm() == 0.0 {
            return Err(Error::InvalidArgument("seed velocity vanishes".into()));
        }
        Ok((Vector::from_column_slice(&self.point), v))
    }
}

/// Initial submanifold `𝒫` of the base through `x(a)`: tangent vectors and the form
/// `s(v, w) = g(𝒮(v, ẋ(a)), w)` in that basis. No tangent vectors means the point `x(a)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tangent: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shape: Vec<Vec<f64>>,
}

impl BoundarySpec {
    pub fn point() -> Self {
        BoundarySpec::default()
    }

    pub fn build(&self, base: &MetricField, x_a: &Vector, xdot_a: &Vector, tol: f64) -> Result<SubmanifoldData> {
        let k = self.tangent.len();
        if k == 0 {
            if !self.shape.is_empty() {
                return Err(Error::InvalidBoundaryData("shape given without tangent vectors".into()));
            }
            return Ok(SubmanifoldData::point(x_a.clone(), xdot_a.clone()));
        }
        let n = base.dim();
        if self.tangent.iter().any(|t| t.len() != n) {
            return Err(Error::InvalidDimension(format!("tangent vectors must have {n} components")));
        }
        let shape = if self.shape.is_empty() {
            Mat::zeros(k, k)
        } else {
            if self.shape.len() != k || self.shape.iter().any(|r| r.len() != k) {
                return Err(Error::InvalidDimension(format!("shape must be {k} x {k}")));
            }
            Mat::from_fn(k, k, |i, j| self.shape[i][j])
        };
        let frame = Mat::from_fn(n, k, |i, j| self.tangent[j][i]);
        SubmanifoldData::new(base, x_a.clone(), frame, xdot_a.clone(), shape, tol)
    }
}

/// A named, fully specified verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub model: ModelSpec,
    pub seed: SeedSpec,
    #[serde(default)]
    pub boundary: BoundarySpec,
}

/// Names and one-line descriptions of the built-in scenarios.
pub const BUILTIN: &[(&str, &str)] = &[
    ("flat-product", "R^3 -> R^2, point boundary: no focal instants"),
    ("flat-circle", "R^3 -> R^2, unit circle boundary: one focal instant at t = 1"),
    ("hopf", "S^3 -> S^2(1/2), point boundary: conjugate instants at pi/2 and pi"),
    ("stationary-plane", "stationary spacetime over R^2 with constant tilt: flat quotient"),
    ("stationary-s2", "static spacetime over S^2(1): conjugate instants at pi and 2pi"),
    ("stationary-tilted", "stationary spacetime over S^2 with delta != 0 and varying beta"),
    ("kk-toy", "Kaluza-Klein circle bundle over R x S^2, timelike horizontal geodesic"),
];

fn seed(point: &[f64], base_velocity: &[f64], b: f64) -> SeedSpec {
    SeedSpec {
        point: point.to_vec(),
        velocity: None,
        base_velocity: Some(base_velocity.to_vec()),
        interval: [0.0, b],
        steps: default_steps(),
    }
}

/// The built-in scenario called `name`.
pub fn builtin(name: &str) -> Result<Scenario> {
    let (model, seed, boundary) = match name {
        "flat-product" => (ModelSpec::FlatProduct {}, seed(&[0.0, 0.0, 0.0], &[1.0, 0.3], 5.0), BoundarySpec::point()),
        "flat-circle" => (
            ModelSpec::FlatProduct {},
            seed(&[1.0, 0.0, 0.5], &[-1.0, 0.0], 1.8),
            BoundarySpec {
                tangent: vec![vec![0.0, 1.0]],
                shape: vec![vec![-1.0]],
            },
        ),
        "hopf" => (ModelSpec::Hopf {}, seed(&[FRAC_PI_4, 0.0, 0.0], &[0.0, 2.0], PI + 0.2), BoundarySpec::point()),
        "stationary-plane" => (
            ModelSpec::Stationary {
                base: StationaryBase::Plane { d: [0.3, -0.2], beta: 1.5 },
            },
            seed(&[0.0, 0.0, 0.0], &[0.8, 0.6], 6.0),
            BoundarySpec::point(),
        ),
        "stationary-s2" => (
            ModelSpec::Stationary {
                base: StationaryBase::Sphere {
                    tilt: 0.0,
                    beta0: 1.0,
                    beta1: 0.0,
                },
            },
            seed(&[FRAC_PI_2, 0.0, 0.0], &[0.0, 1.0], 2.0 * PI + 0.5),
            BoundarySpec::point(),
        ),
        "stationary-tilted" => (
            ModelSpec::Stationary {
                base: StationaryBase::Sphere {
                    tilt: 0.4,
                    beta0: 1.0,
                    beta1: 0.2,
                },
            },
            seed(&[1.2, 0.3, 0.0], &[0.3, 0.9], 6.0),
            BoundarySpec::point(),
        ),
        "kk-toy" => (
            ModelSpec::KaluzaKlein { scale: 0.8, charge: 0.6 },
            seed(&[0.0, 1.2, 0.0, 0.0], &[1.3, 0.2, 0.5], 8.0),
            BoundarySpec::point(),
        ),
        _ => {
            return Err(Error::Config {
                path: "scenario".into(),
                message: format!("unknown scenario `{name}`"),
            })
        }
    };
    Ok(Scenario {
        name: name.to_string(),
        model,
        seed,
        boundary,
    })
}

/// All built-in scenarios, sorted by name.
pub fn builtin_scenarios() -> Vec<Scenario> {
    let mut names: Vec<&str> = BUILTIN.iter().map(|b| b.0).collect();
    names.sort_unstable();
    names.into_iter().map(|n| builtin(n).expect("built-in scenario")).collect()
}

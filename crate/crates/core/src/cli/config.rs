//! TOML run configurations.
//!
//! A configuration either names a built-in scenario (`scenario = "hopf"`) and optionally
//! overrides its tables, or gives `[model]` and `[seed]` in full:
//!
//! ```toml
//! name = "my-run"
//! [model]
//! kind = "stationary"
//! [model.base]
//! shape = "sphere"
//! tilt = 0.4
//! beta0 = 1.0
//! beta1 = 0.2
//! [seed]
//! point = [1.2, 0.3, 0.0]
//! base_velocity = [0.3, 0.9]
//! interval = [0.0, 6.0]
//! steps = 2000
//! [boundary]            # omitted: the point x(a)
//! tangent = [[0.0, 1.0]]
//! shape = [[-1.0]]
//! [tolerances]          # any subset of the knobs
//! rank = 1e-9
//! [output]
//! dir = "out"
//! ```

use crate::error::{Error, Result};
use crate::scenarios::{builtin, BoundarySpec, ModelSpec, Scenario, SeedSpec};
use crate::tolerances::Tolerances;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
}

fn default_dir() -> PathBuf {
    PathBuf::from("submaslov-out")
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: default_dir() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub scenario: Option<String>,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub seed: Option<SeedSpec>,
    #[serde(default)]
    pub boundary: Option<BoundarySpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
}

/// A configuration with every reference resolved and checked against the model.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub scenario: Scenario,
    pub tolerances: Tolerances,
    pub output: OutputSpec,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
    (line, column)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map(|s| line_col(text, s.start)).unwrap_or((0, 0));
        Error::ConfigParse {
            line,
            column,
            message: e.message().to_string(),
        }
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}

fn at(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Config { .. } | Error::ConfigParse { .. } => e,
        other => Error::Config {
            path: path.to_string(),
            message: other.to_string(),
        },
    }
}

impl RunConfig {
    /// Merges the named scenario with the overrides and validates model, seed and boundary.
    pub fn resolve(&self) -> Result<ResolvedRun> {
        let preset = match &self.scenario {
            Some(name) => Some(builtin(name)?),
            None => None,
        };
        let model = match (&self.model, &preset) {
            (Some(m), _) => m.clone(),
            (None, Some(p)) => p.model.clone(),
            (None, None) => {
                return Err(Error::Config {
                    path: "model".into(),
                    message: "missing `[model]` (or a built-in `scenario` name)".into(),
                })
            }
        };
        let seed = match (&self.seed, &preset) {
            (Some(s), _) => s.clone(),
            (None, Some(p)) => p.seed.clone(),
            (None, None) => {
                return Err(Error::Config {
                    path: "seed".into(),
                    message: "missing `[seed]`".into(),
                })
            }
        };
        let boundary = match (&self.boundary, &preset) {
            (Some(b), _) => b.clone(),
            (None, Some(p)) => p.boundary.clone(),
            (None, None) => BoundarySpec::point(),
        };
        let name = self
            .name
            .clone()
            .or_else(|| self.scenario.clone())
            .unwrap_or_else(|| "custom".into());
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return Err(Error::Config {
                path: "name".into(),
                message: format!("`{name}` is not a valid run name (letters, digits, '-', '_', '.')"),
            });
        }

        let model_path = match &model {
            ModelSpec::Stationary { .. } => "model.base",
            _ => "model",
        };
        let spec = model.build().map_err(at(model_path))?.with_fd_step(self.tolerances.fd_step);
        let (_, v0) = seed.initial_data(&spec, 1e-8).map_err(at("seed"))?;
        let x_a = spec.project(&seed.point);
        let xdot = spec.dproj(&seed.point) * v0;
        boundary.build(spec.base(), &x_a, &xdot, 1e-8).map_err(at("boundary"))?;
        Ok(ResolvedRun {
            scenario: Scenario {
                name,
                model,
                seed,
                boundary,
            },
            tolerances: self.tolerances,
            output: self.output.clone(),
        })
    }
}

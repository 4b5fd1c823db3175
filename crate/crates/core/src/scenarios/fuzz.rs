//! Seeded random stationary scenarios for the index equality.

use super::models::StationaryBase;
use super::recipe::{BoundarySpec, ModelSpec, Scenario, SeedSpec};
use super::verify::{run_scenario, ScenarioResult};
use crate::tolerances::Tolerances;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

/// Outcome of one random scenario.
#[derive(Debug, Clone)]
pub struct FuzzCase {
    pub scenario: Scenario,
    pub outcome: std::result::Result<ScenarioResult, String>,
}

impl FuzzCase {
    /// The index equality holds.
    pub fn pass(&self) -> bool {
        matches!(&self.outcome, Ok(r) if r.mu_q == r.mu_p)
    }

    pub fn summary(&self) -> String {
        match &self.outcome {
            Ok(r) => format!(
                "{}: mu_Q = {}, mu_P = {}, {} instants{}",
                self.scenario.name,
                r.mu_q,
                r.mu_p,
                r.total.instants.len(),
                if self.pass() { "" } else { " MISMATCH" }
            ),
            Err(e) => format!("{}: error: {e}", self.scenario.name),
        }
    }
}

fn sym(rng: &mut ChaCha8Rng, r: f64) -> f64 {
    rng.random_range(-r..=r)
}

/// Random stationary data: `β ∈ [0.5, 2]`, `‖δ‖ ≤ 0.5`, `g₀` within `0.1` of flat or round,
/// and a horizontal geodesic kept away from the poles of the round chart.
pub fn random_scenario(rng: &mut ChaCha8Rng, index: usize, steps: usize) -> Scenario {
    let round = rng.random_bool(0.5);
    let eps = [sym(rng, 0.033), sym(rng, 0.033), sym(rng, 0.033)];
    let delta = [sym(rng, 0.22), sym(rng, 0.22), sym(rng, 0.12), sym(rng, 0.12)];
    let beta = [rng.random_range(0.9..=1.6), sym(rng, 0.2), sym(rng, 0.2)];
    let base = StationaryBase::General { round, eps, delta, beta };
    let (point, base_velocity, length) = if round {
        let theta = rng.random_range(1.1..=2.0);
        let phi = rng.random_range(0.0..2.0 * PI);
        let psi = FRAC_PI_2 + rng.random_range(-0.6..=0.6);
        let v = [psi.cos(), psi.sin() / f64::sin(theta)];
        ([theta, phi, rng.random_range(-1.0..=1.0)], v, rng.random_range(3.0..=7.0))
    } else {
        let psi = rng.random_range(0.0..2.0 * PI);
        (
            [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)],
            [psi.cos(), psi.sin()],
            rng.random_range(2.0..=5.0),
        )
    };
    Scenario {
        name: format!("fuzz-{index:03}"),
        model: ModelSpec::Stationary { base },
        seed: SeedSpec {
            point: point.to_vec(),
            velocity: None,
            base_velocity: Some(base_velocity.to_vec()),
            interval: [0.0, length],
            steps,
        },
        boundary: BoundarySpec::point(),
    }
}

/// `n` random scenarios from `seed`, each verified independently.
pub fn fuzz(n: usize, seed: u64, steps: usize, tol: &Tolerances) -> Vec<FuzzCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scenarios: Vec<Scenario> = (0..n).map(|i| random_scenario(&mut rng, i, steps)).collect();
    let threads = std::thread::available_parallelism().map(|k| k.get()).unwrap_or(1).min(8);
    let chunk = n.div_ceil(threads.max(1)).max(1);
    let mut cases: Vec<FuzzCase> = std::thread::scope(|s| {
        let handles: Vec<_> = scenarios
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|sc| FuzzCase {
                            scenario: sc.clone(),
                            outcome: run_scenario(sc, tol).map_err(|e| e.to_string()),
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("fuzz worker panicked")).collect()
    });
    cases.sort_by(|a, b| a.scenario.name.cmp(&b.scenario.name));
    cases
}

#[derive(Serialize)]
struct Reproduction<'a> {
    #[serde(flatten)]
    scenario: &'a Scenario,
    tolerances: &'a Tolerances,
}

/// A run configuration reproducing `scenario` with tolerances `tol`.
pub fn reproduction_config(scenario: &Scenario, tol: &Tolerances) -> String {
    toml::to_string(&Reproduction { scenario, tolerances: tol }).expect("scenario serializes to TOML")
}

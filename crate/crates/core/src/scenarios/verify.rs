//! End-to-end check of `μ_𝒬(γ) = μ_𝒫(x)` for `𝒬 = π⁻¹(𝒫)` along a horizontal geodesic.

use super::recipe::{BoundarySpec, Scenario, SeedSpec};
use crate::error::Result;
use crate::geometry::{integrate_geodesic_maximal, jacobi_field_direct, GeodesicPath};
use crate::half::HalfInteger;
use crate::jacobi_maslov::{conjugate_counts, detect_focal_instants, ConjugateCounts, FocalReport, JacobiSystem};
use crate::submersion::{lift_geodesic_check, lift_submanifold, project_curve, SubmersionSpec};
use crate::tolerances::Tolerances;
use serde::Serialize;

/// Two instants closer than this are the same focal instant seen from both levels.
pub const MATCH_TOL: f64 = 1e-6;

/// A focal instant of `γ` paired with one of `x`.
#[derive(Debug, Clone, Serialize)]
pub struct InstantMatch {
    pub t_total: Option<f64>,
    pub t_base: Option<f64>,
    pub contribution_total: Option<HalfInteger>,
    pub contribution_base: Option<HalfInteger>,
    /// Both sides are nondegenerate and isolated, so contributions are compared.
    pub compared: bool,
    pub agree: bool,
}

/// Numerical health of a run.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Residuals {
    /// `max ‖𝒱γ̇‖/(1 + ‖γ̇‖)` along the geodesic.
    pub verticality: f64,
    /// Geodesic residual of `x = π∘γ` in the base.
    pub base_geodesic: f64,
    /// `max ‖Lᵀ g L − g_base‖/(1 + ‖g_base‖)` along `γ`, `L` the horizontal lift.
    pub horizontal_isometry: f64,
    /// Largest `‖ΦᵀΩΦ − Ω‖_F` of both flows.
    pub symplectic_drift: f64,
    /// Largest relative deviation between flow and directly integrated Jacobi fields.
    pub flow_vs_direct: f64,
}

/// One named check with its measured value and the limit it is held to.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, limit: f64) -> Check {
        Check {
            name: name.into(),
            value,
            limit,
            pass: value <= limit,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioResult {
    pub name: String,
    pub inputs: Option<Scenario>,
    /// Interval actually analysed (shorter than requested after a patch exit).
    pub interval: [f64; 2],
    pub patch_exit: Option<f64>,
    pub mu_q: HalfInteger,
    pub mu_p: HalfInteger,
    pub total: FocalReport,
    pub base: FocalReport,
    pub matches: Vec<InstantMatch>,
    pub residuals: Residuals,
    /// Conjugate counts for causal geodesics of a Lorentzian submersion over a Lorentzian base.
    pub counts: Option<ConjugateCounts>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl ScenarioResult {
    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn any_cluster(&self) -> bool {
        self.total.instants.iter().chain(&self.base.instants).any(|i| i.cluster)
    }
}

fn pair_instants(total: &FocalReport, base: &FocalReport) -> Vec<InstantMatch> {
    let mut out = Vec::new();
    let mut used = vec![false; base.instants.len()];
    for ti in &total.instants {
        let best = base
            .instants
            .iter()
            .enumerate()
            .filter(|(k, bi)| !used[*k] && (bi.t - ti.t).abs() <= MATCH_TOL)
            .min_by(|x, y| (x.1.t - ti.t).abs().total_cmp(&(y.1.t - ti.t).abs()));
        match best {
            Some((k, bi)) => {
                used[k] = true;
                let compared = !(ti.degenerate || ti.cluster || bi.degenerate || bi.cluster);
                out.push(InstantMatch {
                    t_total: Some(ti.t),
                    t_base: Some(bi.t),
                    contribution_total: Some(ti.contribution),
                    contribution_base: Some(bi.contribution),
                    compared,
                    agree: !compared || ti.contribution == bi.contribution,
                });
            }
            None => out.push(InstantMatch {
                t_total: Some(ti.t),
                t_base: None,
                contribution_total: Some(ti.contribution),
                contribution_base: None,
                compared: false,
                agree: false,
            }),
        }
    }
    for (k, bi) in base.instants.iter().enumerate() {
        if !used[k] {
            out.push(InstantMatch {
                t_total: None,
                t_base: Some(bi.t),
                contribution_total: None,
                contribution_base: Some(bi.contribution),
                compared: false,
                agree: false,
            });
        }
    }
    out.sort_by(|a, b| {
        let ta = a.t_total.or(a.t_base).unwrap_or(0.0);
        let tb = b.t_total.or(b.t_base).unwrap_or(0.0);
        ta.total_cmp(&tb)
    });
    out
}

fn horizontal_isometry(spec: &SubmersionSpec, gamma: &GeodesicPath) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in gamma.points() {
        let split = spec.split(p.as_slice())?;
        let gb = spec.base().eval(spec.project(p.as_slice()).as_slice())?;
        let pulled = split.lift.transpose() * &split.g * &split.lift;
        worst = worst.max((pulled - &gb).norm() / (1.0 + gb.norm()));
    }
    Ok(worst)
}

/// Largest relative deviation between the flow image of each column of `L_𝒬` and the
/// Jacobi field integrated directly from the same initial data.
fn flow_vs_direct(sys: &JacobiSystem, l: &crate::symplectic::LagrangianFrame) -> Result<f64> {
    let n = sys.half_dim();
    let p_a = &sys.frame().frames()[0];
    let x_a = sys.curve().points()[0].as_slice();
    let pg = p_a.transpose() * sys.metric().eval(x_a)?;
    let lu = pg.lu();
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let state = l.columns().column(k).into_owned();
        let flow_vals = sys.jacobi_values(&state);
        let j_a = p_a * state.rows(0, n);
        let dj_a = lu
            .solve(&state.rows(n, n).into_owned())
            .ok_or_else(|| crate::Error::InvalidFrame("singular frame at the initial instant".into()))?;
        let direct = jacobi_field_direct(sys.metric(), sys.curve(), &j_a, &dj_a)?;
        let scale = 1.0 + direct.max_norm();
        for (a, b) in flow_vals.iter().zip(direct.values()) {
            worst = worst.max((a - b).norm() / scale);
        }
    }
    Ok(worst)
}

/// Integrates the horizontal geodesic, analyses `γ` against `𝒬 = π⁻¹(𝒫)` and `x` against `𝒫`,
/// and checks index equality, per-instant agreement and numerical health.
pub fn verify_main_theorem(
    spec: &SubmersionSpec,
    seed: &SeedSpec,
    boundary: &BoundarySpec,
    tol: &Tolerances,
) -> Result<ScenarioResult> {
    let (p0, v0) = seed.initial_data(spec, 1e-8)?;
    let [a, b] = seed.interval;
    let (gamma, patch_exit) = integrate_geodesic_maximal(spec.total(), p0.as_slice(), v0.as_slice(), a, b, seed.steps)?;
    analyse(spec, &gamma, patch_exit, boundary, tol)
}

fn analyse(
    spec: &SubmersionSpec,
    gamma: &GeodesicPath,
    patch_exit: Option<f64>,
    boundary: &BoundarySpec,
    tol: &Tolerances,
) -> Result<ScenarioResult> {
    let lift = lift_geodesic_check(spec, gamma)?;
    let x = project_curve(spec, gamma)?;
    let pdata = boundary.build(spec.base(), &x.points()[0], &x.velocities()[0], 1e-8)?;
    let qdata = lift_submanifold(spec, &pdata, gamma.points()[0].as_slice(), &gamma.velocities()[0], 1e-8)?;

    let total_sys = JacobiSystem::new(spec.total(), gamma, None, tol)?;
    let total_bd = total_sys.boundary(&qdata)?;
    let total = detect_focal_instants(&total_sys, &total_bd)?;
    let base_sys = JacobiSystem::new(spec.base(), &x, None, tol)?;
    let base_bd = base_sys.boundary(&pdata)?;
    let base = detect_focal_instants(&base_sys, &base_bd)?;

    let residuals = Residuals {
        verticality: lift.max_verticality,
        base_geodesic: lift.projection_residual,
        horizontal_isometry: horizontal_isometry(spec, gamma)?,
        symplectic_drift: total_sys.flow().max_drift().max(base_sys.flow().max_drift()),
        flow_vs_direct: flow_vs_direct(&total_sys, &total_sys.lq(&total_bd)?)?
            .max(flow_vs_direct(&base_sys, &base_sys.lq(&base_bd)?)?),
    };

    let g0 = spec.total().inner(gamma.points()[0].as_slice(), &gamma.velocities()[0], &gamma.velocities()[0])?;
    let causal = spec.total().index() == 1 && spec.base().index() == 1 && g0 <= 0.0;
    let counts = if causal {
        Some(conjugate_counts(spec, gamma, tol)?)
    } else {
        None
    };

    let matches = pair_instants(&total, &base);
    let mu_q = total.total_index;
    let mu_p = base.total_index;
    let worst_dt = matches
        .iter()
        .map(|m| match (m.t_total, m.t_base) {
            (Some(s), Some(t)) => (s - t).abs(),
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    let mut checks = vec![
        Check {
            name: "index_equality".into(),
            value: (mu_q.to_f64() - mu_p.to_f64()).abs(),
            limit: 0.0,
            pass: mu_q == mu_p,
        },
        Check::at_most("instant_pairing", worst_dt, MATCH_TOL),
        Check {
            name: "contribution_agreement".into(),
            value: matches.iter().filter(|m| !m.agree).count() as f64,
            limit: 0.0,
            pass: matches.iter().all(|m| m.agree),
        },
        Check::at_most("horizontality", residuals.verticality, 1e-6),
        Check::at_most("horizontal_isometry", residuals.horizontal_isometry, tol.rank),
        Check::at_most("symplectic_drift", residuals.symplectic_drift, tol.sympl),
        Check::at_most("flow_vs_direct", residuals.flow_vs_direct, tol.resid),
    ];
    if let Some(c) = &counts {
        let slack = c.i_x as f64 - (c.i_gamma + c.omega_n) as f64;
        checks.push(Check {
            name: "lorentzian_inequality".into(),
            value: slack,
            limit: 0.0,
            pass: c.i_x >= c.i_gamma + c.omega_n,
        });
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(ScenarioResult {
        name: String::new(),
        inputs: None,
        interval: [gamma.start(), gamma.end()],
        patch_exit,
        mu_q,
        mu_p,
        total,
        base,
        matches,
        residuals,
        counts,
        checks,
        pass,
    })
}

/// Builds and verifies `scenario`.
pub fn run_scenario(scenario: &Scenario, tol: &Tolerances) -> Result<ScenarioResult> {
    let spec = scenario.model.build()?.with_fd_step(tol.fd_step);
    let mut r = verify_main_theorem(&spec, &scenario.seed, &scenario.boundary, tol)?;
    r.name = scenario.name.clone();
    r.inputs = Some(scenario.clone());
    Ok(r)
}

/// Base focal instants `t` reported for `x`, for comparison with closed forms.
pub fn base_instants(r: &ScenarioResult) -> Vec<f64> {
    r.base.instants.iter().map(|i| i.t).collect()
}


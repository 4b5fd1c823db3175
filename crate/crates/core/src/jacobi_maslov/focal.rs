use super::boundary::BoundaryData;
use super::system::JacobiSystem;
use crate::error::Result;
use crate::half::HalfInteger;
use crate::linalg::{g_orthogonal_complement, Mat};
use crate::symplectic::{maslov_index, LagrangianFrame, SymmetricForm};
use serde::Serialize;

/// Singular values of the `v`-block below this count toward the kernel at a refined instant.
const KERNEL_SPLIT: f64 = 1e-3;

/// One focal instant with its multiplicity and contribution to the Maslov index.
#[derive(Debug, Clone, Serialize)]
pub struct FocalInstant {
    pub t: f64,
    pub kernel_dim: usize,
    /// Maslov index of `ℓ` over a short window around `t`.
    pub contribution: HalfInteger,
    /// Signature of `g` on `J[t]^⊥`, when that form is non-degenerate.
    pub predicted: Option<i64>,
    /// The induced metric on `J[t]^⊥` is degenerate.
    pub degenerate: bool,
    /// Another instant or a near-zero singular value lies within the localization tolerance.
    pub cluster: bool,
}

/// Focal instants of a geodesic relative to an initial submanifold.
#[derive(Debug, Clone, Serialize)]
pub struct FocalReport {
    pub instants: Vec<FocalInstant>,
    pub total_index: HalfInteger,
    pub start: f64,
    pub end: f64,
}

impl FocalReport {
    /// Sum of per-instant contributions.
    pub fn contribution_sum(&self) -> HalfInteger {
        HalfInteger::from_twice(self.instants.iter().map(|i| i.contribution.twice()).sum())
    }

    pub fn any_flagged(&self) -> bool {
        self.instants.iter().any(|i| i.degenerate || i.cluster)
    }

    /// Number of focal instants in the open interval, counted with multiplicity.
    pub fn count_with_multiplicity(&self, t_tol: f64) -> usize {
        self.instants
            .iter()
            .filter(|i| i.t > self.start + t_tol && i.t < self.end - t_tol)
            .map(|i| i.kernel_dim)
            .sum()
    }
}

/// `J[t₀] = {J(t₀)}` over 𝒬-Jacobi fields, and its `g`-orthogonal complement.
#[derive(Debug, Clone)]
pub struct JacobiEvaluation {
    /// Basis of `J[t₀]` in manifold coordinates.
    pub image: Mat,
    /// Basis of `J[t₀]^⊥` in manifold coordinates.
    pub complement: Mat,
    /// `g` on the complement.
    pub induced: SymmetricForm,
    pub degenerate: bool,
}

impl JacobiEvaluation {
    pub fn signature(&self) -> i64 {
        self.induced.signature().value()
    }
}

fn sigma_min_v(l: &LagrangianFrame) -> f64 {
    crate::linalg::min_singular(&l.v_block())
}

/// Maslov index of `t ↦ Φ(t)[L_𝒬]` relative to `L₀ = {0} ⊕ ℝⁿ*`, over the grid instants after `a`.
pub fn q_maslov_index(sys: &JacobiSystem, bd: &BoundaryData) -> Result<HalfInteger> {
    let lq = sys.lq(bd)?;
    let last = sys.grid().len() - 1;
    let path = sys.lagrangian_path(&lq, 1, last)?;
    maslov_index(&path, &LagrangianFrame::vertical(sys.half_dim()))
}

/// `J[t₀]` from the `v`-block of `ℓ(t₀)` and its complement.
pub fn jacobi_space_evaluation(sys: &JacobiSystem, bd: &BoundaryData, t0: f64) -> Result<JacobiEvaluation> {
    let lq = sys.lq(bd)?;
    let l = sys.evolve(&lq, t0)?;
    evaluation_from(sys, &l, t0)
}

fn evaluation_from(sys: &JacobiSystem, l: &LagrangianFrame, t0: f64) -> Result<JacobiEvaluation> {
    let n = sys.half_dim();
    let svd = l.v_block().svd(true, false);
    let u = svd.u.expect("requested U");
    let cols: Vec<_> = (0..n)
        .filter(|&i| svd.singular_values[i] > KERNEL_SPLIT)
        .map(|i| u.column(i).into_owned())
        .collect();
    let p = sys.frame_at(t0);
    let image = if cols.is_empty() {
        Mat::zeros(n, 0)
    } else {
        &p * Mat::from_columns(&cols)
    };
    let (x, _, _) = sys.curve().interpolate(t0);
    let g = sys.metric().eval(x.as_slice())?;
    let complement = g_orthogonal_complement(&image, &g, 1e-8);
    let induced_m = complement.transpose() * &g * &complement;
    let tol = sys.tolerances().rank.max(1e-6);
    let induced = SymmetricForm::new(induced_m, tol);
    let degenerate = induced.signature().zero > 0;
    Ok(JacobiEvaluation {
        image,
        complement,
        induced,
        degenerate,
    })
}

/// Golden-section minimization of `σ_min` on `[lo, hi]`.
fn refine<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64, t_tol: f64) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > t_tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let (fl, fh) = (f(lo)?, f(hi)?);
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if fl < best.1 {
        best = (lo, fl);
    }
    if fh < best.1 {
        best = (hi, fh);
    }
    Ok(best)
}

/// Focal instants in `(a, b]`, located at minima of the smallest singular value of the
/// `v`-block of `ℓ(t)` and refined to `t_rel · (b − a)`.
pub fn detect_focal_instants(sys: &JacobiSystem, bd: &BoundaryData) -> Result<FocalReport> {
    let lq = sys.lq(bd)?;
    let grid = sys.grid().to_vec();
    let last = grid.len() - 1;
    let (a, b) = (grid[0], grid[last]);
    let tol = sys.tolerances();
    let t_tol = tol.t_rel * (b - a);
    let sig: Vec<f64> = (0..=last)
        .map(|i| {
            let l = LagrangianFrame::with_tol(&sys.flow().samples()[i] * lq.columns(), 1e-8)?;
            Ok(sigma_min_v(&l))
        })
        .collect::<Result<_>>()?;
    let mut found: Vec<(f64, Vec<f64>)> = Vec::new();
    for i in 1..=last {
        let left = sig[i - 1];
        let right = if i < last { sig[i + 1] } else { f64::INFINITY };
        if i == 1 && left <= sig[i] {
            // the degeneracy at a itself
            continue;
        }
        if !(sig[i] <= left && sig[i] < right) || sig[i] > 0.25 {
            continue;
        }
        let lo = if i == 1 { 0.5 * (grid[0] + grid[1]) } else { grid[i - 1] };
        let hi = if i < last { grid[i + 1] } else { b };
        let eval = |t: f64| -> Result<f64> { Ok(sigma_min_v(&sys.evolve(&lq, t)?)) };
        let (t0, s0) = refine(eval, lo, hi, t_tol)?;
        if s0 > tol.focal_zero {
            continue;
        }
        let l = sys.evolve(&lq, t0)?;
        let svals = crate::linalg::singular_values(&l.v_block());
        found.push((t0, svals));
    }
    found.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    found.dedup_by(|x, y| (x.0 - y.0).abs() <= 2.0 * t_tol);

    let h_of = |t: f64| {
        let i = crate::geometry::geodesic::locate(&grid, t);
        grid[i + 1] - grid[i]
    };
    let l0 = LagrangianFrame::vertical(sys.half_dim());
    let mut instants = Vec::with_capacity(found.len());
    for (k, (t0, svals)) in found.iter().enumerate() {
        let t0 = *t0;
        let kernel_dim = svals.iter().filter(|&&s| s <= KERNEL_SPLIT).count();
        let near_zero = svals.iter().any(|&s| s > tol.focal_zero && s <= KERNEL_SPLIT);
        let mut w = h_of(t0);
        if k > 0 {
            w = w.min(0.5 * (t0 - found[k - 1].0));
        }
        if k + 1 < found.len() {
            w = w.min(0.5 * (found[k + 1].0 - t0));
        }
        let cluster = near_zero || w < 10.0 * t_tol;
        let lo = (t0 - w).max(grid[1].min(t0));
        let hi = (t0 + w).min(b);
        let mut pts = vec![lo, 0.5 * (lo + t0), t0, 0.5 * (t0 + hi), hi];
        pts.dedup_by(|x, y| (*x - *y).abs() <= 0.0);
        let contribution = maslov_index(&sys.lagrangian_path_at(&lq, &pts)?, &l0)?;
        let l = sys.evolve(&lq, t0)?;
        let ev = evaluation_from(sys, &l, t0)?;
        let predicted = if ev.degenerate { None } else { Some(ev.signature()) };
        instants.push(FocalInstant {
            t: t0,
            kernel_dim,
            contribution,
            predicted,
            degenerate: ev.degenerate,
            cluster,
        });
    }
    Ok(FocalReport {
        instants,
        total_index: q_maslov_index(sys, bd)?,
        start: a,
        end: b,
    })
}

use super::focal::detect_focal_instants;
use super::system::JacobiSystem;
use crate::error::Result;
use crate::geometry::GeodesicPath;
use crate::linalg::{orthonormalize, singular_values, Mat};
use crate::submersion::{project_curve, SubmersionSpec};
use crate::tolerances::Tolerances;
use serde::Serialize;

/// Conjugate-point counts of a horizontal geodesic and its projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConjugateCounts {
    /// `dim{J : J(a) = J(b) = 0}` along `γ`.
    pub omega: usize,
    /// The same restricted to Jacobi fields of the fiber through `γ(a)`.
    pub omega_delta: usize,
    pub omega_n: usize,
    /// Conjugate instants of `γ` in `(a, b)` with multiplicity.
    pub i_gamma: usize,
    /// Conjugate instants of `π∘γ` in `(a, b)` with multiplicity.
    pub i_x: usize,
    /// A singular value fell within two decades of the rank threshold.
    pub uncertain: bool,
}

/// Number of columns of `initial` (an isotropic initial subspace) whose Jacobi fields vanish at `b`.
fn vanishing_at_end(sys: &JacobiSystem, initial: &Mat, zero: f64) -> (usize, bool) {
    let n = sys.half_dim();
    let m = initial.ncols();
    if m == 0 {
        return (0, false);
    }
    let phi = sys.flow().samples().last().expect("non-empty flow");
    let image = phi * initial;
    let q = orthonormalize(&image, 1e-12).expect("flow is invertible");
    let v = q.rows(0, n).into_owned();
    let s = singular_values(&v);
    let rank = s.iter().filter(|&&x| x > zero).count();
    let uncertain = s.iter().any(|&x| x > zero && x <= 100.0 * zero);
    (m - rank, uncertain)
}

/// `ω(γ)`, `ω_δ(γ)`, `ω_n(γ)` and the conjugate-instant counts `i(γ)`, `i(x)`.
pub fn conjugate_counts(spec: &SubmersionSpec, gamma: &GeodesicPath, tol: &Tolerances) -> Result<ConjugateCounts> {
    let total = JacobiSystem::new(spec.total(), gamma, None, tol)?;
    let n = total.half_dim();
    let zero = tol.focal_zero;
    let mut l0 = Mat::zeros(2 * n, n);
    l0.view_mut((n, 0), (n, n)).copy_from(&Mat::identity(n, n));
    let (omega, u1) = vanishing_at_end(&total, &l0, zero);

    // J(a) = 0 with DJ/dt(a) horizontal: α = pᵀ g h for horizontal h
    let p_a = &total.frame().frames()[0];
    let x_a = gamma.points()[0].as_slice();
    let split = spec.split(x_a)?;
    let hor = &split.g * &split.lift;
    let mut delta = Mat::zeros(2 * n, hor.ncols());
    delta.view_mut((n, 0), (n, hor.ncols())).copy_from(&(p_a.transpose() * hor));
    let (omega_delta, u2) = vanishing_at_end(&total, &delta, zero);

    let t_tol = tol.t_rel * (gamma.end() - gamma.start()) * 10.0;
    let i_gamma = detect_focal_instants(&total, &total.point_boundary()?)?.count_with_multiplicity(t_tol);
    let x = project_curve(spec, gamma)?;
    let base = JacobiSystem::new(spec.base(), &x, None, tol)?;
    let i_x = detect_focal_instants(&base, &base.point_boundary()?)?.count_with_multiplicity(t_tol);
    Ok(ConjugateCounts {
        omega,
        omega_delta,
        omega_n: omega.saturating_sub(omega_delta),
        i_gamma,
        i_x,
        uncertain: u1 || u2,
    })
}

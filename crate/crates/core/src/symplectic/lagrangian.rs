use super::form::SymmetricForm;
use crate::error::{Error, Result};
use crate::linalg::{min_singular, orthonormalize, rank, singular_values, spectral_norm, Mat};

/// Default isotropy / rank threshold for Lagrangian frames.
pub const FRAME_TOL: f64 = 1e-8;

/// Matrix of ω((v,α),(w,β)) = β(v) − α(w) on ℝⁿ ⊕ ℝⁿ*, i.e. `[[0, I], [−I, 0]]`.
pub fn omega_matrix(n: usize) -> Mat {
    let mut m = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = 1.0;
        m[(n + i, i)] = -1.0;
    }
    m
}

/// A linear map of ℝⁿ ⊕ ℝⁿ* preserving ω.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    n: usize,
    entries: Mat,
}

impl SymplecticMatrix {
    pub fn new(entries: Mat, tol: f64) -> Result<Self> {
        let s = SymplecticMatrix::new_unchecked(entries)?;
        let drift = s.drift();
        if drift > tol * spectral_norm(&s.entries).powi(2).max(1.0) {
            return Err(Error::InvalidSymplectomorphism(format!(
                "‖MᵀΩM − Ω‖_F = {drift:.3e}"
            )));
        }
        Ok(s)
    }

    /// Wraps `entries` after a shape check only.
    pub fn new_unchecked(entries: Mat) -> Result<Self> {
        if !entries.is_square() || entries.nrows() % 2 != 0 || entries.nrows() == 0 {
            return Err(Error::InvalidDimension(format!(
                "symplectic matrix must be 2n×2n, got {}×{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(SymplecticMatrix {
            n: entries.nrows() / 2,
            entries,
        })
    }

    pub fn identity(n: usize) -> Self {
        SymplecticMatrix {
            n,
            entries: Mat::identity(2 * n, 2 * n),
        }
    }

    pub fn half_dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &Mat {
        &self.entries
    }

    pub fn into_entries(self) -> Mat {
        self.entries
    }

    /// Frobenius norm of `MᵀΩM − Ω`.
    pub fn drift(&self) -> f64 {
        let om = omega_matrix(self.n);
        (self.entries.transpose() * &om * &self.entries - om).norm()
    }

    pub fn is_symplectic(&self, tol: f64) -> bool {
        self.drift() <= tol * spectral_norm(&self.entries).powi(2).max(1.0)
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix {
            n: self.n,
            entries: &self.entries * &other.entries,
        }
    }
}

/// The form matrix Ω as a symplectic matrix.
pub fn canonical_omega(n: usize) -> Result<SymplecticMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("n must be at least 1".into()));
    }
    Ok(SymplecticMatrix {
        n,
        entries: omega_matrix(n),
    })
}

/// Orthonormal 2n×n frame of a Lagrangian subspace of (ℝⁿ ⊕ ℝⁿ*, ω).
///
/// The first n rows are the ℝⁿ ("v") coordinates, the last n the ℝⁿ* ("α") ones.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianFrame {
    n: usize,
    columns: Mat,
}

impl LagrangianFrame {
    pub fn new(columns: Mat) -> Result<Self> {
        LagrangianFrame::with_tol(columns, FRAME_TOL)
    }

    /// Validates rank and isotropy and stores an orthonormal basis of the span.
    pub fn with_tol(columns: Mat, tol: f64) -> Result<Self> {
        let n = columns.ncols();
        if n == 0 || columns.nrows() != 2 * n {
            return Err(Error::InvalidDimension(format!(
                "Lagrangian frame must be 2n×n, got {}×{}",
                columns.nrows(),
                n
            )));
        }
        if rank(&columns, tol) != n {
            return Err(Error::InvalidFrame("columns are not independent".into()));
        }
        let q = orthonormalize(&columns, tol)
            .ok_or_else(|| Error::InvalidFrame("columns are not independent".into()))?;
        let iso = (q.transpose() * omega_matrix(n) * &q).norm();
        if iso > tol.max(1e-12) * 10.0 {
            return Err(Error::InvalidFrame(format!("not isotropic: ‖FᵀΩF‖ = {iso:.3e}")));
        }
        Ok(LagrangianFrame { n, columns: q })
    }

    /// `{0} ⊕ ℝⁿ*`.
    pub fn vertical(n: usize) -> Self {
        let mut c = Mat::zeros(2 * n, n);
        for i in 0..n {
            c[(n + i, i)] = 1.0;
        }
        LagrangianFrame { n, columns: c }
    }

    /// `ℝⁿ ⊕ {0}`.
    pub fn horizontal(n: usize) -> Self {
        let mut c = Mat::zeros(2 * n, n);
        for i in 0..n {
            c[(i, i)] = 1.0;
        }
        LagrangianFrame { n, columns: c }
    }

    pub fn half_dim(&self) -> usize {
        self.n
    }

    pub fn columns(&self) -> &Mat {
        &self.columns
    }

    /// The ℝⁿ block (first n rows).
    pub fn v_block(&self) -> Mat {
        self.columns.rows(0, self.n).into_owned()
    }

    /// The ℝⁿ* block (last n rows).
    pub fn alpha_block(&self) -> Mat {
        self.columns.rows(self.n, self.n).into_owned()
    }

    /// Matrix of ω between `other` and `self`: `otherᵀ Ω self`. Invertible iff transverse.
    pub fn pairing(&self, other: &LagrangianFrame) -> Mat {
        other.columns.transpose() * omega_matrix(self.n) * &self.columns
    }

    /// Sines of the principal angles between `self` and the Euclidean complement of `other`,
    /// i.e. a scale-free transversality measure in `[0, 1]`.
    pub fn transversality(&self, other: &LagrangianFrame) -> f64 {
        min_singular(&self.pairing(other))
    }

    /// `dim(self ∩ other)` decided with threshold `tol`.
    pub fn intersection_dim(&self, other: &LagrangianFrame, tol: f64) -> usize {
        singular_values(&self.pairing(other))
            .iter()
            .filter(|&&s| s <= tol)
            .count()
    }
}

/// The symmetric form φ_{L0,L1}(L) = ω(T·,·)|_{L0×L0}, where `T: L0 → L1` has graph `L`,
/// expressed in the orthonormal basis stored in `l0`.
pub fn chart_value(
    l: &LagrangianFrame,
    l0: &LagrangianFrame,
    l1: &LagrangianFrame,
) -> Result<SymmetricForm> {
    chart_value_with_tol(l, l0, l1, FRAME_TOL)
}

pub fn chart_value_with_tol(
    l: &LagrangianFrame,
    l0: &LagrangianFrame,
    l1: &LagrangianFrame,
    tol: f64,
) -> Result<SymmetricForm> {
    let n = l.half_dim();
    if l0.half_dim() != n || l1.half_dim() != n {
        return Err(Error::InvalidDimension("chart frames differ in dimension".into()));
    }
    if l0.transversality(l1) <= tol {
        return Err(Error::InvalidChart);
    }
    if l.transversality(l1) <= tol {
        return Err(Error::ChartDomainViolation);
    }
    Ok(chart_form(l, l0, l1, tol))
}

/// Unchecked chart evaluation; callers guarantee transversality.
pub(crate) fn chart_form(l: &LagrangianFrame, l0: &LagrangianFrame, l1: &LagrangianFrame, tol: f64) -> SymmetricForm {
    let n = l.half_dim();
    let mut basis = Mat::zeros(2 * n, 2 * n);
    basis.view_mut((0, 0), (2 * n, n)).copy_from(l0.columns());
    basis.view_mut((0, n), (2 * n, n)).copy_from(l1.columns());
    let coeffs = basis
        .lu()
        .solve(l.columns())
        .expect("L0 ⊕ L1 checked to be a decomposition");
    let p = coeffs.rows(0, n).into_owned();
    let q = coeffs.rows(n, n).into_owned();
    let t = q * p.try_inverse().expect("L checked transverse to L1");
    let form = t.transpose() * l1.columns().transpose() * omega_matrix(n) * l0.columns();
    SymmetricForm::new(form, tol)
}

/// The frame spanning `phi(L)`.
pub fn apply_symplectomorphism(phi: &SymplecticMatrix, l: &LagrangianFrame) -> Result<LagrangianFrame> {
    if phi.half_dim() != l.half_dim() {
        return Err(Error::InvalidDimension("symplectomorphism and frame differ in dimension".into()));
    }
    if !phi.is_symplectic(FRAME_TOL) {
        return Err(Error::InvalidSymplectomorphism(format!("drift {:.3e}", phi.drift())));
    }
    LagrangianFrame::new(phi.entries() * l.columns())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Mat {
        let a = Mat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        &a + a.transpose()
    }

    /// Random Lagrangian `S·graph(M)` for a random symplectic shear-rotation `S`.
    fn random_lagrangian(rng: &mut ChaCha8Rng, n: usize, force_meet: Option<(&LagrangianFrame, usize)>) -> LagrangianFrame {
        let m = random_symmetric(rng, n);
        let mut cols = Mat::zeros(2 * n, n);
        cols.view_mut((0, 0), (n, n)).copy_from(&Mat::identity(n, n));
        cols.view_mut((n, 0), (n, n)).copy_from(&m);
        let l = LagrangianFrame::new(cols).unwrap();
        match force_meet {
            None => l,
            Some((l0, k)) => {
                // k vectors from l0, the rest from the ω-orthogonal of those inside a random Lagrangian
                let take = l0.columns().columns(0, k).into_owned();
                let om = omega_matrix(n);
                // complete `take` to a Lagrangian: add vectors of l ∩ take^ω
                let constraint = take.transpose() * &om * l.columns();
                let kern = crate::linalg::null_space(&constraint, 1e-12);
                let extra = l.columns() * kern;
                let mut all = Mat::zeros(2 * n, k + extra.ncols());
                all.view_mut((0, 0), (2 * n, k)).copy_from(&take);
                all.view_mut((0, k), (2 * n, extra.ncols())).copy_from(&extra);
                let q = orthonormalize(&all, 1e-10).unwrap();
                LagrangianFrame::new(q.columns(0, n).into_owned()).unwrap()
            }
        }
    }

    #[test]
    fn omega_small_cases() {
        let o1 = canonical_omega(1).unwrap();
        assert_eq!(o1.entries(), &Mat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let o2 = canonical_omega(2).unwrap();
        let expected = Mat::from_row_slice(
            4,
            4,
            &[0., 0., 1., 0., 0., 0., 0., 1., -1., 0., 0., 0., 0., -1., 0., 0.],
        );
        assert_eq!(o2.entries(), &expected);
        for n in 1..5 {
            let o = canonical_omega(n).unwrap().into_entries();
            assert_eq!(o.transpose(), -&o);
            assert_eq!(&o * &o, -Mat::identity(2 * n, 2 * n));
        }
        assert!(matches!(canonical_omega(0), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn chart_at_base_is_zero() {
        let l0 = LagrangianFrame::horizontal(2);
        let l1 = LagrangianFrame::vertical(2);
        let f = chart_value(&l0, &l0, &l1).unwrap();
        assert!(f.entries().norm() < 1e-15);
    }

    #[test]
    fn one_dimensional_chart_entry() {
        // ω(T e₁, e₁) with T e₁ = (0, c) is β(v) − α(w) = 0 − c·1 = −c.
        let c = 0.37;
        let l0 = LagrangianFrame::new(Mat::from_column_slice(2, 1, &[1.0, 0.0])).unwrap();
        let l1 = LagrangianFrame::new(Mat::from_column_slice(2, 1, &[0.0, 1.0])).unwrap();
        let l = LagrangianFrame::new(Mat::from_column_slice(2, 1, &[1.0, c])).unwrap();
        let f = chart_value(&l, &l0, &l1).unwrap();
        assert!((f.entries()[(0, 0)] + c).abs() < 1e-14);
    }

    #[test]
    fn chart_errors() {
        let l0 = LagrangianFrame::horizontal(1);
        let l1 = LagrangianFrame::vertical(1);
        assert_eq!(chart_value(&l1, &l0, &l1), Err(Error::ChartDomainViolation));
        assert_eq!(chart_value(&l0, &l0, &l0), Err(Error::InvalidChart));
    }

    #[test]
    fn kernel_dimension_matches_intersection() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        for trial in 0..100 {
            let n = 1 + trial % 4;
            let l0 = random_lagrangian(&mut rng, n, None);
            let k = rng.random_range(0..=n);
            let l = random_lagrangian(&mut rng, n, Some((&l0, k)));
            let l1 = random_lagrangian(&mut rng, n, None);
            if l0.transversality(&l1) < 1e-3 || l.transversality(&l1) < 1e-3 {
                continue;
            }
            // oracle: dim(L ∩ L0) = 2n − rank([L | L0])
            let mut both = Mat::zeros(2 * n, 2 * n);
            both.view_mut((0, 0), (2 * n, n)).copy_from(l.columns());
            both.view_mut((0, n), (2 * n, n)).copy_from(l0.columns());
            let inter = 2 * n - rank(&both, 1e-9);
            assert_eq!(inter, k);
            let f = chart_value(&l, &l0, &l1).unwrap();
            let sig = SymmetricForm::new(f.entries().clone(), 1e-9).signature();
            assert_eq!(sig.zero, inter, "trial {trial}");
            checked += 1;
        }
        assert!(checked > 80);
    }

    #[test]
    fn omega_swaps_factors() {
        let om = canonical_omega(3).unwrap();
        let out = apply_symplectomorphism(&om, &LagrangianFrame::vertical(3)).unwrap();
        assert!(out.transversality(&LagrangianFrame::vertical(3)) > 1.0 - 1e-12);
        assert_eq!(out.intersection_dim(&LagrangianFrame::horizontal(3), 1e-10), 3);
    }

    #[test]
    fn identity_keeps_span() {
        let l = LagrangianFrame::new(Mat::from_row_slice(4, 2, &[1., 0., 0., 1., 2., 1., 1., -3.])).unwrap();
        let out = apply_symplectomorphism(&SymplecticMatrix::identity(2), &l).unwrap();
        assert_eq!(out.intersection_dim(&l, 1e-10), 2);
    }

    #[test]
    fn lower_triangular_family_fixes_vertical() {
        // φ(t) = [[Z, 0], [Z*⁻¹W, Z*⁻¹]] with W symmetric preserves {0}⊕ℝⁿ*.
        let n = 3;
        let l0 = LagrangianFrame::vertical(n);
        for k in 0..20 {
            let t = k as f64 * 0.3;
            let z = Mat::from_fn(n, n, |i, j| if i == j { 2.0 + (t + i as f64).sin() } else { 0.3 * (t * (i + 2 * j) as f64).cos() });
            let w = Mat::from_fn(n, n, |i, j| (t + (i + j) as f64).sin());
            let zit = z.transpose().try_inverse().unwrap();
            let mut phi = Mat::zeros(2 * n, 2 * n);
            phi.view_mut((0, 0), (n, n)).copy_from(&z);
            phi.view_mut((n, 0), (n, n)).copy_from(&(&zit * &w));
            phi.view_mut((n, n), (n, n)).copy_from(&zit);
            let phi = SymplecticMatrix::new(phi, 1e-10).unwrap();
            let out = apply_symplectomorphism(&phi, &l0).unwrap();
            assert_eq!(out.intersection_dim(&l0, 1e-10), n);
        }
    }

    #[test]
    fn rejects_non_symplectic() {
        let m = Mat::identity(2, 2) * 2.0;
        let s = SymplecticMatrix::new_unchecked(m).unwrap();
        assert!(matches!(
            apply_symplectomorphism(&s, &LagrangianFrame::vertical(1)),
            Err(Error::InvalidSymplectomorphism(_))
        ));
    }

    #[test]
    fn rejects_non_isotropic_frame() {
        let c = Mat::from_row_slice(4, 2, &[1., 0., 0., 0., 0., 1., 0., 0.]);
        assert!(matches!(LagrangianFrame::new(c), Err(Error::InvalidFrame(_))));
    }
}

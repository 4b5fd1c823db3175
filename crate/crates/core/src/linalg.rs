//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// `(m + mᵀ)/2`.
pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

/// Largest singular value.
pub fn spectral_norm(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Singular values sorted in decreasing order.
pub fn singular_values(m: &Mat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Smallest singular value of a square (or tall) matrix; zero for rank-deficient wide ones.
pub fn min_singular(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.nrows() < m.ncols() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.min()
}

/// Numerical rank with the relative threshold `tol · max(1, ‖m‖₂)`.
pub fn rank(m: &Mat, tol: f64) -> usize {
    let s = singular_values(m);
    let thr = tol * s.first().copied().unwrap_or(0.0).max(1.0);
    s.iter().filter(|&&x| x > thr).count()
}

/// Orthonormal basis of the column span, via Householder QR with the diagonal of R made
/// positive. Fails if the columns are (numerically) dependent.
pub fn orthonormalize(m: &Mat, tol: f64) -> Option<Mat> {
    let k = m.ncols();
    if k == 0 {
        return Some(Mat::zeros(m.nrows(), 0));
    }
    let qr = m.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    let scale = r.diagonal().iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1e-300);
    for j in 0..k {
        let d = r[(j, j)];
        if d.abs() <= tol * scale.max(1.0) {
            return None;
        }
        if d < 0.0 {
            let mut col = q.column_mut(j);
            col.neg_mut();
        }
    }
    Some(q)
}

/// Orthonormal basis of the right null space of `m` (columns), rank decided with `tol`.
pub fn null_space(m: &Mat, tol: f64) -> Mat {
    let n = m.ncols();
    if m.nrows() == 0 {
        return Mat::identity(n, n);
    }
    // pad to at least square so the SVD returns a full V
    let rows = m.nrows().max(n);
    let mut a = Mat::zeros(rows, n);
    a.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let smax = svd.singular_values.max().max(1.0);
    let cols: Vec<Vector> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= tol * smax)
        .map(|i| vt.row(i).transpose())
        .collect();
    if cols.is_empty() {
        Mat::zeros(n, 0)
    } else {
        Mat::from_columns(&cols)
    }
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues in decreasing order.
pub fn sym_eigen(m: &Mat) -> (Vec<f64>, Mat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), Mat::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = Mat::from_columns(&idx.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
    (vals, vecs)
}

/// A basis `p` with `pᵀ g p = diag(+1, …, +1, −1, …, −1)`.
pub fn pseudo_orthonormal_basis(g: &Mat) -> Mat {
    let (vals, vecs) = sym_eigen(g);
    let mut p = vecs;
    for (j, &l) in vals.iter().enumerate() {
        let s = 1.0 / l.abs().sqrt();
        let mut c = p.column_mut(j);
        c *= s;
    }
    p
}

/// Columns spanning the `g`-orthogonal complement of the span of `basis`.
pub fn g_orthogonal_complement(basis: &Mat, g: &Mat, tol: f64) -> Mat {
    if basis.ncols() == 0 {
        return Mat::identity(g.nrows(), g.nrows());
    }
    null_space(&(basis.transpose() * g), tol)
}

/// Sine of the largest principal angle between the spans of two orthonormal frames.
pub fn max_principal_sine(a: &Mat, b: &Mat) -> f64 {
    let resid = a - b * (b.transpose() * a);
    spectral_norm(&resid).min(1.0)
}

/// Rotates `next` within its span to best match `prev` (orthogonal Procrustes).
pub fn align_frame(prev: &Mat, next: &Mat) -> Mat {
    let m = next.transpose() * prev;
    let svd = m.svd(true, true);
    let r = svd.u.unwrap() * svd.v_t.unwrap();
    next * r
}

/// `x` padded as a column vector.
pub fn vec_from(x: &[f64]) -> Vector {
    Vector::from_column_slice(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_wide_matrix() {
        let m = Mat::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let k = null_space(&m, 1e-12);
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).norm() < 1e-12);
    }

    #[test]
    fn pseudo_orthonormal_diagonalizes() {
        let g = Mat::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, -1.0, 0.0, 0.1, 0.0, 0.5]);
        let p = pseudo_orthonormal_basis(&g);
        let d = p.transpose() * &g * &p;
        let signs: Vec<f64> = (0..3).map(|i| d[(i, i)]).collect();
        assert_eq!(signs.iter().filter(|&&s| (s - 1.0).abs() < 1e-12).count(), 2);
        assert_eq!(signs.iter().filter(|&&s| (s + 1.0).abs() < 1e-12).count(), 1);
        assert!((d.clone() - Mat::from_diagonal(&d.diagonal())).norm() < 1e-12);
    }

    #[test]
    fn orthonormalize_rejects_dependent_columns() {
        let m = Mat::from_row_slice(3, 2, &[1.0, 2.0, 0.0, 0.0, 1.0, 2.0]);
        assert!(orthonormalize(&m, 1e-10).is_none());
    }
}

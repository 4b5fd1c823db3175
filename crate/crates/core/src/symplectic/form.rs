use crate::linalg::{spectral_norm, sym_eigen, symmetrize, Mat};
use serde::Serialize;

/// A real symmetric bilinear form together with the threshold used for rank decisions.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricForm {
    entries: Mat,
    tol: f64,
}

/// Counts of positive, negative and null eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub plus: usize,
    pub minus: usize,
    pub zero: usize,
}

impl Signature {
    /// `n₊ − n₋`.
    pub fn value(&self) -> i64 {
        self.plus as i64 - self.minus as i64
    }

    pub fn dim(&self) -> usize {
        self.plus + self.minus + self.zero
    }
}

impl SymmetricForm {
    /// Symmetrizes `entries`. Panics on a non-square matrix or a negative tolerance.
    pub fn new(entries: Mat, tol: f64) -> Self {
        assert!(entries.is_square(), "symmetric form must be square");
        assert!(tol >= 0.0, "tolerance must be nonnegative");
        SymmetricForm {
            entries: symmetrize(&entries),
            tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Mat {
        &self.entries
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        sym_eigen(&self.entries).0
    }

    /// Eigenvalues with `|λ| ≤ tol · max(1, ρ)` count as zero.
    pub fn signature(&self) -> Signature {
        let vals = self.eigenvalues();
        let thr = self.tol * spectral_norm(&self.entries).max(1.0);
        let mut s = Signature {
            plus: 0,
            minus: 0,
            zero: 0,
        };
        for l in vals {
            if l.abs() <= thr {
                s.zero += 1;
            } else if l > 0.0 {
                s.plus += 1;
            } else {
                s.minus += 1;
            }
        }
        s
    }

    /// Signature with exactly `kernel` eigenvalues (those of smallest modulus) declared null.
    /// Used when the kernel dimension has been decided independently of this form.
    pub fn signature_with_kernel(&self, kernel: usize) -> Signature {
        let mut vals = self.eigenvalues();
        vals.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
        let kernel = kernel.min(vals.len());
        let mut s = Signature {
            plus: 0,
            minus: 0,
            zero: kernel,
        };
        for &l in &vals[kernel..] {
            if l > 0.0 {
                s.plus += 1;
            } else {
                s.minus += 1;
            }
        }
        s
    }
}

/// Signature of a symmetric matrix with the default relative threshold.
pub fn signature(form: &SymmetricForm) -> Signature {
    form.signature()
}

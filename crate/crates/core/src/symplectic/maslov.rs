//! Maslov index of sampled Lagrangian paths.
//!
//! The interval is partitioned greedily into pieces on each of which a single auxiliary
//! Lagrangian `L1`, transverse to `L0`, stays transverse to the path. On each piece the
//! index is half the change of the signature of the chart form φ_{L0,L1}; the pieces are
//! summed. Candidates for `L1` are the graphs of `diag(±1)` (and `0`) over the complement
//! `ΩL0`, with seeded random symmetric graphs as a fallback.

use super::form::SymmetricForm;
use super::lagrangian::{chart_form, omega_matrix, LagrangianFrame, FRAME_TOL};
use crate::error::{Error, Result};
use crate::half::HalfInteger;
use crate::linalg::{align_frame, max_principal_sine, min_singular, orthonormalize, singular_values, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A Lagrangian path sampled at strictly increasing instants.
///
/// Between samples the path is the linear interpolation of (Procrustes-aligned) frame entries
/// followed by re-orthonormalization.
#[derive(Debug, Clone)]
pub struct LagrangianPath {
    samples: Vec<(f64, LagrangianFrame)>,
}

impl LagrangianPath {
    pub fn new(samples: Vec<(f64, LagrangianFrame)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("empty Lagrangian path".into()));
        }
        let n = samples[0].1.half_dim();
        for w in samples.windows(2) {
            if w[1].0.partial_cmp(&w[0].0) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::InvalidArgument("path instants must be strictly increasing".into()));
            }
        }
        if samples.iter().any(|(_, f)| f.half_dim() != n) {
            return Err(Error::InvalidDimension("path frames differ in dimension".into()));
        }
        Ok(LagrangianPath { samples })
    }

    pub fn samples(&self) -> &[(f64, LagrangianFrame)] {
        &self.samples
    }

    pub fn half_dim(&self) -> usize {
        self.samples[0].1.half_dim()
    }

    pub fn start(&self) -> f64 {
        self.samples[0].0
    }

    pub fn end(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }

    /// Path followed by `other`; the shared endpoint is kept once.
    pub fn concat(&self, other: &LagrangianPath) -> Result<LagrangianPath> {
        let mut s = self.samples.clone();
        let mut rest = other.samples.iter();
        if let Some((t, _)) = other.samples.first() {
            if (*t - self.end()).abs() <= f64::EPSILON * self.end().abs().max(1.0) {
                rest.next();
            }
        }
        s.extend(rest.cloned());
        LagrangianPath::new(s)
    }

    /// Samples with indices in `range` (inclusive).
    pub fn slice(&self, from: usize, to: usize) -> Result<LagrangianPath> {
        LagrangianPath::new(self.samples[from..=to].to_vec())
    }

    /// Applies `f(t, frame)` to every sample.
    pub fn map<F>(&self, mut f: F) -> Result<LagrangianPath>
    where
        F: FnMut(f64, &LagrangianFrame) -> Result<LagrangianFrame>,
    {
        let s = self
            .samples
            .iter()
            .map(|(t, l)| Ok((*t, f(*t, l)?)))
            .collect::<Result<Vec<_>>>()?;
        LagrangianPath::new(s)
    }

    /// Frame at `t` by the interpolation contract.
    pub fn interpolate(&self, t: f64) -> LagrangianFrame {
        let s = &self.samples;
        if t <= s[0].0 {
            return s[0].1.clone();
        }
        if t >= self.end() {
            return s[s.len() - 1].1.clone();
        }
        let i = s.partition_point(|(ti, _)| *ti <= t) - 1;
        interpolate_between(&s[i], &s[i + 1], t)
    }
}

fn interpolate_between(a: &(f64, LagrangianFrame), b: &(f64, LagrangianFrame), t: f64) -> LagrangianFrame {
    let w = (t - a.0) / (b.0 - a.0);
    let fa = a.1.columns();
    let fb = align_frame(fa, b.1.columns());
    let mixed = fa * (1.0 - w) + fb * w;
    let q = orthonormalize(&mixed, 1e-12).expect("consecutive frames closer than π/4");
    LagrangianFrame::with_tol(q, 1e-6).expect("interpolant of Lagrangian frames stays isotropic to first order")
}

/// Knobs for [`maslov_index_with`].
#[derive(Debug, Clone, Copy)]
pub struct MaslovOptions {
    /// Singular-value threshold for deciding `dim(ℓ(t) ∩ L0)`.
    pub tol: f64,
    /// How many times a single sample interval may be bisected.
    pub max_depth: usize,
    /// A piece is accepted when the transversality to `L1` at both ends exceeds
    /// `margin × (distance between the two frames)`.
    pub margin: f64,
    /// Floor on the transversality to `L1` keeping chart forms well conditioned.
    pub min_transversality: f64,
}

impl Default for MaslovOptions {
    fn default() -> Self {
        MaslovOptions {
            tol: FRAME_TOL,
            max_depth: 24,
            margin: 2.0,
            min_transversality: 1e-3,
        }
    }
}

/// One piece of the chart partition.
#[derive(Debug, Clone)]
pub struct ChartPiece {
    pub start: f64,
    pub end: f64,
    pub candidate: usize,
    pub sig_start: i64,
    pub sig_end: i64,
}

/// Result of a Maslov index computation with its partition.
#[derive(Debug, Clone)]
pub struct MaslovComputation {
    pub index: HalfInteger,
    pub pieces: Vec<ChartPiece>,
    /// Samples inserted by bisection.
    pub refinements: usize,
}

/// μ_{L0}(path) with default options.
pub fn maslov_index(path: &LagrangianPath, l0: &LagrangianFrame) -> Result<HalfInteger> {
    maslov_index_with(path, l0, &MaslovOptions::default()).map(|c| c.index)
}

/// Auxiliary Lagrangians transverse to `l0`.
fn candidates(l0: &LagrangianFrame) -> Vec<LagrangianFrame> {
    let n = l0.half_dim();
    let b0 = l0.columns();
    let c0 = omega_matrix(n) * b0;
    let mut out = vec![LagrangianFrame::with_tol(c0.clone(), 1e-6).expect("ΩL0 is Lagrangian")];
    let graph = |s: &Mat| -> LagrangianFrame {
        let f = &c0 + b0 * s;
        LagrangianFrame::with_tol(f, 1e-6).expect("graph of a symmetric map is Lagrangian")
    };
    for mask in 0..(1usize << n) {
        let d = Mat::from_fn(n, n, |i, j| {
            if i != j {
                0.0
            } else if mask >> i & 1 == 1 {
                -1.0
            } else {
                1.0
            }
        });
        out.push(graph(&d));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..16 {
        let a = Mat::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
        out.push(graph(&(&a + a.transpose())));
    }
    out
}

struct Sample {
    t: f64,
    frame: LagrangianFrame,
    kernel: usize,
    depth: usize,
}

/// μ_{L0}(path) together with the chart partition used.
pub fn maslov_index_with(path: &LagrangianPath, l0: &LagrangianFrame, opts: &MaslovOptions) -> Result<MaslovComputation> {
    let n = path.half_dim();
    if l0.half_dim() != n {
        return Err(Error::InvalidDimension("L0 and path differ in dimension".into()));
    }
    let kernel_of = |f: &LagrangianFrame| -> usize {
        singular_values(&f.pairing(l0)).iter().filter(|&&s| s <= opts.tol).count()
    };
    let mut samples: Vec<Sample> = Vec::with_capacity(path.samples.len());
    for (i, (t, f)) in path.samples.iter().enumerate() {
        if i > 0 {
            let prev = &path.samples[i - 1];
            let s = max_principal_sine(prev.1.columns(), f.columns());
            let angle = s.asin();
            if angle >= std::f64::consts::FRAC_PI_4 {
                return Err(Error::CoarseSampling {
                    start: prev.0,
                    end: *t,
                    angle,
                });
            }
        }
        samples.push(Sample {
            t: *t,
            frame: f.clone(),
            kernel: kernel_of(f),
            depth: 0,
        });
    }
    if samples.len() == 1 {
        return Ok(MaslovComputation {
            index: HalfInteger::ZERO,
            pieces: Vec::new(),
            refinements: 0,
        });
    }

    let cands = candidates(l0);
    let trans = |c: &LagrangianFrame, f: &LagrangianFrame| min_singular(&f.pairing(c));
    // transversality[c][i]
    let mut table: Vec<Vec<f64>> = cands
        .iter()
        .map(|c| samples.iter().map(|s| trans(c, &s.frame)).collect())
        .collect();
    let mut gaps: Vec<f64> = samples
        .windows(2)
        .map(|w| max_principal_sine(w[0].frame.columns(), w[1].frame.columns()))
        .collect();

    let seg_ok = |table: &Vec<Vec<f64>>, gaps: &Vec<f64>, c: usize, i: usize| -> bool {
        let need = (opts.margin * gaps[i]).max(opts.min_transversality);
        table[c][i] > need && table[c][i + 1] > need
    };

    let mut index_twice = 0i64;
    let mut pieces = Vec::new();
    let mut refinements = 0usize;
    let mut i = 0usize;
    while i + 1 < samples.len() {
        // candidate reaching farthest from i
        let mut best: Option<(usize, usize, f64)> = None;
        for c in 0..cands.len() {
            let mut j = i;
            while j + 1 < samples.len() && seg_ok(&table, &gaps, c, j) {
                j += 1;
            }
            if j > i {
                let score = table[c][i];
                match best {
                    Some((_, bj, bs)) if bj > j || (bj == j && bs >= score) => {}
                    _ => best = Some((c, j, score)),
                }
            }
        }
        match best {
            Some((c, j, _)) => {
                let sig = |s: &Sample| -> i64 {
                    chart_form(&s.frame, l0, &cands[c], opts.tol)
                        .signature_with_kernel(s.kernel)
                        .value()
                };
                let (s0, s1) = (sig(&samples[i]), sig(&samples[j]));
                index_twice += s1 - s0;
                pieces.push(ChartPiece {
                    start: samples[i].t,
                    end: samples[j].t,
                    candidate: c,
                    sig_start: s0,
                    sig_end: s1,
                });
                i = j;
            }
            None => {
                let depth = samples[i].depth.max(samples[i + 1].depth) + 1;
                if depth > opts.max_depth {
                    return Err(Error::PartitionFailure {
                        start: samples[i].t,
                        end: samples[i + 1].t,
                    });
                }
                let tm = 0.5 * (samples[i].t + samples[i + 1].t);
                let fm = interpolate_between(
                    &(samples[i].t, samples[i].frame.clone()),
                    &(samples[i + 1].t, samples[i + 1].frame.clone()),
                    tm,
                );
                let k = kernel_of(&fm);
                for (c, row) in table.iter_mut().enumerate() {
                    row.insert(i + 1, trans(&cands[c], &fm));
                }
                let g0 = max_principal_sine(samples[i].frame.columns(), fm.columns());
                let g1 = max_principal_sine(fm.columns(), samples[i + 1].frame.columns());
                gaps[i] = g0;
                gaps.insert(i + 1, g1);
                samples[i].depth = depth;
                samples[i + 1].depth = depth;
                samples.insert(
                    i + 1,
                    Sample {
                        t: tm,
                        frame: fm,
                        kernel: k,
                        depth,
                    },
                );
                refinements += 1;
            }
        }
    }
    Ok(MaslovComputation {
        index: HalfInteger::from_twice(index_twice),
        pieces,
        refinements,
    })
}

/// A symplectic basis `E` (2n×2k, `EᵀΩE = Ω_k`) of the span of `w`.
fn symplectic_basis(w: &Mat, tol: f64) -> Result<Mat> {
    let dim = w.nrows();
    let n = dim / 2;
    let om = omega_matrix(n);
    let w = orthonormalize(w, tol)
        .ok_or_else(|| Error::SplitInapplicable("subspace frame has dependent columns".into()))?;
    if w.ncols() % 2 != 0 {
        return Err(Error::SplitInapplicable("subspace has odd dimension".into()));
    }
    let k = w.ncols() / 2;
    let mut pool: Vec<nalgebra::DVector<f64>> = (0..w.ncols()).map(|j| w.column(j).into_owned()).collect();
    let mut es = Vec::new();
    let mut fs = Vec::new();
    for _ in 0..k {
        // best-conditioned pair in the pool
        let mut best = (0, 1, 0.0f64);
        for a in 0..pool.len() {
            for b in 0..pool.len() {
                let v = (pool[a].transpose() * &om * &pool[b])[(0, 0)];
                if v.abs() > best.2.abs() {
                    best = (a, b, v);
                }
            }
        }
        if best.2.abs() <= tol {
            return Err(Error::SplitInapplicable("subspace is not symplectic".into()));
        }
        let (a, b, v) = best;
        let e = pool[a].clone();
        let f = &pool[b] / v;
        let mut rest = Vec::new();
        for (idx, x) in pool.iter().enumerate() {
            if idx == a || idx == b {
                continue;
            }
            // x − ω(x,f) e + ω(x,e) f  is ω-orthogonal to e and f
            let xf = (x.transpose() * &om * &f)[(0, 0)];
            let xe = (x.transpose() * &om * &e)[(0, 0)];
            rest.push(x - &e * xf + &f * xe);
        }
        es.push(e);
        fs.push(f);
        pool = rest;
    }
    let mut cols = es;
    cols.extend(fs);
    Ok(Mat::from_columns(&cols))
}

/// Expresses `L ∩ V` (V with symplectic basis `e`) as a Lagrangian frame of ℝᵏ ⊕ ℝᵏ*.
fn restrict(l: &LagrangianFrame, e: &Mat, tol: f64) -> Result<LagrangianFrame> {
    let dim = e.nrows();
    let k = e.ncols() / 2;
    let mut both = Mat::zeros(dim, l.half_dim() + e.ncols());
    both.view_mut((0, 0), (dim, l.half_dim())).copy_from(l.columns());
    both.view_mut((0, l.half_dim()), (dim, e.ncols())).copy_from(&(-e));
    let ker = crate::linalg::null_space(&both, tol.max(1e-10));
    if ker.ncols() != k {
        return Err(Error::SplitInapplicable(format!(
            "intersection has dimension {} instead of {k}",
            ker.ncols()
        )));
    }
    let coords = ker.rows(l.half_dim(), e.ncols()).into_owned();
    LagrangianFrame::with_tol(coords, 1e-6).map_err(|e| Error::SplitInapplicable(e.to_string()))
}

/// Maslov indices of `t ↦ ℓ(t) ∩ V1` and `t ↦ ℓ(t) ∩ V2` relative to `L0 ∩ V1`, `L0 ∩ V2`,
/// for a symplectic splitting `V = V1 ⊕ V2` given by spanning frames.
pub fn direct_sum_split(
    path: &LagrangianPath,
    l0: &LagrangianFrame,
    v1: &Mat,
    v2: &Mat,
) -> Result<(HalfInteger, HalfInteger)> {
    let tol = FRAME_TOL;
    let n = path.half_dim();
    if v1.nrows() != 2 * n || v2.nrows() != 2 * n || v1.ncols() + v2.ncols() != 2 * n {
        return Err(Error::SplitInapplicable("factor dimensions do not add up".into()));
    }
    let e1 = symplectic_basis(v1, tol)?;
    let e2 = symplectic_basis(v2, tol)?;
    let om = omega_matrix(n);
    if (e1.transpose() * &om * &e2).norm() > 1e-8 {
        return Err(Error::SplitInapplicable("factors are not ω-orthogonal".into()));
    }
    let mut out = [HalfInteger::ZERO; 2];
    for (slot, e) in [&e1, &e2].into_iter().enumerate() {
        let sub_l0 = restrict(l0, e, tol)?;
        let sub = path.map(|_, l| restrict(l, e, tol))?;
        out[slot] = maslov_index(&sub, &sub_l0)?;
    }
    Ok((out[0], out[1]))
}

/// The signature of a chart form relative to an explicitly decided kernel dimension.
pub fn chart_signature(l: &LagrangianFrame, l0: &LagrangianFrame, l1: &LagrangianFrame, kernel: usize, tol: f64) -> i64 {
    let f: SymmetricForm = chart_form(l, l0, l1, tol);
    f.signature_with_kernel(kernel).value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// ℓ(t) = R(t)[span(0,1)] for the rotation flow of X = [[0,1],[−1,0]].
    fn rotation_path(a: f64, b: f64, steps: usize) -> LagrangianPath {
        let s = (0..=steps)
            .map(|k| {
                let t = a + (b - a) * k as f64 / steps as f64;
                let f = LagrangianFrame::new(Mat::from_column_slice(2, 1, &[t.sin(), t.cos()])).unwrap();
                (t, f)
            })
            .collect();
        LagrangianPath::new(s).unwrap()
    }

    /// Winding oracle for n = 1: a line at angle `πu` from `L0` meets `L0` at integer `u`;
    /// with half weight at the endpoints the index is `f(u(b)) − f(u(a))`, `f(x) = (⌊x⌋ + ⌈x⌉)/2`.
    fn rotation_oracle(a: f64, b: f64) -> HalfInteger {
        let f = |t: f64| {
            let u = t / PI;
            let (lo, hi) = if (u - u.round()).abs() < 1e-12 {
                (u.round(), u.round())
            } else {
                (u.floor(), u.ceil())
            };
            (lo + hi) as i64
        };
        HalfInteger::from_twice(f(b) - f(a))
    }

    #[test]
    fn constant_path_has_zero_index() {
        let l = LagrangianFrame::new(Mat::from_column_slice(2, 1, &[0.3, 1.0])).unwrap();
        let p = LagrangianPath::new((0..10).map(|k| (k as f64, l.clone())).collect()).unwrap();
        assert_eq!(maslov_index(&p, &LagrangianFrame::vertical(1)).unwrap(), HalfInteger::ZERO);
    }

    #[test]
    fn rotation_flow_index() {
        let l0 = LagrangianFrame::vertical(1);
        // starts on L0: half contribution from t = 0, full one at t = π
        let p = rotation_path(0.0, PI + 0.1, 400);
        let mu = maslov_index(&p, &l0).unwrap();
        assert_eq!(mu, rotation_oracle(0.0, PI + 0.1));
        assert_eq!(mu, HalfInteger::from_twice(3));
        // leaving the initial instant out leaves the single interior crossing
        let p = rotation_path(0.05, PI + 0.1, 400);
        assert_eq!(maslov_index(&p, &l0).unwrap(), HalfInteger::from_int(1));
        assert_eq!(rotation_oracle(0.05, PI + 0.1), HalfInteger::from_int(1));
    }

    #[test]
    fn concatenation_is_additive() {
        let l0 = LagrangianFrame::vertical(1);
        let p1 = rotation_path(0.0, 2.0, 100);
        let p2 = rotation_path(2.0, 7.0, 300);
        let both = p1.concat(&p2).unwrap();
        let sum = maslov_index(&p1, &l0).unwrap() + maslov_index(&p2, &l0).unwrap();
        assert_eq!(maslov_index(&both, &l0).unwrap(), sum);
        assert_eq!(sum, rotation_oracle(0.0, 7.0));
    }

    #[test]
    fn coarse_sampling_rejected() {
        let p = rotation_path(0.0, 3.0, 2);
        assert!(matches!(
            maslov_index(&p, &LagrangianFrame::vertical(1)),
            Err(Error::CoarseSampling { .. })
        ));
    }

    #[test]
    fn product_of_rotations_splits() {
        // two independent rotation flows with different speeds on ℝ² ⊕ ℝ²*
        let steps = 600;
        let (a, b) = (0.01, 7.0);
        let s = (0..=steps)
            .map(|k| {
                let t = a + (b - a) * k as f64 / steps as f64;
                let (u, w) = (t, 1.7 * t);
                let mut c = Mat::zeros(4, 2);
                c[(0, 0)] = u.sin();
                c[(2, 0)] = u.cos();
                c[(1, 1)] = w.sin();
                c[(3, 1)] = w.cos();
                (t, LagrangianFrame::new(c).unwrap())
            })
            .collect();
        let path = LagrangianPath::new(s).unwrap();
        let l0 = LagrangianFrame::vertical(2);
        let mut v1 = Mat::zeros(4, 2);
        v1[(0, 0)] = 1.0;
        v1[(2, 1)] = 1.0;
        let mut v2 = Mat::zeros(4, 2);
        v2[(1, 0)] = 1.0;
        v2[(3, 1)] = 1.0;
        let (m1, m2) = direct_sum_split(&path, &l0, &v1, &v2).unwrap();
        assert_eq!(m1, rotation_oracle(a, b));
        assert_eq!(m2, rotation_oracle(1.7 * a, 1.7 * b));
        assert_eq!(m1 + m2, maslov_index(&path, &l0).unwrap());
    }
}

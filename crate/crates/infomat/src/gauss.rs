//! Covariance estimation and the Gaussian closed form for conditional
//! mutual information.
//!
//! For jointly Gaussian blocks the conditional MI reduces to a ratio of
//! covariance log-determinants,
//! `I(X;Y|Z) = 1/2 log(|K_xz| |K_yz| / (|K_z| |K_xyz|))`,
//! which [`gaussian_cmi`] evaluates from principal sub-blocks of a single
//! covariance matrix. All values are in nats.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative ridge applied to sample covariances before factorization.
/// Large enough to absorb floating-point pivot noise on rank-deficient
/// inputs, small enough to leave well-conditioned conditional MI values
/// unchanged at the 1e-9 level (a uniform diagonal shift is not
/// equivariant under the linear maps CMI is invariant to).
pub const DEFAULT_RELATIVE_RIDGE: f64 = 1e-12;

/// A symmetric covariance matrix plus the ridge used when factorizing it.
#[derive(Debug, Clone)]
pub struct CovarianceEstimate {
    matrix: DMatrix<f64>,
    sample_count: usize,
    ridge: f64,
}

impl CovarianceEstimate {
    /// Wraps an exact covariance (no ridge).
    pub fn exact(matrix: DMatrix<f64>) -> Result<Self> {
        Self::with_ridge(matrix, 0, 0.0)
    }

    pub fn with_ridge(matrix: DMatrix<f64>, sample_count: usize, ridge: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidArgument("covariance must be square".into()));
        }
        let max_asym = (&matrix - matrix.transpose()).abs().max();
        if matrix.nrows() > 0 && max_asym > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "covariance asymmetric by {max_asym:e}"
            )));
        }
        Ok(CovarianceEstimate {
            matrix,
            sample_count,
            ridge,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
    pub fn sample_count(&self) -> usize {
        self.sample_count
    }
    pub fn ridge(&self) -> f64 {
        self.ridge
    }
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Principal submatrix on `idx`; the ridge carries over so nested
    /// sub-block determinants stay mutually consistent.
    pub fn principal(&self, idx: &[usize]) -> CovarianceEstimate {
        let d = idx.len();
        let sub = DMatrix::from_fn(d, d, |r, c| self.matrix[(idx[r], idx[c])]);
        CovarianceEstimate {
            matrix: sub,
            sample_count: self.sample_count,
            ridge: self.ridge,
        }
    }
}

/// Sample covariance `(1/N) sum v v^T` of `N` vectors, subtracting the
/// sample mean first unless `centered`. Symmetry is enforced by averaging
/// with the transpose; the ridge defaults to `1e-8` of the mean diagonal.
pub fn sample_covariance(vectors: &[Vec<f64>], centered: bool) -> Result<CovarianceEstimate> {
    let n = vectors.len();
    if n < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: n,
            detail: "sample covariance".into(),
        });
    }
    let d = vectors[0].len();
    if vectors.iter().any(|v| v.len() != d) {
        return Err(Error::InvalidArgument("vectors differ in dimension".into()));
    }

    let mut mean = vec![0.0; d];
    if !centered {
        for v in vectors {
            for (acc, x) in mean.iter_mut().zip(v) {
                *acc += x;
            }
        }
        for mu in &mut mean {
            *mu /= n as f64;
        }
    }

    let mut k = DMatrix::<f64>::zeros(d, d);
    let mut dev = vec![0.0; d];
    for v in vectors {
        for i in 0..d {
            dev[i] = v[i] - mean[i];
        }
        for r in 0..d {
            let vr = dev[r];
            for c in r..d {
                k[(r, c)] += vr * dev[c];
            }
        }
    }
    let scale = 1.0 / n as f64;
    for r in 0..d {
        for c in r..d {
            let v = k[(r, c)] * scale;
            k[(r, c)] = v;
            k[(c, r)] = v;
        }
    }
    let mean_diag = if d > 0 {
        k.diagonal().iter().map(|v| v.abs()).sum::<f64>() / d as f64
    } else {
        0.0
    };
    CovarianceEstimate::with_ridge(k, n, DEFAULT_RELATIVE_RIDGE * mean_diag)
}

/// Log-determinant of `matrix + ridge*I` via Cholesky.
///
/// A nonpositive pivot aborts with the failing index, which identifies the
/// coordinate where the matrix loses positive definiteness.
pub fn log_det_psd(k: &CovarianceEstimate) -> Result<f64> {
    let d = k.dim();
    if d == 0 {
        return Ok(0.0);
    }
    let mut a = k.matrix.clone();
    for i in 0..d {
        a[(i, i)] += k.ridge;
    }
    // in-place lower Cholesky, accumulating 2*sum(ln L_jj)
    let mut log_det = 0.0;
    for j in 0..d {
        let mut pivot = a[(j, j)];
        for t in 0..j {
            pivot -= a[(j, t)] * a[(j, t)];
        }
        if pivot <= 0.0 || !pivot.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        let ljj = pivot.sqrt();
        log_det += 2.0 * ljj.ln();
        a[(j, j)] = ljj;
        for i in (j + 1)..d {
            let mut v = a[(i, j)];
            for t in 0..j {
                v -= a[(i, t)] * a[(j, t)];
            }
            a[(i, j)] = v / ljj;
        }
    }
    Ok(log_det)
}

fn check_index_sets(dim: usize, sets: [&[usize]; 3]) -> Result<()> {
    let mut seen = vec![false; dim];
    for set in sets {
        for &i in set {
            if i >= dim {
                return Err(Error::InvalidArgument(format!(
                    "index {i} out of range for dimension {dim}"
                )));
            }
            if seen[i] {
                return Err(Error::InvalidArgument(format!(
                    "index sets overlap at coordinate {i}"
                )));
            }
            seen[i] = true;
        }
    }
    Ok(())
}

fn sorted_union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    u
}

/// Gaussian conditional MI `I(X;Y|Z)` in nats from a joint covariance,
/// with `X`, `Y`, `Z` given as disjoint coordinate index sets.
/// The empty conditioning set contributes `|K| = 1`.
pub fn gaussian_cmi(
    k_joint: &CovarianceEstimate,
    idx_x: &[usize],
    idx_y: &[usize],
    idx_cond: &[usize],
) -> Result<f64> {
    check_index_sets(k_joint.dim(), [idx_x, idx_y, idx_cond])?;
    let ld = |idx: &[usize]| -> Result<f64> {
        if idx.is_empty() {
            Ok(0.0)
        } else {
            log_det_psd(&k_joint.principal(idx))
        }
    };
    let xz = ld(&sorted_union(idx_x, idx_cond))?;
    let yz = ld(&sorted_union(idx_y, idx_cond))?;
    let z = ld(&{
        let mut c = idx_cond.to_vec();
        c.sort_unstable();
        c
    })?;
    let xyz = ld(&sorted_union(&sorted_union(idx_x, idx_y), idx_cond))?;
    Ok(0.5 * (xz + yz - z - xyz))
}

/// Exact covariance of the stacked block `(X_1..X_m, Y_1..Y_m)`, the
/// source of exact Gaussian InfoMats.
///
/// Coordinate layout: `X_i` occupies `[(i-1)*d_x, i*d_x)` and `Y_j`
/// occupies `[m*d_x + (j-1)*d_y, m*d_x + j*d_y)`, `i, j` 1-based.
#[derive(Debug, Clone)]
pub struct JointGaussianModel {
    m: usize,
    d_x: usize,
    d_y: usize,
    cov: DMatrix<f64>,
}

impl JointGaussianModel {
    pub fn new(m: usize, d_x: usize, d_y: usize, cov: DMatrix<f64>) -> Result<Self> {
        let dim = m * (d_x + d_y);
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::InvalidArgument(format!(
                "covariance is {}x{}, expected {dim}x{dim}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        let model = JointGaussianModel { m, d_x, d_y, cov };
        // positive definiteness gate
        log_det_psd(&CovarianceEstimate::exact(model.cov.clone())?)?;
        Ok(model)
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn d_x(&self) -> usize {
        self.d_x
    }
    pub fn d_y(&self) -> usize {
        self.d_y
    }
    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Coordinates of `X_i` (1-based `i`).
    pub fn coords_x(&self, i: usize) -> Vec<usize> {
        ((i - 1) * self.d_x..i * self.d_x).collect()
    }
    /// Coordinates of `Y_j` (1-based `j`).
    pub fn coords_y(&self, j: usize) -> Vec<usize> {
        let base = self.m * self.d_x;
        (base + (j - 1) * self.d_y..base + j * self.d_y).collect()
    }
    /// Coordinates of the history block `(X^{i-1}, Y^{j-1})`.
    pub fn coords_history(&self, i: usize, j: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..(i - 1) * self.d_x).collect();
        let base = self.m * self.d_x;
        idx.extend(base..base + (j - 1) * self.d_y);
        idx
    }

    /// The same joint with the roles of X and Y exchanged.
    pub fn swapped(&self) -> JointGaussianModel {
        let dim = self.m * (self.d_x + self.d_y);
        let old_of_new: Vec<usize> = (0..self.m * self.d_y)
            .map(|k| self.m * self.d_x + k)
            .chain(0..self.m * self.d_x)
            .collect();
        let cov = DMatrix::from_fn(dim, dim, |r, c| self.cov[(old_of_new[r], old_of_new[c])]);
        JointGaussianModel {
            m: self.m,
            d_x: self.d_y,
            d_y: self.d_x,
            cov,
        }
    }

    /// Conjugates the covariance by the cyclic shift that maps the block
    /// `Y_1..Y_m` to `Y'_t = Y_{t-T}` (indices mod `m`). X is untouched.
    pub fn cyclic_shift_y(&self, t_shift: usize) -> Result<JointGaussianModel> {
        if t_shift >= self.m {
            return Err(Error::InvalidArgument(format!(
                "shift {} must be smaller than m = {}",
                t_shift, self.m
            )));
        }
        let dim = self.m * (self.d_x + self.d_y);
        let base = self.m * self.d_x;
        let old_of_new: Vec<usize> = (0..dim)
            .map(|k| {
                if k < base {
                    k
                } else {
                    let t = (k - base) / self.d_y;
                    let c = (k - base) % self.d_y;
                    base + ((t + self.m - t_shift) % self.m) * self.d_y + c
                }
            })
            .collect();
        let cov = DMatrix::from_fn(dim, dim, |r, c| self.cov[(old_of_new[r], old_of_new[c])]);
        Ok(JointGaussianModel {
            m: self.m,
            d_x: self.d_x,
            d_y: self.d_y,
            cov,
        })
    }
}

//! Dense linear-algebra kernel: spectral norm, Moore-Penrose pseudo-inverse,
//! condition number, and column-space projector.
//!
//! This is the only module that touches matrix decompositions. Everything is
//! backed by a one-sided Jacobi SVD (Hestenes): plane rotations orthogonalize
//! the columns, the singular values are the resulting column norms. Jacobi
//! delivers high relative accuracy on the small singular values, which the
//! ill-conditioned inversion demo depends on, and it is mixed
//! forward-backward stable, which is what the floating point error model
//! assumes of the backend.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Dense column-major matrix of `f64`, indexed `(row, col)`.
pub type Matrix = DMatrix<f64>;
/// Dense column vector of `f64`.
pub type Vector = DVector<f64>;

/// Default relative tolerance separating genuine rank deficiency from
/// round-off at double precision.
pub const DEFAULT_RANK_RTOL: f64 = 1e-12;

/// Result of [`pinv`].
#[derive(Debug, Clone)]
pub struct PinvResult {
    /// The Moore-Penrose pseudo-inverse, `cols x rows`.
    pub pinv: Matrix,
    /// Singular values of the input, nonincreasing.
    pub singular_values: Vec<f64>,
    /// Number of singular values above the truncation threshold.
    pub numerical_rank: usize,
}

/// Thin SVD `M = U diag(s) V^T` with `s` nonincreasing, for tall-or-square `M`.
struct ThinSvd {
    u: Matrix,
    s: Vec<f64>,
    v: Matrix,
}

fn check_finite(m: &Matrix) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::InvalidInput("matrix must have at least one row and one column".into()));
    }
    for (idx, x) in m.iter().enumerate() {
        if !x.is_finite() {
            let (r, c) = (idx % m.nrows(), idx / m.nrows());
            return Err(Error::InvalidInput(format!("non-finite matrix entry {x} at ({r}, {c})")));
        }
    }
    Ok(())
}

/// One-sided Jacobi SVD of a tall-or-square matrix (`rows >= cols`).
fn jacobi_svd(m: &Matrix) -> ThinSvd {
    let (rows, cols) = m.shape();
    debug_assert!(rows >= cols);
    let mut u = m.clone();
    let mut v = Matrix::identity(cols, cols);

    // Relative off-diagonal tolerance on the implicit Gram matrix. A few eps:
    // below this the pair is numerically orthogonal.
    const TOL: f64 = 1e-15;
    const MAX_SWEEPS: usize = 64;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols.saturating_sub(1) {
            for j in (i + 1)..cols {
                let mut aii = 0.0;
                let mut ajj = 0.0;
                let mut aij = 0.0;
                for r in 0..rows {
                    let ui = u[(r, i)];
                    let uj = u[(r, j)];
                    aii += ui * ui;
                    ajj += uj * uj;
                    aij += ui * uj;
                }
                if aij.abs() <= TOL * (aii * ajj).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (ajj - aii) / (2.0 * aij);
                let t = if zeta.abs() > 1e150 {
                    // avoid overflow in zeta^2; limit of the closed form
                    0.5 / zeta
                } else if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..rows {
                    let ui = u[(r, i)];
                    let uj = u[(r, j)];
                    u[(r, i)] = c * ui - s * uj;
                    u[(r, j)] = s * ui + c * uj;
                }
                for r in 0..cols {
                    let vi = v[(r, i)];
                    let vj = v[(r, j)];
                    v[(r, i)] = c * vi - s * vj;
                    v[(r, j)] = s * vi + c * vj;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; sort them nonincreasing.
    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> = (0..cols).map(|k| u.column(k).norm()).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());

    let mut us = Matrix::zeros(rows, cols);
    let mut vs = Matrix::zeros(cols, cols);
    let mut s = Vec::with_capacity(cols);
    for (dst, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        s.push(sigma);
        if sigma > 0.0 {
            for r in 0..rows {
                us[(r, dst)] = u[(r, src)] / sigma;
            }
        }
        for r in 0..cols {
            vs[(r, dst)] = v[(r, src)];
        }
    }
    ThinSvd { u: us, s, v: vs }
}

/// SVD of an arbitrary matrix, transposing fat inputs so the Jacobi kernel
/// always works on a tall-or-square operand. Returns the singular values of
/// `m` (nonincreasing) and, when `want_vectors`, the thin factors of the
/// operand plus the transposition flag.
fn svd_any(m: &Matrix) -> (ThinSvd, bool) {
    if m.ncols() > m.nrows() {
        (jacobi_svd(&m.transpose()), true)
    } else {
        (jacobi_svd(m), false)
    }
}

/// Singular values of `m`, nonincreasing, `min(rows, cols)` of them.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    check_finite(m)?;
    Ok(svd_any(m).0.s)
}

/// Moore-Penrose pseudo-inverse via SVD.
///
/// Singular values `sigma_i <= rank_rtol * sigma_max` are truncated to zero;
/// `numerical_rank` counts the retained ones. No silent regularization
/// happens beyond that truncation, and the count is reported so callers can
/// reject rank-deficient inputs where the theorems require full rank.
pub fn pinv(m: &Matrix, rank_rtol: f64) -> Result<PinvResult> {
    check_finite(m)?;
    if !(rank_rtol > 0.0 && rank_rtol < 1.0) {
        return Err(Error::InvalidInput(format!("rank_rtol must be in (0, 1), got {rank_rtol}")));
    }
    let (svd, transposed) = svd_any(m);
    let smax = svd.s[0];
    let threshold = rank_rtol * smax;
    let rank = svd.s.iter().filter(|&&x| x > threshold).count();
    let k = svd.s.len();
    let mut sinv = DVector::zeros(k);
    for i in 0..rank {
        sinv[i] = 1.0 / svd.s[i];
    }
    // pinv(work) = V diag(1/s) U^T; for a transposed operand pinv(M) = pinv(M^T)^T.
    let pw = &svd.v * Matrix::from_diagonal(&sinv) * svd.u.transpose();
    let pinv = if transposed { pw.transpose() } else { pw };
    Ok(PinvResult { pinv, singular_values: svd.s, numerical_rank: rank })
}

/// Largest singular value. For a one-column matrix this is the Euclidean norm.
pub fn spectral_norm(m: &Matrix) -> Result<f64> {
    Ok(singular_values(m)?[0])
}

/// Spectral-norm condition number `sigma_max / sigma_min`.
///
/// Requires full numerical rank at [`DEFAULT_RANK_RTOL`]; rank-deficient
/// inputs are refused rather than reported as infinite.
pub fn cond2(m: &Matrix) -> Result<f64> {
    let s = singular_values(m)?;
    let smax = s[0];
    let smin = *s.last().unwrap();
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    if smin <= DEFAULT_RANK_RTOL * smax || smax == 0.0 {
        let rank = s.iter().filter(|&&x| x > DEFAULT_RANK_RTOL * smax).count();
        return Err(Error::RankDeficient { rank, expected: s.len(), ratio });
    }
    Ok(smax / smin)
}

/// Orthogonal projector `A A^dagger` onto the column space of `A`.
pub fn col_projector(a: &Matrix) -> Result<Matrix> {
    let p = pinv(a, DEFAULT_RANK_RTOL)?;
    Ok(a * p.pinv)
}

use super::matrix::DenseMatrix;
use super::svd::{svd, Svd};
use crate::error::{Error, Result};

/// Singular values below this fraction of `sigma_max` count as rank loss.
pub const RANK_TOL: f64 = 1e-10;

fn check_full_rank(s: &Svd) -> Result<()> {
    let max = s.spectrum.max();
    let min = s.spectrum.min();
    let ratio = if max > 0.0 { min / max } else { 0.0 };
    if ratio <= RANK_TOL {
        return Err(Error::RankDeficient { ratio });
    }
    Ok(())
}

/// Moore-Penrose pseudo-inverse `(A^T A)^{-1} A^T` of a full-column-rank matrix,
/// computed from the SVD as `V diag(1/sigma) U^T`.
pub fn pseudo_inverse(a: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows() < a.cols() {
        return Err(Error::RankDeficient { ratio: 0.0 });
    }
    let s = svd(a)?;
    check_full_rank(&s)?;
    Ok(pinv_from_svd(&s))
}

pub(crate) fn pinv_from_svd(s: &Svd) -> DenseMatrix {
    let sig = s.spectrum.values();
    let p = sig.len();
    DenseMatrix::from_fn(s.v.rows(), s.u.rows(), |i, j| {
        (0..p).map(|l| s.v[(i, l)] * s.u[(j, l)] / sig[l]).sum()
    })
}

/// Least-squares solution `argmin_x ||A x - b||_2` for full-column-rank `A`.
pub fn pseudo_inverse_apply(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            actual: b.len(),
        });
    }
    if a.rows() < a.cols() {
        return Err(Error::RankDeficient { ratio: 0.0 });
    }
    let s = svd(a)?;
    check_full_rank(&s)?;
    let utb = s.u.matvec_transpose(b)?;
    let scaled: Vec<f64> = utb
        .iter()
        .zip(s.spectrum.values())
        .map(|(c, sig)| c / sig)
        .collect();
    s.v.matvec(&scaled)
}

/// Lower-bidiagonal Toeplitz factor with constant `diag` and `sub` entries.
///
/// `D` is `{diag: 1, sub: -1}`; the high-pass and leaky shapers change `sub`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bidiagonal {
    pub diag: f64,
    pub sub: f64,
}

impl Bidiagonal {
    pub const DIFFERENCE: Self = Self {
        diag: 1.0,
        sub: -1.0,
    };

    pub fn to_dense(self, m: usize) -> DenseMatrix {
        DenseMatrix::from_fn(m, m, |i, j| {
            if i == j {
                self.diag
            } else if i == j + 1 {
                self.sub
            } else {
                0.0
            }
        })
    }
}

/// Solves `H^power X = B` by `power` forward substitutions down each column.
pub fn apply_inverse_power(h: Bidiagonal, power: usize, b: &DenseMatrix) -> Result<DenseMatrix> {
    if power > 0 && h.diag == 0.0 {
        return Err(Error::ZeroDiagonal);
    }
    let mut x = b.clone();
    let (m, n) = x.shape();
    for _ in 0..power {
        for j in 0..n {
            x[(0, j)] /= h.diag;
        }
        for i in 1..m {
            for j in 0..n {
                let prev = x[(i - 1, j)];
                x[(i, j)] = (x[(i, j)] - h.sub * prev) / h.diag;
            }
        }
    }
    Ok(x)
}

/// Solves `(H^T)^power X = B` by backward substitutions.
pub fn apply_inverse_transpose_power(
    h: Bidiagonal,
    power: usize,
    b: &DenseMatrix,
) -> Result<DenseMatrix> {
    if power > 0 && h.diag == 0.0 {
        return Err(Error::ZeroDiagonal);
    }
    let mut x = b.clone();
    let (m, n) = x.shape();
    for _ in 0..power {
        for j in 0..n {
            x[(m - 1, j)] /= h.diag;
        }
        for i in (0..m - 1).rev() {
            for j in 0..n {
                let next = x[(i + 1, j)];
                x[(i, j)] = (x[(i, j)] - h.sub * next) / h.diag;
            }
        }
    }
    Ok(x)
}

/// Vector form of [`apply_inverse_power`].
pub fn apply_inverse_power_vec(h: Bidiagonal, power: usize, b: &[f64]) -> Result<Vec<f64>> {
    if power > 0 && h.diag == 0.0 {
        return Err(Error::ZeroDiagonal);
    }
    let mut x = b.to_vec();
    for _ in 0..power {
        let mut prev = 0.0;
        for xi in x.iter_mut() {
            *xi = (*xi - h.sub * prev) / h.diag;
            prev = *xi;
        }
    }
    Ok(x)
}

/// Computes `H^power B` without forming the power.
pub fn apply_power(h: Bidiagonal, power: usize, b: &DenseMatrix) -> DenseMatrix {
    let mut x = b.clone();
    let (m, n) = x.shape();
    for _ in 0..power {
        for i in (1..m).rev() {
            for j in 0..n {
                x[(i, j)] = h.diag * x[(i, j)] + h.sub * x[(i - 1, j)];
            }
        }
        for j in 0..n {
            x[(0, j)] *= h.diag;
        }
    }
    x
}

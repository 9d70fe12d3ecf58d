//! One-sided (Hestenes) Jacobi SVD.
//!
//! The routine orthogonalizes the columns of a working copy of `A` by plane
//! rotations, accumulating them into `V`. At convergence the column norms are
//! the singular values and the normalized columns form `U`. The method is
//! slower than bidiagonalization + QR but gives small singular values to high
//! relative accuracy, which matters for the badly conditioned `D^{-r} E`
//! products studied here.

use super::matrix::{dot, DenseMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Singular values in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum(Vec<f64>);

impl SingularSpectrum {
    /// Wraps a sequence that must already be nonnegative and descending
    /// (up to `1e-12 * sigma_1`).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let top = values.first().copied().unwrap_or(0.0);
        let slack = 1e-12 * top.abs();
        if values.iter().any(|v| !v.is_finite() || *v < -slack) {
            return Err(Error::InvalidParameter(
                "singular values must be finite and nonnegative".into(),
            ));
        }
        if values.windows(2).any(|w| w[1] > w[0] + slack) {
            return Err(Error::InvalidParameter(
                "singular values must be in descending order".into(),
            ));
        }
        Ok(Self(values))
    }

    /// Sorts arbitrary nonnegative values into a spectrum.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(|a, b| b.total_cmp(a));
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.0.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.0.last().copied().unwrap_or(0.0)
    }

    /// `sigma_j` with 1-based `j`.
    pub fn get(&self, j: usize) -> f64 {
        self.0[j - 1]
    }

    /// Number of values above `rel_tol * sigma_1`.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        let cutoff = rel_tol * self.max();
        if self.max() == 0.0 {
            return 0;
        }
        self.0.iter().filter(|&&s| s > cutoff).count()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Thin SVD `A = U diag(sigma) V^T` with `p = min(rows, cols)` columns in `U` and `V`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub spectrum: SingularSpectrum,
    /// rows x p, orthonormal columns.
    pub u: DenseMatrix,
    /// cols x p, orthonormal columns.
    pub v: DenseMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> DenseMatrix {
        let p = self.spectrum.len();
        let s = self.spectrum.values();
        let us = DenseMatrix::from_fn(self.u.rows(), p, |i, j| self.u[(i, j)] * s[j]);
        us.matmul(&self.v.transpose()).expect("conforming factors")
    }
}

pub fn svd(a: &DenseMatrix) -> Result<Svd> {
    if a.rows() >= a.cols() {
        let (values, u, v) = jacobi(a, true)?;
        Ok(Svd {
            spectrum: SingularSpectrum::new(values)?,
            u: u.expect("requested"),
            v: v.expect("requested"),
        })
    } else {
        let (values, v, u) = jacobi(&a.transpose(), true)?;
        Ok(Svd {
            spectrum: SingularSpectrum::new(values)?,
            u: u.expect("requested"),
            v: v.expect("requested"),
        })
    }
}

/// Singular values only; skips accumulating the right basis.
pub fn singular_values(a: &DenseMatrix) -> Result<SingularSpectrum> {
    let (values, _, _) = if a.rows() >= a.cols() {
        jacobi(a, false)?
    } else {
        jacobi(&a.transpose(), false)?
    };
    SingularSpectrum::new(values)
}

type JacobiOutput = (Vec<f64>, Option<DenseMatrix>, Option<DenseMatrix>);

/// Core iteration on a tall (rows >= cols) matrix.
fn jacobi(a: &DenseMatrix, want_vectors: bool) -> Result<JacobiOutput> {
    let m = a.rows();
    let n = a.cols();
    debug_assert!(m >= n);

    // Column-major working copy.
    let mut w = vec![0.0; m * n];
    for i in 0..m {
        for (j, &val) in a.row(i).iter().enumerate() {
            w[j * m + i] = val;
        }
    }
    let mut v = if want_vectors {
        let mut v = vec![0.0; n * n];
        for j in 0..n {
            v[j * n + j] = 1.0;
        }
        Some(v)
    } else {
        None
    };

    let tol = (m as f64 * f64::EPSILON).min(1e-12);
    let mut sweeps = 0;
    let mut off = f64::INFINITY;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        off = 0.0;
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let (head, tail) = w.split_at_mut(q * m);
                let wp = &mut head[p * m..(p + 1) * m];
                let wq = &mut tail[..m];
                let alpha = dot(wp, wp);
                let beta = dot(wq, wq);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(wp, wq);
                let ratio = gamma.abs() / (alpha.sqrt() * beta.sqrt());
                off = off.max(ratio);
                if ratio <= tol {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(wp, wq, c, s);
                if let Some(v) = v.as_mut() {
                    let (head, tail) = v.split_at_mut(q * n);
                    rotate(&mut head[p * n..(p + 1) * n], &mut tail[..n], c, s);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    if off > tol && sweeps >= MAX_SWEEPS {
        return Err(Error::SvdNoConvergence {
            sweeps,
            off_diagonal: off,
        });
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| dot(&w[j * m..(j + 1) * m], &w[j * m..(j + 1) * m]).sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));
    let values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();

    if !want_vectors {
        return Ok((values, None, None));
    }
    let v = v.expect("accumulated");
    let v_mat = DenseMatrix::from_fn(n, n, |i, k| v[order[k] * n + i]);

    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for &j in &order {
        let col = &w[j * m..(j + 1) * m];
        if norms[j] > 0.0 {
            u_cols.push(col.iter().map(|x| x / norms[j]).collect());
        } else {
            u_cols.push(complete_orthonormal(&u_cols, m));
        }
    }
    let u_mat = DenseMatrix::from_fn(m, n, |i, k| u_cols[k][i]);
    Ok((values, Some(u_mat), Some(v_mat)))
}

#[inline]
fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let xa = *a;
        let yb = *b;
        *a = c * xa - s * yb;
        *b = s * xa + c * yb;
    }
}

/// A unit vector orthogonal to `basis`, picked from the standard basis by
/// twice-repeated Gram-Schmidt.
fn complete_orthonormal(basis: &[Vec<f64>], m: usize) -> Vec<f64> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for e in 0..m {
        let mut cand = vec![0.0; m];
        cand[e] = 1.0;
        for _ in 0..2 {
            for b in basis {
                let proj = dot(&cand, b);
                for (c, bi) in cand.iter_mut().zip(b) {
                    *c -= proj * bi;
                }
            }
        }
        let norm = dot(&cand, &cand).sqrt();
        if norm > 0.5 {
            return cand.into_iter().map(|c| c / norm).collect();
        }
        if best.as_ref().is_none_or(|(bn, _)| norm > *bn) {
            best = Some((norm, cand));
        }
    }
    let (norm, cand) = best.expect("m >= 1");
    cand.into_iter().map(|c| c / norm).collect()
}

//! Dual frames of an analysis frame `E` (m x k, full column rank).
//!
//! For a noise shaper `H` the H-dual is the left inverse of `E` minimizing
//! `||F H||_op`. It is `F = (H^{-1} E)^+ H^{-1}`, which for `H = D^r` is the
//! Sobolev dual and for `H = I` the canonical dual `E^+`.

use crate::error::{Error, Result};
use crate::linalg::{
    apply_inverse_power, apply_inverse_power_vec, apply_inverse_transpose_power, dist2,
    operator_norm_2, pinv_from_svd, pseudo_inverse_apply, svd, DenseMatrix, SingularSpectrum,
    RANK_TOL,
};
use crate::quantize::NoiseShaper;

#[derive(Debug, Clone)]
pub struct DualFrame {
    /// k x m synthesis operator.
    pub f: DenseMatrix,
    pub shaper: NoiseShaper,
    /// Singular values of `H^{-1} E`; the smallest one controls the error bound.
    pub shaped_spectrum: SingularSpectrum,
}

impl DualFrame {
    pub fn k(&self) -> usize {
        self.f.rows()
    }

    pub fn m(&self) -> usize {
        self.f.cols()
    }

    /// `sigma_min(H^{-1} E)`.
    pub fn sigma_min(&self) -> f64 {
        self.shaped_spectrum.min()
    }

    /// `F H` formed from the banded structure of `H`.
    pub fn shaped_operator(&self) -> DenseMatrix {
        right_multiply_by_shaper(&self.f, &self.shaper)
    }

    /// `||F H||_op`.
    pub fn shaped_operator_norm(&self) -> Result<f64> {
        operator_norm_2(&self.shaped_operator())
    }

    /// `||F E - I||_max`.
    pub fn left_inverse_defect(&self, e: &DenseMatrix) -> Result<f64> {
        let fe = self.f.matmul(e)?;
        Ok(fe.sub(&DenseMatrix::identity(self.k()))?.max_abs())
    }
}

/// `F H` where `H` is the Toeplitz shaper matrix: column i of the product is
/// `f_i + sum_l h_l f_{i+l}`.
pub fn right_multiply_by_shaper(f: &DenseMatrix, shaper: &NoiseShaper) -> DenseMatrix {
    let taps = shaper.taps();
    let m = f.cols();
    DenseMatrix::from_fn(f.rows(), m, |row, i| {
        let mut acc = f[(row, i)];
        for (l, h) in taps.iter().enumerate() {
            let col = i + l + 1;
            if col >= m {
                break;
            }
            acc += h * f[(row, col)];
        }
        acc
    })
}

pub fn canonical_dual(e: &DenseMatrix) -> Result<DualFrame> {
    h_dual(e, &NoiseShaper::Identity)
}

pub fn h_dual(e: &DenseMatrix, shaper: &NoiseShaper) -> Result<DualFrame> {
    shaper.validate()?;
    if e.rows() < e.cols() {
        return Err(Error::RankDeficient { ratio: 0.0 });
    }
    let factor = shaper.factor();
    let order = shaper.order();
    let shaped = apply_inverse_power(factor, order, e)?;
    let s = svd(&shaped)?;
    let ratio = s.spectrum.min() / s.spectrum.max();
    if ratio.is_nan() || ratio <= RANK_TOL {
        return Err(Error::RankDeficient {
            ratio: if ratio.is_nan() { 0.0 } else { ratio },
        });
    }
    // F^T = H^{-T} ((H^{-1}E)^+)^T
    let pinv_t = pinv_from_svd(&s).transpose();
    let f_t = apply_inverse_transpose_power(factor, order, &pinv_t)?;
    Ok(DualFrame {
        f: f_t.transpose(),
        shaper: *shaper,
        shaped_spectrum: s.spectrum,
    })
}

/// `x_hat = F q`.
pub fn reconstruct(dual: &DualFrame, q: &[f64]) -> Result<Vec<f64>> {
    dual.f.matvec(q)
}

/// Fine reconstruction as the least-squares problem
/// `min_x ||H^{-1} E x - H^{-1} q||_2`; equal to `reconstruct` with the H-dual.
pub fn reconstruct_least_squares(
    e: &DenseMatrix,
    shaper: &NoiseShaper,
    q: &[f64],
) -> Result<Vec<f64>> {
    if q.len() != e.rows() {
        return Err(Error::DimensionMismatch {
            expected: e.rows(),
            actual: q.len(),
        });
    }
    let factor = shaper.factor();
    let order = shaper.order();
    let shaped = apply_inverse_power(factor, order, e)?;
    let rhs = apply_inverse_power_vec(factor, order, q)?;
    pseudo_inverse_apply(&shaped, &rhs)
}

/// `V(F) = sum_j ||f_j - f_{j+1}||_2` over the columns of `F`, with `f_{m+1} = 0`.
pub fn frame_variation(f: &DenseMatrix) -> f64 {
    let cols: Vec<Vec<f64>> = (0..f.cols()).map(|j| f.col_to_vec(j)).collect();
    let zero = vec![0.0; f.rows()];
    cols.iter()
        .enumerate()
        .map(|(j, c)| dist2(c, cols.get(j + 1).unwrap_or(&zero)))
        .sum()
}

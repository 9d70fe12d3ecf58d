//! Spectral facts about the difference matrix `D` and its powers, as
//! executable checks: closed-form spectra, the corner structure of
//! `(D^T)^r D^r - (D^T D)^r`, the interlacing sandwich it implies, and the
//! limiting singular value distribution.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{apply_power, singular_values, Bidiagonal, DenseMatrix, SingularSpectrum};

/// Relative threshold for counting a singular value as nonzero.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// `sigma_j(D) = 2 cos(pi j / (2m + 1))`, j = 1..m.
pub fn exact_singular_values_d(m: usize) -> SingularSpectrum {
    let denom = (2 * m + 1) as f64;
    let values = (1..=m)
        .map(|j| 2.0 * (PI * j as f64 / denom).cos())
        .collect();
    SingularSpectrum::new(values).expect("cosine sequence is descending")
}

/// `sigma_j(D^{-1}) = 1 / (2 sin(pi (j - 1/2) / (2 (m + 1/2))))`, j = 1..m.
pub fn exact_singular_values_dinv(m: usize) -> SingularSpectrum {
    let values = (1..=m)
        .map(|j| 1.0 / (2.0 * (PI * (j as f64 - 0.5) / (2.0 * (m as f64 + 0.5))).sin()))
        .collect();
    SingularSpectrum::new(values).expect("reciprocal sine sequence is descending")
}

/// Elementary bounds `(m+1/2)/(pi (j-1/2)) <= sigma_j(D^{-1}) <= (m+1/2)/(2 (j-1/2))`.
pub fn dinv_elementary_bounds(m: usize, j: usize) -> (f64, f64) {
    let num = m as f64 + 0.5;
    let jj = j as f64 - 0.5;
    (num / (PI * jj), num / (2.0 * jj))
}

/// `D^r` as a dense matrix.
pub fn difference_power(m: usize, r: usize) -> DenseMatrix {
    apply_power(Bidiagonal::DIFFERENCE, r, &DenseMatrix::identity(m))
}

/// Singular values of `D^r`, computed numerically.
pub fn singular_values_d_power(m: usize, r: usize) -> Result<SingularSpectrum> {
    singular_values(&difference_power(m, r))
}

/// Singular values of `D^{-r}` obtained by inverting those of `D^r`.
pub fn singular_values_dinv_power(m: usize, r: usize) -> Result<SingularSpectrum> {
    let direct = singular_values_d_power(m, r)?;
    SingularSpectrum::new(direct.values().iter().rev().map(|s| 1.0 / s).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorReport {
    pub r: usize,
    pub m: usize,
    /// Singular values above `RANK_THRESHOLD * sigma_1`.
    pub numerical_rank: usize,
    /// Entries outside the two r x r corner blocks exceeding `1e-10`.
    pub corner_violations: usize,
    pub max_off_corner: f64,
}

/// Forms `C = (D^T)^r D^r - (D^T D)^r` and inspects its support and rank.
pub fn commutator_rank_check(r: usize, m: usize) -> Result<CommutatorReport> {
    if m < 2 * r || m == 0 {
        return Err(Error::InvalidParameter(format!(
            "commutator check needs m >= 2r (r = {r}, m = {m})"
        )));
    }
    let dr = difference_power(m, r);
    let lhs = dr.transpose().matmul(&dr)?;
    let d = DenseMatrix::difference(m);
    let dtd = d.transpose().matmul(&d)?;
    let mut rhs = DenseMatrix::identity(m);
    for _ in 0..r {
        rhs = rhs.matmul(&dtd)?;
    }
    let c = lhs.sub(&rhs)?;

    let in_corner = |i: usize, j: usize| (i < r && j < r) || (i >= m - r && j >= m - r);
    let mut corner_violations = 0;
    let mut max_off_corner: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            if !in_corner(i, j) {
                let v = c[(i, j)].abs();
                max_off_corner = max_off_corner.max(v);
                if v > 1e-10 {
                    corner_violations += 1;
                }
            }
        }
    }
    let numerical_rank = singular_values(&c)?.numerical_rank(RANK_THRESHOLD);
    Ok(CommutatorReport {
        r,
        m,
        numerical_rank,
        corner_violations,
        max_off_corner,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylReport {
    pub r: usize,
    pub m: usize,
    pub checked: usize,
    pub violations: usize,
    /// Worst relative excursion outside the sandwich (negative when all hold).
    pub worst_excess: f64,
}

/// Checks `sigma_{min(j+2r,m)}(D)^r <= sigma_j(D^r) <= sigma_{max(j-2r,1)}(D)^r`
/// for every j, with `sigma(D)` from the closed form.
pub fn weyl_sandwich_check(r: usize, m: usize) -> Result<WeylReport> {
    if m < 4 * r || m == 0 {
        return Err(Error::InvalidParameter(format!(
            "sandwich check needs m >= 4r (r = {r}, m = {m})"
        )));
    }
    let sd = exact_singular_values_d(m);
    let sdr = singular_values_d_power(m, r)?;
    let exponent = r as i32;
    let mut violations = 0;
    let mut worst_excess = f64::NEG_INFINITY;
    for j in 1..=m {
        let lower = sd.get((j + 2 * r).min(m)).powi(exponent);
        let upper = sd.get(j.saturating_sub(2 * r).max(1)).powi(exponent);
        let s = sdr.get(j);
        let below = (lower - s) / lower;
        let above = (s - upper) / upper;
        worst_excess = worst_excess.max(below).max(above);
        let slack = 1e-9;
        if s < lower * (1.0 - slack) - 1e-13 || s > upper * (1.0 + slack) + 1e-13 {
            violations += 1;
        }
    }
    Ok(WeylReport {
        r,
        m,
        checked: m,
        violations,
        worst_excess,
    })
}

/// Reference values `2^r sin^r(pi j / 2m)`, j = 1..m.
pub fn szego_reference(r: usize, m: usize) -> Vec<f64> {
    (1..=m)
        .map(|j| (2.0 * (PI * j as f64 / (2.0 * m as f64)).sin()).powi(r as i32))
        .collect()
}

/// Sup distance between the sorted numerical spectrum of `D^r` and the sorted
/// reference sequence (quantile coupling).
pub fn szego_distribution_check(r: usize, m: usize) -> Result<f64> {
    if m < 10 {
        return Err(Error::InvalidParameter("distribution check needs m >= 10".into()));
    }
    let mut observed = singular_values_d_power(m, r)?.into_vec();
    observed.reverse();
    let reference = szego_reference(r, m);
    Ok(observed
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub j: usize,
    /// `c1 (m/j)^r`.
    pub lower: f64,
    pub observed: f64,
    /// `c2 (m/j)^r`.
    pub upper: f64,
}

/// Power-law envelope `c1 (m/j)^r <= sigma_j(D^{-r}) <= c2 (m/j)^r` with the
/// tightest constants for one `(r, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBoundCheck {
    pub r: usize,
    pub m: usize,
    pub c1: f64,
    pub c2: f64,
    pub rows: Vec<BoundRow>,
}

impl SpectralBoundCheck {
    pub fn ratio(&self) -> f64 {
        self.c2 / self.c1
    }
}

pub fn fit_power_law_bounds(r: usize, m: usize) -> Result<SpectralBoundCheck> {
    if m < 4 * r || m == 0 {
        return Err(Error::InvalidParameter(format!(
            "power-law fit needs m >= 4r (r = {r}, m = {m})"
        )));
    }
    let inv = singular_values_dinv_power(m, r)?;
    let scaled: Vec<f64> = (1..=m)
        .map(|j| inv.get(j) * (j as f64 / m as f64).powi(r as i32))
        .collect();
    let c1 = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let c2 = scaled.iter().copied().fold(0.0, f64::max);
    let rows = (1..=m)
        .map(|j| {
            let envelope = (m as f64 / j as f64).powi(r as i32);
            BoundRow {
                j,
                lower: c1 * envelope,
                observed: inv.get(j),
                upper: c2 * envelope,
            }
        })
        .collect();
    Ok(SpectralBoundCheck { r, m, c1, c2, rows })
}

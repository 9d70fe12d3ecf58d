//! Monte Carlo estimators for the random-frame quantities that drive the
//! error bounds: `sigma_min(D^{-r} E)` and `||E||_{inf->inf}`.

use crate::ensembles::{derive_seed, sample_matrix, Ensemble, EnsembleSpec};
use crate::error::{Error, Result};
use crate::linalg::{apply_inverse_power, operator_norm_inf, singular_values, Bidiagonal};
use crate::stats::Summary;

/// `sigma_min(D^{-r} E)` for one draw of an m x k frame.
pub fn sigma_min_trial(r: usize, m: usize, k: usize, ensemble: Ensemble, seed: u64) -> Result<f64> {
    let e = sample_matrix(&EnsembleSpec {
        kind: ensemble,
        rows: m,
        cols: k,
        seed,
    });
    let shaped = apply_inverse_power(Bidiagonal::DIFFERENCE, r, &e)?;
    Ok(singular_values(&shaped)?.min())
}

/// Per-oversampling-ratio statistics of `sigma_min(D^{-r} E)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaMinRow {
    pub lambda: f64,
    pub m: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// `max over trials of 1 / sigma_min`.
    pub worst_inverse: f64,
}

fn grid_m(k: usize, lambda: f64) -> Result<usize> {
    let m = lambda * k as f64;
    if m.is_nan() || m < 1.0 || (m - m.round()).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "lambda * k = {m} is not a positive integer"
        )));
    }
    Ok(m.round() as usize)
}

/// Seed for trial `t` at row count `m`.
pub fn trial_seed(base: u64, m: usize, trial: usize) -> u64 {
    derive_seed(base, &[m as u64, trial as u64])
}

/// Frames drawn from `N(0, 1/m)`, as in the worst-case singular value plots.
pub fn sigma_min_study(
    r: usize,
    k: usize,
    lambdas: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<SigmaMinRow>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    lambdas
        .iter()
        .map(|&lambda| {
            let m = grid_m(k, lambda)?;
            let values = (0..trials)
                .map(|t| sigma_min_trial(r, m, k, Ensemble::GaussianScaled, trial_seed(seed, m, t)))
                .collect::<Result<Vec<_>>>()?;
            let s = Summary::of(&values).expect("nonempty");
            Ok(SigmaMinRow {
                lambda,
                m,
                min: s.min,
                max: s.max,
                mean: s.mean,
                worst_inverse: 1.0 / s.min,
            })
        })
        .collect()
}

/// `||E||_{inf->inf} / sqrt(m k)` for one draw.
pub fn inf_norm_ratio_trial(m: usize, k: usize, ensemble: Ensemble, seed: u64) -> f64 {
    let e = sample_matrix(&EnsembleSpec {
        kind: ensemble,
        rows: m,
        cols: k,
        seed,
    });
    operator_norm_inf(&e) / ((m * k) as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfNormRow {
    pub lambda: f64,
    pub m: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    /// `lambda^{-alpha/2}` for the requested alpha.
    pub envelope: f64,
}

pub fn inf_norm_study(
    k: usize,
    lambdas: &[f64],
    trials: usize,
    alpha: f64,
    ensemble: Ensemble,
    seed: u64,
) -> Result<Vec<InfNormRow>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    lambdas
        .iter()
        .map(|&lambda| {
            let m = grid_m(k, lambda)?;
            let values: Vec<f64> = (0..trials)
                .map(|t| inf_norm_ratio_trial(m, k, ensemble, trial_seed(seed, m, t)))
                .collect();
            let s = Summary::of(&values).expect("nonempty");
            Ok(InfNormRow {
                lambda,
                m,
                max_ratio: s.max,
                mean_ratio: s.mean,
                envelope: lambda.powf(-alpha / 2.0),
            })
        })
        .collect()
}

//! Two-stage decoding of quantized compressed-sensing measurements.
//!
//! 1. Coarse: `l1_decode` with radius `eps = 2^{r-1} delta sqrt(m)`, which
//!    the greedy quantizer guarantees the true signal satisfies.
//! 2. Support: the `k'` largest coarse entries.
//! 3. Fine: the H-dual of `Phi` restricted to the estimated support, applied
//!    to `q`; entries off the support are zero.
//!
//! `Phi` is expected to have entries of unit scale (e.g. i.i.d. N(0,1)), not
//! `1/sqrt(m)`; the radius formula depends on it and it is checked.

use crate::dual::{h_dual, reconstruct, DualFrame};
use crate::error::{Error, Result};
use crate::l1::{l1_decode, L1Solution};
use crate::linalg::{dist2, DenseMatrix};
use crate::quantize::NoiseShaper;
use crate::support::estimate_support;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStageConfig {
    pub k: usize,
    /// Quantizer step `delta`.
    pub step: f64,
    pub shaper: NoiseShaper,
    /// Support estimate size; defaults to `k`.
    pub kprime: Option<usize>,
    /// Stop after the coarse stage (the output then equals the coarse estimate).
    pub skip_fine: bool,
}

impl TwoStageConfig {
    pub fn new(k: usize, step: f64, shaper: NoiseShaper) -> Self {
        Self {
            k,
            step,
            shaper,
            kprime: None,
            skip_fine: false,
        }
    }

    /// `eps = 2^{r-1} delta sqrt(m)`.
    pub fn radius(&self, m: usize) -> f64 {
        2f64.powi(self.shaper.order() as i32 - 1) * self.step * (m as f64).sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub coarse: Vec<f64>,
    pub support: Vec<usize>,
    pub fine: Vec<f64>,
    pub l1_iterations: usize,
    /// `sigma_min(H^{-1} Phi_{T'})` from the fine stage; `None` if skipped.
    pub sigma_min: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryErrors {
    pub coarse: f64,
    pub fine: f64,
    pub support_exact: bool,
}

impl RecoveryResult {
    /// Stage errors against a known signal with sorted 0-based `true_support`.
    pub fn errors(&self, x: &[f64], true_support: &[usize]) -> RecoveryErrors {
        RecoveryErrors {
            coarse: dist2(x, &self.coarse),
            fine: dist2(x, &self.fine),
            support_exact: self.support == true_support,
        }
    }
}

/// Mean squared entry must be within this factor of 1.
const NORMALIZATION_BAND: f64 = 4.0;

fn check_normalization(phi: &DenseMatrix) -> Result<()> {
    let len = phi.as_slice().len() as f64;
    let ms = phi.as_slice().iter().map(|v| v * v).sum::<f64>() / len;
    if !(1.0 / NORMALIZATION_BAND..=NORMALIZATION_BAND).contains(&ms) {
        return Err(Error::InvalidParameter(format!(
            "measurement matrix should have unit-scale entries (mean square {ms:.3e})"
        )));
    }
    Ok(())
}

pub fn two_stage_recover(
    phi: &DenseMatrix,
    q: &[f64],
    cfg: &TwoStageConfig,
) -> Result<RecoveryResult> {
    check_normalization(phi)?;
    let (m, n) = phi.shape();
    if cfg.k == 0 || cfg.k > m {
        return Err(Error::InvalidParameter(format!(
            "sparsity {} must lie in 1..={m}",
            cfg.k
        )));
    }
    let eps = cfg.radius(m);
    let L1Solution {
        z: coarse,
        iterations,
        ..
    } = l1_decode(phi, q, eps)?;
    if cfg.skip_fine {
        return Ok(RecoveryResult {
            fine: coarse.clone(),
            support: Vec::new(),
            coarse,
            l1_iterations: iterations,
            sigma_min: None,
        });
    }
    let kprime = cfg.kprime.unwrap_or(cfg.k);
    let support = estimate_support(&coarse, cfg.k, kprime)?;
    let (fine_on_support, dual) = fine_stage(phi, &support, q, &cfg.shaper)?;
    let mut fine = vec![0.0; n];
    for (&j, &v) in support.iter().zip(&fine_on_support) {
        fine[j] = v;
    }
    Ok(RecoveryResult {
        coarse,
        support,
        fine,
        l1_iterations: iterations,
        sigma_min: Some(dual.sigma_min()),
    })
}

/// H-dual reconstruction on a fixed support.
pub fn fine_stage(
    phi: &DenseMatrix,
    support: &[usize],
    q: &[f64],
    shaper: &NoiseShaper,
) -> Result<(Vec<f64>, DualFrame)> {
    let e = phi.select_columns(support);
    let dual = h_dual(&e, shaper)?;
    let x = reconstruct(&dual, q)?;
    Ok((x, dual))
}

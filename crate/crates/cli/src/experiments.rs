//! Task grids and single-trial execution for the trial-based experiments.
//!
//! Within one trial of an end-to-end sweep every cell sees the same signal
//! and the same measurement matrix (its first m rows), so errors across m and
//! r are paired rather than independent.

use std::time::Instant;

use sdcs_core::linalg::{norm2, norm_inf, DenseMatrix};
use sdcs_core::studies::{inf_norm_ratio_trial, sigma_min_trial, trial_seed};
use sdcs_core::{
    derive_seed, shape_quantize, two_stage_recover, Alphabet, Ensemble, MagnitudeModel,
    NoiseShaper, SparseSignal, TrialRng, TwoStageConfig,
};

use crate::config::{ExperimentConfig, ExperimentKind, ShaperFamily};
use crate::error::{HarnessError, Result};
use crate::record::TrialRecord;

const SIGNAL_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub kind: ExperimentKind,
    pub k: usize,
    pub m: usize,
    pub r: Option<usize>,
    pub shaper: Option<NoiseShaper>,
    pub trial: usize,
    pub seed: u64,
}

/// A trial that did not produce outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub record: Box<TrialRecord>,
    pub reason: String,
}

fn shaper_for(family: ShaperFamily, r: usize, mu: f64) -> NoiseShaper {
    if r == 0 {
        return NoiseShaper::Identity;
    }
    match family {
        ShaperFamily::Difference => NoiseShaper::DifferencePower(r),
        ShaperFamily::HighPass => NoiseShaper::HighPassPower(r),
        ShaperFamily::Leaky => NoiseShaper::Leaky { order: r, mu },
    }
}

fn signal_label(model: MagnitudeModel) -> &'static str {
    match model {
        MagnitudeModel::ConstantUnitNorm => "constant",
        MagnitudeModel::Gaussian => "gaussian",
    }
}

fn ensemble_label(e: Ensemble) -> &'static str {
    match e {
        Ensemble::GaussianUnit => "gaussian",
        Ensemble::GaussianScaled => "gaussian_scaled",
        Ensemble::BernoulliPm1 => "bernoulli",
    }
}

/// Every (cell, trial) of a trial-based experiment, in grid order.
pub fn tasks(cfg: &ExperimentConfig) -> Result<Vec<Task>> {
    let mut out = Vec::new();
    for &k in &cfg.k {
        for m in cfg.rows_for(k)? {
            match cfg.kind {
                ExperimentKind::EndToEnd => {
                    for &r in &cfg.r {
                        let mus: Vec<f64> = if r > 0 && cfg.shaper == ShaperFamily::Leaky {
                            cfg.mu.clone()
                        } else {
                            vec![0.0]
                        };
                        for mu in mus {
                            let shaper = shaper_for(cfg.shaper, r, mu);
                            for trial in 0..cfg.trials {
                                out.push(Task {
                                    kind: cfg.kind,
                                    k,
                                    m,
                                    r: Some(r),
                                    shaper: Some(shaper),
                                    trial,
                                    seed: derive_seed(cfg.seed, &[trial as u64]),
                                });
                            }
                        }
                    }
                }
                ExperimentKind::SigmaMinStudy => {
                    for &r in &cfg.r {
                        for trial in 0..cfg.trials {
                            out.push(Task {
                                kind: cfg.kind,
                                k,
                                m,
                                r: Some(r),
                                shaper: None,
                                trial,
                                seed: trial_seed(cfg.seed, m, trial),
                            });
                        }
                    }
                }
                ExperimentKind::InfNormStudy => {
                    for trial in 0..cfg.trials {
                        out.push(Task {
                            kind: cfg.kind,
                            k,
                            m,
                            r: None,
                            shaper: None,
                            trial,
                            seed: trial_seed(cfg.seed, m, trial),
                        });
                    }
                }
                ExperimentKind::SpectralSuite | ExperimentKind::RateDistortion => {
                    return Err(HarnessError::Config(format!(
                        "{} is a table experiment, not a trial sweep",
                        cfg.kind.name()
                    )));
                }
            }
        }
    }
    Ok(out)
}

impl Task {
    /// The record identifying this task, without outcomes.
    pub fn skeleton(&self, cfg: &ExperimentConfig) -> TrialRecord {
        let mut rec = TrialRecord::skeleton(&cfg.id, self.k, self.m, self.trial, self.seed);
        rec.r = self.r;
        match self.kind {
            ExperimentKind::EndToEnd => {
                let shaper = self.shaper.expect("end-to-end tasks carry a shaper");
                rec.n = Some(cfg.n);
                rec.shaper = shaper.label().to_string();
                if let NoiseShaper::Leaky { mu, .. } = shaper {
                    rec.mu = Some(mu);
                }
                rec.delta = Some(cfg.delta);
                rec.kprime = Some(cfg.kprime.unwrap_or(self.k));
                rec.signal_model = signal_label(cfg.signal).to_string();
            }
            ExperimentKind::SigmaMinStudy => {
                rec.shaper = "sd".into();
                rec.signal_model = ensemble_label(Ensemble::GaussianScaled).into();
            }
            ExperimentKind::InfNormStudy => {
                rec.signal_model = ensemble_label(cfg.ensemble).into();
            }
            _ => {}
        }
        rec
    }

    pub fn execute(&self, cfg: &ExperimentConfig) -> std::result::Result<TrialRecord, Failure> {
        let mut rec = self.skeleton(cfg);
        let start = Instant::now();
        let outcome = match self.kind {
            ExperimentKind::EndToEnd => self.end_to_end(cfg, &mut rec),
            ExperimentKind::SigmaMinStudy => {
                let r = self.r.unwrap_or(0);
                sigma_min_trial(r, self.m, self.k, Ensemble::GaussianScaled, self.seed)
                    .map(|s| rec.sigma_min = Some(s))
                    .map_err(HarnessError::from)
            }
            ExperimentKind::InfNormStudy => {
                rec.u_inf = Some(inf_norm_ratio_trial(self.m, self.k, cfg.ensemble, self.seed));
                Ok(())
            }
            _ => unreachable!("table experiments have no tasks"),
        };
        if cfg.timings {
            rec.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        }
        match outcome {
            Ok(()) => Ok(rec),
            Err(e) => Err(Failure {
                record: Box::new(rec),
                reason: e.to_string(),
            }),
        }
    }

    fn end_to_end(&self, cfg: &ExperimentConfig, rec: &mut TrialRecord) -> Result<()> {
        let shaper = self.shaper.expect("end-to-end tasks carry a shaper");
        let x = trial_signal(cfg, self.k, self.seed)?;
        let phi = measurement_rows(self.m, cfg.n, cfg.ensemble, self.seed);
        let dense = x.to_dense();
        let y = phi.matvec(&dense)?;
        let alphabet = match cfg.bits {
            Some(bits) => Alphabet::finite(cfg.delta, bits)?,
            None => Alphabet::unbounded(cfg.delta)?,
        };
        let quant = shape_quantize(&y, &shaper, &alphabet)?;
        rec.u_inf = Some(norm_inf(&quant.u));
        rec.u_l2 = Some(norm2(&quant.u));
        rec.overloaded = Some(quant.overloaded);

        let mut two = TwoStageConfig::new(self.k, cfg.delta, shaper);
        two.kprime = cfg.kprime;
        two.skip_fine = !cfg.fine;
        let out = two_stage_recover(&phi, &quant.q, &two)?;
        let errs = out.errors(&dense, x.support());
        rec.coarse_err = Some(errs.coarse);
        if cfg.fine {
            rec.fine_err = Some(errs.fine);
            rec.support_exact = Some(errs.support_exact);
            rec.sigma_min = out.sigma_min;
        }
        Ok(())
    }
}

/// Rows of the measurement matrix are drawn from per-row streams, so the
/// first m rows do not depend on how many rows any other cell uses.
pub fn measurement_rows(m: usize, n: usize, ensemble: Ensemble, seed: u64) -> DenseMatrix {
    let scale = match ensemble {
        Ensemble::GaussianScaled => 1.0 / (m as f64).sqrt(),
        _ => 1.0,
    };
    let mut data = Vec::with_capacity(m * n);
    for i in 0..m {
        let mut rng = TrialRng::new(derive_seed(seed, &[i as u64]));
        for _ in 0..n {
            data.push(match ensemble {
                Ensemble::BernoulliPm1 => rng.sign(),
                _ => scale * rng.normal(),
            });
        }
    }
    DenseMatrix::from_row_major(m, n, data).expect("dimensions match")
}

/// The trial's sparse signal. With a size constant C, Gaussian entries are
/// redrawn until `|x_j| >= C delta`.
pub fn trial_signal(cfg: &ExperimentConfig, k: usize, seed: u64) -> Result<SparseSignal> {
    let mut rng = TrialRng::new(derive_seed(seed, &[SIGNAL_STREAM]));
    let support = rng.subset(cfg.n, k);
    let values = match cfg.signal {
        MagnitudeModel::ConstantUnitNorm => vec![1.0 / (k as f64).sqrt(); k],
        MagnitudeModel::Gaussian => {
            let floor = cfg.size_constant.map_or(0.0, |c| c * cfg.delta);
            (0..k)
                .map(|_| loop {
                    let v = rng.normal();
                    if v != 0.0 && v.abs() >= floor {
                        break v;
                    }
                })
                .collect()
        }
    };
    Ok(SparseSignal::new(cfg.n, support, values)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::defaults(ExperimentKind::EndToEnd);
        cfg.n = 128;
        cfg.k = vec![3];
        cfg.m = vec![40, 60];
        cfg.r = vec![0, 1];
        cfg.trials = 2;
        cfg
    }

    #[test]
    fn grid_size() {
        let cfg = small();
        assert_eq!(tasks(&cfg).unwrap().len(), 2 * 2 * 2);
        let mut leaky = cfg.clone();
        leaky.shaper = ShaperFamily::Leaky;
        leaky.mu = vec![0.3, 0.6];
        // r = 0 is PCM and does not multiply by the mu grid.
        assert_eq!(tasks(&leaky).unwrap().len(), 2 * (1 + 2) * 2);
    }

    #[test]
    fn rows_are_prefix_stable() {
        let a = measurement_rows(20, 30, Ensemble::GaussianUnit, 5);
        let b = measurement_rows(35, 30, Ensemble::GaussianUnit, 5);
        assert_eq!(b.top_rows(20), a);
    }

    #[test]
    fn size_constant_enforced() {
        let mut cfg = small();
        cfg.signal = MagnitudeModel::Gaussian;
        cfg.size_constant = Some(50.0);
        for seed in 0..20 {
            let x = trial_signal(&cfg, 3, seed).unwrap();
            assert!(x.min_magnitude() >= 0.5);
        }
    }

    #[test]
    fn execute_fills_outcomes() {
        let cfg = small();
        for task in tasks(&cfg).unwrap() {
            let rec = task.execute(&cfg).unwrap();
            assert!(rec.coarse_err.unwrap() >= 0.0);
            assert!(rec.fine_err.unwrap() >= 0.0);
            assert!(rec.u_inf.unwrap() <= cfg.delta / 2.0 + 1e-12);
            assert!(rec.wall_ms.is_none());
        }
    }
}

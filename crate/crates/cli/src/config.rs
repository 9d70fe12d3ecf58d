//! Flat `key = value` experiment configuration.
//!
//! Lists are comma separated. Lines starting with `#` are comments. Any key
//! can also be set from the command line, which takes precedence.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sdcs_core::{Ensemble, MagnitudeModel};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    EndToEnd,
    SigmaMinStudy,
    InfNormStudy,
    SpectralSuite,
    RateDistortion,
}

impl ExperimentKind {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "end_to_end" | "endtoend" => Self::EndToEnd,
            "sigma_min" | "sigmamin" => Self::SigmaMinStudy,
            "inf_norm" | "infnorm" => Self::InfNormStudy,
            "spectral" => Self::SpectralSuite,
            "rate_distortion" | "ratedistortion" => Self::RateDistortion,
            other => return Err(HarnessError::Config(format!("unknown experiment kind `{other}`"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::EndToEnd => "end_to_end",
            Self::SigmaMinStudy => "sigma_min",
            Self::InfNormStudy => "inf_norm",
            Self::SpectralSuite => "spectral",
            Self::RateDistortion => "rate_distortion",
        }
    }
}

/// Family of noise shapers used for orders r >= 1; order 0 is always PCM.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShaperFamily {
    Difference,
    HighPass,
    Leaky,
}

impl ShaperFamily {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "sd" | "difference" => Self::Difference,
            "highpass" => Self::HighPass,
            "leaky" => Self::Leaky,
            other => return Err(HarnessError::Config(format!("unknown shaper `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub id: String,
    pub k: Vec<usize>,
    /// Ambient dimension N.
    pub n: usize,
    /// Explicit row counts; when empty, `lambda * k` is used.
    pub m: Vec<usize>,
    pub lambda: Vec<f64>,
    pub r: Vec<usize>,
    pub shaper: ShaperFamily,
    pub mu: Vec<f64>,
    pub delta: f64,
    /// Finite alphabet with `2^bits` levels; unbounded when `None`.
    pub bits: Option<u32>,
    pub alpha: f64,
    pub kprime: Option<usize>,
    pub signal: MagnitudeModel,
    pub ensemble: Ensemble,
    /// Gaussian signal entries are redrawn until `|x_j| >= size_constant * delta`.
    pub size_constant: Option<f64>,
    pub fine: bool,
    pub trials: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// Fill the wall_ms column. Off by default so reruns are byte-identical.
    pub timings: bool,
    pub floor: f64,
    pub scales: u32,
}

impl ExperimentConfig {
    /// Desk-scale defaults for an experiment kind.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = Self {
            kind,
            id: kind.name().to_string(),
            k: vec![10],
            n: 1024,
            m: Vec::new(),
            lambda: Vec::new(),
            r: vec![0, 1, 2],
            shaper: ShaperFamily::Difference,
            mu: vec![0.5],
            delta: 0.01,
            bits: None,
            alpha: 0.5,
            kprime: None,
            signal: MagnitudeModel::ConstantUnitNorm,
            ensemble: Ensemble::GaussianUnit,
            size_constant: None,
            fine: true,
            trials: 50,
            seed: 1,
            out: PathBuf::from(format!("{}.csv", kind.name())),
            timings: false,
            floor: 1.0,
            scales: 0,
        };
        match kind {
            ExperimentKind::EndToEnd => Self {
                m: vec![100, 200, 300, 400, 500, 600],
                ..base
            },
            ExperimentKind::SigmaMinStudy => Self {
                k: vec![20],
                lambda: vec![2.0, 4.0, 8.0, 16.0, 24.0],
                r: vec![1, 2],
                trials: 200,
                ensemble: Ensemble::GaussianScaled,
                ..base
            },
            ExperimentKind::InfNormStudy => Self {
                k: vec![20],
                lambda: vec![2.0, 5.0, 10.0, 20.0],
                r: Vec::new(),
                trials: 200,
                ..base
            },
            ExperimentKind::SpectralSuite => Self {
                m: vec![16, 64, 256],
                r: vec![1, 2, 3, 4],
                trials: 1,
                ..base
            },
            ExperimentKind::RateDistortion => Self {
                m: vec![100, 200, 400, 800, 1600],
                r: vec![1, 2, 3],
                trials: 1,
                ..base
            },
        }
    }

    /// Large grids selected by `--full`.
    pub fn full_scale(mut self) -> Self {
        match self.kind {
            ExperimentKind::EndToEnd => {
                self.n = 2000;
                self.m = (1..=10).map(|i| 100 * i).collect();
                self.trials = 100;
            }
            ExperimentKind::SigmaMinStudy => {
                self.k = vec![50];
                self.lambda = (1..=25).map(f64::from).collect();
                self.r = vec![1, 2, 3];
                self.trials = 1000;
            }
            ExperimentKind::InfNormStudy => {
                self.trials = 1000;
            }
            ExperimentKind::SpectralSuite => {
                self.m = vec![16, 64, 256, 512];
            }
            ExperimentKind::RateDistortion => {}
        }
        self
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_pairs(&parse_pairs(&text)?, false)
    }

    /// Builds a config from `key = value` pairs. The `experiment` key picks
    /// the defaults; `full` switches them to the large grids before overrides.
    pub fn from_pairs(pairs: &BTreeMap<String, String>, full: bool) -> Result<Self> {
        let kind = match pairs.get("experiment") {
            Some(v) => ExperimentKind::parse(v)?,
            None => ExperimentKind::EndToEnd,
        };
        let mut cfg = Self::defaults(kind);
        if full {
            cfg = cfg.full_scale();
        }
        for (key, value) in pairs {
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "experiment" => self.kind = ExperimentKind::parse(value)?,
            "id" => self.id = value.to_string(),
            "k" => self.k = list(key, value)?,
            "n" | "N" => self.n = scalar(key, value)?,
            "m" => {
                self.m = list(key, value)?;
                self.lambda.clear();
            }
            "lambda" => {
                self.lambda = list(key, value)?;
                self.m.clear();
            }
            "r" => self.r = list(key, value)?,
            "shaper" => self.shaper = ShaperFamily::parse(value)?,
            "mu" => self.mu = list(key, value)?,
            "delta" => self.delta = scalar(key, value)?,
            "bits" => self.bits = optional(key, value)?,
            "alpha" => self.alpha = scalar(key, value)?,
            "kprime" => self.kprime = optional(key, value)?,
            "signal" => {
                self.signal = match value {
                    "constant" => MagnitudeModel::ConstantUnitNorm,
                    "gaussian" => MagnitudeModel::Gaussian,
                    other => return Err(HarnessError::Config(format!("unknown signal model `{other}`"))),
                }
            }
            "ensemble" => {
                self.ensemble = match value {
                    "gaussian" => Ensemble::GaussianUnit,
                    "gaussian_scaled" => Ensemble::GaussianScaled,
                    "bernoulli" => Ensemble::BernoulliPm1,
                    other => return Err(HarnessError::Config(format!("unknown ensemble `{other}`"))),
                }
            }
            "size_constant" => self.size_constant = optional(key, value)?,
            "fine" => self.fine = scalar(key, value)?,
            "trials" => self.trials = scalar(key, value)?,
            "seed" => self.seed = scalar(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "timings" => self.timings = scalar(key, value)?,
            "floor" => self.floor = scalar(key, value)?,
            "scales" => self.scales = scalar(key, value)?,
            other => return Err(HarnessError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(HarnessError::Config(msg));
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.k.is_empty() || self.k.contains(&0) {
            return fail("k must be a nonempty list of positive integers".into());
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return fail(format!("delta must be positive, got {}", self.delta));
        }
        if self.shaper == ShaperFamily::Leaky
            && (self.mu.is_empty() || self.mu.iter().any(|&mu| !(mu > 0.0 && mu < 1.0)))
        {
            return fail("leaky shaper needs mu values in (0, 1)".into());
        }
        if let Some(c) = self.size_constant {
            if !(c > 0.0 && c.is_finite()) {
                return fail("size_constant must be positive".into());
            }
        }
        if self.id.is_empty() || self.id.contains([',', '"', '\n']) {
            return fail("id must be nonempty without commas or quotes".into());
        }
        for &k in &self.k {
            for m in self.rows_for(k)? {
                if m < k {
                    return fail(format!("m = {m} is smaller than k = {k}"));
                }
                if self.kind == ExperimentKind::EndToEnd && k >= self.n {
                    return fail(format!("k = {k} must be below N = {}", self.n));
                }
            }
        }
        if let Some(kp) = self.kprime {
            if self.k.iter().any(|&k| kp < k || kp >= self.n) {
                return fail(format!("kprime = {kp} must lie in k..N-1"));
            }
        }
        Ok(())
    }

    /// Row counts for sparsity `k`: the explicit list, or `lambda * k`,
    /// which must be integral.
    pub fn rows_for(&self, k: usize) -> Result<Vec<usize>> {
        if !self.m.is_empty() {
            return Ok(self.m.clone());
        }
        if self.lambda.is_empty() {
            return Err(HarnessError::Config("set either m or lambda".into()));
        }
        self.lambda
            .iter()
            .map(|&l| {
                let m = l * k as f64;
                if m.is_nan() || m < 1.0 || (m - m.round()).abs() > 1e-9 {
                    Err(HarnessError::Config(format!(
                        "lambda = {l} with k = {k} gives non-integral m = {m}"
                    )))
                } else {
                    Ok(m.round() as usize)
                }
            })
            .collect()
    }
}

pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut pairs = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            HarnessError::Config(format!("line {}: expected key = value", no + 1))
        })?;
        pairs.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(pairs)
}

fn scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| HarnessError::Config(format!("bad value `{value}` for `{key}`")))
}

fn optional<T: std::str::FromStr>(key: &str, value: &str) -> Result<Option<T>> {
    if value.is_empty() || value == "none" {
        Ok(None)
    } else {
        scalar(key, value).map(Some)
    }
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|v| scalar(key, v.trim())).collect()
}

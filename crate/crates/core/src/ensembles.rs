//! Seeded random measurement matrices and sparse signals.
//!
//! All randomness flows through [`TrialRng`], a ChaCha8 stream generator.
//! Sub-seeds for cells and trials come from [`derive_seed`], so a trial's
//! draws depend only on `(base seed, key)` and never on scheduling.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic sub-seed for a path of keys below `base`.
pub fn derive_seed(base: u64, keys: &[u64]) -> u64 {
    keys.iter().fold(mix64(base), |acc, &k| mix64(acc ^ mix64(k)))
}

/// Counter-based generator with Box-Muller normals.
#[derive(Debug, Clone)]
pub struct TrialRng {
    inner: ChaCha8Rng,
    spare: Option<f64>,
}

impl TrialRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Standard normal via the Box-Muller transform.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - U lies in (0, 1], keeping the log finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }

    pub fn sign(&mut self) -> f64 {
        if self.inner.gen::<bool>() {
            1.0
        } else {
            -1.0
        }
    }

    /// Uniformly random `k`-subset of `0..n`, sorted.
    pub fn subset(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut idx = sample(&mut self.inner, n, k).into_vec();
        idx.sort_unstable();
        idx
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    /// i.i.d. N(0, 1).
    GaussianUnit,
    /// i.i.d. N(0, 1/m) with m the row count.
    GaussianScaled,
    /// i.i.d. uniform signs.
    BernoulliPm1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub kind: Ensemble,
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
}

/// Draws a matrix in row-major order, so the first `m` rows of a taller draw
/// with the same seed coincide with the unit-variance draw of `m` rows.
pub fn sample_matrix(spec: &EnsembleSpec) -> DenseMatrix {
    let mut rng = TrialRng::new(spec.seed);
    let scale = match spec.kind {
        Ensemble::GaussianScaled => 1.0 / (spec.rows as f64).sqrt(),
        _ => 1.0,
    };
    DenseMatrix::from_fn(spec.rows, spec.cols, |_, _| match spec.kind {
        Ensemble::BernoulliPm1 => rng.sign(),
        _ => scale * rng.normal(),
    })
}

/// k-sparse vector in R^N. Support indices are 0-based and strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    n: usize,
    support: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSignal {
    pub fn new(n: usize, support: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if support.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: support.len(),
                actual: values.len(),
            });
        }
        if support.len() > n {
            return Err(Error::InvalidParameter("support larger than dimension".into()));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) || support.last().is_some_and(|&i| i >= n) {
            return Err(Error::InvalidParameter(
                "support must be strictly increasing and inside 0..N".into(),
            ));
        }
        if values.iter().any(|v| *v == 0.0 || !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "values on the support must be finite and nonzero".into(),
            ));
        }
        Ok(Self { n, support, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min_magnitude(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()))
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (&i, &v) in self.support.iter().zip(&self.values) {
            x[i] = v;
        }
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MagnitudeModel {
    /// Every nonzero equals `1/sqrt(k)`, so `||x||_2 = 1`.
    ConstantUnitNorm,
    /// Nonzeros i.i.d. N(0, 1).
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignalSpec {
    pub n: usize,
    pub k: usize,
    pub magnitude: MagnitudeModel,
    pub seed: u64,
}

pub fn sample_signal(spec: &SignalSpec) -> Result<SparseSignal> {
    if spec.k > spec.n {
        return Err(Error::InvalidParameter(format!(
            "sparsity {} exceeds dimension {}",
            spec.k, spec.n
        )));
    }
    let mut rng = TrialRng::new(spec.seed);
    let support = rng.subset(spec.n, spec.k);
    let values = match spec.magnitude {
        MagnitudeModel::ConstantUnitNorm => vec![1.0 / (spec.k as f64).sqrt(); spec.k],
        MagnitudeModel::Gaussian => (0..spec.k).map(|_| rng.normal()).collect(),
    };
    SparseSignal::new(spec.n, support, values)
}

//! Memoryless (PCM) and noise-shaping quantizers.
//!
//! Every scheme here is described by a lower-triangular Toeplitz noise-shaping
//! matrix `H = B^r`, where `B` is lower bidiagonal with unit diagonal, and runs
//! the greedy recursion `H u = y - q` from zero initial state: each `q_j` is the
//! alphabet element closest to `y_j` minus the contribution of past states.

use crate::error::{Error, Result};
use crate::linalg::{norm_inf, Bidiagonal, DenseMatrix};

/// Uniform quantization alphabet with step `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alphabet {
    step: f64,
    levels: Levels,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Levels {
    /// `delta * Z`.
    Unbounded,
    /// `2^bits` levels `delta * (i - (L - 1) / 2)`, symmetric about zero.
    Finite { bits: u32 },
}

impl Alphabet {
    pub fn unbounded(step: f64) -> Result<Self> {
        Self::new(step, Levels::Unbounded)
    }

    pub fn finite(step: f64, bits: u32) -> Result<Self> {
        Self::new(step, Levels::Finite { bits })
    }

    pub fn new(step: f64, levels: Levels) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "quantizer step must be positive, got {step}"
            )));
        }
        if let Levels::Finite { bits } = levels {
            if bits == 0 || bits > 52 {
                return Err(Error::InvalidParameter(format!(
                    "finite alphabet needs 1..=52 bits, got {bits}"
                )));
            }
        }
        Ok(Self { step, levels })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn levels(&self) -> Levels {
        self.levels
    }

    /// Number of codewords, `None` when unbounded.
    pub fn codewords(&self) -> Option<u64> {
        match self.levels {
            Levels::Unbounded => None,
            Levels::Finite { bits } => Some(1u64 << bits),
        }
    }

    /// Largest codeword magnitude, `None` when unbounded.
    pub fn max_codeword(&self) -> Option<f64> {
        self.codewords().map(|l| self.step * (l as f64 - 1.0) / 2.0)
    }

    /// Codeword nearest to `w`, ties broken away from zero, and whether the
    /// value fell outside the range the alphabet resolves to within `delta/2`.
    pub fn nearest(&self, w: f64) -> (f64, bool) {
        let d = self.step;
        match self.levels {
            Levels::Unbounded => ((w / d).round() * d, false),
            Levels::Finite { bits } => {
                let l = (1u64 << bits) as f64;
                let half = (l - 1.0) / 2.0;
                // L is even, so codewords sit at half-integer multiples of delta.
                // Ties go to the larger-magnitude codeword; w = 0 maps to +delta/2.
                let t = w / d;
                let shifted = t - 0.5;
                let lo = shifted.floor();
                let frac = shifted - lo;
                let offset = if frac > 0.5 || (frac == 0.5 && t >= 0.0) {
                    lo + 1.5
                } else {
                    lo + 0.5
                };
                let clipped = offset.clamp(-half, half);
                let q = clipped * d;
                (q, (w - q).abs() > d / 2.0)
            }
        }
    }
}

/// Structured noise-shaping matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseShaper {
    /// PCM: `H = I`.
    Identity,
    /// Standard r-th order sigma-delta: `H = D^r`.
    DifferencePower(usize),
    /// High-pass scheme: `H` with +1 on the subdiagonal, raised to the r-th power.
    HighPassPower(usize),
    /// Leaky scheme: subdiagonal `-mu`, raised to the r-th power.
    Leaky { order: usize, mu: f64 },
}

impl NoiseShaper {
    pub fn validate(&self) -> Result<()> {
        if let NoiseShaper::Leaky { mu, .. } = *self {
            if !(mu > 0.0 && mu < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "leaky shaper needs 0 < mu < 1, got {mu}"
                )));
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        match *self {
            NoiseShaper::Identity => 0,
            NoiseShaper::DifferencePower(r) | NoiseShaper::HighPassPower(r) => r,
            NoiseShaper::Leaky { order, .. } => order,
        }
    }

    /// The bidiagonal factor `B` with `H = B^order`.
    pub fn factor(&self) -> Bidiagonal {
        let sub = match *self {
            NoiseShaper::Identity => 0.0,
            NoiseShaper::DifferencePower(_) => -1.0,
            NoiseShaper::HighPassPower(_) => 1.0,
            NoiseShaper::Leaky { mu, .. } => -mu,
        };
        Bidiagonal { diag: 1.0, sub }
    }

    /// Subdiagonal coefficients `h_1..h_r` of the Toeplitz matrix `H`:
    /// `h_i = C(r, i) * sub^i`.
    pub fn taps(&self) -> Vec<f64> {
        let r = self.order();
        let sub = self.factor().sub;
        let mut taps = Vec::with_capacity(r);
        let mut binom = 1.0;
        let mut pow = 1.0;
        for i in 1..=r {
            binom = binom * (r + 1 - i) as f64 / i as f64;
            pow *= sub;
            taps.push(binom * pow);
        }
        taps
    }

    pub fn to_dense(&self, m: usize) -> DenseMatrix {
        let taps = self.taps();
        DenseMatrix::from_fn(m, m, |i, j| {
            if i == j {
                1.0
            } else if i > j && i - j <= taps.len() {
                taps[i - j - 1]
            } else {
                0.0
            }
        })
    }

    /// Computes `H u` using the banded structure.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let taps = self.taps();
        (0..u.len())
            .map(|j| {
                let past: f64 = taps
                    .iter()
                    .enumerate()
                    .take_while(|(i, _)| *i < j)
                    .map(|(i, h)| h * u[j - i - 1])
                    .sum();
                u[j] + past
            })
            .collect()
    }

    /// Short label used in reports and CSV files.
    pub fn label(&self) -> &'static str {
        match self {
            NoiseShaper::Identity => "pcm",
            NoiseShaper::DifferencePower(_) => "sd",
            NoiseShaper::HighPassPower(_) => "highpass",
            NoiseShaper::Leaky { .. } => "leaky",
        }
    }
}

/// Output of a quantizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationResult {
    pub q: Vec<f64>,
    /// State sequence with `H u = y - q`.
    pub u: Vec<f64>,
    pub overloaded: bool,
    /// First index at which a finite alphabet overloaded.
    pub overload_index: Option<usize>,
    pub max_state: f64,
}

impl QuantizationResult {
    /// `||H u - (y - q)||_inf` for the shaper that produced this result.
    pub fn reconstruction_residual(&self, y: &[f64], shaper: &NoiseShaper) -> f64 {
        shaper
            .apply(&self.u)
            .iter()
            .zip(y.iter().zip(&self.q))
            .map(|(hu, (yj, qj))| (hu - (yj - qj)).abs())
            .fold(0.0, f64::max)
    }

    pub fn distinct_levels(&self) -> usize {
        let mut q = self.q.clone();
        q.sort_by(f64::total_cmp);
        q.dedup();
        q.len()
    }
}

/// Rounds each entry to its nearest codeword.
pub fn pcm_quantize(y: &[f64], alphabet: &Alphabet) -> QuantizationResult {
    let mut q = Vec::with_capacity(y.len());
    let mut u = Vec::with_capacity(y.len());
    let mut overload_index = None;
    for (j, &yj) in y.iter().enumerate() {
        let (qj, over) = alphabet.nearest(yj);
        if over && overload_index.is_none() {
            overload_index = Some(j);
        }
        q.push(qj);
        u.push(yj - qj);
    }
    finish(q, u, overload_index)
}

/// Greedy r-th order sigma-delta quantization (`H = D^r`).
pub fn sigma_delta_quantize(y: &[f64], order: usize, alphabet: &Alphabet) -> QuantizationResult {
    shape_quantize(y, &NoiseShaper::DifferencePower(order), alphabet)
        .expect("difference shaper is always valid")
}

/// Greedy quantization for an arbitrary structured shaper.
pub fn shape_quantize(
    y: &[f64],
    shaper: &NoiseShaper,
    alphabet: &Alphabet,
) -> Result<QuantizationResult> {
    shaper.validate()?;
    let taps = shaper.taps();
    let compensated = taps.len() >= 3;
    let mut q = Vec::with_capacity(y.len());
    let mut u: Vec<f64> = Vec::with_capacity(y.len());
    let mut overload_index = None;
    for (j, &yj) in y.iter().enumerate() {
        let w = if compensated {
            let mut sum = yj;
            let mut comp = 0.0;
            for (i, h) in taps.iter().enumerate().take(j) {
                let term = -h * u[j - i - 1] - comp;
                let t = sum + term;
                comp = (t - sum) - term;
                sum = t;
            }
            sum
        } else {
            let mut sum = yj;
            for (i, h) in taps.iter().enumerate().take(j) {
                sum -= h * u[j - i - 1];
            }
            sum
        };
        let (qj, over) = alphabet.nearest(w);
        if over && overload_index.is_none() {
            overload_index = Some(j);
        }
        q.push(qj);
        u.push(w - qj);
    }
    Ok(finish(q, u, overload_index))
}

fn finish(q: Vec<f64>, u: Vec<f64>, overload_index: Option<usize>) -> QuantizationResult {
    let max_state = norm_inf(&u);
    QuantizationResult {
        q,
        u,
        overloaded: overload_index.is_some(),
        overload_index,
        max_state,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pcm_examples() {
        let a = Alphabet::unbounded(1.0).unwrap();
        assert_eq!(pcm_quantize(&[0.3, -0.7], &a).q, vec![0.0, -1.0]);
        assert_eq!(pcm_quantize(&[0.0], &Alphabet::unbounded(0.37).unwrap()).q, vec![0.0]);
        // Tie goes away from zero.
        assert_eq!(pcm_quantize(&[0.5], &a).q, vec![1.0]);
        assert_eq!(pcm_quantize(&[-0.5], &a).q, vec![-1.0]);
    }

    #[test]
    fn first_order_hand_recursion() {
        let a = Alphabet::unbounded(1.0).unwrap();
        let res = sigma_delta_quantize(&[0.3, 0.3, 0.3], 1, &a);
        assert_eq!(res.q, vec![0.0, 1.0, 0.0]);
        let want_u = [0.3, -0.4, -0.1];
        for (got, want) in res.u.iter().zip(want_u) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_input_gives_zero_output() {
        let a = Alphabet::unbounded(0.1).unwrap();
        for r in 0..4 {
            let res = sigma_delta_quantize(&[0.0; 6], r, &a);
            assert!(res.q.iter().all(|&v| v == 0.0));
            assert!(res.u.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn leaky_hand_recursion() {
        let a = Alphabet::unbounded(1.0).unwrap();
        let shaper = NoiseShaper::Leaky { order: 1, mu: 0.5 };
        let res = shape_quantize(&[0.3, 0.3], &shaper, &a).unwrap();
        assert_eq!(res.q, vec![0.0, 0.0]);
        assert!((res.u[0] - 0.3).abs() < 1e-15);
        assert!((res.u[1] - 0.45).abs() < 1e-15);
    }

    #[test]
    fn leaky_mu_validated() {
        let a = Alphabet::unbounded(1.0).unwrap();
        for mu in [0.0, 1.0, -0.2] {
            let s = NoiseShaper::Leaky { order: 1, mu };
            assert!(shape_quantize(&[0.1], &s, &a).is_err());
        }
    }

    #[test]
    fn taps_are_binomial() {
        assert_eq!(NoiseShaper::DifferencePower(3).taps(), vec![-3.0, 3.0, -1.0]);
        assert_eq!(NoiseShaper::HighPassPower(2).taps(), vec![2.0, 1.0]);
        assert!(NoiseShaper::Identity.taps().is_empty());
        let dense = NoiseShaper::DifferencePower(2).to_dense(4);
        let d = DenseMatrix::difference(4);
        assert_eq!(dense, d.matmul(&d).unwrap());
    }

    #[test]
    fn finite_alphabet_codewords() {
        // 2 bits, step 1: {-1.5, -0.5, 0.5, 1.5}.
        let a = Alphabet::finite(1.0, 2).unwrap();
        assert_eq!(a.nearest(0.2), (0.5, false));
        assert_eq!(a.nearest(-0.2), (-0.5, false));
        assert_eq!(a.nearest(0.0), (0.5, false));
        assert_eq!(a.nearest(1.0), (1.5, false));
        assert_eq!(a.nearest(-1.0), (-1.5, false));
        assert_eq!(a.nearest(1.9), (1.5, false));
        assert_eq!(a.nearest(2.5), (1.5, true));
        assert_eq!(a.max_codeword(), Some(1.5));
        assert_eq!(a.codewords(), Some(4));
    }

    #[test]
    fn finite_overload_is_recorded_not_thrown() {
        let a = Alphabet::finite(0.1, 2).unwrap();
        let res = pcm_quantize(&[0.0, 0.05, 3.0, 0.0], &a);
        assert!(res.overloaded);
        assert_eq!(res.overload_index, Some(2));
        assert!((res.q[2] - 0.15).abs() < 1e-15);

        let res = sigma_delta_quantize(&[0.01; 5], 2, &Alphabet::finite(1.0, 4).unwrap());
        assert!(!res.overloaded);
    }

    #[test]
    fn identity_shaper_matches_pcm() {
        let a = Alphabet::unbounded(0.25).unwrap();
        let y = [0.11, -3.4, 2.125, 0.9];
        let pcm = pcm_quantize(&y, &a);
        let shaped = shape_quantize(&y, &NoiseShaper::Identity, &a).unwrap();
        assert_eq!(pcm, shaped);
    }
}

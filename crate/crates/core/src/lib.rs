//! Sigma-delta quantization of compressed-sensing measurements.
//!
//! Measurements `y = Phi x` of a k-sparse `x` are quantized by a greedy
//! noise-shaping scheme (`H u = y - q`, `H = D^r` for r-th order sigma-delta)
//! and decoded in two stages: an l1 program recovers the support, then the
//! Sobolev (or general H-) dual of the restricted frame removes most of the
//! shaped quantization error. The crate also carries the dense linear
//! algebra, random ensembles and spectral checks these steps rely on.

pub mod dual;
pub mod ensembles;
pub mod error;
pub mod l1;
pub mod linalg;
pub mod quantize;
pub mod rate;
pub mod recovery;
pub mod spectral;
pub mod stats;
pub mod studies;
pub mod support;

pub use dual::{canonical_dual, frame_variation, h_dual, reconstruct, DualFrame};
pub use ensembles::{
    derive_seed, sample_matrix, sample_signal, Ensemble, EnsembleSpec, MagnitudeModel,
    SignalSpec, SparseSignal, TrialRng,
};
pub use error::{Error, Result};
pub use l1::{l1_decode, L1Solution};
pub use linalg::DenseMatrix;
pub use quantize::{
    pcm_quantize, shape_quantize, sigma_delta_quantize, Alphabet, Levels, NoiseShaper,
    QuantizationResult,
};
pub use rate::{rate_distortion_plan, RateInputs, RatePlan};
pub use recovery::{two_stage_recover, RecoveryErrors, RecoveryResult, TwoStageConfig};
pub use stats::{fit_loglog_slope, LogLogFit};
pub use support::estimate_support;

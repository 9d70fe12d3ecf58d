//! Step size, bit budget and predicted distortion for a finite-alphabet
//! sigma-delta encoder that must resolve inputs whose nonzero entries lie in
//! `[A, 2^b A]`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateInputs {
    /// Dynamic-range floor `A`: smallest nonzero magnitude to resolve.
    pub floor: f64,
    /// Number of dyadic scales `b`; the ceiling is `rho = 2^b A`.
    pub scales: u32,
    pub order: usize,
    pub m: usize,
    pub k: usize,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePlan {
    /// Largest step size compatible with support recovery: `(A/5) / 2^(r+1/2)`.
    pub step: f64,
    pub ceiling: f64,
    pub lambda: f64,
    /// Exact (real) solution of the no-overload condition.
    pub bits_exact: f64,
    /// Bits rounded up to an integer.
    pub bits: u32,
    /// `lambda^(-alpha (r - 1/2)) A / 2^(r+1/2)`.
    pub sigma_delta_distortion: f64,
    /// `A / 2^(r+1/2)`.
    pub pcm_distortion: f64,
}

impl RatePlan {
    /// Predicted sigma-delta over PCM distortion.
    pub fn distortion_ratio(&self) -> f64 {
        self.sigma_delta_distortion / self.pcm_distortion
    }
}

pub fn rate_distortion_plan(inp: &RateInputs) -> Result<RatePlan> {
    if !(inp.floor > 0.0 && inp.floor.is_finite()) {
        return Err(Error::InvalidParameter("dynamic-range floor must be positive".into()));
    }
    if inp.order < 1 {
        return Err(Error::InvalidParameter("order must be at least 1".into()));
    }
    if inp.k < 1 || inp.m < inp.k {
        return Err(Error::InvalidParameter("need m >= k >= 1".into()));
    }
    if !(inp.alpha > 0.0 && inp.alpha < 1.0) {
        return Err(Error::InvalidParameter("alpha must lie in (0, 1)".into()));
    }
    let r = inp.order as f64;
    let k = inp.k as f64;
    let lambda = inp.m as f64 / k;
    let gain = 2f64.powf(r + 0.5);
    let step = inp.floor / 5.0 / gain;
    let ceiling = 2f64.powi(inp.scales as i32) * inp.floor;

    // 2^(B-1) step = 2^(r-1) step + rho lambda^((1-alpha)/2) k
    let rhs = 2f64.powf(r - 1.0) + ceiling * lambda.powf((1.0 - inp.alpha) / 2.0) * k / step;
    let bits_exact = 1.0 + rhs.log2();
    let bits = bits_exact.ceil() as u32;

    let pcm_distortion = inp.floor / gain;
    let sigma_delta_distortion = lambda.powf(-inp.alpha * (r - 0.5)) * pcm_distortion;
    Ok(RatePlan {
        step,
        ceiling,
        lambda,
        bits_exact,
        bits,
        sigma_delta_distortion,
        pcm_distortion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(order: usize, m: usize) -> RateInputs {
        RateInputs {
            floor: 1.0,
            scales: 0,
            order,
            m,
            k: 10,
            alpha: 0.5,
        }
    }

    #[test]
    fn first_order_step() {
        let plan = rate_distortion_plan(&inputs(1, 100)).unwrap();
        assert!((plan.step - 0.2 / 8f64.sqrt()).abs() < 1e-15);
        assert_eq!(plan.ceiling, 1.0);
    }

    #[test]
    fn bits_satisfy_no_overload_equation() {
        let inp = RateInputs {
            scales: 3,
            ..inputs(2, 400)
        };
        let plan = rate_distortion_plan(&inp).unwrap();
        let lhs = 2f64.powf(plan.bits_exact - 1.0) * plan.step;
        let rhs = 2.0 * plan.step + plan.ceiling * plan.lambda.powf(0.25) * 10.0;
        assert!((lhs - rhs).abs() < 1e-9 * rhs);
        assert!(plan.bits as f64 >= plan.bits_exact);
        assert!((plan.bits as f64) < plan.bits_exact + 1.0);
    }

    #[test]
    fn ratio_vanishes_with_oversampling() {
        let mut last = f64::INFINITY;
        for m in [10, 100, 1_000, 10_000, 100_000] {
            let ratio = rate_distortion_plan(&inputs(2, m)).unwrap().distortion_ratio();
            assert!(ratio < last);
            last = ratio;
        }
        assert!(last < 2e-3);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(rate_distortion_plan(&RateInputs { alpha: 1.0, ..inputs(1, 100) }).is_err());
        assert!(rate_distortion_plan(&RateInputs { floor: 0.0, ..inputs(1, 100) }).is_err());
        assert!(rate_distortion_plan(&inputs(0, 100)).is_err());
        assert!(rate_distortion_plan(&inputs(1, 5)).is_err());
    }
}

use crate::error::{Error, Result};

/// Indices (0-based, increasing) of the `kprime` largest magnitudes of `coarse`.
///
/// Among equal magnitudes at the cutoff the smaller index wins.
pub fn estimate_support(coarse: &[f64], k: usize, kprime: usize) -> Result<Vec<usize>> {
    let n = coarse.len();
    if kprime < k || kprime >= n {
        return Err(Error::InvalidParameter(format!(
            "support size k' = {kprime} must lie in {k}..{}",
            n.saturating_sub(1)
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| coarse[b].abs().total_cmp(&coarse[a].abs()).then(a.cmp(&b)));
    let mut chosen = order[..kprime].to_vec();
    chosen.sort_unstable();
    Ok(chosen)
}

/// `gamma = (1 + 1/(k' - k + 1))^{1/2}`: if every nonzero of `x` exceeds
/// `gamma * ||x - x'||_2` in magnitude, the `k'` largest entries of `x'`
/// cover the support of `x`.
pub fn support_margin(k: usize, kprime: usize) -> f64 {
    assert!(kprime >= k, "k' must be at least k");
    (1.0 + 1.0 / (kprime - k + 1) as f64).sqrt()
}

/// `(1 + k/k')^{1/2}`, the factor bounding the energy of `x` missed by the
/// estimated support.
pub fn missed_energy_factor(k: usize, kprime: usize) -> f64 {
    (1.0 + k as f64 / kprime as f64).sqrt()
}

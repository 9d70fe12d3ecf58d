//! Solver for `min ||z||_1  subject to  ||Phi z - q||_2 <= eps`.
//!
//! The solution is the point on the LASSO path `z(lambda) = argmin
//! lambda ||z||_1 + 1/2 ||Phi z - q||^2` where the residual norm first drops
//! to `eps`. The path is piecewise linear in `lambda`, so it is followed
//! breakpoint by breakpoint (homotopy): each segment keeps an active set `S`
//! with signs `s`, moves `z_S` along `(Phi_S^T Phi_S)^{-1} s`, and ends when an
//! inactive correlation reaches `lambda` or an active coefficient hits zero.
//! Inside the final segment the residual norm is a quadratic in the step, so
//! the crossing with `eps` is found in closed form.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, DenseMatrix};

pub const MAX_PATH_STEPS: usize = 50_000;

#[derive(Debug, Clone, PartialEq)]
pub struct L1Solution {
    pub z: Vec<f64>,
    pub residual_norm: f64,
    /// Number of path segments traversed.
    pub iterations: usize,
    pub converged: bool,
}

/// Column-major copy of `Phi` for fast column access.
struct Columns {
    m: usize,
    data: Vec<f64>,
}

impl Columns {
    fn new(phi: &DenseMatrix) -> Self {
        let (m, n) = phi.shape();
        let mut data = vec![0.0; m * n];
        for i in 0..m {
            for (j, &v) in phi.row(i).iter().enumerate() {
                data[j * m + i] = v;
            }
        }
        Self { m, data }
    }

    fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.m..(j + 1) * self.m]
    }
}

/// Incrementally grown Cholesky factor of `Phi_S^T Phi_S`.
struct GramCholesky {
    /// Row i holds L[i][0..=i].
    rows: Vec<Vec<f64>>,
}

impl GramCholesky {
    fn new() -> Self {
        Self { rows: Vec::new() }
    }

    fn push(&mut self, cols: &Columns, active: &[usize], j: usize) -> bool {
        let cj = cols.col(j);
        let b: Vec<f64> = active.iter().map(|&a| dot(cols.col(a), cj)).collect();
        let w = self.forward(&b);
        let diag_sq = dot(cj, cj) - dot(&w, &w);
        if diag_sq.is_nan() || diag_sq <= 1e-12 * dot(cj, cj) {
            return false;
        }
        let mut row = w;
        row.push(diag_sq.sqrt());
        self.rows.push(row);
        true
    }

    fn rebuild(cols: &Columns, active: &[usize]) -> Option<Self> {
        let mut chol = Self::new();
        for (pos, &j) in active.iter().enumerate() {
            if !chol.push(cols, &active[..pos], j) {
                return None;
            }
        }
        Some(chol)
    }

    fn forward(&self, b: &[f64]) -> Vec<f64> {
        let mut y = Vec::with_capacity(b.len());
        for (i, row) in self.rows.iter().enumerate() {
            let s = b[i] - dot(&row[..i], &y[..i]);
            y.push(s / row[i]);
        }
        y
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let y = self.forward(b);
        let n = y.len();
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for (l, xl) in x.iter().enumerate().take(n).skip(i + 1) {
                s -= self.rows[l][i] * xl;
            }
            x[i] = s / self.rows[i][i];
        }
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Event {
    Join(usize),
    Drop(usize),
    End,
}

pub fn l1_decode(phi: &DenseMatrix, q: &[f64], eps: f64) -> Result<L1Solution> {
    let (m, n) = phi.shape();
    if q.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: q.len(),
        });
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius must be >= 0, got {eps}")));
    }
    let q_norm = norm2(q);
    let mut z = vec![0.0; n];
    if q_norm <= eps {
        return Ok(L1Solution {
            z,
            residual_norm: q_norm,
            iterations: 0,
            converged: true,
        });
    }

    let cols = Columns::new(phi);
    // Slack that absorbs rounding when eps is (near) zero.
    let feas_tol = 1e-12 * q_norm;

    let mut res = q.to_vec();
    let mut corr: Vec<f64> = (0..n).map(|j| dot(cols.col(j), &res)).collect();
    let (first, lambda0) = corr
        .iter()
        .enumerate()
        .fold((0, 0.0), |(bj, bv), (j, c)| if c.abs() > bv { (j, c.abs()) } else { (bj, bv) });
    if lambda0 == 0.0 {
        // q is orthogonal to every column: zero is the least-squares point.
        return Err(Error::Infeasible {
            min_residual: q_norm,
            radius: eps,
        });
    }
    let mut lambda = lambda0;
    let mut active = vec![first];
    let mut signs = vec![corr[first].signum()];
    let mut chol = GramCholesky::new();
    chol.push(&cols, &[], first);
    let tiny = 1e-13 * lambda0;
    let mut last_dropped: Option<usize> = None;

    for iteration in 1..=MAX_PATH_STEPS {
        let dir = chol.solve(&signs);
        let mut v = vec![0.0; m];
        for (&j, &dj) in active.iter().zip(&dir) {
            for (vi, ci) in v.iter_mut().zip(cols.col(j)) {
                *vi += dj * ci;
            }
        }

        let mut gamma = lambda;
        let mut event = Event::End;
        let mut is_active = vec![false; n];
        for &j in &active {
            is_active[j] = true;
        }
        // With m independent active columns the residual reaches zero at
        // lambda = 0, so no further column can join.
        let full_rank = active.len() >= m;
        for j in 0..n {
            if full_rank || is_active[j] || Some(j) == last_dropped {
                continue;
            }
            let a = dot(cols.col(j), &v);
            for (num, den) in [(lambda - corr[j], 1.0 - a), (lambda + corr[j], 1.0 + a)] {
                if den > 1e-12 {
                    let g = num / den;
                    if g > tiny && g < gamma {
                        gamma = g;
                        event = Event::Join(j);
                    }
                }
            }
        }
        for (pos, (&j, &dj)) in active.iter().zip(&dir).enumerate() {
            if dj != 0.0 {
                let g = -z[j] / dj;
                if g > tiny && g < gamma {
                    gamma = g;
                    event = Event::Drop(pos);
                }
            }
        }

        // ||res - g v||^2 = rr - 2 g rv + g^2 vv
        let rr = dot(&res, &res);
        let rv = dot(&res, &v);
        let vv = dot(&v, &v);
        let at_event = res
            .iter()
            .zip(&v)
            .map(|(r, vi)| (r - gamma * vi) * (r - gamma * vi))
            .sum::<f64>()
            .sqrt();
        if at_event <= eps + feas_tol {
            let c = rr - eps * eps;
            let disc = rv * rv - vv * c;
            let g = if vv > 0.0 && disc >= 0.0 {
                ((rv - disc.sqrt()) / vv).clamp(0.0, gamma)
            } else {
                gamma
            };
            for (&j, &dj) in active.iter().zip(&dir) {
                z[j] += g * dj;
            }
            let residual_norm = residual(&cols, q, &active, &z);
            return Ok(L1Solution {
                z,
                residual_norm,
                iterations: iteration,
                converged: true,
            });
        }

        for (&j, &dj) in active.iter().zip(&dir) {
            z[j] += gamma * dj;
        }
        lambda -= gamma;
        last_dropped = None;

        match event {
            Event::End => {
                return Err(Error::Infeasible {
                    min_residual: residual(&cols, q, &active, &z),
                    radius: eps,
                });
            }
            Event::Join(j) => {
                // Recompute correlations before reading the joining sign.
                refresh(&cols, q, &active, &z, &mut res, &mut corr);
                if !chol.push(&cols, &active, j) {
                    return Err(Error::SolverNoConvergence {
                        iterations: iteration,
                        reason: format!(
                            "active set of size {} became linearly dependent",
                            active.len() + 1
                        ),
                    });
                }
                active.push(j);
                signs.push(corr[j].signum());
            }
            Event::Drop(pos) => {
                let j = active.remove(pos);
                signs.remove(pos);
                z[j] = 0.0;
                last_dropped = Some(j);
                chol = GramCholesky::rebuild(&cols, &active).ok_or_else(|| {
                    Error::SolverNoConvergence {
                        iterations: iteration,
                        reason: "Gram matrix lost rank after removal".into(),
                    }
                })?;
                refresh(&cols, q, &active, &z, &mut res, &mut corr);
            }
        }
        if active.is_empty() {
            return Err(Error::SolverNoConvergence {
                iterations: iteration,
                reason: "active set emptied".into(),
            });
        }
    }
    Err(Error::SolverNoConvergence {
        iterations: MAX_PATH_STEPS,
        reason: "path step cap reached".into(),
    })
}

fn residual(cols: &Columns, q: &[f64], active: &[usize], z: &[f64]) -> f64 {
    let mut res = q.to_vec();
    for &j in active {
        for (r, c) in res.iter_mut().zip(cols.col(j)) {
            *r -= z[j] * c;
        }
    }
    norm2(&res)
}

fn refresh(
    cols: &Columns,
    q: &[f64],
    active: &[usize],
    z: &[f64],
    res: &mut [f64],
    corr: &mut [f64],
) {
    res.copy_from_slice(q);
    for &j in active {
        for (r, c) in res.iter_mut().zip(cols.col(j)) {
            *r -= z[j] * c;
        }
    }
    for (j, cj) in corr.iter_mut().enumerate() {
        *cj = dot(cols.col(j), res);
    }
}

//! Dense linear algebra used throughout the crate.

mod matrix;
mod norms;
mod solve;
mod svd;

pub use matrix::{dist2, dot, norm1, norm2, norm_inf, DenseMatrix};
pub use norms::{operator_norm_2, operator_norm_inf};
pub use solve::{
    apply_inverse_power, apply_inverse_power_vec, apply_inverse_transpose_power, apply_power,
    pseudo_inverse, pseudo_inverse_apply, Bidiagonal, RANK_TOL,
};
pub use svd::{singular_values, svd, SingularSpectrum, Svd};

pub(crate) use solve::pinv_from_svd;

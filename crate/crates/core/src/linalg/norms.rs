use super::matrix::DenseMatrix;
use super::svd::singular_values;
use crate::error::Result;

/// Spectral norm `sigma_1(A)`.
pub fn operator_norm_2(a: &DenseMatrix) -> Result<f64> {
    Ok(singular_values(a)?.max())
}

/// `l_inf -> l_inf` operator norm: the largest absolute row sum.
pub fn operator_norm_inf(a: &DenseMatrix) -> f64 {
    (0..a.rows())
        .map(|i| a.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inf_norm_examples() {
        assert_eq!(operator_norm_inf(&DenseMatrix::identity(4)), 1.0);
        assert_eq!(operator_norm_inf(&DenseMatrix::from_fn(7, 3, |_, _| 1.0)), 3.0);
        let a = DenseMatrix::from_rows(&[vec![1.0, -2.0], vec![3.0, 0.0]]).unwrap();
        assert_eq!(operator_norm_inf(&a), 3.0);
    }

    #[test]
    fn two_norm_examples() {
        assert_eq!(operator_norm_2(&DenseMatrix::zeros(3, 2)).unwrap(), 0.0);
        let want = 2.0 * (std::f64::consts::PI / 21.0).cos();
        let got = operator_norm_2(&DenseMatrix::difference(10)).unwrap();
        assert!((got - want).abs() < 1e-12);
    }
}

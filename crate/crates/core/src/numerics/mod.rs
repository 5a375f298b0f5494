//! Small dense complex linear algebra and reproducible randomness.

mod eigen;
mod matrix;
mod rng;

pub use eigen::{hermitian_eigen, trace_norm, HermitianEigen};
pub use matrix::{inner, vec_norm, ComplexMatrix, MatrixParts};
pub use rng::{cumulative, derive_seed, mix64, RandomSource};

use crate::error::{Error, Result};

/// Largest `|m - m^H|` entry accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigen residual bound, relative to `‖m‖_F`.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-10;
/// Largest `n` accepted by [`binomial`].
pub const BINOMIAL_MAX_N: u64 = 200;

/// `C(n, k)` as a float, built by the multiplicative formula.
pub fn binomial(n: u64, k: u64) -> Result<f64> {
    if k > n || n > BINOMIAL_MAX_N {
        return Err(Error::OutOfRange(format!("binomial({n}, {k})")));
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    // every partial product is an integer; exact below 2^53
    Ok(if acc < 2f64.powi(53) { acc.round() } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(4, 2).unwrap(), 6.0);
        assert_eq!(binomial(1, 0).unwrap(), 1.0);
        assert_eq!(binomial(9, 4).unwrap(), 126.0);
        assert_eq!(binomial(0, 0).unwrap(), 1.0);
        assert_eq!(binomial(52, 5).unwrap(), 2_598_960.0);
    }

    #[test]
    fn binomial_rows_are_pascal() {
        for n in 1..=50u64 {
            for k in 1..n {
                let lhs = binomial(n, k).unwrap();
                let rhs = binomial(n - 1, k - 1).unwrap() + binomial(n - 1, k).unwrap();
                assert_eq!(lhs, rhs, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn binomial_out_of_range() {
        assert!(matches!(binomial(3, 4), Err(Error::OutOfRange(_))));
        assert!(matches!(binomial(201, 1), Err(Error::OutOfRange(_))));
        assert!(binomial(200, 100).unwrap().is_finite());
    }
}

//! Polynomial extrapolation of pure reconstructions to zero coupling.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::inner;
use crate::states::PureState;

/// Fits each amplitude with a degree-`degree` polynomial in `φ` (least
/// squares) and evaluates the fit at `φ = 0`. States are first rotated so that
/// their overlap with the first state is real and positive.
pub fn extrapolate_to_zero(points: &[(f64, PureState)], degree: usize) -> Result<PureState> {
    if !(1..=2).contains(&degree) {
        return Err(Error::OutOfRange(format!(
            "extrapolation degree {degree} (expected 1 or 2)"
        )));
    }
    let mut phis: Vec<f64> = points.iter().map(|p| p.0).collect();
    phis.sort_by(f64::total_cmp);
    phis.dedup();
    if phis.len() < degree + 1 {
        return Err(Error::InsufficientPoints {
            required: degree + 1,
            got: phis.len(),
        });
    }
    let d = points[0].1.dim();
    if let Some(bad) = points.iter().find(|p| p.1.dim() != d) {
        return Err(Error::DimensionMismatch {
            left: d,
            right: bad.1.dim(),
        });
    }
    let reference = points[0].1.amplitudes();
    let aligned: Vec<Vec<Complex64>> = points
        .iter()
        .map(|(_, s)| {
            let ov = inner(s.amplitudes(), reference);
            let phase = if ov.norm() > 0.0 {
                ov / ov.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            s.amplitudes().iter().map(|a| a * phase).collect()
        })
        .collect();

    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let amps = (0..d)
        .map(|n| {
            let re: Vec<f64> = aligned.iter().map(|v| v[n].re).collect();
            let im: Vec<f64> = aligned.iter().map(|v| v[n].im).collect();
            Ok(Complex64::new(
                intercept(&xs, &re, degree)?,
                intercept(&xs, &im, degree)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PureState::normalized(amps)?.with_canonical_phase())
}

/// Constant term of the least-squares polynomial fit, via the normal equations.
#[allow(clippy::needless_range_loop)]
fn intercept(xs: &[f64], ys: &[f64], degree: usize) -> Result<f64> {
    let k = degree + 1;
    let mut a = vec![vec![0.0; k + 1]; k];
    for (&x, &y) in xs.iter().zip(ys) {
        let powers: Vec<f64> = (0..k).map(|p| x.powi(p as i32)).collect();
        for r in 0..k {
            for c in 0..k {
                a[r][c] += powers[r] * powers[c];
            }
            a[r][k] += powers[r] * y;
        }
    }
    // Gaussian elimination with partial pivoting
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::InsufficientPoints {
                required: k,
                got: xs.len(),
            });
        }
        a.swap(col, pivot);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=k {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    Ok(a[0][k] / a[0][0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::spin_coherent;

    #[test]
    fn identical_inputs_are_fixed_points() {
        let psi = spin_coherent(3, Complex64::new(0.5, 0.5)).unwrap();
        let pts: Vec<_> = [0.05, 0.1, 0.15].iter().map(|&p| (p, psi.clone())).collect();
        for degree in [1, 2] {
            let out = extrapolate_to_zero(&pts, degree).unwrap();
            let ov = inner(out.amplitudes(), psi.amplitudes()).norm();
            assert!((1.0 - ov).abs() < 1e-12);
        }
    }

    #[test]
    fn too_few_points() {
        let psi = spin_coherent(2, Complex64::new(2.0, 0.0)).unwrap();
        let pts = vec![(0.05, psi.clone()), (0.1, psi.clone())];
        assert!(matches!(
            extrapolate_to_zero(&pts, 2),
            Err(Error::InsufficientPoints { required: 3, got: 2 })
        ));
        let dup = vec![(0.05, psi.clone()), (0.05, psi.clone()), (0.1, psi)];
        assert!(matches!(
            extrapolate_to_zero(&dup, 2),
            Err(Error::InsufficientPoints { .. })
        ));
    }

    #[test]
    fn exact_polynomial_intercepts() {
        let xs = [0.1, 0.2, 0.3, 0.4];
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 - 2.0 * x + 3.0 * x * x).collect();
        assert!((intercept(&xs, &ys, 2).unwrap() - 1.5).abs() < 1e-10);
        let lin: Vec<f64> = xs.iter().map(|x| 0.25 + 4.0 * x).collect();
        assert!((intercept(&xs, &lin, 1).unwrap() - 0.25).abs() < 1e-12);
    }
}

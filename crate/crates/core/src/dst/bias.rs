//! Data-driven estimate `D′` of the bias of pure-state DST.
//!
//! The reconstructed `ψʳ` is pushed through the exact forward model and the
//! pure reconstructor again, giving `ψᵉ`; `D′ = D(ψʳ, ψᵉ)` tracks the unknown
//! `D(ψᵃ, ψᵗ)` because the same map sends `ψᵗ → ψᵃ` and `ψᵃ → ψᵉ`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::reconstruct::asymptotic_pure;
use crate::error::{Error, Result};
use crate::numerics::vec_norm;
use crate::states::{pure_trace_distance, Method, PointerKind, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasEstimate {
    pub d_prime: f64,
    pub phi: f64,
    pub pointer: PointerKind,
    pub method: Method,
}

/// Rejects couplings outside `(0, π/2)`.
pub fn check_coupling(phi: f64) -> Result<()> {
    if phi.is_finite() && phi > 0.0 && phi < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::InvalidCoupling(phi))
    }
}

/// `D′` through the reconstruction pipeline, for either pointer.
pub fn bias_estimate(psi_r: &PureState, phi: f64, pointer: PointerKind) -> Result<BiasEstimate> {
    bias_estimate_postselected(psi_r, phi, pointer, 0)
}

/// As [`bias_estimate`], for a reconstruction post-selected on `|c_k⟩`.
pub fn bias_estimate_postselected(
    psi_r: &PureState,
    phi: f64,
    pointer: PointerKind,
    postselect: usize,
) -> Result<BiasEstimate> {
    check_coupling(phi)?;
    let psi_e = asymptotic_pure(&psi_r.density(), phi, pointer, postselect)?;
    let d_prime = pure_trace_distance(psi_r, &psi_e)?.clamp(0.0, 1.0);
    Ok(BiasEstimate {
        d_prime,
        phi,
        pointer,
        method: Method::PureDst,
    })
}

/// `γ^n_ml = 2 sin[φ(δ_mn + δ_ln)] − 2 sin[φ(δ_mn − δ_ln)]`
fn gamma(phi: f64, m: usize, l: usize, n: usize) -> f64 {
    let dm = f64::from(u8::from(m == n));
    let dl = f64::from(u8::from(l == n));
    2.0 * (phi * (dm + dl)).sin() - 2.0 * (phi * (dm - dl)).sin()
}

/// Closed form of `D′` for the qubit pointer with post-selection on `|c_0⟩`:
///
/// ```text
/// v_n = Σ_ml ψ_m ψ_l^* γ^n_ml,   D′ = [1 − |Σ_n ψ_n v_n|² / ‖v‖²]^{1/2}
/// ```
///
/// `v` is the complex conjugate of the unnormalized `ψᵉ` (up to a real
/// factor), so the ratio is `|⟨ψᵉ|ψʳ⟩|` and no further conjugation is needed.
pub fn bias_closed_form_qubit(psi_r: &PureState, phi: f64) -> Result<f64> {
    check_coupling(phi)?;
    let psi = psi_r.amplitudes();
    let d = psi.len();
    let v: Vec<Complex64> = (0..d)
        .map(|n| {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..d {
                for l in 0..d {
                    let g = gamma(phi, m, l, n);
                    if g != 0.0 {
                        acc += psi[m] * psi[l].conj() * g;
                    }
                }
            }
            acc
        })
        .collect();
    let norm = vec_norm(&v);
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::DegenerateNormalization("ψᵉ vanishes".into()));
    }
    // ψ minus its projection on ψᵉ = v*/‖v‖; its norm is the square root
    // without the cancellation in 1 - |overlap|²
    let overlap = psi.iter().zip(&v).map(|(a, b)| a * b).sum::<Complex64>() / norm;
    let perp: Vec<Complex64> = psi.iter().zip(&v).map(|(a, b)| a - b.conj() / norm * overlap).collect();
    Ok(vec_norm(&perp).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RandomSource;
    use crate::states::{random_pure, spin_coherent};

    #[test]
    fn rejects_non_positive_coupling() {
        let psi = spin_coherent(2, Complex64::new(2.0, 0.0)).unwrap();
        for phi in [0.0, -0.1, f64::NAN, 2.0] {
            assert!(matches!(
                bias_estimate(&psi, phi, PointerKind::Qubit),
                Err(Error::InvalidCoupling(_))
            ));
        }
        assert!(bias_closed_form_qubit(&psi, 0.0).is_err());
    }

    #[test]
    fn gamma_table() {
        let phi = 0.3;
        // m = l = n, marked row only, marked column only, neither
        assert!((gamma(phi, 1, 1, 1) - 2.0 * (2.0 * phi).sin()).abs() < 1e-15);
        assert_eq!(gamma(phi, 1, 0, 1), 0.0);
        assert!((gamma(phi, 0, 1, 1) - 4.0 * phi.sin()).abs() < 1e-15);
        assert_eq!(gamma(phi, 0, 2, 1), 0.0);
    }

    #[test]
    fn closed_form_matches_pipeline_on_random_states() {
        let mut rng = RandomSource::new(77);
        let mut checked = 0;
        while checked < 50 {
            let d = 2 + (rng.next_u64() % 5) as usize;
            let psi = random_pure(d, &mut rng);
            let phi = 0.01 + 0.29 * rng.uniform();
            let pipeline = match bias_estimate(&psi, phi, PointerKind::Qubit) {
                Ok(b) => b.d_prime,
                Err(Error::DegenerateNormalization(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            checked += 1;
            let closed = bias_closed_form_qubit(&psi, phi).unwrap();
            assert!(
                (pipeline - closed).abs() < 1e-10,
                "d={d} phi={phi}: {pipeline} vs {closed}"
            );
        }
    }
}

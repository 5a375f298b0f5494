//! Exact forward models of the weak system-pointer coupling.
//!
//! The coupling marks component `n` of the system: the qubit pointer `|+⟩` is
//! rotated to `(e^{-iφ}|0⟩ + e^{iφ}|1⟩)/√2`, the Gaussian packet `g_0` is
//! displaced to `g_φ(x) = g_0(x + φ)`. After projecting the system on `⟨c_j|`
//! the pointer is left in
//!
//! ```text
//! Σ_{ml} ⟨c_j|m⟩ ρ_ml ⟨l|c_j⟩ |p_m⟩⟨p_l|
//! ```
//!
//! where `|p_m⟩` is the marked pointer state when `m = n` and the unmarked one
//! otherwise. Grouping `m` and `l` by whether they equal `n` collapses the sum
//! to a 2x2 coefficient matrix `c_ab` over the pointer frame
//! `{unmarked, marked}`; both pointer models share it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::states::{AsOperator, ComplementaryBasis};

/// Branches lighter than this carry no usable conditional state.
pub const ZERO_WEIGHT: f64 = 1e-15;

/// Weight of the momentum readout in the Gaussian `X + i·k·P` combination.
///
/// With the amplitude envelope `e^{-x²}` the position variance is 1/4 and the
/// combination that isolates the marked row at first order is `X + iP/2`.
pub const GAUSSIAN_MOMENTUM_WEIGHT: f64 = 0.5;

/// The pointer readout pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    SigmaY,
    SigmaZ,
    X,
    P,
}

impl Observable {
    /// Readout pair for a pointer: (real-part observable, imaginary-part observable).
    pub fn pair(pointer: crate::states::PointerKind) -> [Observable; 2] {
        match pointer {
            crate::states::PointerKind::Gaussian => [Observable::X, Observable::P],
            _ => [Observable::SigmaY, Observable::SigmaZ],
        }
    }
}

pub type Coefficients = [[Complex64; 2]; 2];

fn check_indices(d: usize, n: usize, j: usize) -> Result<()> {
    if n >= d {
        return Err(Error::IndexOutOfRange { index: n, dim: d });
    }
    if j >= d {
        return Err(Error::IndexOutOfRange { index: j, dim: d });
    }
    Ok(())
}

/// `c_ab = Σ_{m: [m=n]=a} Σ_{l: [l=n]=b} ⟨c_j|m⟩ ρ_ml ⟨l|c_j⟩`.
pub fn branch_coefficients(
    rho: &ComplexMatrix,
    n: usize,
    j: usize,
    basis: &ComplementaryBasis,
) -> Result<Coefficients> {
    let d = rho.dim();
    if basis.dim() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: basis.dim(),
        });
    }
    check_indices(d, n, j)?;
    let zero = Complex64::new(0.0, 0.0);
    let mut c = [[zero; 2]; 2];
    for m in 0..d {
        let a = usize::from(m == n);
        let left = basis.entry(j, m);
        for l in 0..d {
            let b = usize::from(l == n);
            c[a][b] += left * rho[(m, l)] * basis.entry(j, l).conj();
        }
    }
    Ok(c)
}

/// Weight `Σ_ab c_ab ⟨f_b|f_a⟩` for a frame with real overlap `s`.
fn frame_weight(c: &Coefficients, s: f64) -> f64 {
    (c[0][0] + c[1][1] + (c[1][0] + c[0][1]) * s).re
}

/// Unnormalized conditional qubit pointer state `κ` and its weight `p(j|n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitPointerState {
    pub kappa: ComplexMatrix,
    pub weight: f64,
}

fn qubit_frame(phi: f64) -> [[Complex64; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [
        [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
        [Complex64::from_polar(h, -phi), Complex64::from_polar(h, phi)],
    ]
}

pub fn qubit_conditional<R: AsOperator + ?Sized>(
    rho: &R,
    n: usize,
    j: usize,
    phi: f64,
    basis: &ComplementaryBasis,
) -> Result<QubitPointerState> {
    let c = branch_coefficients(rho.operator(), n, j, basis)?;
    let frame = qubit_frame(phi);
    let mut kappa = ComplexMatrix::zeros(2);
    for a in 0..2 {
        for b in 0..2 {
            kappa = &kappa + &ComplexMatrix::outer(&frame[a], &frame[b]).scale(c[a][b]);
        }
    }
    let weight = frame_weight(&c, phi.cos());
    Ok(QubitPointerState { kappa, weight })
}

/// Conditional `(⟨σ_y⟩, ⟨σ_z⟩, w)`.
pub fn pointer_expectations_qubit(state: &QubitPointerState) -> Result<(f64, f64, f64)> {
    let w = state.weight;
    if w <= ZERO_WEIGHT {
        return Err(Error::ZeroWeightBranch { weight: w });
    }
    let k = &state.kappa;
    // Tr[κ σ_y] = i(κ_01 - κ_10), Tr[κ σ_z] = κ_00 - κ_11
    let y = (Complex64::new(0.0, 1.0) * (k[(0, 1)] - k[(1, 0)])).re;
    let z = (k[(0, 0)] - k[(1, 1)]).re;
    Ok((y / w, z / w, w))
}

/// Unnormalized conditional Gaussian pointer state over the frame `{g_0, g_φ}`.
///
/// `g_s(x) = (2/π)^{1/4} e^{-(x+s)²}`, so `⟨g_0|g_φ⟩ = e^{-φ²/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPointerState {
    pub coeffs: Coefficients,
    pub shift: f64,
    pub overlap: f64,
    pub weight: f64,
}

/// `⟨g_0|g_φ⟩`
pub fn gaussian_overlap(phi: f64) -> f64 {
    (-0.5 * phi * phi).exp()
}

pub fn gaussian_conditional<R: AsOperator + ?Sized>(
    rho: &R,
    n: usize,
    j: usize,
    phi: f64,
    basis: &ComplementaryBasis,
) -> Result<GaussianPointerState> {
    let coeffs = branch_coefficients(rho.operator(), n, j, basis)?;
    let overlap = gaussian_overlap(phi);
    Ok(GaussianPointerState {
        coeffs,
        shift: phi,
        overlap,
        weight: frame_weight(&coeffs, overlap),
    })
}

impl GaussianPointerState {
    fn shifts(&self) -> [f64; 2] {
        [0.0, self.shift]
    }

    fn gram(&self, a: usize, b: usize) -> f64 {
        if a == b {
            1.0
        } else {
            self.overlap
        }
    }

    /// `Tr[λ X]`, using `⟨g_b|X|g_a⟩ = -G_ab (s_a + s_b)/2`.
    pub fn trace_x(&self) -> f64 {
        let s = self.shifts();
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                acc += self.coeffs[a][b] * (-self.gram(a, b) * (s[a] + s[b]) / 2.0);
            }
        }
        acc.re
    }

    /// `Tr[λ P]`, using `⟨g_b|P|g_a⟩ = i G_ab (s_a - s_b)`.
    pub fn trace_p(&self) -> f64 {
        let s = self.shifts();
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                acc += self.coeffs[a][b] * Complex64::new(0.0, self.gram(a, b) * (s[a] - s[b]));
            }
        }
        acc.re
    }

    /// Position density `⟨x|λ|x⟩` as weights of three Gaussians of variance 1/4,
    /// centred at `0`, `-φ/2` and `-φ`. The weights sum to `w`; the middle one
    /// may be negative.
    pub fn position_components(&self) -> [(f64, f64); 3] {
        let c = &self.coeffs;
        [
            (c[0][0].re, 0.0),
            (2.0 * self.overlap * c[1][0].re, -self.shift / 2.0),
            (c[1][1].re, -self.shift),
        ]
    }

    pub fn position_density(&self, x: f64) -> f64 {
        self.position_components()
            .iter()
            .map(|&(w, mu)| w * normal_pdf(x, mu, 0.5))
            .sum()
    }

    /// Momentum density `⟨p|λ|p⟩ = N(p; 0, 1) [c_00 + c_11 + 2 Re(c_10 e^{ipφ})]`.
    pub fn momentum_density(&self, p: f64) -> f64 {
        let c = &self.coeffs;
        let osc = c[1][0] * Complex64::from_polar(1.0, p * self.shift);
        normal_pdf(p, 0.0, 1.0) * (c[0][0].re + c[1][1].re + 2.0 * osc.re)
    }
}

/// Conditional `(⟨X⟩, ⟨P⟩, w)`.
pub fn pointer_expectations_gaussian(state: &GaussianPointerState) -> Result<(f64, f64, f64)> {
    let w = state.weight;
    if w <= ZERO_WEIGHT {
        return Err(Error::ZeroWeightBranch { weight: w });
    }
    Ok((state.trace_x() / w, state.trace_p() / w, w))
}

pub fn normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
}

/// Coefficient of the first-order term of the combined readout trace,
/// `T ≈ gain · Σ_l ⟨c_j|n⟩ ρ_nl ⟨l|c_j⟩` (magnitude only).
pub fn first_order_gain(pointer: crate::states::PointerKind, phi: f64) -> f64 {
    match pointer {
        crate::states::PointerKind::Gaussian => phi.abs(),
        _ => 2.0 * phi.sin().abs(),
    }
}

//! Quantum states, the Fourier-conjugate basis and distances between states.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    binomial, hermitian_eigen, inner, trace_norm, vec_norm, ComplexMatrix, MatrixParts, RandomSource, HERMITIAN_TOL,
};

/// Tolerance on the norm of a pure state and on the trace of a density matrix.
pub const NORM_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted in a [`DensityMatrix`].
pub const PSD_TOL: f64 = 1e-9;

/// Reconstruction method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PureDst,
    GeneralDst,
    Tomography,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::PureDst => "pure-dst",
            Method::GeneralDst => "general-dst",
            Method::Tomography => "tomography",
        }
    }

    pub fn is_dst(self) -> bool {
        !matches!(self, Method::Tomography)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure-dst" => Ok(Method::PureDst),
            "general-dst" => Ok(Method::GeneralDst),
            "tomography" => Ok(Method::Tomography),
            other => Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}

/// The meter used by direct state measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointerKind {
    Qubit,
    Gaussian,
    None,
}

impl PointerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PointerKind::Qubit => "qubit",
            PointerKind::Gaussian => "gaussian",
            PointerKind::None => "none",
        }
    }
}

impl fmt::Display for PointerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PointerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qubit" => Ok(PointerKind::Qubit),
            "gaussian" => Ok(PointerKind::Gaussian),
            "none" => Ok(PointerKind::None),
            other => Err(Error::InvalidConfig(format!("unknown pointer `{other}`"))),
        }
    }
}

/// Normalized state vector in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidState("empty amplitude vector".into()));
        }
        let norm = vec_norm(&amps);
        if !norm.is_finite() || (norm * norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm^2 = {}", norm * norm)));
        }
        Ok(Self { amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let norm = vec_norm(&amps);
        if amps.is_empty() || !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(Self {
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(d: usize, index: usize) -> Result<Self> {
        if index >= d {
            return Err(Error::IndexOutOfRange { index, dim: d });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); d];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// `|ψ⟩⟨ψ|`
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: ComplexMatrix::projector(&self.amps),
        }
    }

    /// Same ray with the largest-magnitude amplitude made real and positive.
    pub fn with_canonical_phase(&self) -> Self {
        let (_, pivot) = self
            .amps
            .iter()
            .enumerate()
            .fold((0.0, Complex64::new(1.0, 0.0)), |(best, z), (_, &a)| {
                if a.norm() > best + 1e-15 {
                    (a.norm(), a)
                } else {
                    (best, z)
                }
            });
        let phase = pivot.conj() / pivot.norm();
        Self {
            amps: self.amps.iter().map(|a| a * phase).collect(),
        }
    }

    /// JSON form; negative zeros are written as `0`.
    pub fn to_json(&self) -> StateJson {
        StateJson {
            d: self.dim(),
            re: self.amps.iter().map(|a| a.re + 0.0).collect(),
            im: self.amps.iter().map(|a| a.im + 0.0).collect(),
        }
    }

    /// Parses the JSON form; amplitudes are renormalized.
    pub fn from_json(json: &StateJson) -> Result<Self> {
        if json.re.len() != json.d || json.im.len() != json.d {
            return Err(Error::InvalidState(format!(
                "expected {} amplitudes, got re={} im={}",
                json.d,
                json.re.len(),
                json.im.len()
            )));
        }
        Self::normalized(
            json.re
                .iter()
                .zip(&json.im)
                .map(|(&r, &i)| Complex64::new(r, i))
                .collect(),
        )
    }
}

/// JSON form of a pure state: `{"d": 2, "re": [...], "im": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub d: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// A valid density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let deviation = matrix.hermiticity_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let matrix = matrix.hermitian_part();
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("trace = {}", tr.re)));
        }
        let smallest = *hermitian_eigen(&matrix)?.values.last().unwrap_or(&0.0);
        if smallest < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {smallest:e}")));
        }
        Ok(Self { matrix })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    pub fn to_json(&self) -> MatrixParts {
        self.matrix.to_parts()
    }
}

/// Output of a reconstructor: Hermitian with unit trace, eigenvalues unconstrained.
#[derive(Debug, Clone, PartialEq)]
pub struct RawReconstruction {
    pub matrix: ComplexMatrix,
    pub method: Method,
    pub pointer: PointerKind,
}

impl RawReconstruction {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Smallest eigenvalue; negative values mark an unphysical estimate.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(*hermitian_eigen(&self.matrix)?.values.last().unwrap_or(&0.0))
    }
}

/// Anything that can stand on either side of [`trace_distance`].
pub trait AsOperator {
    fn operator(&self) -> &ComplexMatrix;
}

impl AsOperator for ComplexMatrix {
    fn operator(&self) -> &ComplexMatrix {
        self
    }
}

impl AsOperator for DensityMatrix {
    fn operator(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

impl AsOperator for RawReconstruction {
    fn operator(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// The discrete Fourier basis `⟨c_j|n⟩ = ω^{jn}/√d`, `ω = e^{2πi/d}`.
///
/// Row `j` of [`ComplementaryBasis::matrix`] holds `⟨c_j|n⟩` for `n = 0..d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementaryBasis {
    matrix: ComplexMatrix,
}

impl ComplementaryBasis {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::OutOfRange(format!("complementary basis needs d >= 2, got {d}")));
        }
        let norm = 1.0 / (d as f64).sqrt();
        let matrix = ComplexMatrix::from_fn(d, |j, n| {
            // reduce jn mod d before the trig call to keep phases exact for large products
            let k = (j * n) % d;
            Complex64::from_polar(norm, 2.0 * PI * k as f64 / d as f64)
        });
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `ω = e^{2πi/d}`
    pub fn omega(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI / self.dim() as f64)
    }

    /// `⟨c_j|n⟩`
    pub fn entry(&self, j: usize, n: usize) -> Complex64 {
        self.matrix[(j, n)]
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `|c_j⟩` in the computational basis.
    pub fn ket(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|n| self.matrix[(j, n)].conj()).collect()
    }

    pub fn state(&self, j: usize) -> Result<PureState> {
        if j >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: j,
                dim: self.dim(),
            });
        }
        PureState::new(self.ket(j))
    }

    /// `⟨c_j|ρ|c_j⟩`
    pub fn probability(&self, rho: &ComplexMatrix, j: usize) -> f64 {
        rho.expectation(&self.ket(j)).re
    }
}

pub fn complementary_basis(d: usize) -> Result<ComplementaryBasis> {
    ComplementaryBasis::new(d)
}

/// SU(2) coherent state of `d` levels: `ψ_m ∝ sqrt(C(d-1, m)) α^m`.
pub fn spin_coherent(d: usize, alpha: Complex64) -> Result<PureState> {
    if d < 2 {
        return Err(Error::OutOfRange(format!("spin-coherent state needs d >= 2, got {d}")));
    }
    let mut amps = Vec::with_capacity(d);
    let mut power = Complex64::new(1.0, 0.0);
    for m in 0..d {
        amps.push(power * binomial(d as u64 - 1, m as u64)?.sqrt());
        power *= alpha;
    }
    PureState::normalized(amps)
}

/// `Tr|a - b| / 2`.
pub fn trace_distance<A: AsOperator + ?Sized, B: AsOperator + ?Sized>(a: &A, b: &B) -> Result<f64> {
    let (a, b) = (a.operator(), b.operator());
    // fixed operand order so that D(a, b) and D(b, a) are bit-identical
    let key = |m: &ComplexMatrix| m.as_slice().iter().flat_map(|z| [z.re, z.im]).collect::<Vec<f64>>();
    let (a, b) = match key(a).partial_cmp(&key(b)) {
        Some(std::cmp::Ordering::Greater) => (b, a),
        _ => (a, b),
    };
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(0.5 * trace_norm(&(a - b))?)
}

/// `sqrt(1 - |⟨χ|θ⟩|²)`
pub fn pure_trace_distance(chi: &PureState, theta: &PureState) -> Result<f64> {
    if chi.dim() != theta.dim() {
        return Err(Error::DimensionMismatch {
            left: chi.dim(),
            right: theta.dim(),
        });
    }
    // norm of θ's component orthogonal to χ, i.e. sqrt(1 - |⟨χ|θ⟩|²) without cancellation
    let (x, t) = (chi.amplitudes(), theta.amplitudes());
    let overlap = inner(x, t);
    let perp: Vec<Complex64> = t.iter().zip(x).map(|(t, x)| t - x * overlap).collect();
    Ok(vec_norm(&perp).min(1.0))
}

/// Haar-random pure state: a normalized i.i.d. complex Gaussian vector.
pub fn random_pure(d: usize, rng: &mut RandomSource) -> PureState {
    loop {
        let amps: Vec<Complex64> = (0..d)
            .map(|_| Complex64::new(rng.standard_normal(), rng.standard_normal()))
            .collect();
        if let Ok(s) = PureState::normalized(amps) {
            return s;
        }
    }
}

/// Random mixed state of the given rank, the partial trace of a random pure
/// state on `d × rank`.
pub fn random_mixed(d: usize, rank: usize, rng: &mut RandomSource) -> Result<DensityMatrix> {
    if rank == 0 || rank > d {
        return Err(Error::OutOfRange(format!("rank {rank} for dimension {d}")));
    }
    let joint = random_pure(d * rank, rng);
    let psi = joint.amplitudes();
    // psi[i * rank + k]: system index i, environment index k
    let m = ComplexMatrix::from_fn(d, |i, j| {
        (0..rank).map(|k| psi[i * rank + k] * psi[j * rank + k].conj()).sum()
    });
    DensityMatrix::new(m)
}

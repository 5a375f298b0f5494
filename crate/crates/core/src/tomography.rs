//! Linear-inversion tomography on a Hilbert-Schmidt orthonormal Hermitian basis.
//!
//! With `Tr[B_k B_m] = δ_km` and `B_0 = 𝟙/√d`, any state expands as
//! `ρ = 𝟙/d + Σ_{k≥1} B_k Tr[B_k ρ]`, and `Tr[B_k ρ] = Σ_o o p(o|B_k)` is a
//! function of the outcome statistics of measuring `B_k`. For `d = 2` the
//! generalized Gell-Mann basis is exactly the Pauli basis `{𝟙, σx, σy, σz}/√2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigen, ComplexMatrix, RandomSource};
use crate::states::{AsOperator, Method, PointerKind, RawReconstruction};

pub const TOMO_RECORD_SCHEMA: u32 = 1;
/// Eigenvalues closer than this are pooled into one outcome.
pub const EIGENVALUE_POOL_TOL: f64 = 1e-9;

/// One measurable outcome of a basis operator: its eigenvalue and eigenprojector.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub eigenvalue: f64,
    pub projector: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub struct BasisOperator {
    pub matrix: ComplexMatrix,
    pub outcomes: Vec<Outcome>,
}

#[derive(Debug, Clone)]
pub struct ObservableBasis {
    pub name: String,
    pub d: usize,
    pub operators: Vec<BasisOperator>,
}

impl ObservableBasis {
    fn from_matrices(name: &str, d: usize, matrices: Vec<ComplexMatrix>) -> Result<Self> {
        let operators = matrices
            .into_iter()
            .map(|matrix| {
                let eig = hermitian_eigen(&matrix)?;
                let mut outcomes: Vec<Outcome> = Vec::new();
                for (k, &value) in eig.values.iter().enumerate() {
                    let v = eig.vector(k);
                    let proj = ComplexMatrix::projector(&v);
                    match outcomes
                        .iter_mut()
                        .find(|o| (o.eigenvalue - value).abs() < EIGENVALUE_POOL_TOL)
                    {
                        Some(o) => o.projector = &o.projector + &proj,
                        None => outcomes.push(Outcome {
                            eigenvalue: value,
                            projector: proj,
                        }),
                    }
                }
                Ok(BasisOperator { matrix, outcomes })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            name: name.to_string(),
            d,
            operators,
        })
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `Σ_k B_k Tr[B_k A]`
    pub fn expand(&self, a: &ComplexMatrix) -> ComplexMatrix {
        self.operators.iter().fold(ComplexMatrix::zeros(self.d), |acc, b| {
            &acc + &b.matrix.scale(b.matrix.trace_product(a))
        })
    }

    /// Exact outcome probabilities per operator (identity included, trivially).
    pub fn exact_frequencies<R: AsOperator + ?Sized>(&self, rho: &R) -> Result<Vec<Vec<f64>>> {
        let rho = rho.operator();
        if rho.dim() != self.d {
            return Err(Error::DimensionMismatch {
                left: self.d,
                right: rho.dim(),
            });
        }
        Ok(self
            .operators
            .iter()
            .map(|b| b.outcomes.iter().map(|o| o.projector.trace_product(rho).re).collect())
            .collect())
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `{𝟙, σx, σy, σz}/√2`
pub fn pauli_basis() -> ObservableBasis {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let mats = vec![
        ComplexMatrix::from_row_major(2, vec![c(h, 0.0), z, z, c(h, 0.0)]),
        ComplexMatrix::from_row_major(2, vec![z, c(h, 0.0), c(h, 0.0), z]),
        ComplexMatrix::from_row_major(2, vec![z, c(0.0, -h), c(0.0, h), z]),
        ComplexMatrix::from_row_major(2, vec![c(h, 0.0), z, z, c(-h, 0.0)]),
    ]
    .into_iter()
    .map(|m| m.expect("static 2x2"))
    .collect();
    ObservableBasis::from_matrices("pauli", 2, mats).expect("Pauli matrices are Hermitian")
}

/// Normalized identity followed by the symmetric, antisymmetric and diagonal
/// generalized Gell-Mann matrices, each scaled to unit Hilbert-Schmidt norm.
pub fn gellmann_basis(d: usize) -> Result<ObservableBasis> {
    if d < 2 {
        return Err(Error::OutOfRange(format!("Gell-Mann basis needs d >= 2, got {d}")));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut mats = Vec::with_capacity(d * d);
    mats.push(ComplexMatrix::identity(d).scale_real(1.0 / (d as f64).sqrt()));
    for j in 0..d {
        for k in (j + 1)..d {
            let mut s = ComplexMatrix::zeros(d);
            s[(j, k)] = c(h, 0.0);
            s[(k, j)] = c(h, 0.0);
            mats.push(s);
            let mut a = ComplexMatrix::zeros(d);
            a[(j, k)] = c(0.0, -h);
            a[(k, j)] = c(0.0, h);
            mats.push(a);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        for v in diag.iter_mut().take(l) {
            *v = norm;
        }
        diag[l] = -(l as f64) * norm;
        mats.push(ComplexMatrix::from_diagonal(&diag));
    }
    let name = if d == 2 { "pauli" } else { "gell-mann" };
    ObservableBasis::from_matrices(name, d, mats)
}

/// Measurement histogram of one basis operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableCounts {
    pub index: usize,
    pub shots: u64,
    pub eigenvalues: Vec<f64>,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomoCountsRecord {
    pub schema_version: u32,
    pub basis: String,
    pub d: usize,
    pub copies: u64,
    /// Non-identity operators only, in basis order.
    pub observables: Vec<ObservableCounts>,
}

impl TomoCountsRecord {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: Self = serde_json::from_str(s)?;
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<()> {
        let mut total = 0;
        for o in &self.observables {
            if o.counts.iter().sum::<u64>() != o.shots || o.counts.len() != o.eigenvalues.len() {
                return Err(Error::InvalidConfig(format!(
                    "tomography record: histogram of observable {} is inconsistent",
                    o.index
                )));
            }
            total += o.shots;
        }
        if total != self.copies {
            return Err(Error::InvalidConfig(format!(
                "tomography record: {total} shots for {} copies",
                self.copies
            )));
        }
        Ok(())
    }
}

/// Samples every non-identity operator of `basis` on `rho`, spreading `copies`
/// uniformly with remainders to the lowest indices.
pub fn run_tomography<R: AsOperator + ?Sized>(
    rho: &R,
    basis: &ObservableBasis,
    copies: u64,
    rng: &mut RandomSource,
) -> Result<TomoCountsRecord> {
    let d = basis.d;
    let required = (d * d) as u64;
    if copies < required {
        return Err(Error::InsufficientCopies { copies, required });
    }
    let probs = basis.exact_frequencies(rho)?;
    let measured = basis.len() - 1;
    let mut observables = Vec::with_capacity(measured);
    for (slot, k) in (1..basis.len()).enumerate() {
        let shots = crate::dst::allocate(copies, measured, slot);
        let p: Vec<f64> = probs[k].iter().map(|&x| x.max(0.0)).collect();
        let cum = crate::numerics::cumulative(&p);
        let mut counts = vec![0u64; p.len()];
        for _ in 0..shots {
            counts[rng.categorical_cumulative(&cum)] += 1;
        }
        observables.push(ObservableCounts {
            index: k,
            shots,
            eigenvalues: basis.operators[k].outcomes.iter().map(|o| o.eigenvalue).collect(),
            counts,
        });
    }
    Ok(TomoCountsRecord {
        schema_version: TOMO_RECORD_SCHEMA,
        basis: basis.name.clone(),
        d,
        copies,
        observables,
    })
}

/// `ρ = 𝟙/d + Σ_{k≥1} B_k Σ_o o f_k(o)` from per-operator outcome frequencies
/// (`frequencies[k]` aligned with `basis.operators[k].outcomes`; entry 0 unused).
pub fn reconstruct_from_frequencies(frequencies: &[Vec<f64>], basis: &ObservableBasis) -> Result<RawReconstruction> {
    if frequencies.len() != basis.len() {
        return Err(Error::BasisMismatch(format!(
            "{} frequency rows for {} operators",
            frequencies.len(),
            basis.len()
        )));
    }
    let d = basis.d;
    let mut rho = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
    for (op, freqs) in basis.operators.iter().zip(frequencies).skip(1) {
        if freqs.len() != op.outcomes.len() {
            return Err(Error::BasisMismatch("outcome count differs from the basis".into()));
        }
        let mean: f64 = op.outcomes.iter().zip(freqs).map(|(o, f)| o.eigenvalue * f).sum();
        rho = &rho + &op.matrix.scale_real(mean);
    }
    Ok(RawReconstruction {
        matrix: rho.hermitian_part(),
        method: Method::Tomography,
        pointer: PointerKind::None,
    })
}

pub fn reconstruct_tomo(rec: &TomoCountsRecord, basis: &ObservableBasis) -> Result<RawReconstruction> {
    if rec.d != basis.d || rec.observables.len() + 1 != basis.len() {
        return Err(Error::BasisMismatch(format!(
            "record has d={} with {} observables, basis has d={} with {} operators",
            rec.d,
            rec.observables.len(),
            basis.d,
            basis.len()
        )));
    }
    let mut freqs = vec![vec![1.0]];
    for (slot, o) in rec.observables.iter().enumerate() {
        let op = &basis.operators[slot + 1];
        if o.index != slot + 1
            || o.eigenvalues.len() != op.outcomes.len()
            || o.eigenvalues
                .iter()
                .zip(&op.outcomes)
                .any(|(a, b)| (a - b.eigenvalue).abs() > 1e-6)
        {
            return Err(Error::BasisMismatch(format!(
                "observable {} differs from the basis",
                o.index
            )));
        }
        if o.shots == 0 {
            freqs.push(vec![0.0; o.counts.len()]);
        } else {
            freqs.push(o.counts.iter().map(|&n| n as f64 / o.shots as f64).collect());
        }
    }
    reconstruct_from_frequencies(&freqs, basis)
}

/// Exact-mode reconstruction: the record is replaced by the exact outcome probabilities.
pub fn reconstruct_exact<R: AsOperator + ?Sized>(rho: &R, basis: &ObservableBasis) -> Result<RawReconstruction> {
    reconstruct_from_frequencies(&basis.exact_frequencies(rho)?, basis)
}

//! DST reconstructors and the infinite-statistics (asymptotic) state.
//!
//! Both the Monte-Carlo and the exact path go through a [`BranchTable`]:
//! per coupled index `n`, readout observable and outcome `j`, the branch
//! frequency and the conditional pointer mean. The branch trace
//! `Tr[κ_j O] = p(j|n) ⟨O⟩_j` is estimated as frequency × mean.

use num_complex::Complex64;

use super::forward::{
    first_order_gain, gaussian_conditional, pointer_expectations_gaussian, pointer_expectations_qubit,
    qubit_conditional, GAUSSIAN_MOMENTUM_WEIGHT,
};
use super::record::DstCountsRecord;
use crate::error::{Error, Result};
use crate::numerics::{vec_norm, ComplexMatrix};
use crate::states::{complementary_basis, AsOperator, Method, PointerKind, PureState, RawReconstruction};

/// Smallest `|Tr ρ|` accepted before trace normalization.
pub const MIN_TRACE: f64 = 1e-12;

/// Pure reconstruction fails when the implied post-selection overlap
/// `|⟨c_k|ψ⟩|` is below this multiple of `φ²`. A state orthogonal to `|c_k⟩`
/// still leaves a third-order signal worth at most `φ²/(2√2)` of overlap.
pub const MIN_OVERLAP_PER_PHI2: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchEstimate {
    pub frequency: f64,
    pub mean: f64,
}

/// Per-branch pointer statistics feeding the reconstructors.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchTable {
    pub d: usize,
    pub phi: f64,
    pub pointer: PointerKind,
    /// Relative sample sizes of the two readout settings per `n`.
    shots: Vec<[f64; 2]>,
    /// `[n][observable][j]`
    entries: Vec<[Vec<BranchEstimate>; 2]>,
}

impl BranchTable {
    pub fn from_record(rec: &DstCountsRecord) -> Result<Self> {
        rec.validate()?;
        let d = rec.d;
        let mut shots = Vec::with_capacity(d);
        let mut entries = Vec::with_capacity(d);
        for n in 0..d {
            let mut row: [Vec<BranchEstimate>; 2] = [Vec::new(), Vec::new()];
            let mut s = [0.0; 2];
            for (o, slot) in row.iter_mut().enumerate() {
                let setting = rec.setting(n, o);
                s[o] = setting.shots as f64;
                *slot = setting
                    .branches
                    .iter()
                    .map(|b| {
                        if setting.shots == 0 || b.occurrences == 0 {
                            BranchEstimate {
                                frequency: 0.0,
                                mean: 0.0,
                            }
                        } else {
                            BranchEstimate {
                                frequency: b.occurrences as f64 / setting.shots as f64,
                                mean: b.tally.total() / b.occurrences as f64,
                            }
                        }
                    })
                    .collect();
            }
            shots.push(s);
            entries.push(row);
        }
        Ok(Self {
            d,
            phi: rec.phi,
            pointer: rec.pointer,
            shots,
            entries,
        })
    }

    /// Exact branch weights and conditional means (the `N → ∞` limit).
    pub fn exact<R: AsOperator + ?Sized>(rho: &R, phi: f64, pointer: PointerKind) -> Result<Self> {
        let d = rho.operator().dim();
        let basis = complementary_basis(d)?;
        let mut entries = Vec::with_capacity(d);
        for n in 0..d {
            let mut row: [Vec<BranchEstimate>; 2] = [Vec::with_capacity(d), Vec::with_capacity(d)];
            for j in 0..d {
                let (a, b, w) = match pointer {
                    PointerKind::Qubit => {
                        let k = qubit_conditional(rho, n, j, phi, &basis)?;
                        pointer_expectations_qubit(&k).unwrap_or((0.0, 0.0, k.weight))
                    }
                    PointerKind::Gaussian => {
                        let g = gaussian_conditional(rho, n, j, phi, &basis)?;
                        pointer_expectations_gaussian(&g).unwrap_or((0.0, 0.0, g.weight))
                    }
                    PointerKind::None => {
                        return Err(Error::InvalidConfig("DST needs a qubit or gaussian pointer".into()))
                    }
                };
                row[0].push(BranchEstimate { frequency: w, mean: a });
                row[1].push(BranchEstimate { frequency: w, mean: b });
            }
            entries.push(row);
        }
        Ok(Self {
            d,
            phi,
            pointer,
            shots: vec![[1.0, 1.0]; d],
            entries,
        })
    }

    pub fn entry(&self, n: usize, observable: usize, j: usize) -> BranchEstimate {
        self.entries[n][observable][j]
    }

    fn imaginary_weight(&self) -> f64 {
        match self.pointer {
            PointerKind::Gaussian => GAUSSIAN_MOMENTUM_WEIGHT,
            _ => 1.0,
        }
    }

    /// `Tr[κ_j (O_re + i k O_im)]` with per-setting frequencies.
    pub fn combined_trace(&self, n: usize, j: usize) -> Complex64 {
        let re = self.entry(n, 0, j);
        let im = self.entry(n, 1, j);
        Complex64::new(re.frequency * re.mean, self.imaginary_weight() * im.frequency * im.mean)
    }

    /// Same, with the branch frequency pooled over both readout settings.
    pub fn pooled_trace(&self, n: usize, j: usize) -> Complex64 {
        let re = self.entry(n, 0, j);
        let im = self.entry(n, 1, j);
        let [s0, s1] = self.shots[n];
        let f = if s0 + s1 > 0.0 {
            (re.frequency * s0 + im.frequency * s1) / (s0 + s1)
        } else {
            0.0
        };
        Complex64::new(f * re.mean, self.imaginary_weight() * f * im.mean)
    }
}

/// `ρ_nq ∝ Σ_j ⟨n|c_j⟩⟨c_j|q⟩ Tr[κ_j^{(n)} (O_re + i k O_im)]`, Hermitian part, unit trace.
pub fn general_from_table(table: &BranchTable) -> Result<RawReconstruction> {
    let d = table.d;
    let basis = complementary_basis(d)?;
    let traces: Vec<Vec<Complex64>> = (0..d)
        .map(|n| (0..d).map(|j| table.combined_trace(n, j)).collect())
        .collect();
    let raw = ComplexMatrix::from_fn(d, |n, q| {
        (0..d)
            .map(|j| basis.entry(j, n).conj() * basis.entry(j, q) * traces[n][j])
            .sum::<Complex64>()
            * d as f64
    });
    let herm = raw.hermitian_part();
    let tr = herm.trace().re;
    if !tr.is_finite() || tr.abs() < MIN_TRACE {
        return Err(Error::DegenerateNormalization(format!(
            "trace {tr:e} before normalization"
        )));
    }
    Ok(RawReconstruction {
        matrix: herm.scale_real(1.0 / tr),
        method: Method::GeneralDst,
        pointer: table.pointer,
    })
}

/// `ψ_n ∝ ⟨n|c_k⟩ √d Tr[κ_k^{(n)} (O_re + i k O_im)]`, normalized, canonical phase.
pub fn pure_from_table(table: &BranchTable, postselect: usize) -> Result<PureState> {
    let d = table.d;
    if postselect >= d {
        return Err(Error::IndexOutOfRange {
            index: postselect,
            dim: d,
        });
    }
    let basis = complementary_basis(d)?;
    let scale = (d as f64).sqrt();
    let v: Vec<Complex64> = (0..d)
        .map(|n| basis.entry(postselect, n).conj() * scale * table.pooled_trace(n, postselect))
        .collect();
    check_postselection(&v, table.phi, table.pointer)?;
    Ok(PureState::normalized(v)?.with_canonical_phase())
}

fn check_postselection(v: &[Complex64], phi: f64, pointer: PointerKind) -> Result<()> {
    let norm = vec_norm(v);
    let gain = first_order_gain(pointer, phi);
    if !norm.is_finite() || gain == 0.0 {
        return Err(Error::DegenerateNormalization("no coupling signal".into()));
    }
    let overlap = norm / gain;
    if overlap < MIN_OVERLAP_PER_PHI2 * phi * phi || norm == 0.0 {
        return Err(Error::DegenerateNormalization(format!(
            "estimated post-selection overlap {overlap:e} is below {MIN_OVERLAP_PER_PHI2}*phi^2; \
             the state is (nearly) orthogonal to the post-selected one"
        )));
    }
    Ok(())
}

/// General (mixed-state) reconstruction from sampled counts.
pub fn reconstruct_general(rec: &DstCountsRecord) -> Result<RawReconstruction> {
    general_from_table(&BranchTable::from_record(rec)?)
}

/// Pure-state reconstruction from the post-selected branch of sampled counts.
pub fn reconstruct_pure(rec: &DstCountsRecord) -> Result<PureState> {
    pure_from_table(&BranchTable::from_record(rec)?, rec.postselect)
}

/// Result of a DST reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub enum Reconstruction {
    Pure(PureState),
    Mixed(RawReconstruction),
}

impl Reconstruction {
    /// The reconstruction as an operator (the projector for pure results).
    pub fn operator(&self) -> ComplexMatrix {
        match self {
            Reconstruction::Pure(p) => p.density().matrix().clone(),
            Reconstruction::Mixed(r) => r.matrix.clone(),
        }
    }
}

/// Infinite-statistics general reconstruction `ρ^a`.
pub fn asymptotic_general<R: AsOperator + ?Sized>(
    rho: &R,
    phi: f64,
    pointer: PointerKind,
) -> Result<RawReconstruction> {
    general_from_table(&BranchTable::exact(rho, phi, pointer)?)
}

/// Infinite-statistics pure reconstruction `ψ^a`.
pub fn asymptotic_pure<R: AsOperator + ?Sized>(
    rho: &R,
    phi: f64,
    pointer: PointerKind,
    postselect: usize,
) -> Result<PureState> {
    pure_from_table(&BranchTable::exact(rho, phi, pointer)?, postselect)
}

/// The state a DST run converges to as `N → ∞`.
pub fn asymptotic_state<R: AsOperator + ?Sized>(
    rho: &R,
    phi: f64,
    method: Method,
    pointer: PointerKind,
) -> Result<Reconstruction> {
    match method {
        Method::PureDst => asymptotic_pure(rho, phi, pointer, 0).map(Reconstruction::Pure),
        Method::GeneralDst => asymptotic_general(rho, phi, pointer).map(Reconstruction::Mixed),
        Method::Tomography => Err(Error::InvalidConfig(
            "tomography is unbiased; its asymptotic state is the input".into(),
        )),
    }
}

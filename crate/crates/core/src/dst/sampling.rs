//! Monte-Carlo sampling of DST experiments.
//!
//! A shot at setting `(n, O)` draws the system outcome `j` with probability
//! `p(j|n)` and then a pointer outcome from the conditional pointer state of
//! that branch. Continuous outcomes use rejection sampling from a dominating
//! envelope (the absolute-weight Gaussian mixture for `X`, the scaled packet
//! momentum Gaussian for `P`) and fall back to a tabulated inverse CDF when
//! the acceptance rate would drop below [`MIN_ACCEPTANCE`].

use serde::{Deserialize, Serialize};

use super::forward::{
    gaussian_conditional, normal_pdf, pointer_expectations_gaussian, pointer_expectations_qubit, qubit_conditional,
    GaussianPointerState, Observable, ZERO_WEIGHT,
};
use super::record::{BranchCounts, DstCountsRecord, PointerTally, SettingCounts, DST_RECORD_SCHEMA};
use crate::error::{Error, Result};
use crate::numerics::{cumulative, RandomSource};
use crate::states::{complementary_basis, ComplementaryBasis, DensityMatrix, PointerKind};

pub const MIN_ACCEPTANCE: f64 = 0.1;
pub const GRID_POINTS: usize = 1 << 14;
const GRID_HALF_WIDTH: f64 = 8.0;

/// One DST experiment to simulate.
#[derive(Debug, Clone)]
pub struct DstExperiment {
    pub state: DensityMatrix,
    pub phi: f64,
    pub pointer: PointerKind,
    pub pure_mode: bool,
    pub postselect: usize,
    pub copies: u64,
}

/// Draws pointer outcomes for one branch.
#[derive(Debug, Clone)]
enum BranchSampler {
    Empty,
    Sign {
        p_plus: f64,
    },
    Mixture {
        components: Vec<(f64, f64)>,
        envelope: Vec<f64>,
        sd: f64,
        density: GaussianPointerState,
    },
    Momentum {
        envelope_scale: f64,
        density: GaussianPointerState,
    },
    Grid {
        xs: Vec<f64>,
        cdf: Vec<f64>,
        pdf: Vec<f64>,
    },
}

impl BranchSampler {
    fn qubit(state: &super::forward::QubitPointerState, observable: Observable) -> Self {
        match pointer_expectations_qubit(state) {
            Ok((y, z, _)) => {
                let mean = if observable == Observable::SigmaY { y } else { z };
                BranchSampler::Sign {
                    p_plus: (0.5 * (1.0 + mean)).clamp(0.0, 1.0),
                }
            }
            Err(_) => BranchSampler::Empty,
        }
    }

    fn gaussian(state: GaussianPointerState, observable: Observable) -> Self {
        let w = state.weight;
        if w <= ZERO_WEIGHT {
            return BranchSampler::Empty;
        }
        match observable {
            Observable::X => {
                let comps = state.position_components();
                let mass: f64 = comps.iter().map(|c| c.0.abs()).sum();
                if w / mass < MIN_ACCEPTANCE {
                    let lo = -GRID_HALF_WIDTH - state.shift.max(0.0);
                    let hi = GRID_HALF_WIDTH - state.shift.min(0.0);
                    return Self::grid(lo, hi, |x| state.position_density(x));
                }
                let components: Vec<(f64, f64)> = comps.iter().map(|&(c, mu)| (c.abs(), mu)).collect();
                let envelope = cumulative(&components.iter().map(|c| c.0).collect::<Vec<_>>());
                BranchSampler::Mixture {
                    components,
                    envelope,
                    sd: 0.5,
                    density: state,
                }
            }
            _ => {
                let c = &state.coeffs;
                let scale = c[0][0].re + c[1][1].re + 2.0 * c[1][0].norm();
                if w / scale < MIN_ACCEPTANCE {
                    return Self::grid(-GRID_HALF_WIDTH, GRID_HALF_WIDTH, |p| state.momentum_density(p));
                }
                BranchSampler::Momentum {
                    envelope_scale: scale,
                    density: state,
                }
            }
        }
    }

    fn grid(lo: f64, hi: f64, density: impl Fn(f64) -> f64) -> Self {
        let step = (hi - lo) / (GRID_POINTS - 1) as f64;
        let xs: Vec<f64> = (0..GRID_POINTS).map(|i| lo + step * i as f64).collect();
        let pdf: Vec<f64> = xs.iter().map(|&x| density(x).max(0.0)).collect();
        let mut cdf = Vec::with_capacity(GRID_POINTS);
        let mut acc = 0.0;
        cdf.push(0.0);
        for i in 1..GRID_POINTS {
            acc += 0.5 * (pdf[i - 1] + pdf[i]) * step;
            cdf.push(acc);
        }
        BranchSampler::Grid { xs, cdf, pdf }
    }

    fn sample(&self, rng: &mut RandomSource) -> f64 {
        match self {
            BranchSampler::Empty => 0.0,
            BranchSampler::Sign { p_plus } => {
                if rng.uniform() < *p_plus {
                    1.0
                } else {
                    -1.0
                }
            }
            BranchSampler::Mixture {
                components,
                envelope,
                sd,
                density,
            } => loop {
                let k = rng.categorical_cumulative(envelope);
                let x = rng.normal(components[k].1, *sd);
                let bound: f64 = components.iter().map(|&(a, mu)| a * normal_pdf(x, mu, *sd)).sum();
                if rng.uniform() * bound <= density.position_density(x) {
                    return x;
                }
            },
            BranchSampler::Momentum {
                envelope_scale,
                density,
            } => loop {
                let p = rng.standard_normal();
                let bound = envelope_scale * normal_pdf(p, 0.0, 1.0);
                if rng.uniform() * bound <= density.momentum_density(p) {
                    return p;
                }
            },
            BranchSampler::Grid { xs, cdf, pdf } => {
                let total = *cdf.last().unwrap();
                let u = rng.uniform() * total;
                let i = cdf.partition_point(|&c| c <= u).clamp(1, xs.len() - 1);
                // invert the trapezoid on [x_{i-1}, x_i]: linear density within the cell
                let (x0, x1) = (xs[i - 1], xs[i]);
                let h = x1 - x0;
                let (f0, f1) = (pdf[i - 1], pdf[i]);
                let need = u - cdf[i - 1];
                let slope = (f1 - f0) / h;
                let t = if slope.abs() < 1e-300 || f0 + f1 <= 0.0 {
                    if f0 > 0.0 {
                        need / f0
                    } else {
                        0.5 * h
                    }
                } else {
                    // f0 t + slope t²/2 = need
                    let disc = (f0 * f0 + 2.0 * slope * need).max(0.0);
                    (disc.sqrt() - f0) / slope
                };
                x0 + t.clamp(0.0, h)
            }
        }
    }
}

/// Joint sampler for one `(n, observable)` setting.
#[derive(Debug, Clone)]
pub struct SettingSampler {
    weights: Vec<f64>,
    cumulative: Vec<f64>,
    branches: Vec<BranchSampler>,
}

impl SettingSampler {
    pub fn new(
        state: &DensityMatrix,
        n: usize,
        observable: Observable,
        phi: f64,
        basis: &ComplementaryBasis,
    ) -> Result<Self> {
        let d = state.dim();
        let mut weights = Vec::with_capacity(d);
        let mut branches = Vec::with_capacity(d);
        for j in 0..d {
            match observable {
                Observable::SigmaY | Observable::SigmaZ => {
                    let k = qubit_conditional(state, n, j, phi, basis)?;
                    weights.push(k.weight.max(0.0));
                    branches.push(BranchSampler::qubit(&k, observable));
                }
                Observable::X | Observable::P => {
                    let g = gaussian_conditional(state, n, j, phi, basis)?;
                    weights.push(g.weight.max(0.0));
                    branches.push(BranchSampler::gaussian(g, observable));
                }
            }
        }
        let cumulative = cumulative(&weights);
        Ok(Self {
            weights,
            cumulative,
            branches,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(j, pointer outcome)`
    pub fn sample(&self, rng: &mut RandomSource) -> (usize, f64) {
        let j = rng.categorical_cumulative(&self.cumulative);
        (j, self.branches[j].sample(rng))
    }
}

fn check_observable(pointer: PointerKind, observable: Observable) -> Result<()> {
    if Observable::pair(pointer).contains(&observable) && pointer != PointerKind::None {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "observable {observable:?} does not belong to the {pointer} pointer"
        )))
    }
}

/// One shot with a qubit pointer: `(j, ±1)`.
pub fn sample_shot_qubit(
    state: &DensityMatrix,
    n: usize,
    observable: Observable,
    phi: f64,
    basis: &ComplementaryBasis,
    rng: &mut RandomSource,
) -> Result<(usize, i8)> {
    check_observable(PointerKind::Qubit, observable)?;
    let (j, v) = SettingSampler::new(state, n, observable, phi, basis)?.sample(rng);
    Ok((j, if v > 0.0 { 1 } else { -1 }))
}

/// One shot with a Gaussian pointer: `(j, x or p)`.
pub fn sample_shot_gaussian(
    state: &DensityMatrix,
    n: usize,
    observable: Observable,
    phi: f64,
    basis: &ComplementaryBasis,
    rng: &mut RandomSource,
) -> Result<(usize, f64)> {
    check_observable(PointerKind::Gaussian, observable)?;
    Ok(SettingSampler::new(state, n, observable, phi, basis)?.sample(rng))
}

/// Shots for setting `index` of `settings` when `copies` are spread uniformly,
/// remainders going to the lowest indices.
pub fn allocate(copies: u64, settings: usize, index: usize) -> u64 {
    let s = settings as u64;
    copies / s + u64::from((index as u64) < copies % s)
}

/// Simulates the experiment shot by shot and tallies the outcomes.
pub fn run_dst(exp: &DstExperiment, rng: &mut RandomSource) -> Result<DstCountsRecord> {
    let d = exp.state.dim();
    if exp.pointer == PointerKind::None {
        return Err(Error::InvalidConfig("DST needs a qubit or gaussian pointer".into()));
    }
    if !(exp.phi.is_finite()) {
        return Err(Error::InvalidCoupling(exp.phi));
    }
    if exp.postselect >= d {
        return Err(Error::IndexOutOfRange {
            index: exp.postselect,
            dim: d,
        });
    }
    let required = 2 * d as u64;
    if exp.copies < required {
        return Err(Error::InsufficientCopies {
            copies: exp.copies,
            required,
        });
    }
    let basis = complementary_basis(d)?;
    let pair = Observable::pair(exp.pointer);
    let mut settings = Vec::with_capacity(2 * d);
    for n in 0..d {
        for (o, &observable) in pair.iter().enumerate() {
            let shots = allocate(exp.copies, 2 * d, 2 * n + o);
            let sampler = SettingSampler::new(&exp.state, n, observable, exp.phi, &basis)?;
            let mut branches: Vec<BranchCounts> = (0..d)
                .map(|_| BranchCounts {
                    occurrences: 0,
                    tally: PointerTally::empty(exp.pointer),
                })
                .collect();
            for _ in 0..shots {
                let (j, v) = sampler.sample(rng);
                branches[j].occurrences += 1;
                branches[j].tally.push(v);
            }
            settings.push(SettingCounts {
                n,
                observable,
                shots,
                branches,
            });
        }
    }
    Ok(DstCountsRecord {
        schema_version: DST_RECORD_SCHEMA,
        d,
        phi: exp.phi,
        pointer: exp.pointer,
        pure_mode: exp.pure_mode,
        postselect: exp.postselect,
        copies: exp.copies,
        settings,
    })
}

/// Summary of a sampled pointer marginal, used by tests and diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMoments {
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
}

impl SampleMoments {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Self {
            count: values.len() as u64,
            mean,
            variance,
        }
    }
}

/// Conditional pointer mean of a branch, used to cross-check samplers.
pub fn conditional_mean(
    state: &DensityMatrix,
    n: usize,
    j: usize,
    observable: Observable,
    phi: f64,
    basis: &ComplementaryBasis,
) -> Result<f64> {
    Ok(match observable {
        Observable::SigmaY => pointer_expectations_qubit(&qubit_conditional(state, n, j, phi, basis)?)?.0,
        Observable::SigmaZ => pointer_expectations_qubit(&qubit_conditional(state, n, j, phi, basis)?)?.1,
        Observable::X => pointer_expectations_gaussian(&gaussian_conditional(state, n, j, phi, basis)?)?.0,
        Observable::P => pointer_expectations_gaussian(&gaussian_conditional(state, n, j, phi, basis)?)?.1,
    })
}

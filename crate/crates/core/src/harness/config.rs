use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::RandomSource;
use crate::numerics::{ComplexMatrix, MatrixParts};
use crate::states::{
    complementary_basis, random_mixed, random_pure, spin_coherent, AsOperator, DensityMatrix, Method, PointerKind,
    PureState, StateJson,
};

pub const DEFAULT_REPETITIONS: usize = 20;

/// How the true state of an experiment is specified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateSpec {
    SpinCoherent {
        alpha_re: f64,
        #[serde(default)]
        alpha_im: f64,
    },
    /// State JSON on disk: `{d, re, im}` with `d` amplitudes (pure) or `d²` row-major entries (density).
    File { path: PathBuf },
    Random {
        seed: u64,
        #[serde(default = "one")]
        rank: usize,
    },
    /// Element `|c_k⟩` of the complementary basis.
    Complementary { index: usize },
    Amplitudes {
        re: Vec<f64>,
        #[serde(default)]
        im: Vec<f64>,
    },
}

fn one() -> usize {
    1
}

impl StateSpec {
    pub fn spin_coherent(alpha: f64) -> Self {
        StateSpec::SpinCoherent {
            alpha_re: alpha,
            alpha_im: 0.0,
        }
    }

    pub fn alpha(&self) -> Option<Complex64> {
        match *self {
            StateSpec::SpinCoherent { alpha_re, alpha_im } => Some(Complex64::new(alpha_re, alpha_im)),
            _ => None,
        }
    }

    /// Builds the state; relative file paths are resolved against `base`.
    pub fn resolve(&self, d: usize, base: Option<&Path>) -> Result<TrueState> {
        let state = match self {
            StateSpec::SpinCoherent { alpha_re, alpha_im } => {
                TrueState::Pure(spin_coherent(d, Complex64::new(*alpha_re, *alpha_im))?)
            }
            StateSpec::File { path } => {
                let full = match base {
                    Some(b) if path.is_relative() => b.join(path),
                    _ => path.clone(),
                };
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| Error::InvalidConfig(format!("{}: {e}", full.display())))?;
                TrueState::from_json(&text)?
            }
            StateSpec::Random { seed, rank } => {
                let mut rng = RandomSource::new(*seed);
                if *rank == 1 {
                    TrueState::Pure(random_pure(d, &mut rng))
                } else {
                    TrueState::Mixed(random_mixed(d, *rank, &mut rng)?)
                }
            }
            StateSpec::Complementary { index } => TrueState::Pure(complementary_basis(d)?.state(*index)?),
            StateSpec::Amplitudes { re, im } => {
                let im = if im.is_empty() { vec![0.0; re.len()] } else { im.clone() };
                if im.len() != re.len() {
                    return Err(Error::InvalidState("re and im lengths differ".into()));
                }
                let amps = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
                TrueState::Pure(PureState::normalized(amps)?)
            }
        };
        if state.dim() != d {
            return Err(Error::DimensionMismatch {
                left: d,
                right: state.dim(),
            });
        }
        Ok(state)
    }
}

/// The state a simulated experiment is run on.
#[derive(Debug, Clone, PartialEq)]
pub enum TrueState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl TrueState {
    pub fn dim(&self) -> usize {
        match self {
            TrueState::Pure(p) => p.dim(),
            TrueState::Mixed(m) => m.dim(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            TrueState::Pure(p) => p.density(),
            TrueState::Mixed(m) => m.clone(),
        }
    }

    /// Parses `{d, re, im}`; `d` entries give a pure state, `d²` a density matrix.
    pub fn from_json(text: &str) -> Result<Self> {
        let j: StateJson = serde_json::from_str(text)?;
        if j.re.len() == j.d * j.d && j.d > 1 {
            let parts = MatrixParts {
                d: j.d,
                re: j.re,
                im: if j.im.is_empty() { vec![0.0; j.d * j.d] } else { j.im },
            };
            Ok(TrueState::Mixed(DensityMatrix::new(ComplexMatrix::from_parts(
                &parts,
            )?)?))
        } else {
            Ok(TrueState::Pure(PureState::from_json(&j)?))
        }
    }

    /// Trace distance to a pure estimate.
    pub fn distance_to_pure(&self, psi: &PureState) -> Result<f64> {
        match self {
            TrueState::Pure(p) => crate::states::pure_trace_distance(p, psi),
            TrueState::Mixed(m) => crate::states::trace_distance(m, &psi.density()),
        }
    }

    pub fn distance_to<R: AsOperator + ?Sized>(&self, other: &R) -> Result<f64> {
        crate::states::trace_distance(&self.density(), other)
    }
}

/// One experiment family: a state, a method and a list of sample sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub d: usize,
    pub state: StateSpec,
    pub method: Method,
    #[serde(default = "no_pointer")]
    pub pointer: PointerKind,
    #[serde(default)]
    pub phi: f64,
    pub n_list: Vec<u64>,
    #[serde(default = "default_reps")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub exact: bool,
    /// Complementary-basis index for pure DST post-selection.
    #[serde(default)]
    pub postselect: usize,
}

fn no_pointer() -> PointerKind {
    PointerKind::None
}

fn default_reps() -> usize {
    DEFAULT_REPETITIONS
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.d < 2 {
            return bad(format!("d = {} (need d >= 2)", self.d));
        }
        if self.n_list.is_empty() {
            return bad("empty N list".into());
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("N list {:?} is not strictly increasing", self.n_list));
        }
        if self.repetitions == 0 {
            return bad("repetitions must be positive".into());
        }
        if !self.phi.is_finite() || self.phi < 0.0 {
            return bad(format!("phi = {}", self.phi));
        }
        match self.method {
            Method::Tomography => {
                if self.pointer != PointerKind::None {
                    return bad("tomography takes pointer `none`".into());
                }
                if self.phi != 0.0 {
                    return bad("tomography takes phi = 0".into());
                }
            }
            Method::PureDst | Method::GeneralDst => {
                if self.pointer == PointerKind::None {
                    return bad(format!("{} needs a qubit or gaussian pointer", self.method));
                }
                if !self.exact && self.phi <= 0.0 {
                    return bad(format!("{} needs phi > 0", self.method));
                }
            }
        }
        if self.postselect >= self.d {
            return bad(format!("postselect {} for d = {}", self.postselect, self.d));
        }
        if self.postselect != 0 && self.method != Method::PureDst {
            return bad("postselect applies to pure-dst only".into());
        }
        Ok(())
    }
}

/// A config file holds one experiment or a list of them.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ConfigFile {
    Many(Vec<ExperimentConfig>),
    One(Box<ExperimentConfig>),
}

pub fn parse_configs(text: &str) -> Result<Vec<ExperimentConfig>> {
    let configs = match serde_json::from_str::<ConfigFile>(text) {
        Ok(ConfigFile::Many(v)) => v,
        Ok(ConfigFile::One(c)) => vec![*c],
        Err(_) => {
            // Re-parse as a single object to surface a useful message.
            let one: ExperimentConfig = serde_json::from_str(text)?;
            vec![one]
        }
    };
    if configs.is_empty() {
        return Err(Error::InvalidConfig("no experiments in config".into()));
    }
    for c in &configs {
        c.validate()?;
    }
    Ok(configs)
}

pub fn load_configs(path: &Path) -> Result<Vec<ExperimentConfig>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    parse_configs(&text)
}

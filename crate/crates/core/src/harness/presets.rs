use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, StateSpec};
use crate::error::{Error, Result};
use crate::states::{Method, PointerKind};

pub const PRESET_NAMES: [&str; 7] = ["fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b", "fig4"];
pub const PRESET_SEED: u64 = 2011;

const DESK_N: [u64; 7] = [1_000, 3_162, 10_000, 31_623, 100_000, 316_228, 1_000_000];
const FULL_N: [u64; 11] = [
    1_000,
    3_162,
    10_000,
    31_623,
    100_000,
    316_228,
    1_000_000,
    3_162_278,
    10_000_000,
    31_622_777,
    100_000_000,
];
pub const FIG4_PHIS: [f64; 9] = [0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5];
const FIG1_PHIS: [f64; 2] = [0.05, 0.1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    Full,
    Desk,
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Full => "full",
            Scale::Desk => "desk",
        })
    }
}

impl FromStr for Scale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Scale::Full),
            "desk" => Ok(Scale::Desk),
            other => Err(Error::InvalidConfig(format!("unknown scale `{other}`"))),
        }
    }
}

fn n_list(scale: Scale) -> Vec<u64> {
    match scale {
        Scale::Desk => DESK_N.to_vec(),
        Scale::Full => FULL_N.to_vec(),
    }
}

fn dst(d: usize, alpha: f64, method: Method, pointer: PointerKind, phi: f64, scale: Scale) -> ExperimentConfig {
    ExperimentConfig {
        d,
        state: StateSpec::spin_coherent(alpha),
        method,
        pointer,
        phi,
        n_list: n_list(scale),
        repetitions: 20,
        seed: PRESET_SEED,
        exact: false,
        postselect: 0,
    }
}

fn tomo(d: usize, scale: Scale) -> ExperimentConfig {
    dst(d, 2.0, Method::Tomography, PointerKind::None, 0.0, scale)
}

/// DST at both couplings next to tomography, as in the D-vs-N comparisons.
fn comparison(d: usize, method: Method, scale: Scale) -> Vec<ExperimentConfig> {
    let mut v: Vec<_> = FIG1_PHIS
        .iter()
        .map(|&phi| dst(d, 2.0, method, PointerKind::Qubit, phi, scale))
        .collect();
    v.push(tomo(d, scale));
    v
}

/// Experiment list of a figure replication.
pub fn figure_preset(name: &str, scale: Scale) -> Result<Vec<ExperimentConfig>> {
    Ok(match name {
        "fig1a" => comparison(2, Method::PureDst, scale),
        "fig1b" => comparison(10, Method::PureDst, scale),
        "fig2a" => comparison(2, Method::GeneralDst, scale),
        "fig2b" => comparison(10, Method::GeneralDst, scale),
        "fig3a" => [PointerKind::Qubit, PointerKind::Gaussian]
            .iter()
            .flat_map(|&p| {
                FIG1_PHIS
                    .iter()
                    .map(move |&phi| dst(2, 2.0, Method::PureDst, p, phi, scale))
            })
            .collect(),
        "fig3b" => vec![tomo(2, scale)],
        "fig4" => fig4(scale),
        other => return Err(Error::UnknownPreset(other.to_string())),
    })
}

/// Pure DST of the `α = ±2` qubit over the coupling grid, sampled at one `N`
/// per curve, followed by the same grid in exact mode (`ρᵃ`).
fn fig4(scale: Scale) -> Vec<ExperimentConfig> {
    let mut sampled = Vec::new();
    let mut exact = Vec::new();
    for alpha in [-2.0, 2.0] {
        let (n, reps) = match (scale, alpha < 0.0) {
            (Scale::Desk, _) => (1_000_000, 5),
            (Scale::Full, true) => (49_000_000, 1),
            (Scale::Full, false) => (159_000_000, 1),
        };
        for pointer in [PointerKind::Qubit, PointerKind::Gaussian] {
            for &phi in &FIG4_PHIS {
                let mut c = dst(2, alpha, Method::PureDst, pointer, phi, scale);
                c.n_list = vec![n];
                c.repetitions = reps;
                exact.push(ExperimentConfig {
                    exact: true,
                    repetitions: 1,
                    ..c.clone()
                });
                sampled.push(c);
            }
        }
    }
    sampled.extend(exact);
    sampled
}

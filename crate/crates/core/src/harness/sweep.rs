use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{ExperimentConfig, TrueState};
use crate::dst::{
    asymptotic_general, asymptotic_pure, bias_estimate_postselected, check_coupling, reconstruct_general,
    reconstruct_pure, run_dst, DstExperiment,
};
use crate::error::{Error, Result};
use crate::numerics::{derive_seed, RandomSource};
use crate::states::{DensityMatrix, Method, PointerKind};
use crate::tomography::{
    gellmann_basis, pauli_basis, reconstruct_exact, reconstruct_tomo, run_tomography, ObservableBasis,
};

pub const CSV_HEADER: [&str; 12] = [
    "method", "pointer", "d", "phi", "N", "rep", "seed", "alpha", "status", "D", "Dprime", "ms",
];
pub const STATUS_OK: &str = "ok";

/// One repetition of one `(config, N)` grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Task {
    pub config: usize,
    pub grid: u64,
    pub rep: usize,
    pub n: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub config: usize,
    pub grid: u64,
    pub method: Method,
    pub pointer: PointerKind,
    pub d: usize,
    pub phi: f64,
    pub n: u64,
    pub rep: usize,
    pub seed: u64,
    pub alpha: Option<Complex64>,
    pub status: String,
    pub distance: Option<f64>,
    pub d_prime: Option<f64>,
    pub ms: Option<f64>,
    /// Error message of a failed row (not serialized).
    pub error: Option<String>,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }

    /// Identifies a row independently of its results.
    pub fn key(&self) -> String {
        self.to_record()[..7].join(",")
    }

    pub fn to_record(&self) -> Vec<String> {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        vec![
            self.method.to_string(),
            self.pointer.to_string(),
            self.d.to_string(),
            self.phi.to_string(),
            self.n.to_string(),
            self.rep.to_string(),
            self.seed.to_string(),
            self.alpha.map(format_alpha).unwrap_or_default(),
            self.status.clone(),
            opt(self.distance),
            opt(self.d_prime),
            self.ms.map(|v| format!("{v:.3}")).unwrap_or_default(),
        ]
    }

    fn echo(cfg: &ExperimentConfig, task: &Task) -> Self {
        SweepRow {
            config: task.config,
            grid: task.grid,
            method: cfg.method,
            pointer: cfg.pointer,
            d: cfg.d,
            phi: cfg.phi,
            n: task.n,
            rep: task.rep,
            seed: task.seed,
            alpha: cfg.state.alpha(),
            status: STATUS_OK.into(),
            distance: None,
            d_prime: None,
            ms: None,
            error: None,
        }
    }

    /// Rebuilds a row from a previously written CSV record.
    fn from_record(cfg: &ExperimentConfig, task: &Task, rec: &[String]) -> Result<Self> {
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse()
                    .map(Some)
                    .map_err(|_| Error::InvalidConfig(format!("bad number `{s}` in existing CSV")))
            }
        };
        let mut row = SweepRow::echo(cfg, task);
        row.status = rec[8].clone();
        row.distance = opt(&rec[9])?;
        row.d_prime = opt(&rec[10])?;
        row.ms = opt(&rec[11])?;
        Ok(row)
    }
}

fn format_alpha(a: Complex64) -> String {
    if a.im == 0.0 {
        a.re.to_string()
    } else {
        format!("{}{:+}i", a.re, a.im)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SweepOptions {
    /// Fill the `ms` column with wall-clock time (makes output non-reproducible).
    pub timings: bool,
}

/// A validated list of experiments expanded into independent tasks.
#[derive(Debug, Clone)]
pub struct Sweep {
    configs: Vec<ExperimentConfig>,
    truths: Vec<TrueState>,
    bases: Vec<Option<ObservableBasis>>,
    tasks: Vec<Task>,
}

impl Sweep {
    /// `base` resolves relative state-file paths.
    pub fn new(configs: Vec<ExperimentConfig>, base: Option<&Path>) -> Result<Self> {
        let mut truths = Vec::with_capacity(configs.len());
        let mut bases = Vec::with_capacity(configs.len());
        let mut tasks = Vec::new();
        let mut grid = 0u64;
        for (ci, cfg) in configs.iter().enumerate() {
            cfg.validate()?;
            truths.push(cfg.state.resolve(cfg.d, base)?);
            bases.push(match cfg.method {
                Method::Tomography => Some(tomography_basis(cfg.d)?),
                _ => None,
            });
            for &n in &cfg.n_list {
                for rep in 0..cfg.repetitions {
                    tasks.push(Task {
                        config: ci,
                        grid,
                        rep,
                        n,
                        seed: derive_seed(cfg.seed, grid, rep as u64),
                    });
                }
                grid += 1;
            }
        }
        Ok(Self {
            configs,
            truths,
            bases,
            tasks,
        })
    }

    pub fn configs(&self) -> &[ExperimentConfig] {
        &self.configs
    }

    pub fn truth(&self, config: usize) -> &TrueState {
        &self.truths[config]
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    /// Runs one task.
    pub fn run_task(&self, task: &Task, opts: &SweepOptions) -> SweepRow {
        let cfg = &self.configs[task.config];
        let mut row = SweepRow::echo(cfg, task);
        let start = Instant::now();
        match evaluate(cfg, &self.truths[task.config], self.bases[task.config].as_ref(), task) {
            Ok((dist, dp)) => {
                row.distance = Some(dist);
                row.d_prime = dp;
            }
            Err(e) => {
                row.status = e.tag().into();
                row.error = Some(e.to_string());
            }
        }
        if opts.timings {
            row.ms = Some(start.elapsed().as_secs_f64() * 1e3);
        }
        row
    }

    /// Runs every task on the current rayon pool, reusing rows found in
    /// `existing` (keyed by [`SweepRow::key`]). `sink` sees each freshly
    /// computed row as soon as it is done. Output is in `(grid, rep)` order.
    pub fn run(
        &self,
        opts: &SweepOptions,
        existing: &HashMap<String, Vec<String>>,
        sink: &(dyn Fn(&SweepRow) + Sync),
    ) -> Result<Vec<SweepRow>> {
        self.tasks
            .par_iter()
            .map(|task| {
                let cfg = &self.configs[task.config];
                let key = SweepRow::echo(cfg, task).key();
                if let Some(rec) = existing.get(&key) {
                    return SweepRow::from_record(cfg, task, rec);
                }
                let row = self.run_task(task, opts);
                sink(&row);
                Ok(row)
            })
            .collect()
    }
}

pub fn tomography_basis(d: usize) -> Result<ObservableBasis> {
    if d == 2 {
        Ok(pauli_basis())
    } else {
        gellmann_basis(d)
    }
}

/// `(D, D′)` for one repetition.
fn evaluate(
    cfg: &ExperimentConfig,
    truth: &TrueState,
    basis: Option<&ObservableBasis>,
    task: &Task,
) -> Result<(f64, Option<f64>)> {
    let rho: DensityMatrix = truth.density();
    let mut rng = RandomSource::new(task.seed);
    match cfg.method {
        Method::Tomography => {
            let basis = basis.ok_or_else(|| Error::InvalidConfig("missing basis".into()))?;
            let rec = if cfg.exact {
                reconstruct_exact(&rho, basis)?
            } else {
                reconstruct_tomo(&run_tomography(&rho, basis, task.n, &mut rng)?, basis)?
            };
            Ok((truth.distance_to(&rec)?, None))
        }
        Method::PureDst | Method::GeneralDst => {
            check_coupling(cfg.phi)?;
            let pure = cfg.method == Method::PureDst;
            let exp = DstExperiment {
                state: rho,
                phi: cfg.phi,
                pointer: cfg.pointer,
                pure_mode: pure,
                postselect: cfg.postselect,
                copies: task.n,
            };
            if pure {
                let psi = if cfg.exact {
                    asymptotic_pure(&exp.state, cfg.phi, cfg.pointer, cfg.postselect)?
                } else {
                    reconstruct_pure(&run_dst(&exp, &mut rng)?)?
                };
                let dp = bias_estimate_postselected(&psi, cfg.phi, cfg.pointer, cfg.postselect)?;
                Ok((truth.distance_to_pure(&psi)?, Some(dp.d_prime)))
            } else {
                let rec = if cfg.exact {
                    asymptotic_general(&exp.state, cfg.phi, cfg.pointer)?
                } else {
                    reconstruct_general(&run_dst(&exp, &mut rng)?)?
                };
                Ok((truth.distance_to(&rec)?, None))
            }
        }
    }
}

/// Convenience: validates, expands and runs `configs` with default options.
pub fn run_sweep(configs: &[ExperimentConfig]) -> Result<Vec<SweepRow>> {
    Sweep::new(configs.to_vec(), None)?.run(&SweepOptions::default(), &HashMap::new(), &|_| {})
}

pub fn write_rows_csv<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in rows {
        out.write_record(r.to_record())?;
    }
    out.flush()?;
    Ok(())
}

/// Reads rows of a (possibly partial, unordered) sweep CSV keyed by
/// [`SweepRow::key`]. Incomplete trailing records are ignored.
pub fn read_rows_csv<R: Read>(r: R) -> Result<HashMap<String, Vec<String>>> {
    let mut rd = csv::ReaderBuilder::new().flexible(true).from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::InvalidConfig("existing CSV has an unexpected header".into()));
    }
    let mut map = HashMap::new();
    for rec in rd.records() {
        let Ok(rec) = rec else { continue };
        if rec.len() != CSV_HEADER.len() {
            continue;
        }
        let fields: Vec<String> = rec.iter().map(str::to_string).collect();
        map.insert(fields[..7].join(","), fields);
    }
    Ok(map)
}

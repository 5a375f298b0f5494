use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use dstbench_core::dst::{
    asymptotic_pure, bias_estimate, extrapolate_to_zero, reconstruct_pure, run_dst, DstExperiment,
};
use dstbench_core::harness::{
    figure_preset, load_configs, read_rows_csv, summarize, write_rows_csv, write_summary_csv, ExperimentConfig,
    StateSpec, SummaryRow, Sweep, SweepOptions, SweepRow, TrueState, CSV_HEADER,
};
use dstbench_core::numerics::derive_seed;
use dstbench_core::{Error, PointerKind, PureState, RandomSource, Result};

use crate::{BiasArgs, ExecArgs, ExtrapolateArgs, FigureArgs, PointerChoice, RunArgs, StateArgs, StateSource};

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_PARTIAL: u8 = 3;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

/// Rows, summary and sweep of a finished run.
pub struct Outcome {
    pub sweep: Sweep,
    pub rows: Vec<SweepRow>,
    pub summary: Vec<SummaryRow>,
}

impl Outcome {
    fn exit(&self) -> u8 {
        if self.rows.iter().all(SweepRow::is_ok) {
            EXIT_OK
        } else {
            EXIT_PARTIAL
        }
    }
}

fn thread_count(exec: &ExecArgs) -> usize {
    exec.threads
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Writes `path` through a temporary file in the same directory.
fn write_atomic(path: &Path, fill: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        fill(&mut w)?;
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn execute(stem: &str, mut configs: Vec<ExperimentConfig>, base: Option<&Path>, exec: &ExecArgs) -> Result<Outcome> {
    for c in &mut configs {
        if let Some(s) = exec.seed {
            c.seed = s;
        }
        if exec.exact {
            c.exact = true;
        }
    }
    let sweep = Sweep::new(configs, base)?;
    fs::create_dir_all(&exec.out)?;
    let csv_path = exec.out.join(format!("{stem}.csv"));
    let partial_path = exec.out.join(format!("{stem}.csv.partial"));
    let summary_path = exec.out.join(format!("{stem}_summary.csv"));
    if csv_path.exists() && !exec.force && !exec.resume {
        return Err(Error::InvalidConfig(format!(
            "{} exists; pass --force to overwrite or --resume to continue",
            csv_path.display()
        )));
    }

    let mut existing: HashMap<String, Vec<String>> = HashMap::new();
    if exec.resume {
        for p in [&partial_path, &csv_path] {
            if p.exists() {
                existing.extend(read_rows_csv(File::open(p)?)?);
            }
        }
    }
    let resume_partial = exec.resume && partial_path.exists() && fs::metadata(&partial_path)?.len() > 0;
    let partial_file = if resume_partial {
        OpenOptions::new().append(true).open(&partial_path)?
    } else {
        let mut f = File::create(&partial_path)?;
        writeln!(f, "{}", CSV_HEADER.join(","))?;
        f
    };
    let partial = Mutex::new(csv::Writer::from_writer(partial_file));
    let sink = |row: &SweepRow| {
        let mut w = partial.lock().expect("partial writer poisoned");
        // progress file only; the final CSV is written from memory
        let _ = w.write_record(row.to_record());
        let _ = w.flush();
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count(exec))
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    let opts = SweepOptions { timings: exec.timings };
    let rows = pool.install(|| sweep.run(&opts, &existing, &sink))?;
    drop(partial);

    write_atomic(&csv_path, |w| write_rows_csv(w, &rows))?;
    let summary = summarize(&rows);
    write_atomic(&summary_path, |w| write_summary_csv(w, &summary))?;
    fs::remove_file(&partial_path)?;

    for r in rows.iter().filter(|r| !r.is_ok()) {
        eprintln!(
            "row failed: method={} pointer={} d={} phi={} N={} rep={} seed={}: {}",
            r.method,
            r.pointer,
            r.d,
            r.phi,
            r.n,
            r.rep,
            r.seed,
            r.error.as_deref().unwrap_or(&r.status)
        );
    }
    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    eprintln!(
        "{} rows ({failed} failed) -> {}, {}",
        rows.len(),
        csv_path.display(),
        summary_path.display()
    );
    Ok(Outcome { sweep, rows, summary })
}

pub fn run(args: &RunArgs) -> Result<u8> {
    let configs = load_configs(&args.config)?;
    let stem = args
        .config
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("sweep")
        .to_string();
    let out = execute(&stem, configs, args.config.parent(), &args.exec)?;
    Ok(out.exit())
}

pub fn figure(args: &FigureArgs) -> Result<u8> {
    let configs = figure_preset(&args.name, args.scale)?;
    let out = execute(&args.name, configs, None, &args.exec)?;
    let panels = crate::plot::figure_panels(&args.name, &out)?;
    let svg_path = args.exec.out.join(format!("{}.svg", args.name));
    let svg = crate::svg::render(&panels);
    write_atomic(&svg_path, |w| Ok(w.write_all(svg.as_bytes())?))?;
    eprintln!("plot -> {}", svg_path.display());
    Ok(out.exit())
}

fn resolve_state(src: &StateSource) -> Result<TrueState> {
    let spec = if let Some(path) = &src.state {
        StateSpec::File { path: path.clone() }
    } else if let Some(seed) = src.random {
        StateSpec::Random { seed, rank: src.rank }
    } else if let Some(index) = src.complementary {
        StateSpec::Complementary { index }
    } else {
        StateSpec::SpinCoherent {
            alpha_re: src.alpha.unwrap_or(2.0),
            alpha_im: src.alpha_im,
        }
    };
    if src.d < 2 {
        return Err(Error::InvalidConfig(format!("d = {} (need d >= 2)", src.d)));
    }
    let d = match (&spec, src.state.is_some()) {
        // a state file carries its own dimension
        (StateSpec::File { path }, true) => TrueState::from_json(
            &fs::read_to_string(path).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?,
        )?
        .dim(),
        _ => src.d,
    };
    spec.resolve(d, None)
}

fn pure_input(src: &StateSource) -> Result<PureState> {
    match resolve_state(src)? {
        TrueState::Pure(p) => Ok(p),
        TrueState::Mixed(_) => Err(Error::InvalidState("a pure state is required".into())),
    }
}

fn pointers(choice: PointerChoice) -> Vec<PointerKind> {
    match choice {
        PointerChoice::Qubit => vec![PointerKind::Qubit],
        PointerChoice::Gaussian => vec![PointerKind::Gaussian],
        PointerChoice::Both => vec![PointerKind::Qubit, PointerKind::Gaussian],
    }
}

pub fn bias(args: &BiasArgs) -> Result<u8> {
    let psi = pure_input(&args.state)?;
    let mut out = std::io::stdout().lock();
    for (k, pointer) in pointers(args.pointer).into_iter().enumerate() {
        if k > 0 {
            writeln!(out)?;
        }
        writeln!(
            out,
            "# pointer: {pointer}{}",
            if args.oracle { " (oracle mode)" } else { "" }
        )?;
        if args.oracle {
            writeln!(out, "{:<10} {:<24} D(rho_a,rho_t)", "phi", "Dprime(psi_a)")?;
        } else {
            writeln!(out, "{:<10} Dprime", "phi")?;
        }
        for &phi in &args.phi {
            // in oracle mode the input is the true state and D' is evaluated on
            // its infinite-statistics reconstruction
            let row = if args.oracle {
                dstbench_core::dst::check_coupling(phi)
                    .and_then(|_| asymptotic_pure(&psi.density(), phi, pointer, 0))
                    .and_then(|a| {
                        let dp = bias_estimate(&a, phi, pointer)?.d_prime;
                        Ok(format!(
                            "{phi:<10} {dp:<24e} {:e}",
                            dstbench_core::pure_trace_distance(&a, &psi)?
                        ))
                    })
            } else {
                bias_estimate(&psi, phi, pointer).map(|b| format!("{phi:<10} {:e}", b.d_prime))
            };
            match row {
                Ok(line) => writeln!(out, "{line}")?,
                Err(e) => writeln!(out, "{phi:<10} invalid ({}: {e})", e.tag())?,
            }
        }
    }
    Ok(EXIT_OK)
}

pub fn extrapolate(args: &ExtrapolateArgs) -> Result<u8> {
    let truth = resolve_state(&args.state)?;
    let rho = truth.density();
    fs::create_dir_all(&args.out)?;
    for pointer in pointers(args.pointer) {
        let mut points = Vec::with_capacity(args.phis.len());
        for (k, &phi) in args.phis.iter().enumerate() {
            dstbench_core::dst::check_coupling(phi)?;
            let psi = match args.copies {
                None => asymptotic_pure(&rho, phi, pointer, 0)?,
                Some(n) => {
                    let exp = DstExperiment {
                        state: rho.clone(),
                        phi,
                        pointer,
                        pure_mode: true,
                        postselect: 0,
                        copies: n,
                    };
                    let mut rng = RandomSource::new(derive_seed(args.seed, k as u64, 0));
                    reconstruct_pure(&run_dst(&exp, &mut rng)?)?
                }
            };
            println!("{pointer} phi={phi} D={:e}", truth.distance_to_pure(&psi)?);
            points.push((phi, psi));
        }
        let psi0 = extrapolate_to_zero(&points, args.degree)?;
        println!(
            "{pointer} extrapolated (degree {}) D={:e}",
            args.degree,
            truth.distance_to_pure(&psi0)?
        );
        let path: PathBuf = args.out.join(format!("extrapolated_{pointer}.json"));
        let json = serde_json::to_string_pretty(&psi0.to_json())?;
        write_atomic(&path, |w| Ok(writeln!(w, "{json}")?))?;
        eprintln!("state -> {}", path.display());
    }
    Ok(EXIT_OK)
}

pub fn state(args: &StateArgs) -> Result<u8> {
    let json = match resolve_state(&args.state)? {
        TrueState::Pure(p) => serde_json::to_string_pretty(&p.to_json())?,
        TrueState::Mixed(m) => serde_json::to_string_pretty(&m.to_json())?,
    };
    println!("{json}");
    Ok(EXIT_OK)
}

//! Sweeps over experiment grids, aggregation, elbow detection and figure presets.

mod config;
mod presets;
mod summary;
mod sweep;

pub use config::{load_configs, parse_configs, ExperimentConfig, StateSpec, TrueState, DEFAULT_REPETITIONS};
pub use presets::{figure_preset, Scale, FIG4_PHIS, PRESET_NAMES, PRESET_SEED};
pub use summary::{detect_elbow, group_stats, summarize, write_summary_csv, GroupStats, SummaryRow, SUMMARY_HEADER};
pub use sweep::{
    read_rows_csv, run_sweep, tomography_basis, write_rows_csv, Sweep, SweepOptions, SweepRow, Task, CSV_HEADER,
    STATUS_OK,
};

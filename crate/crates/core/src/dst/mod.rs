//! Direct state measurement: forward models, samplers, reconstructors, bias.

mod bias;
mod extrapolate;
mod forward;
mod reconstruct;
mod record;
mod sampling;

pub use bias::{bias_closed_form_qubit, bias_estimate, bias_estimate_postselected, check_coupling, BiasEstimate};
pub use extrapolate::extrapolate_to_zero;
pub use forward::{
    branch_coefficients, first_order_gain, gaussian_conditional, gaussian_overlap, normal_pdf,
    pointer_expectations_gaussian, pointer_expectations_qubit, qubit_conditional, Coefficients, GaussianPointerState,
    Observable, QubitPointerState, GAUSSIAN_MOMENTUM_WEIGHT, ZERO_WEIGHT,
};
pub use reconstruct::{
    asymptotic_general, asymptotic_pure, asymptotic_state, general_from_table, pure_from_table, reconstruct_general,
    reconstruct_pure, BranchEstimate, BranchTable, Reconstruction, MIN_OVERLAP_PER_PHI2, MIN_TRACE,
};
pub use record::{BranchCounts, DstCountsRecord, PointerTally, SettingCounts, DST_RECORD_SCHEMA};
pub use sampling::{
    allocate, conditional_mean, run_dst, sample_shot_gaussian, sample_shot_qubit, DstExperiment, SampleMoments,
    SettingSampler, GRID_POINTS, MIN_ACCEPTANCE,
};

//! Design toolkit for reconfigurable intelligent surfaces.
//!
//! The crate sizes a surface so that the reflected path matches an unblocked
//! direct link, builds steering codewords and sweeps them over the coverage
//! sector, groups phase-correlated elements onto shared control lines, and
//! budgets the resulting power draw and achievable rate.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the bottom of this file fix the common double-precision types.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod correlation;
pub mod error;
pub mod link;
pub mod power;
pub mod scalar;
pub mod scenario;
pub mod sizing;
pub mod steering;

pub use channel::{
    bs_ris_direction, channel_rng, expected_power_gain, fspl_db, los_vector_bs_ris,
    los_vector_ris_ue, path_loss_db, planar_los, planar_los_bs_ris, planar_los_ris_ue,
    realization_seed, ris_ue_direction, ris_ue_distance, sample_rician, sample_rician_with,
    CarrierConfig, ChannelRng, ChannelVector, DirectionCosines, LinkGeometry, LinkKind,
    PlanarArray, RicianParams,
};
pub use correlation::{
    build_groups, circular_distance_deg, connected_control_map, correlate,
    pairwise_max_differences, threshold_sweep, ConnectedGroups, ControlLine, ControlMap,
    GroupingMode, PairMode, PairRecord, PairTable, ThresholdSweep,
};
pub use error::{Result, RisError};
pub use link::{achievable_rate, cascade_snr, noise_power_dbm, rate_sweep, RateCurve, RateDesign};
pub use power::{
    circuit_power, control_counts, multi_config_power, panel_power, reduction_percent,
    single_panel_dynamic, ControlBudget, DesignKind, PowerBreakdown, PowerModelParams,
};
pub use scalar::{db_to_linear, linear_to_db, Scalar};
pub use scenario::{DeploymentCase, LinkGains, ScenarioConfig};
pub use sizing::{
    beamwidth_deg, min_ris_gain, required_elements, required_gain_db, size_for_deployment,
    square_side, GainBudget, RisDimensions,
};
pub use steering::{
    codeword_count, codeword_storage_bits, gain_pattern, matched_codeword, phase_shift_matrix,
    steering_sweep, CodewordShaper, FullControl, GainPattern, PhaseShiftMatrix, SteeringPlan,
};

pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;

pub type ChannelVectorF64 = ChannelVector<f64>;
pub type ChannelVectorF32 = ChannelVector<f32>;
pub type PhaseShiftMatrixF64 = PhaseShiftMatrix<f64>;
pub type PhaseShiftMatrixF32 = PhaseShiftMatrix<f32>;
pub type SteeringPlanF64 = SteeringPlan<f64>;
pub type GainPatternF64 = GainPattern<f64>;
pub type ScenarioConfigF64 = ScenarioConfig<f64>;
pub type ScenarioConfigF32 = ScenarioConfig<f32>;
pub type RisDimensionsF64 = RisDimensions<f64>;
pub type PowerBreakdownF64 = PowerBreakdown<f64>;
pub type RateCurveF64 = RateCurve<f64>;

//! Norm-inflating data families, their parameter schedules and the Ξ_k power series.

pub mod appendix;
pub mod scenario;
pub mod schedule;
pub mod series;

pub use appendix::{
    appendix_profile, default_derivative, derivative_profile, mollified_profile, moment_vanishing, phase_integral, psi4_profile,
    solve_psi4_parameter, MomentReport,
};
pub use scenario::{
    block_parameters, block_schedule, build_two_block_data, f_factor, g_factor, inflation_time, predicted_initial_norm,
    predicted_lower_bound, BlockParams, InflationScenario, InflationTime, Regime, RegimeSchedule, ScalingParams, TwoBlock,
};
pub use schedule::{supercritical_schedule, supercritical_schedule_with, ScheduleOptions};
pub use series::{
    block_convolution, two_block_xi1, xi1_lower_measurement, xi_series, xi_series_with_budget, xi_tail_certificate, xi_term,
    xi_upper_bound, Xi1Measurement, XI_DEFAULT_KMAX, XI_MODE_BUDGET,
};

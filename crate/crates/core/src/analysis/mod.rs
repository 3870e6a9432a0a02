//! Pose-coverage probabilities with their Monte-Carlo oracle, and regret
//! accounting.

mod coverage;
mod regret;

pub use coverage::{
    coverage_closed_form, coverage_double_sum, coverage_double_sum_curve, coverage_monte_carlo,
    ln_miss_closed_form, ln_miss_probability, miss_probability, CoverageQuery, Estimate,
};
pub use regret::{
    cumulative_regret, per_pose_regret, regret_bound, weighted_regret, RegretBound, RegretLedger,
};

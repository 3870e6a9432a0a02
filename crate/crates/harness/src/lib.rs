//! Experiment harness: synthetic environments with calibrated priors, the
//! learn-then-evaluate protocol, aggregation, result files and the checks
//! run by `graspbandit verify`.

pub mod aggregate;
pub mod config;
pub mod environment;
pub mod error;
pub mod experiment;
pub mod output;
pub mod seed;
pub mod verify;

pub use aggregate::{aggregate, SummaryTable};
pub use config::{EnvironmentSpec, ExperimentConfig, PolicySpec};
pub use error::{HarnessError, Result};
pub use experiment::{evaluate_policy, run_experiment, Experiment, RunRecord};
pub use seed::seed_stream;

/// Policy list for a prior-strength sweep: the configured policies without
/// any seeded Thompson entries, followed by one seeded entry per strength.
pub fn sweep_policies(policies: &[PolicySpec], strengths: &[f64]) -> Vec<PolicySpec> {
    policies
        .iter()
        .filter(|p| p.kind != graspbandit_core::PolicyKind::ThompsonSeeded)
        .cloned()
        .chain(strengths.iter().map(|&s| PolicySpec::seeded(s)))
        .collect()
}

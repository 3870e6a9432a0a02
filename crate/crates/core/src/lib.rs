//! Thompson-sampling grasp exploration over Bernoulli arms with priors seeded
//! from quality estimates.
//!
//! * [`bandit`]: Beta posteriors and the arm-selection policies.
//! * [`prior`]: prior seeding, the Kendall-tau prior mismatch and synthetic
//!   truth/prior generation.
//! * [`pose`]: multi-stable-pose environments and episodes.
//! * [`analysis`]: pose-coverage probabilities and regret accounting.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64` unless suffixed with `32`.

pub mod analysis;
pub mod bandit;
pub mod error;
pub mod pose;
pub mod prior;
pub mod scalar;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use bandit::{PolicyKind, Reward};
pub use pose::FailureRule;

pub type BeliefState = bandit::BeliefState<f64>;
pub type GroundTruth = bandit::GroundTruth<f64>;
pub type PriorEstimate = prior::PriorEstimate<f64>;
pub type MismatchReport = prior::MismatchReport<f64>;
pub type PoseModel = pose::PoseModel<f64>;
pub type CoverageQuery = analysis::CoverageQuery<f64>;
pub type RegretLedger = analysis::RegretLedger<f64>;

pub type BeliefState32 = bandit::BeliefState<f32>;
pub type GroundTruth32 = bandit::GroundTruth<f32>;
pub type PriorEstimate32 = prior::PriorEstimate<f32>;
pub type MismatchReport32 = prior::MismatchReport<f32>;
pub type PoseModel32 = pose::PoseModel<f32>;
pub type CoverageQuery32 = analysis::CoverageQuery<f32>;
pub type RegretLedger32 = analysis::RegretLedger<f32>;

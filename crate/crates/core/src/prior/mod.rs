//! Prior seeding, the rank-based prior mismatch metric and synthetic
//! environments (ground truths plus mismatch-calibrated priors).

mod calibrate;
mod generate;
mod kendall;
mod seeding;

pub use calibrate::{
    noisy_prior, perturb, rank_matched, rank_reversed, synthesize_prior, synthesize_prior_with,
    MismatchProtocol, PriorNoise, SynthesizedPrior, BISECTION_STEPS, NOISE_DRAWS, SIGMA_MAX,
    TIE_JITTER,
};
pub use generate::{generate_ground_truth, TruthSpec, GENERATION_ATTEMPTS};
pub use kendall::{
    averaged_mismatch, averaged_mismatch_report, kendall_tau, AveragedMismatch, MismatchReport,
};
pub use seeding::{clamp_quality, seed_beliefs, PriorEstimate, QUALITY_CLAMP};

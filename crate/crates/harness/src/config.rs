//! Experiment configuration, read from JSON with unknown keys rejected.

use std::path::Path;

use graspbandit_core::prior::{PriorNoise, TruthSpec};
use graspbandit_core::{PolicyKind, PoseModel};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Target mismatches cycled over the default environments. The spread
/// follows the shape of a pose-level mismatch histogram: support from about
/// 0.16 to 0.64, a mode in the 0.40 to 0.45 bin holding a quarter of the
/// mass, and a thin tail above 0.55.
pub const DEFAULT_MISMATCH_TARGETS: [f64; 20] = [
    0.18, 0.23, 0.27, 0.31, 0.33, 0.35, 0.37, 0.38, 0.39, 0.41, 0.42, 0.42, 0.43, 0.44, 0.44, 0.47,
    0.48, 0.51, 0.54, 0.60,
];

fn default_tolerance() -> f64 {
    0.01
}

fn default_prior_noise() -> PriorNoise {
    PriorNoise::RankMatched
}

fn default_mismatch_sets() -> usize {
    10
}

/// One policy column of the comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    /// Prior strength `S`; required for `thompson_seeded`, rejected otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strength: Option<f64>,
}

impl PolicySpec {
    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            strength: None,
        }
    }

    pub fn seeded(strength: f64) -> Self {
        Self {
            kind: PolicyKind::ThompsonSeeded,
            strength: Some(strength),
        }
    }

    /// Identifier used in the output files, e.g. `thompson_seeded_s5`.
    pub fn label(&self) -> String {
        match self.strength {
            Some(s) => format!("{}_s{s}", self.kind),
            None => self.kind.to_string(),
        }
    }

    fn validate(&self) -> Result<()> {
        match (self.kind, self.strength) {
            (PolicyKind::ThompsonSeeded, Some(s)) if s.is_finite() && s > 0.0 => Ok(()),
            (PolicyKind::ThompsonSeeded, _) => Err(HarnessError::Config(
                "thompson_seeded needs a finite positive `strength`".into(),
            )),
            (kind, Some(_)) => Err(HarnessError::Config(format!(
                "`strength` only applies to thompson_seeded, not {kind}"
            ))),
            (_, None) => Ok(()),
        }
    }
}

/// Where the environments come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvironmentSpec {
    /// Single-pose environments with a generated truth pool and a prior
    /// calibrated to a target mismatch.
    Synthetic {
        count: usize,
        truth: TruthSpec,
        /// Cycled over the environments: environment `i` uses entry
        /// `i % len`.
        mismatch_targets: Vec<f64>,
        #[serde(default = "default_tolerance")]
        tolerance: f64,
        /// Subsets averaged when the pool is larger than `arm_count`.
        #[serde(default = "default_mismatch_sets")]
        mismatch_sets: usize,
        #[serde(default = "default_prior_noise")]
        prior_noise: PriorNoise,
    },
    /// A fixed multi-pose model; each environment calibrates a fresh prior
    /// per pose.
    PoseModel {
        count: usize,
        model: PoseModel,
        mismatch_targets: Vec<f64>,
        #[serde(default = "default_tolerance")]
        tolerance: f64,
        #[serde(default = "default_mismatch_sets")]
        mismatch_sets: usize,
        #[serde(default = "default_prior_noise")]
        prior_noise: PriorNoise,
    },
}

impl EnvironmentSpec {
    pub fn count(&self) -> usize {
        match self {
            EnvironmentSpec::Synthetic { count, .. } | EnvironmentSpec::PoseModel { count, .. } => {
                *count
            }
        }
    }

    pub fn mismatch_targets(&self) -> &[f64] {
        match self {
            EnvironmentSpec::Synthetic {
                mismatch_targets, ..
            }
            | EnvironmentSpec::PoseModel {
                mismatch_targets, ..
            } => mismatch_targets,
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            EnvironmentSpec::Synthetic { tolerance, .. }
            | EnvironmentSpec::PoseModel { tolerance, .. } => *tolerance,
        }
    }

    pub fn mismatch_sets(&self) -> usize {
        match self {
            EnvironmentSpec::Synthetic { mismatch_sets, .. }
            | EnvironmentSpec::PoseModel { mismatch_sets, .. } => *mismatch_sets,
        }
    }

    pub fn prior_noise(&self) -> PriorNoise {
        match self {
            EnvironmentSpec::Synthetic { prior_noise, .. }
            | EnvironmentSpec::PoseModel { prior_noise, .. } => *prior_noise,
        }
    }

    pub fn target_for(&self, env_id: usize) -> f64 {
        let targets = self.mismatch_targets();
        targets[env_id % targets.len()]
    }
}

/// Full description of one experiment. Every field has a default, which
/// together form the desk-sized default suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Arms per arm set (`K`).
    pub arm_count: usize,
    /// Learning steps per run.
    pub horizon: u64,
    pub eval_every: u64,
    /// Grasps sampled per evaluation, without updates.
    pub eval_samples: usize,
    pub policies: Vec<PolicySpec>,
    pub environment: EnvironmentSpec,
    /// Distinct arm sets drawn from each environment's pool.
    pub arm_set_resamples: usize,
    pub runs_per_arm_set: usize,
    pub master_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let arm_count = 20;
        Self {
            arm_count,
            horizon: 500,
            eval_every: 10,
            eval_samples: 100,
            policies: vec![
                PolicySpec::new(PolicyKind::Greedy),
                PolicySpec::new(PolicyKind::ThompsonUniform),
                PolicySpec::seeded(5.0),
                PolicySpec::seeded(10.0),
                PolicySpec::seeded(50.0),
                PolicySpec::seeded(100.0),
                PolicySpec::new(PolicyKind::Oracle),
            ],
            environment: EnvironmentSpec::Synthetic {
                count: 100,
                truth: TruthSpec::Sparse {
                    arm_count,
                    n_good: 3,
                    q_hi: 0.85,
                    q_lo: 0.15,
                    spread_hi: 0.02,
                    spread_lo: 0.1,
                },
                mismatch_targets: DEFAULT_MISMATCH_TARGETS.to_vec(),
                tolerance: default_tolerance(),
                mismatch_sets: default_mismatch_sets(),
                prior_noise: default_prior_noise(),
            },
            arm_set_resamples: 1,
            runs_per_arm_set: 10,
            master_seed: 20_200_000,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Number of evaluation points per run, `floor(horizon / eval_every) + 1`.
    pub fn eval_points(&self) -> usize {
        (self.horizon / self.eval_every) as usize + 1
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(HarnessError::Config(msg));
        for (name, value) in [
            ("arm_count", self.arm_count as u64),
            ("eval_every", self.eval_every),
            ("eval_samples", self.eval_samples as u64),
            ("arm_set_resamples", self.arm_set_resamples as u64),
            ("runs_per_arm_set", self.runs_per_arm_set as u64),
            ("environment.count", self.environment.count() as u64),
            (
                "environment.mismatch_sets",
                self.environment.mismatch_sets() as u64,
            ),
        ] {
            if value == 0 {
                return fail(format!("{name} must be at least 1"));
            }
        }
        if self.policies.is_empty() {
            return fail("at least one policy is required".into());
        }
        for p in &self.policies {
            p.validate()?;
        }
        let mut labels: Vec<String> = self.policies.iter().map(PolicySpec::label).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return fail(format!("policy `{}` is listed twice", w[0]));
        }
        let targets = self.environment.mismatch_targets();
        if targets.is_empty() {
            return fail("mismatch_targets must not be empty".into());
        }
        if let Some(t) = targets.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return fail(format!("mismatch target {t} outside [0, 1]"));
        }
        let tol = self.environment.tolerance();
        if !(tol > 0.0 && tol.is_finite()) {
            return fail(format!("tolerance must be positive, got {tol}"));
        }
        match &self.environment {
            EnvironmentSpec::Synthetic { truth, .. } => {
                truth
                    .validate()
                    .map_err(|e| HarnessError::Config(e.to_string()))?;
                if truth.arm_count() < self.arm_count {
                    return fail(format!(
                        "truth pool of {} arms is smaller than arm_count {}",
                        truth.arm_count(),
                        self.arm_count
                    ));
                }
                if self.arm_count < 2 {
                    return fail("mismatch needs arm_count of at least 2".into());
                }
            }
            EnvironmentSpec::PoseModel { model, .. } => {
                if let Some(k) = model.arm_counts().into_iter().find(|&k| k < 2) {
                    return fail(format!("every pose needs at least 2 arms, found {k}"));
                }
            }
        }
        Ok(())
    }
}

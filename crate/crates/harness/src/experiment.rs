//! The learning/evaluation protocol and the parallel experiment runner.

use graspbandit_core::bandit::{bernoulli, select_arm};
use graspbandit_core::prior::seed_beliefs;
use graspbandit_core::{BeliefState, PolicyKind, PoseModel, PriorEstimate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, PolicySpec};
use crate::environment::{generate_arm_sets, ArmSet, Skipped};
use crate::error::{HarnessError, Result};
use crate::seed::seed_stream;

/// One training run of one policy on one arm set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub policy: String,
    /// Position of the policy in the configuration; the first sort key.
    pub policy_index: usize,
    pub env_id: usize,
    pub arm_set_id: usize,
    pub run_id: usize,
    pub mismatch: f64,
    /// Mean evaluation reward at steps `0, eval_every, 2 eval_every, ...`.
    pub curve: Vec<f64>,
    pub sum_reward: f64,
    /// `sum_reward * 100 / curve.len()`.
    pub scaled_sum: f64,
    pub seed: u64,
}

impl RunRecord {
    fn sort_key(&self) -> (usize, usize, usize, usize) {
        (self.policy_index, self.env_id, self.arm_set_id, self.run_id)
    }
}

/// Records of a finished experiment plus the environments left out.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub records: Vec<RunRecord>,
    pub skipped: Vec<Skipped>,
}

/// Mean reward of `eval_samples` grasps from the frozen policy.
///
/// Each grasp drops the object into a pose drawn from the drop distribution
/// and asks that pose's belief for an arm. Beliefs are only read.
pub fn evaluate_policy<R: Rng + ?Sized>(
    kind: PolicyKind,
    beliefs: &[BeliefState],
    model: &PoseModel,
    priors: &[Vec<f64>],
    eval_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if eval_samples == 0 {
        return Err(HarnessError::Config(
            "eval_samples must be at least 1".into(),
        ));
    }
    let single = model.pose_count() == 1;
    let mut successes = 0u64;
    for _ in 0..eval_samples {
        let pose = if single { 0 } else { model.drop(rng) };
        let truth = model.truth(pose);
        let arm = select_arm(kind, &beliefs[pose], &priors[pose], truth, rng)?;
        successes += u64::from(bernoulli(truth.probs()[arm], rng).bit());
    }
    Ok(successes as f64 / eval_samples as f64)
}

/// Starting beliefs: seeded from the prior for `thompson_seeded`, uniform
/// for everything else.
pub fn initial_beliefs(policy: &PolicySpec, priors: &[Vec<f64>]) -> Result<Vec<BeliefState>> {
    priors
        .iter()
        .map(|q| {
            Ok(match policy.strength {
                Some(s) if policy.kind == PolicyKind::ThompsonSeeded => {
                    seed_beliefs(&PriorEstimate::new(q.clone(), s)?)?
                }
                _ => BeliefState::uniform(q.len())?,
            })
        })
        .collect()
}

/// Evaluation at step 0, then `horizon` learning steps with an evaluation
/// after every `eval_every`-th one. Learning rewards update the beliefs but
/// are not part of the reported sum.
pub fn run_single(
    config: &ExperimentConfig,
    set: &ArmSet,
    policy_index: usize,
    run_id: usize,
) -> Result<RunRecord> {
    let policy = &config.policies[policy_index];
    let label = policy.label();
    let seed = seed_stream(
        config.master_seed,
        &[
            "run",
            &set.env_id.to_string(),
            &set.id.to_string(),
            &label,
            &run_id.to_string(),
        ],
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = &set.model;
    let mut beliefs = initial_beliefs(policy, &set.priors)?;
    let eval = |beliefs: &[BeliefState], rng: &mut ChaCha8Rng| {
        evaluate_policy(
            policy.kind,
            beliefs,
            model,
            &set.priors,
            config.eval_samples,
            rng,
        )
    };

    let mut curve = Vec::with_capacity(config.eval_points());
    curve.push(eval(&beliefs, &mut rng)?);
    let mut pose = model.drop(&mut rng);
    for step in 1..=config.horizon {
        let truth = model.truth(pose);
        let arm = select_arm(
            policy.kind,
            &beliefs[pose],
            &set.priors[pose],
            truth,
            &mut rng,
        )?;
        let reward = bernoulli(truth.probs()[arm], &mut rng);
        beliefs[pose].update(arm, reward)?;
        pose = model.transition(pose, reward, &mut rng)?;
        if step % config.eval_every == 0 {
            curve.push(eval(&beliefs, &mut rng)?);
        }
    }

    let sum_reward: f64 = curve.iter().sum();
    Ok(RunRecord {
        policy: label,
        policy_index,
        env_id: set.env_id,
        arm_set_id: set.id,
        run_id,
        mismatch: set.mismatch,
        scaled_sum: sum_reward * 100.0 / curve.len() as f64,
        sum_reward,
        curve,
        seed,
    })
}

/// Runs every policy `runs_per_arm_set` times on every arm set of every
/// environment. Output order is fixed by sorting on
/// `(policy, env_id, arm_set_id, run_id)`, so it does not depend on the
/// thread count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Experiment> {
    config.validate()?;
    let (sets, skipped) = generate_arm_sets(config);
    if sets.is_empty() {
        return Err(HarnessError::GenerationExhausted {
            skipped: skipped.len(),
        });
    }
    let jobs: Vec<(&ArmSet, usize, usize)> = sets
        .iter()
        .flat_map(|set| {
            (0..config.policies.len())
                .flat_map(move |p| (0..config.runs_per_arm_set).map(move |r| (set, p, r)))
        })
        .collect();
    let mut records = jobs
        .into_par_iter()
        .map(|(set, p, r)| run_single(config, set, p, r))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(RunRecord::sort_key);
    Ok(Experiment { records, skipped })
}

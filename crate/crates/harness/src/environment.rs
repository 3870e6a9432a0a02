//! Environments (truth pools with calibrated priors) and the arm sets drawn
//! from them.

use graspbandit_core::prior::{
    generate_ground_truth, kendall_tau, synthesize_prior_with, MismatchProtocol,
    GENERATION_ATTEMPTS,
};
use graspbandit_core::{Error, FailureRule, GroundTruth, PoseModel};
use rand::seq::index;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{EnvironmentSpec, ExperimentConfig};
use crate::seed::rng_for;

/// A truth pool per pose with a prior calibrated against it.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub id: usize,
    pub target: f64,
    pub drop_probs: Vec<f64>,
    pub failure_rule: FailureRule,
    pub truths: Vec<Vec<f64>>,
    pub priors: Vec<Vec<f64>>,
    /// Mismatch reached by calibration, per pose.
    pub calibrated: Vec<f64>,
}

/// The arms one group of runs actually plays.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmSet {
    pub env_id: usize,
    pub id: usize,
    /// Pool indices per pose, ascending.
    pub arms: Vec<Vec<usize>>,
    pub model: PoseModel,
    pub priors: Vec<Vec<f64>>,
    /// Drop-weighted mean of the per-pose mismatch on these arms.
    pub mismatch: f64,
}

/// An environment that was left out, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub env_id: usize,
    pub reason: String,
}

fn protocol(pool: usize, config: &ExperimentConfig) -> MismatchProtocol {
    if pool > config.arm_count {
        MismatchProtocol::subsets(config.arm_count, config.environment.mismatch_sets())
    } else {
        MismatchProtocol::default()
    }
}

pub fn generate_environment(
    config: &ExperimentConfig,
    env_id: usize,
) -> graspbandit_core::Result<Environment> {
    let mut rng = rng_for(config.master_seed, &["environment", &env_id.to_string()]);
    let spec = &config.environment;
    let target = spec.target_for(env_id);
    let (drop_probs, failure_rule, truths) = match spec {
        EnvironmentSpec::Synthetic { truth, .. } => {
            let g: GroundTruth = generate_ground_truth(truth, &mut rng)?;
            (vec![1.0], FailureRule::Stay, vec![g.into_inner()])
        }
        EnvironmentSpec::PoseModel { model, .. } => (
            model.drop_probs().to_vec(),
            model.failure_rule(),
            model.truths().map(|t| t.probs().to_vec()).collect(),
        ),
    };
    let mut priors = Vec::with_capacity(truths.len());
    let mut calibrated = Vec::with_capacity(truths.len());
    for pool in &truths {
        let g = GroundTruth::new(pool.clone())?;
        let p = synthesize_prior_with(
            &g,
            target,
            spec.tolerance(),
            protocol(pool.len(), config),
            spec.prior_noise(),
            &mut rng,
        )?;
        calibrated.push(p.measured);
        priors.push(p.qualities);
    }
    Ok(Environment {
        id: env_id,
        target,
        drop_probs,
        failure_rule,
        truths,
        priors,
        calibrated,
    })
}

/// Draws `min(arm_count, pool)` arms per pose. Draws whose truth has no
/// positive arm or whose prior ranking is fully tied are redrawn.
pub fn draw_arm_set(
    config: &ExperimentConfig,
    env: &Environment,
    arm_set_id: usize,
) -> graspbandit_core::Result<ArmSet> {
    let mut rng = rng_for(
        config.master_seed,
        &["arm_set", &env.id.to_string(), &arm_set_id.to_string()],
    );
    let random = env.truths.iter().any(|t| t.len() > config.arm_count);
    let attempts = if random { GENERATION_ATTEMPTS } else { 1 };
    let mut last_err = Error::GenerationExhausted { attempts };
    for _ in 0..attempts {
        let arms: Vec<Vec<usize>> = env
            .truths
            .iter()
            .map(|pool| {
                let k = config.arm_count.min(pool.len());
                let mut picked = index::sample(&mut rng, pool.len(), k).into_vec();
                picked.sort_unstable();
                picked
            })
            .collect();
        match build_arm_set(env, arm_set_id, arms) {
            Ok(set) => return Ok(set),
            Err(e @ (Error::ParameterDomain(_) | Error::DegenerateRanking(_))) => last_err = e,
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

fn build_arm_set(
    env: &Environment,
    arm_set_id: usize,
    arms: Vec<Vec<usize>>,
) -> graspbandit_core::Result<ArmSet> {
    let pick = |values: &[f64], idx: &[usize]| idx.iter().map(|&i| values[i]).collect::<Vec<_>>();
    let mut truths = Vec::with_capacity(arms.len());
    let mut priors = Vec::with_capacity(arms.len());
    let mut mismatch = 0.0;
    for (pose, idx) in arms.iter().enumerate() {
        let t = pick(&env.truths[pose], idx);
        let p = pick(&env.priors[pose], idx);
        mismatch += env.drop_probs[pose] * kendall_tau(&p, &t)?.mismatch;
        truths.push(GroundTruth::new(t)?);
        priors.push(p);
    }
    let model = PoseModel::new(env.drop_probs.clone(), truths, env.failure_rule)?;
    Ok(ArmSet {
        env_id: env.id,
        id: arm_set_id,
        arms,
        model,
        priors,
        mismatch,
    })
}

/// Generates every environment and its arm sets in parallel. Failures skip
/// the whole environment and are logged.
pub fn generate_arm_sets(config: &ExperimentConfig) -> (Vec<ArmSet>, Vec<Skipped>) {
    let outcomes: Vec<_> = (0..config.environment.count())
        .into_par_iter()
        .map(|env_id| {
            let env = generate_environment(config, env_id)?;
            (0..config.arm_set_resamples)
                .map(|a| draw_arm_set(config, &env, a))
                .collect::<graspbandit_core::Result<Vec<_>>>()
        })
        .collect();
    let mut sets = Vec::new();
    let mut skipped = Vec::new();
    for (env_id, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(s) => sets.extend(s),
            Err(e) => {
                log::warn!("environment {env_id} skipped: {e}");
                skipped.push(Skipped {
                    env_id,
                    reason: e.to_string(),
                });
            }
        }
    }
    (sets, skipped)
}

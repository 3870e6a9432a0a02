use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::PoseModel;
use crate::bandit::{bernoulli, select_arm, BeliefState, PolicyKind, Reward};
use crate::error::{check_len, Error, Result};
use crate::scalar::{CompensatedSum, Scalar};

/// One grasp attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    /// Round number, starting at 1.
    pub t: u64,
    pub pose: usize,
    pub arm: usize,
    pub reward: Reward,
}

/// Record of one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub steps: Vec<Step>,
    /// Pose of the initial drop, which is the pose of round 1.
    pub initial_pose: usize,
    /// First round spent in each pose. The initial drop counts as round 1,
    /// even for an empty episode.
    pub first_hit: Vec<Option<u64>>,
    pub seed: Option<u64>,
}

impl Trajectory {
    pub fn hit_within(&self, pose: usize, rounds: u64) -> bool {
        self.first_hit[pose].is_some_and(|t| t <= rounds)
    }

    /// Number of rounds spent in each pose.
    pub fn pose_rounds(&self, pose_count: usize) -> Vec<u64> {
        let mut rounds = vec![0; pose_count];
        for s in &self.steps {
            rounds[s.pose] += 1;
        }
        rounds
    }

    pub fn total_reward(&self) -> u64 {
        self.steps.iter().map(|s| u64::from(s.reward.bit())).sum()
    }
}

/// Runs `horizon` bandit rounds on the pose model.
///
/// Each round reads the current pose, picks an arm from that pose's own
/// belief, samples the reward, updates only that pose's belief and moves to
/// the next pose. `beliefs` and `priors` are indexed by pose and must match
/// that pose's arm count; the beliefs are left in their learned state.
pub fn run_episode<F: Scalar, R: Rng + ?Sized>(
    model: &PoseModel<F>,
    kind: PolicyKind,
    beliefs: &mut [BeliefState<F>],
    priors: &[Vec<F>],
    horizon: u64,
    rng: &mut R,
) -> Result<Trajectory> {
    let l = model.pose_count();
    check_len(l, beliefs.len())?;
    check_len(l, priors.len())?;
    for (pose, truth) in model.truths().enumerate() {
        check_len(truth.arm_count(), beliefs[pose].arm_count())?;
        check_len(truth.arm_count(), priors[pose].len())?;
    }
    let mut pose = model.drop(rng);
    let mut first_hit = vec![None; l];
    first_hit[pose] = Some(1);
    let initial_pose = pose;
    let mut steps = Vec::with_capacity(horizon as usize);
    for t in 1..=horizon {
        if first_hit[pose].is_none() {
            first_hit[pose] = Some(t);
        }
        let truth = model.truth(pose);
        let arm = select_arm(kind, &beliefs[pose], &priors[pose], truth, rng)?;
        let reward = bernoulli(truth.probs()[arm], rng);
        beliefs[pose].update(arm, reward)?;
        steps.push(Step {
            t,
            pose,
            arm,
            reward,
        });
        pose = model.transition(pose, reward, rng)?;
    }
    Ok(Trajectory {
        steps,
        initial_pose,
        first_hit,
        seed: None,
    })
}

/// [`run_episode`] on a fresh generator seeded with `seed`, recorded in the
/// trajectory.
pub fn run_episode_seeded<F: Scalar>(
    model: &PoseModel<F>,
    kind: PolicyKind,
    beliefs: &mut [BeliefState<F>],
    priors: &[Vec<F>],
    horizon: u64,
    seed: u64,
) -> Result<Trajectory> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut traj = run_episode(model, kind, beliefs, priors, horizon, &mut rng)?;
    traj.seed = Some(seed);
    Ok(traj)
}

/// Success probability of a policy snapshot in one pose,
/// `sum_k pi(k | pose) p_k`.
pub fn pose_success_probability<F: Scalar>(
    model: &PoseModel<F>,
    snapshot: &[Vec<F>],
    pose: usize,
) -> Result<F> {
    let probs = model.truth(pose).probs();
    let row = &snapshot[pose];
    check_len(probs.len(), row.len())?;
    Ok(row
        .iter()
        .zip(probs)
        .map(|(&pi, &p)| pi * p)
        .collect::<CompensatedSum<F>>()
        .value())
}

/// Success probability of a stationary policy over every pose except
/// `excluded`, each pose weighted by its drop probability conditioned on not
/// landing in `excluded`:
/// `sum_{j != i} lambda_j / (1 - lambda_i) * sum_k pi(k | j) p^j_k`.
pub fn eta_for_pose<F: Scalar>(
    model: &PoseModel<F>,
    snapshot: &[Vec<F>],
    excluded: usize,
) -> Result<F> {
    let l = model.pose_count();
    if l < 2 {
        return Err(Error::Configuration(
            "the complement of a pose is empty for a single-pose model".into(),
        ));
    }
    check_len(l, snapshot.len())?;
    crate::error::check_index(excluded, l)?;
    let lambda = model.drop_probs();
    let complement = F::one() - lambda[excluded];
    if complement <= F::zero() {
        return Err(Error::UndefinedConditional { pose: excluded });
    }
    let mut acc = CompensatedSum::new();
    for j in (0..l).filter(|&j| j != excluded) {
        acc.add(lambda[j] / complement * pose_success_probability(model, snapshot, j)?);
    }
    Ok(acc.value().min(F::one()))
}

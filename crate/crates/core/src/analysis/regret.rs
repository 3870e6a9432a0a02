use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::pose::{PoseModel, Trajectory};
use crate::scalar::{CompensatedSum, Scalar};

/// Realised regret on one pose: `sum (p* - p_arm)` over the rounds spent in
/// `pose`. Zero when the pose was never visited.
pub fn per_pose_regret<F: Scalar>(trajectory: &Trajectory, model: &PoseModel<F>, pose: usize) -> F {
    let truth = model.truth(pose);
    let best = truth.best_prob();
    trajectory
        .steps
        .iter()
        .filter(|s| s.pose == pose)
        .map(|s| best - truth.probs()[s.arm])
        .collect::<CompensatedSum<F>>()
        .value()
}

/// Running total of the per-round gap `p*_pose - p_arm` after each step.
pub fn cumulative_regret<F: Scalar>(trajectory: &Trajectory, model: &PoseModel<F>) -> Vec<F> {
    let mut acc = CompensatedSum::new();
    trajectory
        .steps
        .iter()
        .map(|s| {
            let truth = model.truth(s.pose);
            acc.add(truth.best_prob() - truth.probs()[s.arm]);
            acc.value()
        })
        .collect()
}

/// Per-pose regrets combined with drop-probability weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretLedger<F> {
    pub per_pose_regret: Vec<F>,
    /// Rounds actually spent in each pose.
    pub pose_rounds: Vec<u64>,
    pub drop_probs: Vec<F>,
    /// `sum_l lambda_l * per_pose_regret[l]`.
    pub total: F,
}

impl<F: Scalar> RegretLedger<F> {
    pub fn total_rounds(&self) -> u64 {
        self.pose_rounds.iter().sum()
    }

    /// Ledger of a single trajectory.
    pub fn from_trajectory(trajectory: &Trajectory, model: &PoseModel<F>) -> Self {
        let l = model.pose_count();
        let regrets = (0..l)
            .map(|pose| per_pose_regret(trajectory, model, pose))
            .collect();
        weighted_regret(
            regrets,
            model.drop_probs().to_vec(),
            trajectory.pose_rounds(l),
        )
        .expect("lengths come from the same model")
    }
}

/// Weighted total `sum_l lambda_l R_l`.
pub fn weighted_regret<F: Scalar>(
    per_pose_regret: Vec<F>,
    drop_probs: Vec<F>,
    pose_rounds: Vec<u64>,
) -> Result<RegretLedger<F>> {
    check_len(per_pose_regret.len(), drop_probs.len())?;
    check_len(per_pose_regret.len(), pose_rounds.len())?;
    let total = per_pose_regret
        .iter()
        .zip(&drop_probs)
        .map(|(&r, &w)| r * w)
        .collect::<CompensatedSum<F>>()
        .value();
    Ok(RegretLedger {
        per_pose_regret,
        pose_rounds,
        drop_probs,
        total,
    })
}

/// Value of the weighted bound and the poses left out of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretBound<F> {
    pub value: F,
    /// Poses with positive drop probability but `T lambda_l <= 1`, where
    /// `ln(T lambda_l)` is not positive and the per-pose bound is vacuous.
    pub excluded: Vec<usize>,
}

/// `M sum_l lambda_l^(3/2) sqrt(K T ln(T lambda_l))`.
///
/// This substitutes `T_l = lambda_l T` into the per-pose Thompson-sampling
/// bound `lambda_l M sqrt(K T_l ln T_l)`; note the `sqrt(T)` factor.
pub fn regret_bound<F: Scalar>(
    drop_probs: &[F],
    arm_count: usize,
    horizon: u64,
    constant: F,
) -> Result<RegretBound<F>> {
    if arm_count == 0 {
        return Err(Error::EmptyArmSet);
    }
    if constant.is_nan() || constant <= F::zero() {
        return Err(Error::ParameterDomain(format!(
            "bound constant must be positive, got {constant}"
        )));
    }
    let k = F::of_count(arm_count as u64);
    let t = F::of_count(horizon);
    let mut excluded = Vec::new();
    let mut acc = CompensatedSum::new();
    for (l, &lambda) in drop_probs.iter().enumerate() {
        if lambda <= F::zero() {
            continue;
        }
        let rounds = t * lambda;
        if rounds <= F::one() {
            excluded.push(l);
            continue;
        }
        acc.add(lambda.powf(F::of(1.5)) * (k * t * rounds.ln()).sqrt());
    }
    Ok(RegretBound {
        value: constant * acc.value(),
        excluded,
    })
}

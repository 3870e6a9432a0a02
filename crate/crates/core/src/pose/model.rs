use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bandit::{GroundTruth, Reward};
use crate::error::{check_index, check_len, Error, Result};
use crate::scalar::{CompensatedSum, Scalar};

/// Tolerance on `sum(drop_probs) == 1`.
pub const DROP_SUM_TOLERANCE: f64 = 1e-12;

/// Where the object ends up after a failed grasp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureRule {
    /// The object stays in its current pose.
    #[default]
    Stay,
    /// The object is re-dropped into some other pose, sampled from the drop
    /// distribution restricted to the remaining poses. Needs two poses.
    RedropExcludingCurrent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pose<F> {
    pub truth: GroundTruth<F>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoseModel<F> {
    drop_probs: Vec<F>,
    poses: Vec<Pose<F>>,
    #[serde(default)]
    failure_rule: FailureRule,
}

/// Stable poses of one object: a drop distribution, an independent arm set
/// per pose and the rule applied after failed grasps. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoseModel<F>", bound(deserialize = "F: Scalar"))]
pub struct PoseModel<F> {
    drop_probs: Vec<F>,
    poses: Vec<Pose<F>>,
    failure_rule: FailureRule,
}

impl<F: Scalar> TryFrom<RawPoseModel<F>> for PoseModel<F> {
    type Error = Error;

    fn try_from(raw: RawPoseModel<F>) -> Result<Self> {
        PoseModel::new(
            raw.drop_probs,
            raw.poses.into_iter().map(|p| p.truth).collect(),
            raw.failure_rule,
        )
    }
}

impl<F: Scalar> PoseModel<F> {
    pub fn new(
        drop_probs: Vec<F>,
        truths: Vec<GroundTruth<F>>,
        failure_rule: FailureRule,
    ) -> Result<Self> {
        if drop_probs.is_empty() {
            return Err(Error::Configuration(
                "a pose model needs at least one pose".into(),
            ));
        }
        check_len(drop_probs.len(), truths.len())?;
        if drop_probs
            .iter()
            .any(|&p| !(p >= F::zero() && p.is_finite()))
        {
            return Err(Error::Configuration(
                "drop probabilities must be non-negative".into(),
            ));
        }
        let total: F = drop_probs
            .iter()
            .copied()
            .collect::<CompensatedSum<F>>()
            .value();
        if (total - F::one()).abs().to_f64_lossy() > DROP_SUM_TOLERANCE {
            return Err(Error::Configuration(format!(
                "drop probabilities sum to {total}, not 1"
            )));
        }
        if let Some(i) = truths
            .iter()
            .position(|t| t.probs().iter().all(|&p| p <= F::zero()))
        {
            return Err(Error::Configuration(format!(
                "pose {i} has no arm with positive quality"
            )));
        }
        if failure_rule == FailureRule::RedropExcludingCurrent && drop_probs.len() < 2 {
            return Err(Error::Configuration(
                "re-dropping into a different pose needs at least two poses".into(),
            ));
        }
        Ok(Self {
            drop_probs,
            poses: truths.into_iter().map(|truth| Pose { truth }).collect(),
            failure_rule,
        })
    }

    /// Single stable pose; every drop lands in it.
    pub fn single(truth: GroundTruth<F>) -> Result<Self> {
        Self::new(vec![F::one()], vec![truth], FailureRule::Stay)
    }

    pub fn pose_count(&self) -> usize {
        self.drop_probs.len()
    }

    pub fn drop_probs(&self) -> &[F] {
        &self.drop_probs
    }

    pub fn failure_rule(&self) -> FailureRule {
        self.failure_rule
    }

    pub fn truth(&self, pose: usize) -> &GroundTruth<F> {
        &self.poses[pose].truth
    }

    pub fn truths(&self) -> impl Iterator<Item = &GroundTruth<F>> {
        self.poses.iter().map(|p| &p.truth)
    }

    pub fn arm_counts(&self) -> Vec<usize> {
        self.truths().map(|t| t.arm_count()).collect()
    }

    /// Samples a pose from the drop distribution.
    pub fn drop<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_categorical(&self.drop_probs, None, rng)
    }

    /// Pose for the next round given this round's pose and outcome.
    pub fn transition<R: Rng + ?Sized>(
        &self,
        current: usize,
        reward: Reward,
        rng: &mut R,
    ) -> Result<usize> {
        check_index(current, self.pose_count())?;
        Ok(match (reward, self.failure_rule) {
            (Reward::Success, _) => self.drop(rng),
            (Reward::Failure, FailureRule::Stay) => current,
            (Reward::Failure, FailureRule::RedropExcludingCurrent) => {
                if self.drop_probs[current] >= F::one() {
                    return Err(Error::UndefinedConditional { pose: current });
                }
                sample_categorical(&self.drop_probs, Some(current), rng)
            }
        })
    }
}

/// Inverse-CDF draw from `weights`, optionally with one entry removed and the
/// rest renormalised.
fn sample_categorical<F: Scalar, R: Rng + ?Sized>(
    weights: &[F],
    exclude: Option<usize>,
    rng: &mut R,
) -> usize {
    let mass = match exclude {
        Some(i) => F::one() - weights[i],
        None => F::one(),
    };
    let u = F::open01(rng) * mass;
    let mut acc = F::zero();
    let mut last = None;
    for (i, &w) in weights.iter().enumerate() {
        if Some(i) == exclude || w <= F::zero() {
            continue;
        }
        acc = acc + w;
        last = Some(i);
        if u < acc {
            return i;
        }
    }
    // roundoff can leave u just above the accumulated mass
    last.expect("at least one pose with positive drop probability")
}

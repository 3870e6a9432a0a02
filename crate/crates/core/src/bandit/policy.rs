use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::belief::{BeliefState, GroundTruth};
use super::beta::beta_sample_unchecked;
use crate::error::{check_len, Error, Result};
use crate::scalar::{argmax_lowest, Scalar};

/// Arm-selection rule.
///
/// Both Thompson variants sample the belief they are handed; they differ only
/// in how the harness initialises that belief (seeded from the prior or
/// uniform).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    ThompsonSeeded,
    ThompsonUniform,
    Greedy,
    Oracle,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::ThompsonSeeded,
        PolicyKind::ThompsonUniform,
        PolicyKind::Greedy,
        PolicyKind::Oracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::ThompsonSeeded => "thompson_seeded",
            PolicyKind::ThompsonUniform => "thompson_uniform",
            PolicyKind::Greedy => "greedy",
            PolicyKind::Oracle => "oracle",
        }
    }

    pub fn is_thompson(self) -> bool {
        matches!(
            self,
            PolicyKind::ThompsonSeeded | PolicyKind::ThompsonUniform
        )
    }

    /// Greedy and Oracle never change their choice over time.
    pub fn is_stationary(self) -> bool {
        !self.is_thompson()
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::ParameterDomain(format!("unknown policy kind `{s}`")))
    }
}

fn check_inputs<F: Scalar>(
    belief: &BeliefState<F>,
    prior_q: &[F],
    truth: &GroundTruth<F>,
) -> Result<usize> {
    let k = belief.arm_count();
    if k == 0 {
        return Err(Error::EmptyArmSet);
    }
    check_len(k, prior_q.len())?;
    check_len(k, truth.arm_count())?;
    Ok(k)
}

/// Draws one Beta sample per arm and returns the argmax.
pub fn thompson_draw<F: Scalar, R: Rng + ?Sized>(belief: &BeliefState<F>, rng: &mut R) -> usize {
    let mut best = 0;
    let mut best_value = F::neg_infinity();
    for arm in 0..belief.arm_count() {
        let draw = beta_sample_unchecked(belief.alpha(arm), belief.beta(arm), rng);
        if draw > best_value {
            best = arm;
            best_value = draw;
        }
    }
    best
}

/// Picks an arm for the current round. Ties go to the lowest index.
pub fn select_arm<F: Scalar, R: Rng + ?Sized>(
    kind: PolicyKind,
    belief: &BeliefState<F>,
    prior_q: &[F],
    truth: &GroundTruth<F>,
    rng: &mut R,
) -> Result<usize> {
    check_inputs(belief, prior_q, truth)?;
    Ok(match kind {
        PolicyKind::ThompsonSeeded | PolicyKind::ThompsonUniform => thompson_draw(belief, rng),
        PolicyKind::Greedy => argmax_lowest(prior_q).expect("non-empty"),
        PolicyKind::Oracle => truth.best_arm(),
    })
}

/// Snapshot `pi(arm | belief)` of the policy as a probability vector.
///
/// Thompson variants are estimated by counting argmax frequencies over
/// `n_samples` independent draws; Greedy and Oracle are one-hot.
pub fn policy_action_distribution<F: Scalar, R: Rng + ?Sized>(
    kind: PolicyKind,
    belief: &BeliefState<F>,
    prior_q: &[F],
    truth: &GroundTruth<F>,
    n_samples: usize,
    rng: &mut R,
) -> Result<Vec<F>> {
    let k = check_inputs(belief, prior_q, truth)?;
    if n_samples == 0 {
        return Err(Error::ParameterDomain(
            "n_samples must be at least 1".into(),
        ));
    }
    let mut dist = vec![F::zero(); k];
    if kind.is_thompson() {
        let mut counts = vec![0u64; k];
        for _ in 0..n_samples {
            counts[thompson_draw(belief, rng)] += 1;
        }
        let n = F::of_count(n_samples as u64);
        for (p, c) in dist.iter_mut().zip(counts) {
            *p = F::of_count(c) / n;
        }
    } else {
        dist[select_arm(kind, belief, prior_q, truth, rng)?] = F::one();
    }
    Ok(dist)
}

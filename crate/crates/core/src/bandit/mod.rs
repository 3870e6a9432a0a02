//! Beta-Bernoulli posterior machinery and the four arm-selection policies.

mod belief;
mod beta;
mod policy;

pub use belief::{BeliefState, GroundTruth, Reward};
pub use beta::{beta_sample, ln_gamma_variate};
pub use policy::{policy_action_distribution, select_arm, thompson_draw, PolicyKind};

use rand::Rng;

use crate::scalar::Scalar;

/// Bernoulli draw with success probability `p`.
#[inline]
pub fn bernoulli<F: Scalar, R: Rng + ?Sized>(p: F, rng: &mut R) -> Reward {
    if F::open01(rng) < p {
        Reward::Success
    } else {
        Reward::Failure
    }
}

/// Functional posterior update; see [`BeliefState::update`].
pub fn posterior_update<F: Scalar>(
    belief: &BeliefState<F>,
    arm: usize,
    reward: Reward,
) -> crate::Result<BeliefState<F>> {
    belief.updated(arm, reward)
}

/// `alpha / (alpha + beta)` for one arm.
pub fn posterior_mean<F: Scalar>(belief: &BeliefState<F>, arm: usize) -> crate::Result<F> {
    belief.posterior_mean(arm)
}

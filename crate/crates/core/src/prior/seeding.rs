use serde::{Deserialize, Serialize};

use crate::bandit::BeliefState;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Qualities are clamped to `[QUALITY_CLAMP, 1 - QUALITY_CLAMP]` before
/// seeding so neither Beta shape can be zero.
pub const QUALITY_CLAMP: f64 = 1e-3;

/// Per-arm prior success estimates plus the prior strength `S`, the number of
/// pseudo-rounds the estimates are worth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorEstimate<F> {
    qualities: Vec<F>,
    strength: F,
}

impl<F: Scalar> PriorEstimate<F> {
    pub fn new(qualities: Vec<F>, strength: F) -> Result<Self> {
        if qualities.is_empty() {
            return Err(Error::EmptyArmSet);
        }
        if !(strength.is_finite() && strength > F::zero()) {
            return Err(Error::ParameterDomain(format!(
                "prior strength must be positive, got {strength}"
            )));
        }
        if let Some((k, q)) = qualities
            .iter()
            .enumerate()
            .find(|(_, q)| !(**q >= F::zero() && **q <= F::one()))
        {
            return Err(Error::ParameterDomain(format!(
                "arm {k}: prior quality {q} outside [0, 1]"
            )));
        }
        Ok(Self {
            qualities,
            strength,
        })
    }

    pub fn qualities(&self) -> &[F] {
        &self.qualities
    }

    pub fn strength(&self) -> F {
        self.strength
    }

    pub fn arm_count(&self) -> usize {
        self.qualities.len()
    }
}

/// Quality after the seeding clamp.
pub fn clamp_quality<F: Scalar>(q: F) -> F {
    let delta = F::of(QUALITY_CLAMP);
    q.max(delta).min(F::one() - delta)
}

/// Seeded prior `alpha0 = S Q`, `beta0 = S (1 - Q)` on the clamped quality,
/// so the prior mean is `Q` and the pseudo-count total is `S`.
pub fn seed_beliefs<F: Scalar>(prior: &PriorEstimate<F>) -> Result<BeliefState<F>> {
    let s = prior.strength;
    let (alphas, betas) = prior
        .qualities
        .iter()
        .map(|&q| {
            let q = clamp_quality(q);
            (s * q, s * (F::one() - q))
        })
        .unzip();
    BeliefState::new(alphas, betas)
}

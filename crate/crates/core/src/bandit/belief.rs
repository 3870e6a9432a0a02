use serde::{Deserialize, Serialize};

use crate::error::{check_index, check_len, Error, Result};
use crate::scalar::Scalar;

/// Binary grasp outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Reward {
    Failure,
    Success,
}

impl Reward {
    pub fn from_bit(bit: u8) -> Result<Self> {
        match bit {
            0 => Ok(Reward::Failure),
            1 => Ok(Reward::Success),
            other => Err(Error::ParameterDomain(format!(
                "reward must be 0 or 1, got {other}"
            ))),
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Reward::Failure => 0,
            Reward::Success => 1,
        }
    }

    pub fn is_success(self) -> bool {
        matches!(self, Reward::Success)
    }
}

/// Per-arm Beta posterior.
///
/// The prior shapes are kept apart from the integer outcome counts, so
/// `alpha(k) = prior_alpha[k] + successes[k]` holds exactly no matter how
/// many updates were applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefState<F> {
    prior_alphas: Vec<F>,
    prior_betas: Vec<F>,
    successes: Vec<u64>,
    failures: Vec<u64>,
}

impl<F: Scalar> BeliefState<F> {
    /// Belief from explicit prior shapes; every entry must be finite and positive.
    pub fn new(alphas: Vec<F>, betas: Vec<F>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::EmptyArmSet);
        }
        check_len(alphas.len(), betas.len())?;
        for (k, (&a, &b)) in alphas.iter().zip(&betas).enumerate() {
            if !(a.is_finite() && b.is_finite() && a > F::zero() && b > F::zero()) {
                return Err(Error::ParameterDomain(format!(
                    "arm {k}: Beta shapes must be positive, got ({a}, {b})"
                )));
            }
        }
        let arm_count = alphas.len();
        Ok(Self {
            prior_alphas: alphas,
            prior_betas: betas,
            successes: vec![0; arm_count],
            failures: vec![0; arm_count],
        })
    }

    /// `Beta(1, 1)` on every arm.
    pub fn uniform(arm_count: usize) -> Result<Self> {
        Self::new(vec![F::one(); arm_count], vec![F::one(); arm_count])
    }

    pub fn arm_count(&self) -> usize {
        self.prior_alphas.len()
    }

    #[inline]
    pub fn alpha(&self, arm: usize) -> F {
        self.prior_alphas[arm] + F::of_count(self.successes[arm])
    }

    #[inline]
    pub fn beta(&self, arm: usize) -> F {
        self.prior_betas[arm] + F::of_count(self.failures[arm])
    }

    pub fn alphas(&self) -> Vec<F> {
        (0..self.arm_count()).map(|k| self.alpha(k)).collect()
    }

    pub fn betas(&self) -> Vec<F> {
        (0..self.arm_count()).map(|k| self.beta(k)).collect()
    }

    pub fn prior_alphas(&self) -> &[F] {
        &self.prior_alphas
    }

    pub fn prior_betas(&self) -> &[F] {
        &self.prior_betas
    }

    pub fn successes(&self) -> &[u64] {
        &self.successes
    }

    pub fn failures(&self) -> &[u64] {
        &self.failures
    }

    /// Number of updates applied so far.
    pub fn observations(&self) -> u64 {
        self.successes.iter().chain(&self.failures).sum()
    }

    /// Conjugate update in place: `alpha += r`, `beta += 1 - r` on `arm` only.
    pub fn update(&mut self, arm: usize, reward: Reward) -> Result<()> {
        check_index(arm, self.arm_count())?;
        match reward {
            Reward::Success => self.successes[arm] += 1,
            Reward::Failure => self.failures[arm] += 1,
        }
        Ok(())
    }

    /// Functional form of [`BeliefState::update`].
    pub fn updated(&self, arm: usize, reward: Reward) -> Result<Self> {
        let mut next = self.clone();
        next.update(arm, reward)?;
        Ok(next)
    }

    /// Posterior expected success probability `alpha / (alpha + beta)`.
    pub fn posterior_mean(&self, arm: usize) -> Result<F> {
        check_index(arm, self.arm_count())?;
        let a = self.alpha(arm);
        Ok(a / (a + self.beta(arm)))
    }
}

/// Hidden per-arm Bernoulli parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroundTruth<F> {
    probs: Vec<F>,
}

impl<F: Scalar> GroundTruth<F> {
    pub fn new(probs: Vec<F>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyArmSet);
        }
        if let Some((k, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(**p >= F::zero() && **p <= F::one()))
        {
            return Err(Error::ParameterDomain(format!(
                "arm {k}: success probability {p} outside [0, 1]"
            )));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[F] {
        &self.probs
    }

    pub fn arm_count(&self) -> usize {
        self.probs.len()
    }

    pub fn best_arm(&self) -> usize {
        crate::scalar::argmax_lowest(&self.probs).expect("non-empty")
    }

    pub fn best_prob(&self) -> F {
        self.probs[self.best_arm()]
    }

    pub fn into_inner(self) -> Vec<F> {
        self.probs
    }
}

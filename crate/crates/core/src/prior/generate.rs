//! Synthetic ground-truth qualities standing in for simulated grasp labels.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bandit::{beta_sample, GroundTruth};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Attempts made before giving up on drawing a truth with a positive arm.
pub const GENERATION_ATTEMPTS: usize = 100;

fn default_spread() -> f64 {
    0.05
}

/// Shape of the synthetic quality distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum TruthSpec {
    /// Independent `Beta(a, b)` qualities.
    Beta { arm_count: usize, a: f64, b: f64 },
    /// `n_good` arms around `q_hi`, the rest around `q_lo`; each value is
    /// jittered uniformly by up to its spread and clamped to `[0, 1]`.
    /// Good arms sit at uniformly random positions.
    Sparse {
        arm_count: usize,
        n_good: usize,
        q_hi: f64,
        q_lo: f64,
        #[serde(default = "default_spread")]
        spread_hi: f64,
        #[serde(default = "default_spread")]
        spread_lo: f64,
    },
}

impl TruthSpec {
    pub fn arm_count(&self) -> usize {
        match *self {
            TruthSpec::Beta { arm_count, .. } | TruthSpec::Sparse { arm_count, .. } => arm_count,
        }
    }

    pub fn sparse(arm_count: usize, n_good: usize, q_hi: f64, q_lo: f64) -> Self {
        TruthSpec::Sparse {
            arm_count,
            n_good,
            q_hi,
            q_lo,
            spread_hi: default_spread(),
            spread_lo: default_spread(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::ParameterDomain(msg));
        if self.arm_count() == 0 {
            return Err(Error::EmptyArmSet);
        }
        match *self {
            TruthSpec::Beta { a, b, .. } => {
                if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                    return bad(format!("Beta family needs positive shapes, got ({a}, {b})"));
                }
            }
            TruthSpec::Sparse {
                arm_count,
                n_good,
                q_hi,
                q_lo,
                spread_hi,
                spread_lo,
            } => {
                if n_good > arm_count {
                    return bad(format!("n_good {n_good} exceeds arm count {arm_count}"));
                }
                for (name, v) in [("q_hi", q_hi), ("q_lo", q_lo)] {
                    if !(0.0..=1.0).contains(&v) {
                        return bad(format!("{name} = {v} outside [0, 1]"));
                    }
                }
                for (name, v) in [("spread_hi", spread_hi), ("spread_lo", spread_lo)] {
                    if !(v >= 0.0 && v.is_finite()) {
                        return bad(format!("{name} = {v} must be non-negative"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn jittered<F: Scalar, R: Rng + ?Sized>(center: f64, spread: f64, rng: &mut R) -> F {
    let u = F::open01(rng) * F::of(2.0) - F::one();
    (F::of(center) + F::of(spread) * u)
        .max(F::zero())
        .min(F::one())
}

fn draw_once<F: Scalar, R: Rng + ?Sized>(spec: &TruthSpec, rng: &mut R) -> Result<Vec<F>> {
    Ok(match *spec {
        TruthSpec::Beta { arm_count, a, b } => (0..arm_count)
            .map(|_| beta_sample(F::of(a), F::of(b), rng))
            .collect::<Result<_>>()?,
        TruthSpec::Sparse {
            arm_count,
            n_good,
            q_hi,
            q_lo,
            spread_hi,
            spread_lo,
        } => {
            let mut good = vec![false; arm_count];
            for i in index::sample(rng, arm_count, n_good).iter() {
                good[i] = true;
            }
            good.into_iter()
                .map(|g| {
                    if g {
                        jittered(q_hi, spread_hi, rng)
                    } else {
                        jittered(q_lo, spread_lo, rng)
                    }
                })
                .collect()
        }
    })
}

/// Draws a ground truth with at least one strictly positive arm, retrying up
/// to [`GENERATION_ATTEMPTS`] times.
pub fn generate_ground_truth<F: Scalar, R: Rng + ?Sized>(
    spec: &TruthSpec,
    rng: &mut R,
) -> Result<GroundTruth<F>> {
    spec.validate()?;
    for _ in 0..GENERATION_ATTEMPTS {
        let probs: Vec<F> = draw_once(spec, rng)?;
        if probs.iter().any(|&p| p > F::zero()) {
            return GroundTruth::new(probs);
        }
    }
    Err(Error::GenerationExhausted {
        attempts: GENERATION_ATTEMPTS,
    })
}

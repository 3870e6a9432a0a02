//! Probability of having seen a given stable pose within `T` rounds.
//!
//! The abstract chain: round 1 is a drop (pose `i` with probability
//! `lambda`). From any other pose, each round the grasp fails with
//! probability `1 - eta` and the pose is unchanged, or it succeeds and the
//! object is re-dropped, landing in pose `i` with probability `lambda`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Scalar};

/// Inputs of a coverage computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageQuery<F> {
    /// Drop probability of the pose of interest.
    pub lambda: F,
    /// Success probability of the policy over the other poses.
    pub eta: F,
    /// Number of rounds, at least 1.
    pub horizon: u64,
}

impl<F: Scalar> CoverageQuery<F> {
    pub fn new(lambda: F, eta: F, horizon: u64) -> Result<Self> {
        for (name, v) in [("lambda", lambda), ("eta", eta)] {
            if !(v >= F::zero() && v <= F::one()) {
                return Err(Error::ParameterDomain(format!(
                    "{name} = {v} outside [0, 1]"
                )));
            }
        }
        if horizon == 0 {
            return Err(Error::ParameterDomain("horizon must be at least 1".into()));
        }
        Ok(Self {
            lambda,
            eta,
            horizon,
        })
    }
}

/// `count * ln_base` with the convention `0 * ln 0 = 0` (that is, `0^0 = 1`).
#[inline]
fn scaled_ln<F: Scalar>(count: u64, ln_base: F) -> F {
    if count == 0 {
        F::zero()
    } else {
        F::of_count(count) * ln_base
    }
}

/// `ln 1, ln 2, ..., ln n` at indices `1..=n` (index 0 unused).
fn ln_table<F: Scalar>(n: u64) -> Vec<F> {
    (0..=n)
        .map(|i| {
            if i == 0 {
                F::zero()
            } else {
                F::of_count(i).ln()
            }
        })
        .collect()
}

/// Coverage `p_T` for every `T` in `1..=horizon`, from the binomial double
/// sum
///
/// `p_T = lambda [1 + sum_{k=2}^{T} sum_{j=2}^{k} C(k-2, j-2)
///        ((1 - lambda) eta)^(j-1) (1 - eta)^(k-j)]`.
///
/// Each inner term is built in log space; the binomial coefficient runs
/// through the recurrence `ln C(n, m+1) = ln C(n, m) + ln(n - m) - ln(m + 1)`,
/// so no factorial is ever formed. Terms are accumulated with compensation.
pub fn coverage_double_sum_curve<F: Scalar>(lambda: F, eta: F, horizon: u64) -> Result<Vec<F>> {
    CoverageQuery::new(lambda, eta, horizon)?;
    let ln_a = ((F::one() - lambda) * eta).ln();
    let ln_b = (F::one() - eta).ln();
    let ln_int = ln_table::<F>(horizon);
    let mut inner_total = CompensatedSum::new();
    let mut curve = Vec::with_capacity(horizon as usize);
    curve.push(lambda);
    for k in 2..=horizon {
        let n = k - 2;
        let mut ln_binom = F::zero();
        for m in 0..=n {
            // j = m + 2: exponents j - 1 = m + 1 and k - j = n - m
            let ln_term = ln_binom + scaled_ln(m + 1, ln_a) + scaled_ln(n - m, ln_b);
            inner_total.add(ln_term.exp());
            if m < n {
                ln_binom = ln_binom + ln_int[(n - m) as usize] - ln_int[(m + 1) as usize];
            }
        }
        let p = lambda * (F::one() + inner_total.value());
        curve.push(p.min(F::one()));
    }
    Ok(curve)
}

/// Coverage within `q.horizon` rounds from the binomial double sum.
pub fn coverage_double_sum<F: Scalar>(q: &CoverageQuery<F>) -> Result<F> {
    let curve = coverage_double_sum_curve(q.lambda, q.eta, q.horizon)?;
    Ok(*curve.last().expect("horizon >= 1"))
}

/// Natural log of the closed-form miss probability,
/// `ln[(1 - lambda) (1 - eta lambda)^(T - 1)]`.
pub fn ln_miss_closed_form<F: Scalar>(q: &CoverageQuery<F>) -> F {
    (-q.lambda).ln_1p() + scaled_ln(q.horizon - 1, (-(q.eta * q.lambda)).ln_1p())
}

/// Closed form `1 - (1 - lambda)(1 - eta lambda)^(T - 1)`.
///
/// The geometric collapse of the double sum: from outside pose `i` every
/// round hits with probability `eta lambda` independently.
pub fn coverage_closed_form<F: Scalar>(q: &CoverageQuery<F>) -> F {
    -ln_miss_closed_form(q).exp_m1()
}

/// Natural log of the probability of never seeing the pose in `T` rounds,
/// by enumerating the surviving case sequences: a miss on the drop, then
/// `T - 1` rounds of either a failed grasp (`1 - eta`) or a successful grasp
/// followed by a re-drop elsewhere (`eta (1 - lambda)`):
///
/// `(1 - lambda) sum_{m=0}^{T-1} C(T-1, m) (eta (1 - lambda))^m (1 - eta)^(T-1-m)`.
///
/// This is `1 - p_T` term by term without the cancellation of subtracting
/// from one, and is summed with log-sum-exp so it never underflows.
pub fn ln_miss_probability<F: Scalar>(epsilon: F, eta: F, horizon: u64) -> Result<F> {
    CoverageQuery::new(epsilon, eta, horizon)?;
    if epsilon == F::zero() {
        return Ok(F::zero());
    }
    let ln_keep = (-epsilon).ln_1p();
    let ln_a = (eta * (F::one() - epsilon)).ln();
    let ln_b = (-eta).ln_1p();
    let n = horizon - 1;
    let ln_int = ln_table::<F>(n);
    let mut ln_terms = Vec::with_capacity(n as usize + 1);
    let mut ln_binom = F::zero();
    for m in 0..=n {
        ln_terms.push(ln_binom + scaled_ln(m, ln_a) + scaled_ln(n - m, ln_b));
        if m < n {
            ln_binom = ln_binom + ln_int[(n - m) as usize] - ln_int[(m + 1) as usize];
        }
    }
    let peak = ln_terms
        .iter()
        .copied()
        .fold(F::neg_infinity(), |a, b| a.max(b));
    if peak == F::neg_infinity() || ln_keep == F::neg_infinity() {
        return Ok(F::neg_infinity());
    }
    let scaled: CompensatedSum<F> = ln_terms.iter().map(|&t| (t - peak).exp()).collect();
    Ok(ln_keep + peak + scaled.value().ln())
}

/// Probability that a pose with drop probability `epsilon` is never seen in
/// `horizon` rounds; equals `1 - coverage_double_sum`.
pub fn miss_probability<F: Scalar>(epsilon: F, eta: F, horizon: u64) -> Result<F> {
    Ok(ln_miss_probability(epsilon, eta, horizon)?.exp())
}

/// Monte-Carlo estimate with binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate<F> {
    pub mean: F,
    pub std_error: F,
    pub trials: u64,
}

impl<F: Scalar> Estimate<F> {
    pub fn from_hits(hits: u64, trials: u64) -> Self {
        let n = F::of_count(trials);
        let p = F::of_count(hits) / n;
        Self {
            mean: p,
            std_error: (p * (F::one() - p) / n).sqrt(),
            trials,
        }
    }

    /// Whether the estimate lies within `k` binomial standard errors of
    /// `target`, with the error computed at `target` so that estimates of
    /// probabilities next to 0 or 1 are not judged by a zero spread.
    pub fn agrees_with(&self, target: F, k: F) -> bool {
        let n = F::of_count(self.trials);
        let se = (target * (F::one() - target) / n).sqrt();
        (self.mean - target).abs() <= k * se
    }
}

/// Simulates the abstract chain round by round.
///
/// Round 1 hits with probability `lambda`. Every later round draws the grasp
/// outcome first; a failure (case 1) keeps the object out of the pose, a
/// success re-drops it, missing (case 2) or hitting (case 3) the pose.
pub fn coverage_monte_carlo<F: Scalar, R: Rng + ?Sized>(
    q: &CoverageQuery<F>,
    trials: u64,
    rng: &mut R,
) -> Result<Estimate<F>> {
    if trials == 0 {
        return Err(Error::ParameterDomain("trials must be at least 1".into()));
    }
    let mut hits = 0u64;
    for _ in 0..trials {
        if F::open01(rng) < q.lambda {
            hits += 1;
            continue;
        }
        for _ in 2..=q.horizon {
            let grasped = F::open01(rng) < q.eta;
            if grasped && F::open01(rng) < q.lambda {
                hits += 1;
                break;
            }
        }
    }
    Ok(Estimate::from_hits(hits, trials))
}

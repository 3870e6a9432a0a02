//! Priors with a prescribed rank mismatch against a known truth.
//!
//! The prior is the truth plus clamped Gaussian noise, `q_p = clamp(base + s z, 0, 1)`,
//! with one fixed standard-normal vector `z` and the scale `s` found by
//! bisection on the measured averaged mismatch.
//!
//! With the truth itself as `base` the mismatch rises from 0 towards the
//! mismatch of the pure-noise ranking, a random value near one half. With
//! the rank-reversed truth it falls from 1 towards that same value, which is
//! what puts targets near 1 at reversal plus a small jitter. The base whose
//! range at `s = SIGMA_MAX` covers the target is used (the truth when both
//! do and the target is at most one half); when neither does, `z` is redrawn.
//!
//! [`PriorNoise::RankMatched`] keeps the ranking of `base + s z` but fills
//! it with the truth's own values, so no prior quality sticks at 0 or 1.
//!
//! Measurements reuse the same arm subsets at every step, so the objective
//! is a deterministic function of `s`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::kendall::{averaged_mismatch, kendall_tau};
use crate::bandit::GroundTruth;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Upper end of the noise-scale search interval.
pub const SIGMA_MAX: f64 = 10.0;
/// Bisection steps before calibration is declared failed.
pub const BISECTION_STEPS: usize = 50;
/// Largest jitter applied to a tied truth before calibrating against it.
pub const TIE_JITTER: f64 = 1e-9;
/// Noise vectors tried before calibration is declared failed.
pub const NOISE_DRAWS: usize = 8;

/// How a candidate prior's mismatch is measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MismatchProtocol {
    /// Arms per subset; `None` measures the whole pool exactly.
    pub subset_size: Option<usize>,
    /// Number of subsets averaged (ignored for whole-pool measurement).
    pub n_sets: usize,
}

impl Default for MismatchProtocol {
    fn default() -> Self {
        Self {
            subset_size: None,
            n_sets: 10,
        }
    }
}

impl MismatchProtocol {
    pub fn subsets(subset_size: usize, n_sets: usize) -> Self {
        Self {
            subset_size: Some(subset_size),
            n_sets,
        }
    }

    /// Measured mismatch of `prior` against `truth` under this protocol.
    pub fn measure<F: Scalar, R: Rng + ?Sized>(
        &self,
        prior: &[F],
        truth: &[F],
        rng: &mut R,
    ) -> Result<F> {
        match self.subset_size {
            Some(k) if k < prior.len() => averaged_mismatch(prior, truth, k, self.n_sets, rng),
            _ => kendall_tau(prior, truth).map(|r| r.mismatch),
        }
    }
}

/// How candidate prior values are formed from the perturbed base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorNoise {
    /// `clamp(base + s z, 0, 1)`.
    #[default]
    Clamped,
    /// The truth's own values re-assigned in the order of `base + s z`, so
    /// the prior never saturates at 0 or 1 and has the truth's marginal.
    RankMatched,
}

/// A calibrated prior together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesizedPrior<F> {
    pub qualities: Vec<F>,
    /// Noise scale that was applied.
    pub sigma: F,
    /// Whether the noise was added to the rank-reversed truth.
    pub reversed: bool,
    /// Mismatch of `qualities` measured under the calibration protocol.
    pub measured: F,
}

/// `clamp(base + sigma * z, 0, 1)`.
pub fn perturb<F: Scalar>(base: &[F], noise: &[F], sigma: F) -> Vec<F> {
    base.iter()
        .zip(noise)
        .map(|(&b, &z)| (b + sigma * z).max(F::zero()).min(F::one()))
        .collect()
}

/// `values` (any order) re-assigned so that they are ranked like
/// `base + sigma * noise`. Exact ties in the perturbed vector keep index
/// order.
pub fn rank_matched<F: Scalar>(base: &[F], noise: &[F], sigma: F, values: &[F]) -> Vec<F> {
    let raw: Vec<F> = base
        .iter()
        .zip(noise)
        .map(|(&b, &z)| b + sigma * z)
        .collect();
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| raw[a].partial_cmp(&raw[b]).expect("no NaN"));
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let mut out = vec![F::zero(); raw.len()];
    for (rank, &arm) in order.iter().enumerate() {
        out[arm] = sorted[rank];
    }
    out
}

/// Truth plus clamped Gaussian noise of scale `sigma`, with fresh noise.
pub fn noisy_prior<F: Scalar, R: Rng + ?Sized>(truth: &[F], sigma: F, rng: &mut R) -> Vec<F> {
    let noise: Vec<F> = truth.iter().map(|_| F::std_normal(rng)).collect();
    perturb(truth, &noise, sigma)
}

/// Values of `truth` re-assigned so the ranking is exactly reversed.
pub fn rank_reversed<F: Scalar>(truth: &[F]) -> Vec<F> {
    let mut order: Vec<usize> = (0..truth.len()).collect();
    order.sort_by(|&a, &b| truth[a].partial_cmp(&truth[b]).expect("no NaN"));
    let mut out = vec![F::zero(); truth.len()];
    let n = truth.len();
    for (rank, &arm) in order.iter().enumerate() {
        out[arm] = truth[order[n - 1 - rank]];
    }
    out
}

fn has_ties<F: Scalar>(values: &[F]) -> bool {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    sorted.windows(2).any(|w| w[0] == w[1])
}

/// Finds a prior whose measured mismatch against `truth` is within
/// `tolerance` of `target`, using clamped noise.
pub fn synthesize_prior<F: Scalar, R: Rng + ?Sized>(
    truth: &GroundTruth<F>,
    target: F,
    tolerance: F,
    protocol: MismatchProtocol,
    rng: &mut R,
) -> Result<SynthesizedPrior<F>> {
    synthesize_prior_with(truth, target, tolerance, protocol, PriorNoise::Clamped, rng)
}

/// [`synthesize_prior`] with a choice of how prior values are formed.
pub fn synthesize_prior_with<F: Scalar, R: Rng + ?Sized>(
    truth: &GroundTruth<F>,
    target: F,
    tolerance: F,
    protocol: MismatchProtocol,
    shape: PriorNoise,
    rng: &mut R,
) -> Result<SynthesizedPrior<F>> {
    if !(target >= F::zero() && target <= F::one()) {
        return Err(Error::ParameterDomain(format!(
            "target mismatch {target} outside [0, 1]"
        )));
    }
    if tolerance.is_nan() || tolerance <= F::zero() {
        return Err(Error::ParameterDomain(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let q_g = truth.probs();
    if q_g.len() < 2 {
        return Err(Error::DegenerateRanking(
            "calibration needs at least two arms".into(),
        ));
    }
    let mut reference = q_g.to_vec();
    if has_ties(&reference) {
        let jitter = F::of(TIE_JITTER);
        for v in reference.iter_mut() {
            let u = F::open01(rng) * F::of(2.0) - F::one();
            *v = (*v + jitter * u).max(F::zero()).min(F::one());
        }
    }
    let forward = reference;
    let backward = rank_reversed(&forward);

    let mut closest: Option<F> = None;
    let mut note = |m: F| {
        if closest.is_none_or(|c| (m - target).abs() < (c - target).abs()) {
            closest = Some(m);
        }
    };
    for _ in 0..NOISE_DRAWS {
        let noise: Vec<F> = forward.iter().map(|_| F::std_normal(rng)).collect();
        let measure_seed: u64 = rng.random();
        // None when the candidate ranking is fully tied and cannot be measured
        let measure = |base: &[F], sigma: F| -> Result<Option<(Vec<F>, F)>> {
            let candidate = match shape {
                PriorNoise::Clamped => perturb(base, &noise, sigma),
                PriorNoise::RankMatched => rank_matched(base, &noise, sigma, &forward),
            };
            let mut subsets = ChaCha8Rng::seed_from_u64(measure_seed);
            match protocol.measure(&candidate, q_g, &mut subsets) {
                Ok(m) => Ok(Some((candidate, m))),
                Err(Error::DegenerateRanking(_)) => Ok(None),
                Err(e) => Err(e),
            }
        };
        let sigma_max = F::of(SIGMA_MAX);
        let reach_f = measure(&forward, sigma_max)?.map(|(_, m)| m);
        let reach_b = measure(&backward, sigma_max)?.map(|(_, m)| m);
        let fits_f = reach_f.is_some_and(|m| target <= m + tolerance);
        let fits_b = reach_b.is_some_and(|m| target >= m - tolerance);
        let reversed = match (fits_f, fits_b) {
            (true, true) => target > F::of(0.5),
            (true, false) => false,
            (false, true) => true,
            (false, false) => {
                reach_f.into_iter().chain(reach_b).for_each(&mut note);
                continue;
            }
        };
        let base = if reversed { &backward } else { &forward };

        let (mut lo, mut hi) = (F::zero(), sigma_max);
        let mut sigma = F::zero();
        for _ in 0..=BISECTION_STEPS {
            let too_little_noise = match measure(base, sigma)? {
                Some((qualities, m)) => {
                    if (m - target).abs() <= tolerance {
                        return Ok(SynthesizedPrior {
                            qualities,
                            sigma,
                            reversed,
                            measured: m,
                        });
                    }
                    note(m);
                    // mismatch moves away from the base ranking as sigma grows
                    if reversed {
                        m > target
                    } else {
                        m < target
                    }
                }
                // fully tied candidates only appear once the noise saturates the clamp
                None => false,
            };
            if too_little_noise {
                lo = sigma;
            } else {
                hi = sigma;
            }
            sigma = (lo + hi) / F::of(2.0);
        }
    }
    Err(Error::CalibrationFailed {
        target: target.to_f64_lossy(),
        closest: closest.map_or(f64::NAN, |c| c.to_f64_lossy()),
    })
}

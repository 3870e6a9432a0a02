use std::cmp::Ordering;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::scalar::{CompensatedSum, Scalar};

/// Pair counts and the derived rank agreement between a prior and the truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MismatchReport<F> {
    /// Kendall's tau-b in `[-1, 1]`.
    pub tau: F,
    /// `(1 - tau) / 2`: 0 for identical rankings, 1 for reversed ones.
    pub mismatch: F,
    pub concordant: u64,
    pub discordant: u64,
    /// Pairs tied in the prior only.
    pub ties_prior: u64,
    /// Pairs tied in the truth only.
    pub ties_truth: u64,
    /// Pairs tied in both; counted nowhere else.
    pub ties_joint: u64,
}

fn compare<F: Scalar>(a: F, b: F) -> Result<Ordering> {
    a.partial_cmp(&b)
        .ok_or_else(|| Error::ParameterDomain("quality vectors must not contain NaN".into()))
}

/// Kendall's tau-b by exhaustive enumeration of all `K (K - 1) / 2` pairs.
///
/// `tau = (Nc - Nd) / sqrt((Nc + Nd + Tp) (Nc + Nd + Tg))`. A ranking that is
/// tied on every pair makes a factor vanish and is reported as an error
/// rather than as `tau = 0`.
pub fn kendall_tau<F: Scalar>(prior: &[F], truth: &[F]) -> Result<MismatchReport<F>> {
    check_len(prior.len(), truth.len())?;
    let n = prior.len();
    let (mut nc, mut nd, mut tp, mut tg, mut tj) = (0u64, 0u64, 0u64, 0u64, 0u64);
    for i in 0..n {
        for j in (i + 1)..n {
            let a = compare(prior[i], prior[j])?;
            let b = compare(truth[i], truth[j])?;
            match (a, b) {
                (Ordering::Equal, Ordering::Equal) => tj += 1,
                (Ordering::Equal, _) => tp += 1,
                (_, Ordering::Equal) => tg += 1,
                _ if a == b => nc += 1,
                _ => nd += 1,
            }
        }
    }
    let left = nc + nd + tp;
    let right = nc + nd + tg;
    if left == 0 || right == 0 {
        return Err(Error::DegenerateRanking(format!(
            "{} ranking is fully tied over {n} arms",
            if left == 0 { "truth" } else { "prior" }
        )));
    }
    let numerator = F::of(nc as f64 - nd as f64);
    let denominator = (F::of(left as f64) * F::of(right as f64)).sqrt();
    // |tau| <= 1 analytically; clamp roundoff so the mismatch stays in [0, 1]
    let tau = (numerator / denominator).max(-F::one()).min(F::one());
    Ok(MismatchReport {
        tau,
        mismatch: (F::one() - tau) / F::of(2.0),
        concordant: nc,
        discordant: nd,
        ties_prior: tp,
        ties_truth: tg,
        ties_joint: tj,
    })
}

/// Outcome of averaging the mismatch over random arm subsets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragedMismatch<F> {
    pub mean: F,
    pub used_sets: usize,
    pub skipped_sets: usize,
}

/// Mean mismatch over `n_sets` random `subset_size`-arm subsets of two aligned
/// pools.
///
/// Arms are distinct within a subset; subsets are drawn independently and may
/// overlap. Subsets whose ranking is degenerate are skipped; if every subset
/// is skipped the degenerate-ranking error is returned.
pub fn averaged_mismatch_report<F: Scalar, R: Rng + ?Sized>(
    prior_pool: &[F],
    truth_pool: &[F],
    subset_size: usize,
    n_sets: usize,
    rng: &mut R,
) -> Result<AveragedMismatch<F>> {
    check_len(prior_pool.len(), truth_pool.len())?;
    if subset_size < 2 || subset_size > prior_pool.len() {
        return Err(Error::ParameterDomain(format!(
            "subset size {subset_size} must lie in [2, {}]",
            prior_pool.len()
        )));
    }
    if n_sets == 0 {
        return Err(Error::ParameterDomain("n_sets must be at least 1".into()));
    }
    let mut sum = CompensatedSum::new();
    let mut used = 0usize;
    let mut last_err = None;
    let mut sub_p = Vec::with_capacity(subset_size);
    let mut sub_g = Vec::with_capacity(subset_size);
    for _ in 0..n_sets {
        let picked = index::sample(rng, prior_pool.len(), subset_size);
        sub_p.clear();
        sub_g.clear();
        for i in picked.iter() {
            sub_p.push(prior_pool[i]);
            sub_g.push(truth_pool[i]);
        }
        match kendall_tau(&sub_p, &sub_g) {
            Ok(report) => {
                sum.add(report.mismatch);
                used += 1;
            }
            Err(e @ Error::DegenerateRanking(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    if used == 0 {
        return Err(last_err.expect("at least one set was drawn"));
    }
    Ok(AveragedMismatch {
        mean: sum.value() / F::of_count(used as u64),
        used_sets: used,
        skipped_sets: n_sets - used,
    })
}

/// Convenience wrapper returning only the mean of
/// [`averaged_mismatch_report`].
pub fn averaged_mismatch<F: Scalar, R: Rng + ?Sized>(
    prior_pool: &[F],
    truth_pool: &[F],
    subset_size: usize,
    n_sets: usize,
    rng: &mut R,
) -> Result<F> {
    averaged_mismatch_report(prior_pool, truth_pool, subset_size, n_sets, rng).map(|r| r.mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identical_and_reversed() {
        let r = kendall_tau(&[0.1, 0.5, 0.9], &[0.1, 0.5, 0.9]).unwrap();
        assert_eq!((r.tau, r.mismatch), (1.0, 0.0));
        let r = kendall_tau(&[0.1, 0.2, 0.3], &[0.3, 0.2, 0.1]).unwrap();
        assert_eq!((r.tau, r.mismatch), (-1.0, 1.0));
    }

    #[test]
    fn half_concordant_example() {
        // pairs (i<j): (0,1) c, (0,2) c, (0,3) c, (1,2) d, (1,3) d, (2,3) d
        let r = kendall_tau(&[0.1, 0.4, 0.3, 0.2], &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!((r.concordant, r.discordant), (3, 3));
        assert_eq!((r.tau, r.mismatch), (0.0, 0.5));
    }

    #[test]
    fn ties_are_split_by_side() {
        // pairs: (0,1) tied in prior only, (0,2) c, (1,2) c, (2,3) joint tie,
        // (0,3) c, (1,3) c
        let r = kendall_tau(&[0.1f64, 0.1, 0.5, 0.5], &[0.1, 0.2, 0.3, 0.3]).unwrap();
        assert_eq!(r.ties_prior, 1);
        assert_eq!(r.ties_truth, 0);
        assert_eq!(r.ties_joint, 1);
        assert_eq!(r.concordant, 4);
        let expected = 4.0 / (5.0f64 * 4.0).sqrt();
        assert!((r.tau - expected).abs() < 1e-15);
    }

    #[test]
    fn degenerate_and_shape_errors() {
        assert!(matches!(
            kendall_tau(&[0.5, 0.5, 0.5], &[0.1, 0.2, 0.3]),
            Err(Error::DegenerateRanking(_))
        ));
        assert!(matches!(
            kendall_tau(&[0.1, 0.2], &[0.1, 0.2, 0.3]),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(
            kendall_tau(&[0.1], &[0.2]),
            Err(Error::DegenerateRanking(_))
        ));
        assert!(kendall_tau(&[0.1, f64::NAN], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn full_pool_subsets_equal_plain_tau() {
        let p = [0.3f64, 0.1, 0.7, 0.2, 0.9, 0.4];
        let g = [0.2, 0.3, 0.8, 0.1, 0.6, 0.5];
        let direct = kendall_tau(&p, &g).unwrap().mismatch;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let avg = averaged_mismatch(&p, &g, p.len(), 10, &mut rng).unwrap();
        assert!((avg - direct).abs() < 1e-15);
    }

    #[test]
    fn reversed_pool_averages_to_one() {
        let truth: Vec<f64> = (0..200).map(|i| i as f64 / 200.0).collect();
        let prior: Vec<f64> = truth.iter().rev().copied().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            averaged_mismatch(&prior, &truth, 20, 10, &mut rng).unwrap(),
            1.0
        );
        assert_eq!(
            averaged_mismatch(&truth, &truth, 20, 10, &mut rng).unwrap(),
            0.0
        );
    }

    #[test]
    fn all_degenerate_sets_error() {
        let flat = [0.5; 10];
        let g: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(matches!(
            averaged_mismatch(&flat, &g, 4, 5, &mut rng),
            Err(Error::DegenerateRanking(_))
        ));
    }

    #[test]
    fn partially_degenerate_sets_are_skipped() {
        // ranking is only degenerate when the subset avoids arm 0
        let p = [0.9, 0.5, 0.5, 0.5];
        let g = [0.9, 0.1, 0.2, 0.3];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = averaged_mismatch_report(&p, &g, 3, 200, &mut rng).unwrap();
        assert!(r.skipped_sets > 0 && r.used_sets > 0);
        assert_eq!(r.used_sets + r.skipped_sets, 200);
    }
}

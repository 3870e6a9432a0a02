use graspbandit_core::bandit::{bernoulli, select_arm, BeliefState, GroundTruth};
use graspbandit_core::prior::{seed_beliefs, PriorEstimate};
use graspbandit_core::{PolicyKind, Reward};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_prior(rng: &mut ChaCha8Rng, k: usize) -> BeliefState<f64> {
    let q: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
    let s = [1.0, 5.0, 10.0, 50.0, 100.0][rng.random_range(0..5)];
    seed_beliefs(&PriorEstimate::new(q, s).unwrap()).unwrap()
}

fn thompson_trajectory(
    seed: u64,
    k: usize,
    steps: usize,
) -> (BeliefState<f64>, Vec<(usize, Reward)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut belief = random_prior(&mut rng, k);
    let truth = GroundTruth::new((0..k).map(|_| rng.random::<f64>()).collect()).unwrap();
    let prior_q = vec![0.5; k];
    let mut pulls = Vec::with_capacity(steps);
    for _ in 0..steps {
        let arm = select_arm(
            PolicyKind::ThompsonSeeded,
            &belief,
            &prior_q,
            &truth,
            &mut rng,
        )
        .unwrap();
        let r = bernoulli(truth.probs()[arm], &mut rng);
        belief.update(arm, r).unwrap();
        pulls.push((arm, r));
    }
    (belief, pulls)
}

#[test]
fn replay_accounting_over_ten_thousand_trajectories() {
    for seed in 0..10_000u64 {
        let k = 1 + (seed % 7) as usize;
        let steps = (seed % 41) as usize;
        let (belief, pulls) = thompson_trajectory(seed, k, steps);
        let mut succ = vec![0u64; k];
        let mut fail = vec![0u64; k];
        for &(arm, r) in &pulls {
            if r.is_success() {
                succ[arm] += 1;
            } else {
                fail[arm] += 1;
            }
        }
        assert_eq!(belief.successes(), &succ[..], "seed {seed}");
        assert_eq!(belief.failures(), &fail[..], "seed {seed}");
        assert_eq!(belief.observations(), steps as u64);
        for arm in 0..k {
            assert_eq!(
                belief.alpha(arm),
                belief.prior_alphas()[arm] + succ[arm] as f64
            );
            assert_eq!(
                belief.beta(arm),
                belief.prior_betas()[arm] + fail[arm] as f64
            );
        }
    }
}

proptest! {
    #[test]
    fn pseudo_counts_grow_by_one_per_update(
        bits in proptest::collection::vec((0usize..6, any::<bool>()), 0..200),
    ) {
        // integer-valued priors keep every partial sum exact
        let mut belief = BeliefState::new(vec![2.0; 6], vec![3.0; 6]).unwrap();
        let start: f64 = (0..6).map(|k| belief.alpha(k) + belief.beta(k)).sum();
        for (t, &(arm, win)) in bits.iter().enumerate() {
            let r = if win { Reward::Success } else { Reward::Failure };
            belief.update(arm, r).unwrap();
            let total: f64 = (0..6).map(|k| belief.alpha(k) + belief.beta(k)).sum();
            prop_assert_eq!(total, start + (t + 1) as f64);
        }
    }

    #[test]
    fn greedy_is_invariant_under_increasing_maps(
        q in proptest::collection::hash_set(0u32..1_000_000, 2..40),
        shift in -3.0f64..3.0,
        scale in 0.1f64..10.0,
    ) {
        let q: Vec<f64> = q.into_iter().map(|v| v as f64 / 1e6).collect();
        let k = q.len();
        let belief = BeliefState::uniform(k).unwrap();
        let truth = GroundTruth::new(vec![0.5; k]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let base = select_arm(PolicyKind::Greedy, &belief, &q, &truth, &mut rng).unwrap();
        // only the ordering of prior_q may matter, so feed a transformed copy
        // squeezed back into [0, 1]
        let mapped: Vec<f64> = q
            .iter()
            .map(|&v| 1.0 / (1.0 + (-(scale * v.powi(3) + shift)).exp()))
            .collect();
        let again = select_arm(PolicyKind::Greedy, &belief, &mapped, &truth, &mut rng).unwrap();
        prop_assert_eq!(base, again);
    }
}

#[test]
fn seeded_mean_recovers_clamped_quality() {
    let q: Vec<f64> = vec![0.0, 1e-4, 0.25, 0.5, 0.731, 0.9999, 1.0];
    for s in [1.0f64, 5.0, 10.0, 50.0, 100.0] {
        let belief = seed_beliefs(&PriorEstimate::new(q.clone(), s).unwrap()).unwrap();
        for (arm, &v) in q.iter().enumerate() {
            let clamped = v.clamp(1e-3, 1.0 - 1e-3);
            let mean = belief.posterior_mean(arm).unwrap();
            assert!(
                (mean - clamped).abs() <= 4.0 * f64::EPSILON,
                "S={s} q={v} mean={mean}"
            );
            assert!((belief.alpha(arm) + belief.beta(arm) - s).abs() <= 4.0 * f64::EPSILON * s);
        }
    }
}

#[test]
fn thompson_concentrates_on_the_better_arm() {
    let truth = GroundTruth::new(vec![0.9, 0.1]).unwrap();
    let prior_q = [0.5, 0.5];
    let mut late_best = 0u64;
    let mut late_total = 0u64;
    for seed in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let mut belief = BeliefState::uniform(2).unwrap();
        for t in 1..=2000 {
            let arm = select_arm(
                PolicyKind::ThompsonUniform,
                &belief,
                &prior_q,
                &truth,
                &mut rng,
            )
            .unwrap();
            belief
                .update(arm, bernoulli(truth.probs()[arm], &mut rng))
                .unwrap();
            if t >= 1500 {
                late_total += 1;
                late_best += u64::from(arm == 0);
            }
        }
    }
    let frac = late_best as f64 / late_total as f64;
    assert!(frac > 0.9, "fraction on arm 0: {frac}");
}

#[test]
fn identical_seeds_give_identical_arm_sequences() {
    let run = |seed| thompson_trajectory(seed, 5, 300).1;
    assert_eq!(run(77), run(77));
    assert_ne!(run(77), run(78));
}

#[test]
fn f32_beliefs_follow_the_same_accounting() {
    let mut belief = BeliefState::<f32>::new(vec![0.5, 2.0], vec![1.5, 1.0]).unwrap();
    belief.update(0, Reward::Success).unwrap();
    belief.update(0, Reward::Failure).unwrap();
    belief.update(1, Reward::Success).unwrap();
    assert_eq!(belief.alphas(), vec![1.5, 3.0]);
    assert_eq!(belief.betas(), vec![2.5, 1.0]);
}

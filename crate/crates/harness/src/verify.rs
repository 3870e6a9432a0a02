//! Formula-equivalence and oracle-agreement checks behind `verify`.

use graspbandit_core::analysis::{
    coverage_closed_form, coverage_double_sum_curve, coverage_monte_carlo, ln_miss_closed_form,
    ln_miss_probability, CoverageQuery,
};
use graspbandit_core::pose::run_episode;
use graspbandit_core::prior::kendall_tau;
use graspbandit_core::{BeliefState, FailureRule, GroundTruth, PolicyKind, PoseModel};
use rand::Rng;
use rayon::prelude::*;

use crate::seed::rng_for;

pub const GRID_LAMBDA: [f64; 7] = [0.01, 0.05, 0.1, 0.3, 0.5, 0.9, 0.99];
pub const GRID_ETA: [f64; 5] = [0.0, 0.1, 0.5, 0.9, 1.0];
pub const GRID_MAX_T: u64 = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Largest relative gap between the double sum and the closed form over the
/// `(lambda, eta, T)` grid.
pub fn formula_equivalence() -> Check {
    let mut worst = 0.0f64;
    for &lambda in &GRID_LAMBDA {
        for &eta in &GRID_ETA {
            let curve = coverage_double_sum_curve(lambda, eta, GRID_MAX_T).expect("valid grid");
            for (i, &p) in curve.iter().enumerate() {
                let q = CoverageQuery::new(lambda, eta, i as u64 + 1).expect("valid grid");
                worst = worst.max(relative_error(p, coverage_closed_form(&q)));
            }
        }
    }
    Check {
        name: "coverage double sum equals closed form",
        passed: worst <= 1e-9,
        detail: format!("max relative error {worst:.3e}"),
    }
}

/// The miss probability against `(1 - e)(1 - eta e)^(T - 1)`, compared in
/// log space so deep tails keep full relative precision.
pub fn miss_identity() -> Check {
    let mut worst = 0.0f64;
    for &eps in &GRID_LAMBDA {
        for &eta in &GRID_ETA {
            for t in 1..=GRID_MAX_T {
                let q = CoverageQuery::new(eps, eta, t).expect("valid grid");
                let ln_a = ln_miss_probability(eps, eta, t).expect("valid grid");
                let ln_b = ln_miss_closed_form(&q);
                worst = worst.max((ln_a - ln_b).abs().exp_m1());
            }
        }
    }
    Check {
        name: "miss probability identity",
        passed: worst <= 1e-9,
        detail: format!("max relative error {worst:.3e}"),
    }
}

/// Grid points used for the Monte-Carlo comparison.
pub fn monte_carlo_points() -> Vec<(f64, f64, u64)> {
    let lambdas = [0.05, 0.1, 0.3, 0.5, 0.9];
    let etas = [0.1, 0.5, 0.9, 1.0];
    let horizons = [3, 10, 30, 100];
    let mut points = Vec::new();
    for (i, &lambda) in lambdas.iter().enumerate() {
        for (j, &eta) in etas.iter().enumerate() {
            points.push((lambda, eta, horizons[(i + j) % horizons.len()]));
        }
    }
    points
}

/// Two-state chain simulation against the closed form; passes when at most
/// one point falls outside three standard errors.
pub fn monte_carlo_agreement(trials: u64, seed: u64) -> Check {
    let points = monte_carlo_points();
    let agree = points
        .par_iter()
        .enumerate()
        .filter(|(i, &(lambda, eta, t))| {
            let q = CoverageQuery::new(lambda, eta, t).expect("valid point");
            let mut rng = rng_for(seed, &["verify", "monte_carlo", &i.to_string()]);
            let est = coverage_monte_carlo(&q, trials, &mut rng).expect("trials > 0");
            est.agrees_with(coverage_closed_form(&q), 3.0)
        })
        .count();
    Check {
        name: "Monte Carlo agrees with closed form",
        passed: agree + 1 >= points.len(),
        detail: format!("{agree}/{} points within 3 SE", points.len()),
    }
}

/// Hit-by-T frequencies of full episodes on a three-pose model whose every
/// pose succeeds with probability `eta`, against the closed form.
pub fn simulator_consistency(episodes: u64, seed: u64) -> Check {
    let drop = [0.5, 0.3, 0.2];
    let eta = 0.6;
    let horizons = [1u64, 5, 20];
    let model = PoseModel::new(
        drop.to_vec(),
        drop.iter()
            .map(|_| GroundTruth::new(vec![eta]).expect("valid"))
            .collect(),
        FailureRule::Stay,
    )
    .expect("valid model");
    let hits = hit_counts(&model, &horizons, episodes, seed);
    let mut failures = Vec::new();
    for (pose, &lambda) in drop.iter().enumerate() {
        for (h, &t) in horizons.iter().enumerate() {
            let p = coverage_closed_form(&CoverageQuery::new(lambda, eta, t).expect("valid"));
            let freq = hits[pose][h] as f64 / episodes as f64;
            let se = (p * (1.0 - p) / episodes as f64).sqrt();
            if (freq - p).abs() > 3.0 * se {
                failures.push(format!("pose {pose} T={t}: {freq:.5} vs {p:.5}"));
            }
        }
    }
    Check {
        name: "episode hit frequencies match closed form",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("9 cells within 3 SE over {episodes} episodes")
        } else {
            failures.join("; ")
        },
    }
}

/// `counts[pose][h]` = episodes that saw `pose` within `horizons[h]` rounds.
pub fn hit_counts(model: &PoseModel, horizons: &[u64], episodes: u64, seed: u64) -> Vec<Vec<u64>> {
    let l = model.pose_count();
    let max_t = horizons.iter().copied().max().unwrap_or(0);
    let priors: Vec<Vec<f64>> = model
        .arm_counts()
        .into_iter()
        .map(|k| vec![0.5; k])
        .collect();
    let chunks = 64u64;
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng_for(seed, &["verify", "episodes", &c.to_string()]);
            let mut counts = vec![vec![0u64; horizons.len()]; l];
            let n = episodes / chunks + u64::from(c < episodes % chunks);
            for _ in 0..n {
                let mut beliefs: Vec<BeliefState> = model
                    .arm_counts()
                    .into_iter()
                    .map(|k| BeliefState::uniform(k).expect("k > 0"))
                    .collect();
                let traj = run_episode(
                    model,
                    PolicyKind::Oracle,
                    &mut beliefs,
                    &priors,
                    max_t,
                    &mut rng,
                )
                .expect("consistent shapes");
                for (pose, row) in counts.iter_mut().enumerate() {
                    for (h, &t) in horizons.iter().enumerate() {
                        row[h] += u64::from(traj.hit_within(pose, t));
                    }
                }
            }
            counts
        })
        .reduce(
            || vec![vec![0u64; horizons.len()]; l],
            |mut a, b| {
                for (ra, rb) in a.iter_mut().zip(b) {
                    for (x, y) in ra.iter_mut().zip(rb) {
                        *x += y;
                    }
                }
                a
            },
        )
}

fn brute_force_tau(p: &[f64], g: &[f64]) -> f64 {
    let n = p.len();
    let (mut s, mut tp, mut tg) = (0i64, 0i64, 0i64);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let a = (p[i] - p[j]).partial_cmp(&0.0).unwrap() as i64;
            let b = (g[i] - g[j]).partial_cmp(&0.0).unwrap() as i64;
            s += a * b;
            tp += a * a;
            tg += b * b;
        }
    }
    s as f64 / ((tp as f64) * (tg as f64)).sqrt()
}

/// Kendall tau against an independent sign-product evaluation on random,
/// partly tied vectors.
pub fn kendall_agreement(cases: usize, seed: u64) -> Check {
    let mut rng = rng_for(seed, &["verify", "kendall"]);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let k = rng.random_range(2..=60);
        let levels = rng.random_range(2..=12) as f64;
        let mut draw = |_| (rng.random::<f64>() * levels).floor() / levels;
        let p: Vec<f64> = (0..k).map(&mut draw).collect();
        let g: Vec<f64> = (0..k).map(&mut draw).collect();
        let (Ok(r), expected) = (kendall_tau(&p, &g), brute_force_tau(&p, &g)) else {
            continue;
        };
        worst = worst.max((r.tau - expected).abs());
    }
    Check {
        name: "Kendall tau matches sign-product evaluation",
        passed: worst <= 1e-12,
        detail: format!("max abs difference {worst:.3e} over {cases} cases"),
    }
}

/// All checks at their full sizes.
pub fn run_all(seed: u64) -> Vec<Check> {
    vec![
        formula_equivalence(),
        miss_identity(),
        monte_carlo_agreement(200_000, seed),
        simulator_consistency(100_000, seed),
        kendall_agreement(200, seed),
    ]
}

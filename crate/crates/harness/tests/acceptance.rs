//! End-to-end acceptance checks. Each check prints one PASS or FAIL line;
//! the process exits non-zero if any check fails.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use graspbandit_core::analysis::{
    coverage_closed_form, coverage_double_sum_curve, coverage_monte_carlo, cumulative_regret,
    miss_probability,
};
use graspbandit_core::bandit::{bernoulli, select_arm};
use graspbandit_core::pose::{run_episode, run_episode_seeded};
use graspbandit_core::prior::{
    generate_ground_truth, kendall_tau, rank_reversed, seed_beliefs, synthesize_prior_with,
    MismatchProtocol, PriorEstimate, PriorNoise, TruthSpec,
};
use graspbandit_core::{
    BeliefState, CoverageQuery, FailureRule, GroundTruth, PolicyKind, PoseModel,
};
use graspbandit_harness::{run_experiment, ExperimentConfig, RunRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};
use tempfile::TempDir;

type Check = Box<dyn FnOnce() -> Outcome>;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn query(lambda: f64, eta: f64, t: u64) -> CoverageQuery {
    CoverageQuery::new(lambda, eta, t).unwrap()
}

const LAMBDAS: [f64; 7] = [0.01, 0.05, 0.1, 0.3, 0.5, 0.9, 0.99];
const ETAS: [f64; 5] = [0.0, 0.1, 0.5, 0.9, 1.0];

fn formula_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for &lambda in &LAMBDAS {
        for &eta in &ETAS {
            let curve = coverage_double_sum_curve(lambda, eta, 200).unwrap();
            for (i, &p) in curve.iter().enumerate() {
                let closed = coverage_closed_form(&query(lambda, eta, i as u64 + 1));
                worst = worst.max((p - closed).abs() / closed);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-9 && secs < 10.0,
        format!("max relative error {worst:.2e} over 7000 points in {secs:.2} s"),
    )
}

fn miss_identity() -> Outcome {
    let mut worst = 0.0f64;
    for &eps in &LAMBDAS {
        for &eta in &ETAS {
            for t in 1..=200u64 {
                let got = miss_probability(eps, eta, t).unwrap();
                let want = (1.0 - eps) * (1.0 - eta * eps).powi(t as i32 - 1);
                worst = worst.max((got - want).abs() / want);
            }
        }
    }
    outcome(worst <= 1e-9, format!("max relative error {worst:.2e}"))
}

fn monte_carlo_agreement() -> Outcome {
    let start = Instant::now();
    let points: Vec<(f64, f64, u64)> = [0.02, 0.1, 0.25, 0.6, 0.95]
        .iter()
        .flat_map(|&l| {
            [(0.2, 50u64), (0.5, 8), (0.8, 20), (1.0, 4)]
                .into_iter()
                .map(move |(e, t)| (l, e, t))
        })
        .collect();
    let trials = 200_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let mut inside = 0;
    let mut misses = Vec::new();
    for &(lambda, eta, t) in &points {
        let target = coverage_closed_form(&query(lambda, eta, t));
        let est = coverage_monte_carlo(&query(lambda, eta, t), trials, &mut rng).unwrap();
        let se = (target * (1.0 - target) / trials as f64).sqrt();
        if (est.mean - target).abs() <= 3.0 * se {
            inside += 1;
        } else {
            misses.push(format!("({lambda}, {eta}, {t})"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        inside >= 19 && secs < 30.0,
        format!(
            "{inside}/20 within 3 SE in {secs:.2} s {}",
            misses.join(" ")
        ),
    )
}

fn simulator_consistency() -> Outcome {
    let lambda = [0.5, 0.3, 0.2];
    let eta = 0.6;
    let horizons = [1u64, 5, 20];
    let model = PoseModel::new(
        lambda.to_vec(),
        (0..3)
            .map(|_| GroundTruth::new(vec![eta]).unwrap())
            .collect(),
        FailureRule::Stay,
    )
    .unwrap();
    let episodes = 100_000u64;
    let mut hits = [[0u64; 3]; 3];
    let mut rng = ChaCha8Rng::seed_from_u64(0x51);
    let priors = vec![vec![0.5]; 3];
    for _ in 0..episodes {
        let mut beliefs: Vec<BeliefState> =
            (0..3).map(|_| BeliefState::uniform(1).unwrap()).collect();
        let traj = run_episode(
            &model,
            PolicyKind::Oracle,
            &mut beliefs,
            &priors,
            20,
            &mut rng,
        )
        .unwrap();
        for (pose, row) in hits.iter_mut().enumerate() {
            for (h, &t) in horizons.iter().enumerate() {
                row[h] += u64::from(traj.hit_within(pose, t));
            }
        }
    }
    let mut worst_z = 0.0f64;
    for pose in 0..3 {
        for (h, &t) in horizons.iter().enumerate() {
            let p = coverage_closed_form(&query(lambda[pose], eta, t));
            let freq = hits[pose][h] as f64 / episodes as f64;
            let se = (p * (1.0 - p) / episodes as f64).sqrt();
            worst_z = worst_z.max((freq - p).abs() / se);
        }
    }
    outcome(
        worst_z <= 3.0,
        format!("largest deviation {worst_z:.2} SE over 9 cells"),
    )
}

fn posterior_correctness() -> Outcome {
    let mut broken = 0usize;
    for seed in 0..10_000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(1..=8);
        let steps = rng.random_range(0..=60);
        let q: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
        let truth = GroundTruth::new((0..k).map(|_| rng.random::<f64>()).collect()).unwrap();
        let mut belief = seed_beliefs(&PriorEstimate::new(q.clone(), 10.0).unwrap()).unwrap();
        let (mut s, mut f) = (vec![0u64; k], vec![0u64; k]);
        for _ in 0..steps {
            let arm =
                select_arm(PolicyKind::ThompsonSeeded, &belief, &q, &truth, &mut rng).unwrap();
            let r = bernoulli(truth.probs()[arm], &mut rng);
            belief.update(arm, r).unwrap();
            if r.is_success() {
                s[arm] += 1;
            } else {
                f[arm] += 1;
            }
        }
        let replay = belief.successes() == &s[..] && belief.failures() == &f[..];
        let conserved = belief.observations() == steps
            && (0..k).all(|a| {
                belief.alpha(a) == belief.prior_alphas()[a] + s[a] as f64
                    && belief.beta(a) == belief.prior_betas()[a] + f[a] as f64
            });
        broken += usize::from(!(replay && conserved));
    }
    outcome(
        broken == 0,
        format!("{broken} of 10000 trajectories violate accounting"),
    )
}

fn mismatch_metric() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6);
    let mut mismatched = 0;
    for case in 0..200 {
        let k = if case < 5 {
            500
        } else {
            rng.random_range(2..=500)
        };
        let grid = case % 4 == 0;
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..k)
                .map(|_| {
                    if grid {
                        rng.random_range(0..8) as f64 / 8.0
                    } else {
                        rng.random()
                    }
                })
                .collect()
        };
        let p = draw(&mut rng);
        let g = draw(&mut rng);
        let (mut s, mut tp, mut tg) = (0i64, 0u64, 0u64);
        for i in 0..k {
            for j in (i + 1)..k {
                let a = p[i].partial_cmp(&p[j]).unwrap() as i64;
                let b = g[i].partial_cmp(&g[j]).unwrap() as i64;
                s += a * b;
                tp += u64::from(a == 0);
                tg += u64::from(b == 0);
            }
        }
        let n0 = (k * (k - 1) / 2) as u64;
        let brute = s as f64 / ((n0 - tp) as f64 * (n0 - tg) as f64).sqrt();
        let ok = match kendall_tau(&p, &g) {
            Ok(r) => r.tau == brute.clamp(-1.0, 1.0),
            Err(_) => brute.is_nan(),
        };
        mismatched += usize::from(!ok);
    }
    let mut exact = true;
    for _ in 0..50 {
        let k = rng.random_range(2..=300);
        let q: Vec<f64> = (0..k)
            .map(|i| i as f64 + rng.random::<f64>() * 0.5)
            .collect();
        exact &= kendall_tau(&q, &q).unwrap().mismatch == 0.0;
        exact &= kendall_tau(&rank_reversed(&q), &q).unwrap().mismatch == 1.0;
    }
    outcome(
        mismatched == 0 && exact,
        format!("{mismatched}/200 pairs differ from pair counting; self/reversed exact: {exact}"),
    )
}

fn scores(records: &[RunRecord], policy: &str, keep: impl Fn(f64) -> bool) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.policy == policy && keep(r.mismatch))
        .map(|r| r.scaled_sum)
        .collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)
}

/// One-sided Welch test of `mean(a) > mean(b)`.
fn welch_p(a: &[f64], b: &[f64]) -> f64 {
    let (va, vb) = (variance(a) / a.len() as f64, variance(b) / b.len() as f64);
    let t = (mean(a) - mean(b)) / (va + vb).sqrt();
    let df =
        (va + vb).powi(2) / (va * va / (a.len() as f64 - 1.0) + vb * vb / (b.len() as f64 - 1.0));
    StudentsT::new(0.0, 1.0, df).unwrap().sf(t)
}

fn policy_ordering(records: &[RunRecord]) -> Outcome {
    let high = |m: f64| m >= 0.4;
    let chain = ["oracle", "thompson_seeded_s5", "thompson_uniform", "greedy"];
    let groups: Vec<Vec<f64>> = chain.iter().map(|p| scores(records, p, high)).collect();
    let mut ok = groups.iter().all(|g| g.len() >= 2);
    let mut parts = Vec::new();
    for w in 0..3 {
        let gap = mean(&groups[w]) - mean(&groups[w + 1]);
        let p = welch_p(&groups[w], &groups[w + 1]);
        ok &= gap >= 2.0 && p < 0.01;
        parts.push(format!(
            "{}-{} gap {gap:.2} p {p:.1e}",
            chain[w],
            chain[w + 1]
        ));
    }
    let low = |m: f64| m <= 0.25;
    let greedy = mean(&scores(records, "greedy", low));
    let oracle = mean(&scores(records, "oracle", low));
    ok &= (oracle - greedy).abs() <= 5.0;
    parts.push(format!(
        "low-mismatch greedy {greedy:.2} vs oracle {oracle:.2}"
    ));
    outcome(
        ok,
        format!("high n={}; {}", groups[0].len(), parts.join("; ")),
    )
}

/// Jonckheere-Terpstra test for a decreasing trend across ordered groups,
/// normal approximation without tie correction.
fn decreasing_trend_p(groups: &[Vec<f64>]) -> f64 {
    let mut j = 0.0;
    for a in 0..groups.len() {
        for b in (a + 1)..groups.len() {
            for &x in &groups[a] {
                for &y in &groups[b] {
                    j += if x > y {
                        1.0
                    } else if x == y {
                        0.5
                    } else {
                        0.0
                    };
                }
            }
        }
    }
    let n: f64 = groups.iter().map(|g| g.len() as f64).sum();
    let sq: f64 = groups.iter().map(|g| (g.len() as f64).powi(2)).sum();
    let cube: f64 = groups
        .iter()
        .map(|g| (g.len() as f64).powi(2) * (2.0 * g.len() as f64 + 3.0))
        .sum();
    let mu = (n * n - sq) / 4.0;
    let var = (n * n * (2.0 * n + 3.0) - cube) / 72.0;
    Normal::standard().sf((j - mu) / var.sqrt())
}

fn strength_trend(records: &[RunRecord]) -> Outcome {
    let labels = [
        "thompson_seeded_s5",
        "thompson_seeded_s10",
        "thompson_seeded_s50",
        "thompson_seeded_s100",
    ];
    let groups: Vec<Vec<f64>> = labels
        .iter()
        .map(|p| scores(records, p, |m| m >= 0.4))
        .collect();
    let means: Vec<f64> = groups.iter().map(|g| mean(g)).collect();
    let monotone = means.windows(2).all(|w| w[1] <= w[0]);
    let p = decreasing_trend_p(&groups);
    outcome(
        monotone && p < 0.01,
        format!("means {means:.2?}, trend p {p:.1e}"),
    )
}

fn regret_sublinearity() -> Outcome {
    let k = 20usize;
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e);
    let truth: GroundTruth =
        generate_ground_truth(&TruthSpec::sparse(k, 3, 0.85, 0.15), &mut rng).unwrap();
    let prior = synthesize_prior_with(
        &truth,
        0.3,
        0.01,
        MismatchProtocol::default(),
        PriorNoise::RankMatched,
        &mut rng,
    )
    .unwrap()
    .qualities;
    let model = PoseModel::single(truth).unwrap();
    let horizon = 2000usize;
    let seeds = 50;
    let mut total = vec![0.0; horizon];
    for seed in 0..seeds {
        let mut beliefs =
            vec![seed_beliefs(&PriorEstimate::new(prior.clone(), 5.0).unwrap()).unwrap()];
        let traj = run_episode_seeded(
            &model,
            PolicyKind::ThompsonSeeded,
            &mut beliefs,
            std::slice::from_ref(&prior),
            horizon as u64,
            1000 + seed,
        )
        .unwrap();
        for (acc, r) in total.iter_mut().zip(cumulative_regret(&traj, &model)) {
            *acc += r;
        }
    }
    let r = |t: usize| total[t - 1] / seeds as f64;
    let ratios: Vec<f64> = [250, 500, 1000].iter().map(|&t| r(2 * t) / r(t)).collect();
    let scale = |t: f64| (k as f64 * t * t.ln()).sqrt();
    let c = r(500) / scale(500.0);
    let bound = 1.25 * c * scale(2000.0);
    outcome(
        ratios.iter().all(|&x| x < 1.9) && r(2000) <= bound,
        format!(
            "R(2T)/R(T) {ratios:.3?}; R(2000) {:.2} vs 1.25 c bound {bound:.2} (c {c:.4})",
            r(2000)
        ),
    )
}

const REPRO_CONFIG: &str = r#"{
  "horizon": 150,
  "eval_samples": 40,
  "runs_per_arm_set": 3,
  "arm_set_resamples": 2,
  "environment": {
    "type": "synthetic",
    "count": 8,
    "truth": {"family": "sparse", "arm_count": 40, "n_good": 4, "q_hi": 0.85, "q_lo": 0.15},
    "mismatch_targets": [0.2, 0.45]
  }
}"#;

fn simulate(config: &Path, out: &Path, threads: &str) -> bool {
    Command::new(env!("CARGO_BIN_EXE_graspbandit"))
        .args(["--threads", threads, "simulate"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .arg("--force")
        .output()
        .is_ok_and(|o| o.status.success())
}

fn reproducibility() -> Outcome {
    let tmp = TempDir::new().unwrap();
    let config = tmp.path().join("config.json");
    fs::write(&config, REPRO_CONFIG).unwrap();
    let (serial, parallel) = (tmp.path().join("serial"), tmp.path().join("parallel"));
    if !simulate(&config, &serial, "1") || !simulate(&config, &parallel, "8") {
        return outcome(false, "simulate failed".into());
    }
    let mut differing = Vec::new();
    for name in ["records.csv", "curves.csv", "summary.csv"] {
        let a = fs::read(serial.join(name)).unwrap_or_default();
        let b = fs::read(parallel.join(name)).unwrap_or_default();
        if a.is_empty() || a != b {
            differing.push(name);
        }
    }
    outcome(
        differing.is_empty(),
        if differing.is_empty() {
            "records, curves and summary identical for 1 and 8 threads".into()
        } else {
            format!("differ: {}", differing.join(", "))
        },
    )
}

fn main() {
    let mut checks: Vec<(&str, Check)> = vec![
        ("formula equivalence", Box::new(formula_equivalence)),
        ("miss-probability identity", Box::new(miss_identity)),
        ("Monte-Carlo agreement", Box::new(monte_carlo_agreement)),
        (
            "full-simulator consistency",
            Box::new(simulator_consistency),
        ),
        ("posterior correctness", Box::new(posterior_correctness)),
        ("mismatch metric", Box::new(mismatch_metric)),
    ];
    let suite = std::rc::Rc::new(std::cell::OnceCell::new());
    let default_records = {
        let suite = suite.clone();
        move || -> Vec<RunRecord> {
            suite
                .get_or_init(|| {
                    run_experiment(&ExperimentConfig::default())
                        .unwrap()
                        .records
                })
                .clone()
        }
    };
    let first = default_records.clone();
    checks.push((
        "policy ordering",
        Box::new(move || policy_ordering(&first())),
    ));
    checks.push((
        "prior-strength trend",
        Box::new(move || strength_trend(&default_records())),
    ));
    checks.push(("regret sublinearity", Box::new(regret_sublinearity)));
    checks.push(("reproducibility", Box::new(reproducibility)));

    let mut failed = 0;
    for (i, (name, check)) in checks.into_iter().enumerate() {
        let start = Instant::now();
        let o = check();
        failed += usize::from(!o.passed);
        println!(
            "{} {:>2} {name}: {} [{:.1} s]",
            if o.passed { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use graspbandit_core::analysis::{
    coverage_closed_form, coverage_double_sum, coverage_monte_carlo, CoverageQuery,
};
use graspbandit_core::prior::{averaged_mismatch_report, kendall_tau};
use graspbandit_harness::output::{prepare_output_dir, read_quality_pair, write_results};
use graspbandit_harness::seed::rng_for;
use graspbandit_harness::{
    aggregate, run_experiment, sweep_policies, verify, ExperimentConfig, HarnessError, Result,
    SummaryTable,
};

#[derive(Parser)]
#[command(
    name = "graspbandit",
    version,
    about = "Prior-seeded Thompson sampling grasp exploration experiments"
)]
struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a full experiment described by a JSON config.
    Simulate {
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Pose-coverage probabilities; comma-separated values form a grid.
    Coverage {
        #[arg(long, value_delimiter = ',', required = true)]
        lambda: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        eta: Vec<f64>,
        #[arg(long = "T", value_delimiter = ',', required = true)]
        horizon: Vec<u64>,
        /// Monte-Carlo trials per point; 0 leaves those columns empty.
        #[arg(long, default_value_t = 0)]
        mc_trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Prior mismatch between two quality CSVs (`arm_id,q_prior,q_truth`).
    Mismatch {
        #[arg(long)]
        prior: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        /// Average over random subsets of this many arms.
        #[arg(long)]
        subset_size: Option<usize>,
        #[arg(long, default_value_t = 10)]
        sets: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-run a config once per prior strength of the seeded policy.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "5,10,50,100")]
        strengths: Vec<f64>,
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Formula-equivalence and oracle-agreement checks.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(clap::Args)]
struct OutputArgs {
    /// Results directory; without --force a timestamped subdirectory is created.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Write straight into --out, overwriting existing files.
    #[arg(long)]
    force: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
    {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate { config, out } => {
            let config = ExperimentConfig::load(&config)?;
            simulate(&config, &out)
        }
        Command::Sweep {
            strengths,
            config,
            out,
        } => {
            let mut config = ExperimentConfig::load(&config)?;
            config.policies = sweep_policies(&config.policies, &strengths);
            config.validate()?;
            simulate(&config, &out)
        }
        Command::Coverage {
            lambda,
            eta,
            horizon,
            mc_trials,
            seed,
        } => coverage(&lambda, &eta, &horizon, mc_trials, seed),
        Command::Mismatch {
            prior,
            truth,
            subset_size,
            sets,
            seed,
        } => mismatch(&prior, &truth, subset_size, sets, seed),
        Command::Verify { seed } => {
            let checks = verify::run_all(seed);
            for c in &checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("{tag} {}: {}", c.name, c.detail);
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(HarnessError::Verification(format!(
                    "{failed} of {} checks failed",
                    checks.len()
                )));
            }
            Ok(())
        }
    }
}

fn simulate(config: &ExperimentConfig, out: &OutputArgs) -> Result<()> {
    let exp = run_experiment(config)?;
    let table = aggregate(&exp.records)?;
    let dir = prepare_output_dir(&out.out, out.force)?;
    write_results(&dir, config, &exp, &table)?;
    print_table(&table);
    if !exp.skipped.is_empty() {
        eprintln!(
            "{} environment(s) skipped; see manifest.json",
            exp.skipped.len()
        );
    }
    eprintln!("results written to {}", dir.display());
    Ok(())
}

fn print_table(table: &SummaryTable) {
    println!("{:<24} {:>8} {:>8} {:>6}", "policy", "mean", "std", "runs");
    for p in &table.policies {
        let s = &p.overall;
        println!(
            "{:<24} {:>8.2} {:>8.2} {:>6}",
            p.policy, s.mean, s.std_dev, s.count
        );
    }
}

fn coverage(lambdas: &[f64], etas: &[f64], horizons: &[u64], trials: u64, seed: u64) -> Result<()> {
    println!("lambda,eta,T,p_double_sum,p_closed_form,p_monte_carlo,mc_stderr");
    for &lambda in lambdas {
        for &eta in etas {
            for &t in horizons {
                let q = CoverageQuery::new(lambda, eta, t)
                    .map_err(|e| HarnessError::Config(e.to_string()))?;
                let (mc, se) = if trials > 0 {
                    let mut rng = rng_for(
                        seed,
                        &[
                            "coverage",
                            &lambda.to_string(),
                            &eta.to_string(),
                            &t.to_string(),
                        ],
                    );
                    let est = coverage_monte_carlo(&q, trials, &mut rng)?;
                    (est.mean.to_string(), est.std_error.to_string())
                } else {
                    (String::new(), String::new())
                };
                println!(
                    "{lambda},{eta},{t},{},{},{mc},{se}",
                    coverage_double_sum(&q)?,
                    coverage_closed_form(&q)
                );
            }
        }
    }
    Ok(())
}

fn mismatch(
    prior: &Path,
    truth: &Path,
    subset_size: Option<usize>,
    sets: usize,
    seed: u64,
) -> Result<()> {
    let (p, g) = read_quality_pair(prior, truth)?;
    let config_err = |e: graspbandit_core::Error| HarnessError::Config(e.to_string());
    let r = kendall_tau(&p, &g).map_err(config_err)?;
    let mut header =
        "tau,mismatch,concordant,discordant,ties_prior,ties_truth,ties_joint".to_string();
    let mut row = format!(
        "{},{},{},{},{},{},{}",
        r.tau, r.mismatch, r.concordant, r.discordant, r.ties_prior, r.ties_truth, r.ties_joint
    );
    if let Some(k) = subset_size {
        let mut rng = rng_for(seed, &["mismatch"]);
        let avg = averaged_mismatch_report(&p, &g, k, sets, &mut rng).map_err(config_err)?;
        header.push_str(",averaged_mismatch,used_sets,skipped_sets");
        row.push_str(&format!(
            ",{},{},{}",
            avg.mean, avg.used_sets, avg.skipped_sets
        ));
    }
    println!("{header}\n{row}");
    Ok(())
}

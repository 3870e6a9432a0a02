//! Result files and quality CSVs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::aggregate::SummaryTable;
use crate::config::ExperimentConfig;
use crate::environment::Skipped;
use crate::error::{HarnessError, Result};
use crate::experiment::Experiment;

pub const RECORDS_HEADER: [&str; 6] = [
    "policy",
    "env_id",
    "arm_set_id",
    "run_id",
    "mismatch",
    "scaled_sum",
];
pub const CURVES_HEADER: [&str; 6] = [
    "policy",
    "env_id",
    "arm_set_id",
    "run_id",
    "eval_step",
    "mean_reward",
];
pub const SUMMARY_HEADER: [&str; 8] = [
    "policy",
    "scope",
    "bin_lo",
    "bin_hi",
    "count",
    "mean",
    "std_dev",
    "std_defined",
];
pub const QUALITY_HEADER: [&str; 3] = ["arm_id", "q_prior", "q_truth"];

/// Directory the results go to. With `force` it is `base` itself, created if
/// needed and overwritten file by file; otherwise a fresh timestamped
/// subdirectory of `base`.
pub fn prepare_output_dir(base: &Path, force: bool) -> Result<PathBuf> {
    if force {
        fs::create_dir_all(base).map_err(|e| HarnessError::io(base, e))?;
        return Ok(base.to_path_buf());
    }
    fs::create_dir_all(base).map_err(|e| HarnessError::io(base, e))?;
    let stamp = chrono::Utc::now()
        .format("run-%Y%m%dT%H%M%S%.3fZ")
        .to_string();
    let mut dir = base.join(&stamp);
    let mut n = 1;
    loop {
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                dir = base.join(format!("{stamp}-{n}"));
                n += 1;
            }
            Err(e) => return Err(HarnessError::io(dir, e)),
        }
    }
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(HarnessError::from)
}

pub fn write_records(path: &Path, exp: &Experiment) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(RECORDS_HEADER)?;
    for r in &exp.records {
        w.write_record([
            r.policy.clone(),
            r.env_id.to_string(),
            r.arm_set_id.to_string(),
            r.run_id.to_string(),
            r.mismatch.to_string(),
            r.scaled_sum.to_string(),
        ])?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn write_curves(path: &Path, exp: &Experiment, eval_every: u64) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(CURVES_HEADER)?;
    for r in &exp.records {
        for (i, v) in r.curve.iter().enumerate() {
            w.write_record([
                r.policy.clone(),
                r.env_id.to_string(),
                r.arm_set_id.to_string(),
                r.run_id.to_string(),
                (i as u64 * eval_every).to_string(),
                v.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// One `overall` row per policy followed by one `bin` row per non-empty bin.
pub fn write_summary(path: &Path, table: &SummaryTable) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for p in &table.policies {
        let s = &p.overall;
        w.write_record([
            p.policy.clone(),
            "overall".into(),
            String::new(),
            String::new(),
            s.count.to_string(),
            s.mean.to_string(),
            s.std_dev.to_string(),
            s.std_defined.to_string(),
        ])?;
        for b in &p.bins {
            let s = &b.stats;
            w.write_record([
                p.policy.clone(),
                "bin".into(),
                b.lo.to_string(),
                b.hi.to_string(),
                s.count.to_string(),
                s.mean.to_string(),
                s.std_dev.to_string(),
                s.std_defined.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    master_seed: u64,
    records: usize,
    skipped_environments: &'a [Skipped],
    config: &'a ExperimentConfig,
}

pub fn write_manifest(path: &Path, config: &ExperimentConfig, exp: &Experiment) -> Result<()> {
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        master_seed: config.master_seed,
        records: exp.records.len(),
        skipped_environments: &exp.skipped,
        config,
    };
    let text = serde_json::to_string_pretty(&manifest)?;
    fs::write(path, text + "\n").map_err(|e| HarnessError::io(path, e))
}

/// Writes `records.csv`, `curves.csv`, `summary.csv` and `manifest.json`.
pub fn write_results(
    dir: &Path,
    config: &ExperimentConfig,
    exp: &Experiment,
    table: &SummaryTable,
) -> Result<()> {
    write_records(&dir.join("records.csv"), exp)?;
    write_curves(&dir.join("curves.csv"), exp, config.eval_every)?;
    write_summary(&dir.join("summary.csv"), table)?;
    write_manifest(&dir.join("manifest.json"), config, exp)
}

/// Reads one quality column (`q_prior` or `q_truth`) keyed by `arm_id`,
/// sorted by arm id. Other columns are ignored, so one file holding both
/// columns can serve as prior and truth.
pub fn read_quality_column(path: &Path, column: &str) -> Result<Vec<(u64, f64)>> {
    let bad = |msg: String| HarnessError::Config(format!("{}: {msg}", path.display()));
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| bad(format!("missing `{name}` column")))
    };
    let (id_col, q_col) = (find("arm_id")?, find(column)?);
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("").trim();
        let id: u64 = field(id_col)
            .parse()
            .map_err(|_| bad(format!("row {}: bad arm_id `{}`", line + 1, field(id_col))))?;
        let q: f64 = field(q_col)
            .parse()
            .map_err(|_| bad(format!("row {}: bad {column} `{}`", line + 1, field(q_col))))?;
        if !(0.0..=1.0).contains(&q) {
            return Err(bad(format!(
                "row {}: {column} {q} outside [0, 1]",
                line + 1
            )));
        }
        rows.push((id, q));
    }
    rows.sort_by_key(|&(id, _)| id);
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(bad(format!("arm_id {} appears twice", w[0].0)));
    }
    Ok(rows)
}

/// Prior and truth vectors aligned by arm id.
pub fn read_quality_pair(prior: &Path, truth: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let p = read_quality_column(prior, "q_prior")?;
    let g = read_quality_column(truth, "q_truth")?;
    let ids = |v: &[(u64, f64)]| v.iter().map(|r| r.0).collect::<Vec<_>>();
    if ids(&p) != ids(&g) {
        return Err(HarnessError::Config(
            "prior and truth files cover different arm ids".into(),
        ));
    }
    Ok((
        p.into_iter().map(|r| r.1).collect(),
        g.into_iter().map(|r| r.1).collect(),
    ))
}

pub fn write_qualities(path: &Path, prior: &[f64], truth: &[f64]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(QUALITY_HEADER)?;
    for (i, (p, g)) in prior.iter().zip(truth).enumerate() {
        w.write_record([i.to_string(), p.to_string(), g.to_string()])?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quality_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.csv");
        write_qualities(&path, &[0.1, 0.9, 0.5], &[0.2, 0.8, 0.4]).unwrap();
        let (p, g) = read_quality_pair(&path, &path).unwrap();
        assert_eq!(p, vec![0.1, 0.9, 0.5]);
        assert_eq!(g, vec![0.2, 0.8, 0.4]);
    }

    #[test]
    fn quality_files_join_on_arm_id() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        fs::write(&a, "arm_id,q_prior\n2,0.3\n0,0.1\n1,0.2\n").unwrap();
        fs::write(&b, "q_truth,arm_id\n0.9,1\n0.8,0\n0.7,2\n").unwrap();
        let (p, g) = read_quality_pair(&a, &b).unwrap();
        assert_eq!(p, vec![0.1, 0.2, 0.3]);
        assert_eq!(g, vec![0.8, 0.9, 0.7]);
        fs::write(&b, "arm_id,q_truth\n0,0.8\n1,0.9\n").unwrap();
        assert!(read_quality_pair(&a, &b).is_err());
        fs::write(&b, "arm_id,q_truth\n0,0.8\n1,1.9\n2,0.1\n").unwrap();
        assert!(read_quality_pair(&a, &b).is_err());
    }

    #[test]
    fn output_dirs() {
        let dir = tempfile::tempdir().unwrap();
        let forced = prepare_output_dir(dir.path(), true).unwrap();
        assert_eq!(forced, dir.path());
        let a = prepare_output_dir(dir.path(), false).unwrap();
        let b = prepare_output_dir(dir.path(), false).unwrap();
        assert_ne!(a, b);
        assert!(a.starts_with(dir.path()) && a.is_dir() && b.is_dir());
    }
}

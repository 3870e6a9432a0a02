//! Per-policy summaries, overall and by mismatch bin.

use graspbandit_core::stats::Summary;
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::experiment::RunRecord;

/// Width of a mismatch bin.
pub const BIN_WIDTH: f64 = 0.05;
const BIN_COUNT: usize = 20;

/// Index of the bin holding `mismatch`; `M = 1` joins the last bin.
pub fn bin_index(mismatch: f64) -> usize {
    ((mismatch * BIN_COUNT as f64).floor().max(0.0) as usize).min(BIN_COUNT - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinSummary {
    pub lo: f64,
    pub hi: f64,
    pub stats: Summary<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicySummary {
    pub policy: String,
    pub overall: Summary<f64>,
    /// Non-empty bins in increasing order.
    pub bins: Vec<BinSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryTable {
    /// Policies in the order they first appear in the records.
    pub policies: Vec<PolicySummary>,
}

impl SummaryTable {
    pub fn policy(&self, label: &str) -> Option<&PolicySummary> {
        self.policies.iter().find(|p| p.policy == label)
    }
}

/// Mean and sample standard deviation of `scaled_sum` per policy and per
/// policy-and-bin.
pub fn aggregate(records: &[RunRecord]) -> Result<SummaryTable> {
    if records.is_empty() {
        return Err(HarnessError::EmptyAggregation);
    }
    let mut order: Vec<&str> = Vec::new();
    for r in records {
        if !order.contains(&r.policy.as_str()) {
            order.push(&r.policy);
        }
    }
    let policies = order
        .into_iter()
        .map(|label| {
            let mine: Vec<&RunRecord> = records.iter().filter(|r| r.policy == label).collect();
            let all: Vec<f64> = mine.iter().map(|r| r.scaled_sum).collect();
            let mut bins: Vec<Vec<f64>> = vec![Vec::new(); BIN_COUNT];
            for r in &mine {
                bins[bin_index(r.mismatch)].push(r.scaled_sum);
            }
            PolicySummary {
                policy: label.to_string(),
                overall: Summary::of(&all).expect("policy has records"),
                bins: bins
                    .iter()
                    .enumerate()
                    .filter_map(|(b, values)| {
                        Summary::of(values).map(|stats| BinSummary {
                            lo: b as f64 / BIN_COUNT as f64,
                            hi: (b + 1) as f64 / BIN_COUNT as f64,
                            stats,
                        })
                    })
                    .collect(),
            }
        })
        .collect();
    Ok(SummaryTable { policies })
}

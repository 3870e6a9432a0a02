//! Sample summaries used by the analysis and the experiment harness.

use serde::{Deserialize, Serialize};

use crate::scalar::{CompensatedSum, Scalar};

/// Mean and sample standard deviation (`n - 1` denominator).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary<F> {
    pub count: usize,
    pub mean: F,
    /// Zero when fewer than two samples; see `std_defined`.
    pub std_dev: F,
    pub std_defined: bool,
}

impl<F: Scalar> Summary<F> {
    pub fn of(values: &[F]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = F::of_count(values.len() as u64);
        let mean = values
            .iter()
            .copied()
            .collect::<CompensatedSum<F>>()
            .value()
            / n;
        let (std_dev, std_defined) = if values.len() < 2 {
            (F::zero(), false)
        } else {
            let ss = values
                .iter()
                .map(|&v| (v - mean) * (v - mean))
                .collect::<CompensatedSum<F>>()
                .value();
            ((ss / (n - F::one())).sqrt(), true)
        };
        Some(Self {
            count: values.len(),
            mean,
            std_dev,
            std_defined,
        })
    }

    pub fn std_error(&self) -> F {
        self.std_dev / F::of_count(self.count as u64).sqrt()
    }
}

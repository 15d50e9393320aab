use serde::{Deserialize, Serialize};

use crate::models::{InputRange, ModelArch};
use crate::{Error, Result};

use super::trial::{median_epochs_to_success, run_batch, success_count, TrialSpec};

/// An architecture paired with the input encoding it is trained on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelSetup {
    pub arch: ModelArch,
    pub range: InputRange,
}

impl ModelSetup {
    pub fn new(arch: ModelArch, range: InputRange) -> Self {
        ModelSetup { arch, range }
    }

    /// The architecture on its usual encoding.
    pub fn standard(arch: ModelArch) -> Self {
        ModelSetup::new(arch, arch.default_range())
    }

    /// The three models of the main comparison.
    pub fn main_three() -> [ModelSetup; 3] {
        [ModelArch::PRELU, ModelArch::GcuNeuron, ModelArch::MlpTanh].map(ModelSetup::standard)
    }

    /// The main three plus the PReLU neuron with a bias.
    pub fn all_four() -> [ModelSetup; 4] {
        ModelArch::ALL.map(ModelSetup::standard)
    }

    /// `prelu`, or `prelu@01` when trained off its usual encoding.
    pub fn label(&self) -> String {
        if self.range == self.arch.default_range() {
            self.arch.to_string()
        } else {
            format!("{}@{}", self.arch, self.range)
        }
    }

    pub fn trial(&self, base: &TrialSpec, lr: f64) -> TrialSpec {
        let mut spec = *base;
        spec.arch = self.arch;
        spec.range = self.range;
        spec.adam.lr = lr;
        spec
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub setup: ModelSetup,
    pub lr: f64,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub median_epochs_to_success: Option<f64>,
}

/// 25 log-spaced learning rates from 1e-4 to 2.
pub fn default_lr_grid() -> Vec<f64> {
    log_grid(1e-4, 2.0, 25)
}

pub(crate) fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

/// Success rate of every setup at every learning rate. Each cell reuses the
/// same `n_trials` initial streams of `base_seed`.
pub fn sweep_learning_rates(
    setups: &[ModelSetup],
    lr_grid: &[f64],
    n_trials: usize,
    base_seed: u64,
    base: &TrialSpec,
) -> Result<Vec<SweepRow>> {
    if lr_grid.is_empty() {
        return Err(Error::InvalidConfig("empty learning-rate grid".into()));
    }
    if lr_grid.iter().any(|lr| !(lr.is_finite() && *lr > 0.0))
        || lr_grid.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::InvalidConfig(
            "learning rates must be positive and strictly increasing".into(),
        ));
    }
    let mut rows = Vec::with_capacity(setups.len() * lr_grid.len());
    for setup in setups {
        for &lr in lr_grid {
            let results = run_batch(&setup.trial(base, lr), n_trials, base_seed)?;
            let successes = success_count(&results);
            rows.push(SweepRow {
                setup: *setup,
                lr,
                trials: n_trials,
                successes,
                success_rate: successes as f64 / n_trials as f64,
                median_epochs_to_success: median_epochs_to_success(&results),
            });
        }
    }
    Ok(rows)
}

/// Longest run of consecutive entries equal to 1.0, as inclusive indices.
/// Ties go to the earliest run.
pub fn longest_full_span(rates: &[f64]) -> Option<(usize, usize)> {
    longest_run(rates, |r| r == 1.0)
}

fn longest_run(values: &[f64], keep: impl Fn(f64) -> bool) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    for (i, &v) in values.iter().enumerate() {
        if keep(v) {
            let s = *start.get_or_insert(i);
            if best.is_none_or(|(bs, be)| i - s > be - bs) {
                best = Some((s, i));
            }
        } else {
            start = None;
        }
    }
    best
}

/// The learning rate in the middle of the longest contiguous run of cells
/// at the setup's highest success rate.
pub fn best_lr(rows: &[SweepRow], setup: ModelSetup) -> Option<f64> {
    let cells: Vec<&SweepRow> = rows.iter().filter(|r| r.setup == setup).collect();
    let top = cells.iter().map(|r| r.success_rate).reduce(f64::max)?;
    let rates: Vec<f64> = cells.iter().map(|r| r.success_rate).collect();
    let (s, e) = longest_run(&rates, |r| r == top)?;
    Some(cells[(s + e) / 2].lr)
}

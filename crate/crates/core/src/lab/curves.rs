use serde::{Deserialize, Serialize};

use crate::{Error, Result};

use super::sweep::ModelSetup;
use super::trial::{run_batch, TrialSpec};

/// Per-epoch averages over a batch of trials. Entry `e - 1` is epoch `e`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochCurve {
    pub setup: ModelSetup,
    pub lr: f64,
    pub trials: usize,
    /// Fraction of trials with all four rows correct.
    pub success_rate: Vec<f64>,
    pub mean_mse: Vec<f64>,
}

/// Success-rate and MSE curves for each `(setup, lr)`, covering epochs
/// `1..=curve_len` of trials trained for `base.epochs` epochs. A trial that
/// diverged counts as failed with infinite MSE from then on.
pub fn epoch_curves(
    setups: &[(ModelSetup, f64)],
    n_trials: usize,
    base_seed: u64,
    base: &TrialSpec,
    curve_len: usize,
) -> Result<Vec<EpochCurve>> {
    if curve_len == 0 || curve_len > base.epochs {
        return Err(Error::InvalidConfig(format!(
            "curve length {curve_len} must be in 1..={}",
            base.epochs
        )));
    }
    setups
        .iter()
        .map(|&(setup, lr)| {
            let spec = setup.trial(base, lr).traced();
            let results = run_batch(&spec, n_trials, base_seed)?;
            let mut success = vec![0usize; curve_len];
            let mut mse = vec![0.0f64; curve_len];
            for r in &results {
                let tr = r.trace.as_ref().expect("traced trial");
                for e in 1..=curve_len {
                    match (tr.correct.get(e), tr.mse.get(e)) {
                        (Some(&c), Some(&m)) => {
                            success[e - 1] += usize::from(c == 4);
                            mse[e - 1] += m;
                        }
                        _ => mse[e - 1] = f64::INFINITY,
                    }
                }
            }
            let n = n_trials as f64;
            Ok(EpochCurve {
                setup,
                lr,
                trials: n_trials,
                success_rate: success.into_iter().map(|s| s as f64 / n).collect(),
                mean_mse: mse.into_iter().map(|m| m / n).collect(),
            })
        })
        .collect()
}

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::models::{Batch, InputRange, ModelArch, ModelParams, MAX_PARAMS};
use crate::optim::{init_params, init_params_in_quadrant, AdamConfig, AdamState, InitPolicy};
use crate::{Error, Result};

use super::count_correct;

/// Default number of training epochs per trial.
pub const DEFAULT_EPOCHS: usize = 300;

/// Starting-point distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    Uniform,
    /// `(w1, w2)` inside quadrant 1..=4; PReLU only.
    Quadrant(u8),
}

/// Everything that determines one training run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub arch: ModelArch,
    pub range: InputRange,
    pub adam: AdamConfig,
    pub epochs: usize,
    pub init: InitMode,
    pub policy: InitPolicy,
    /// Keep the PReLU slope at its initial value.
    pub freeze_slope: bool,
    pub record_trace: bool,
}

impl TrialSpec {
    pub fn new(arch: ModelArch, range: InputRange, lr: f64) -> Self {
        TrialSpec {
            arch,
            range,
            adam: AdamConfig::new(lr),
            epochs: DEFAULT_EPOCHS,
            init: InitMode::Uniform,
            policy: InitPolicy::default(),
            freeze_slope: false,
            record_trace: false,
        }
    }

    pub fn lr(&self) -> f64 {
        self.adam.lr
    }

    pub fn with_seed(mut self, seed: u64, stream: u64) -> Self {
        self.policy.seed = seed;
        self.policy.stream = stream;
        self
    }

    pub fn with_epochs(mut self, epochs: usize) -> Self {
        self.epochs = epochs;
        self
    }

    pub fn traced(mut self) -> Self {
        self.record_trace = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.adam.validate()?;
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if let InitMode::Quadrant(q) = self.init {
            crate::optim::quadrant_signs(q)?;
            if !matches!(self.arch, ModelArch::PReluNeuron { .. }) {
                return Err(Error::QuadrantNeedsPrelu);
            }
        }
        if self.freeze_slope && self.arch.slope_index().is_none() {
            return Err(Error::InvalidConfig(format!(
                "{} has no slope to freeze",
                self.arch
            )));
        }
        Ok(())
    }

    pub fn initial_params(&self) -> Result<ModelParams> {
        match self.init {
            InitMode::Uniform => Ok(init_params(self.arch, &self.policy)),
            InitMode::Quadrant(q) => init_params_in_quadrant(self.arch, q, &self.policy),
        }
    }
}

/// Per-epoch record. Index `e` is the state after `e` epochs; index 0 is the
/// initialization.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub mse: Vec<f64>,
    pub correct: Vec<u8>,
    pub params: Vec<Vec<f64>>,
}

impl Trace {
    fn with_capacity(n: usize) -> Self {
        Trace {
            mse: Vec::with_capacity(n),
            correct: Vec::with_capacity(n),
            params: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, mse: f64, correct: u8, theta: &[f64]) {
        self.mse.push(mse);
        self.correct.push(correct);
        self.params.push(theta.to_vec());
    }

    /// Number of recorded states, including the initial one.
    pub fn len(&self) -> usize {
        self.mse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mse.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    /// All four rows classified correctly after the last epoch.
    pub success: bool,
    /// First epoch (1-based) with all four rows correct; set only on success.
    pub epochs_to_success: Option<usize>,
    /// MSE after the last completed epoch; infinite when training diverged.
    pub final_mse: f64,
    pub diverged: bool,
    pub initial_params: ModelParams,
    /// Parameters after the last completed epoch.
    pub final_params: ModelParams,
    pub trace: Option<Trace>,
    pub wall_time_ns: u64,
}

/// Full-batch Adam training of one model.
pub fn run_trial(spec: &TrialSpec) -> Result<TrialResult> {
    spec.validate()?;
    let start = Instant::now();

    let arch = spec.arch;
    let n = arch.param_count();
    let batch = Batch::xor(spec.range);
    let initial = spec.initial_params()?;
    let frozen = if spec.freeze_slope {
        arch.slope_index()
    } else {
        None
    };

    let mut theta = initial.theta().to_vec();
    let mut grad_buf = [0.0; MAX_PARAMS];
    let grad = &mut grad_buf[..n];
    let mut adam = AdamState::new(n, spec.adam);
    let mut trace = spec
        .record_trace
        .then(|| Trace::with_capacity(spec.epochs + 1));

    let mut last_good = theta.clone();
    let (mut mse, out) = arch.loss_grad(&theta, &batch, grad);
    if let Some(tr) = trace.as_mut() {
        tr.push(mse, count_correct(&out, &batch.targets), &theta);
    }

    let mut first_success = None;
    let mut diverged = false;
    let mut correct = 0;
    for epoch in 1..=spec.epochs {
        if let Some(i) = frozen {
            grad[i] = 0.0;
        }
        adam.update(&mut theta, grad)?;
        // Gradient for the next step and the loss of this epoch's parameters
        // come from the same pass.
        let out;
        (mse, out) = arch.loss_grad(&theta, &batch, grad);
        if !mse.is_finite() || theta.iter().any(|v| !v.is_finite()) {
            diverged = true;
            break;
        }
        last_good.copy_from_slice(&theta);
        correct = count_correct(&out, &batch.targets);
        if correct == 4 && first_success.is_none() {
            first_success = Some(epoch);
        }
        if let Some(tr) = trace.as_mut() {
            tr.push(mse, correct, &theta);
        }
    }

    let success = !diverged && correct == 4;
    let wall_time_ns = start.elapsed().as_nanos() as u64;
    Ok(TrialResult {
        success,
        epochs_to_success: if success { first_success } else { None },
        final_mse: if diverged { f64::INFINITY } else { mse },
        diverged,
        initial_params: initial,
        final_params: ModelParams::new(arch, last_good)?,
        trace,
        wall_time_ns,
    })
}

/// `n_trials` runs of `template`, trial `i` drawing from stream `i` of
/// `base_seed`. Output order is by trial index whatever the scheduling.
pub fn run_batch(
    template: &TrialSpec,
    n_trials: usize,
    base_seed: u64,
) -> Result<Vec<TrialResult>> {
    if n_trials == 0 {
        return Err(Error::InvalidConfig("n_trials must be at least 1".into()));
    }
    template.validate()?;
    (0..n_trials as u64)
        .into_par_iter()
        .map(|i| run_trial(&template.with_seed(base_seed, i)))
        .collect()
}

pub fn success_count(results: &[TrialResult]) -> usize {
    results.iter().filter(|r| r.success).count()
}

/// Median of `epochs_to_success` over successful trials.
pub fn median_epochs_to_success(results: &[TrialResult]) -> Option<f64> {
    let mut e: Vec<f64> = results
        .iter()
        .filter_map(|r| r.epochs_to_success.map(|v| v as f64))
        .collect();
    super::median(&mut e)
}

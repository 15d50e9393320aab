//! Experiment harness: trials, sweeps, curves, surfaces and timing.
//!
//! Nothing in here touches the filesystem. Batches of trials run in parallel
//! on the ambient rayon pool; results are always assembled in trial order so
//! every experiment is a deterministic function of its inputs and base seed.

mod bench;
mod curves;
mod quadrant;
mod surface;
mod sweep;
mod trial;

pub use bench::{bench_runtime, BenchConfig, BenchSample, BenchSummary};
pub use curves::{epoch_curves, EpochCurve};
pub use quadrant::{quadrant_study, QuadrantRow, SlopeSetup};
pub use surface::{
    boundary_margin, decision_boundary_raster, default_boundary_grid, default_landscape_grid,
    local_minima, loss_landscape, Axis, GridCell, LocalMinimum, Overlay, Surface,
};
pub use sweep::{
    best_lr, default_lr_grid, longest_full_span, sweep_learning_rates, ModelSetup, SweepRow,
};
pub use trial::{
    median_epochs_to_success, run_batch, run_trial, success_count, InitMode, Trace, TrialResult,
    TrialSpec, DEFAULT_EPOCHS,
};

use crate::models::Batch;
use crate::models::ModelArch;

/// Default learning rate for everything except the sweep.
pub const DEFAULT_LR: f64 = 0.05;

/// Output thresholded at the midpoint of the `{0, 1}` targets; `0.5` maps to 1.
#[inline]
pub fn classify(output: f64) -> u8 {
    u8::from(output >= 0.5)
}

#[inline]
pub fn count_correct(outputs: &[f64; 4], targets: &[f64; 4]) -> u8 {
    outputs
        .iter()
        .zip(targets)
        .map(|(&y, &t)| u8::from(f64::from(classify(y)) == t))
        .sum()
}

/// Predicted classes on the four training rows.
pub fn classes(arch: ModelArch, theta: &[f64], batch: &Batch) -> [u8; 4] {
    arch.outputs(theta, &batch.inputs).map(classify)
}

pub(crate) fn median(values: &mut [f64]) -> Option<f64> {
    quantile(values, 0.5)
}

/// Linear-interpolated quantile, sorting `values` in place.
pub(crate) fn quantile(values: &mut [f64], q: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let pos = q * (values.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    Some(values[lo] + (values[hi] - values[lo]) * frac)
}

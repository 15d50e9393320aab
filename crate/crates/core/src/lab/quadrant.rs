use serde::{Deserialize, Serialize};

use crate::models::{Batch, InputRange, ModelArch, AND_TARGETS};
use crate::Result;

use super::classes;
use super::trial::{run_batch, success_count, InitMode, TrialSpec};

/// How the PReLU slope is treated in the quadrant study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeSetup {
    /// `a = -1`, never trained.
    FixedMinusOne,
    /// Trained from `a = -1`.
    LearnFromMinusOne,
    /// Trained from `a = 0`.
    LearnFromZero,
}

impl SlopeSetup {
    pub const ALL: [SlopeSetup; 3] = [
        SlopeSetup::FixedMinusOne,
        SlopeSetup::LearnFromMinusOne,
        SlopeSetup::LearnFromZero,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SlopeSetup::FixedMinusOne => "fixed_-1",
            SlopeSetup::LearnFromMinusOne => "init_-1",
            SlopeSetup::LearnFromZero => "init_0",
        }
    }

    fn apply(self, spec: &mut TrialSpec) {
        let (init, freeze) = match self {
            SlopeSetup::FixedMinusOne => (-1.0, true),
            SlopeSetup::LearnFromMinusOne => (-1.0, false),
            SlopeSetup::LearnFromZero => (0.0, false),
        };
        spec.policy.slope_init = init;
        spec.freeze_slope = freeze;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrantRow {
    pub slope: SlopeSetup,
    pub quadrant: u8,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Trials whose final classes on the training rows spell AND.
    pub and_pattern: usize,
}

/// Success of the bias-free PReLU neuron by starting quadrant of `(w1, w2)`,
/// for each slope treatment.
pub fn quadrant_study(
    range: InputRange,
    lr: f64,
    n_per_quadrant: usize,
    base_seed: u64,
    base: &TrialSpec,
) -> Result<Vec<QuadrantRow>> {
    let batch = Batch::xor(range);
    let and = AND_TARGETS.map(|t| t as u8);
    let mut rows = Vec::new();
    for slope in SlopeSetup::ALL {
        for quadrant in 1..=4u8 {
            let mut spec = *base;
            spec.arch = ModelArch::PRELU;
            spec.range = range;
            spec.adam.lr = lr;
            spec.init = InitMode::Quadrant(quadrant);
            slope.apply(&mut spec);
            let results = run_batch(&spec, n_per_quadrant, base_seed)?;
            let successes = success_count(&results);
            let and_pattern = results
                .iter()
                .filter(|r| classes(ModelArch::PRELU, r.final_params.theta(), &batch) == and)
                .count();
            rows.push(QuadrantRow {
                slope,
                quadrant,
                trials: n_per_quadrant,
                successes,
                success_rate: successes as f64 / n_per_quadrant as f64,
                and_pattern,
            });
        }
    }
    Ok(rows)
}

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

use super::median;
use super::quantile;
use super::sweep::ModelSetup;
use super::trial::{run_trial, TrialSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub repetitions: usize,
    /// Trials timed back to back per repetition; the sample is their mean.
    pub trials_per_rep: usize,
    /// Untimed trials per model before measuring.
    pub warmup: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            repetitions: 30,
            trials_per_rep: 20,
            warmup: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSample {
    pub setup: ModelSetup,
    pub repetition: usize,
    /// Mean wall time of one trial in this repetition.
    pub wall_time_ns: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub setup: ModelSetup,
    pub min_ns: f64,
    pub median_ns: f64,
    pub p95_ns: f64,
}

impl BenchSummary {
    pub fn of(setup: ModelSetup, samples: &[BenchSample]) -> Option<Self> {
        let mut t: Vec<f64> = samples
            .iter()
            .filter(|s| s.setup == setup)
            .map(|s| s.wall_time_ns as f64)
            .collect();
        let median_ns = median(&mut t)?;
        Some(BenchSummary {
            setup,
            min_ns: t[0],
            median_ns,
            p95_ns: quantile(&mut t, 0.95)?,
        })
    }
}

/// Single-threaded wall time of full training trials. Models are interleaved
/// within each repetition so drift affects all of them alike.
pub fn bench_runtime(
    setups: &[(ModelSetup, f64)],
    base_seed: u64,
    base: &TrialSpec,
    config: BenchConfig,
) -> Result<(Vec<BenchSample>, Vec<BenchSummary>)> {
    if config.repetitions < 5 {
        return Err(Error::InvalidConfig(format!(
            "at least 5 repetitions required, got {}",
            config.repetitions
        )));
    }
    if config.trials_per_rep == 0 {
        return Err(Error::InvalidConfig(
            "trials_per_rep must be at least 1".into(),
        ));
    }
    let spec_of = |setup: &ModelSetup, lr: f64, stream: u64| {
        let mut s = setup.trial(base, lr).with_seed(base_seed, stream);
        s.record_trace = false;
        s
    };
    for (setup, lr) in setups {
        for w in 0..config.warmup {
            std::hint::black_box(run_trial(&spec_of(setup, *lr, w as u64))?);
        }
    }
    let mut samples = Vec::with_capacity(setups.len() * config.repetitions);
    for rep in 0..config.repetitions {
        for (setup, lr) in setups {
            let specs: Vec<TrialSpec> = (0..config.trials_per_rep)
                .map(|k| spec_of(setup, *lr, (rep * config.trials_per_rep + k) as u64))
                .collect();
            let start = Instant::now();
            for s in &specs {
                std::hint::black_box(run_trial(std::hint::black_box(s))?);
            }
            let elapsed = start.elapsed().as_nanos() as u64;
            samples.push(BenchSample {
                setup: *setup,
                repetition: rep,
                wall_time_ns: (elapsed / config.trials_per_rep as u64).max(1),
            });
        }
    }
    let summaries = setups
        .iter()
        .filter_map(|(s, _)| BenchSummary::of(*s, &samples))
        .collect();
    Ok((samples, summaries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelArch;

    #[test]
    fn needs_five_repetitions() {
        let base = TrialSpec::new(ModelArch::PRELU, ModelArch::PRELU.default_range(), 0.05);
        let cfg = BenchConfig {
            repetitions: 4,
            ..Default::default()
        };
        let setups = [(ModelSetup::standard(ModelArch::PRELU), 0.05)];
        assert!(bench_runtime(&setups, 0, &base, cfg).is_err());
    }

    #[test]
    fn samples_are_positive() {
        let base = TrialSpec::new(ModelArch::PRELU, ModelArch::PRELU.default_range(), 0.05)
            .with_epochs(10);
        let cfg = BenchConfig {
            repetitions: 5,
            trials_per_rep: 2,
            warmup: 1,
        };
        let setups: Vec<_> = ModelSetup::main_three()
            .into_iter()
            .map(|s| (s, 0.05))
            .collect();
        let (samples, summary) = bench_runtime(&setups, 0, &base, cfg).unwrap();
        assert_eq!(samples.len(), 15);
        assert!(samples.iter().all(|s| s.wall_time_ns > 0));
        assert_eq!(summary.len(), 3);
        for s in summary {
            assert!(s.min_ns <= s.median_ns && s.median_ns <= s.p95_ns);
        }
    }
}

//! Argument parsing and the experiment commands.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use xorlab::lab::{
    bench_runtime, best_lr, boundary_margin, classes, decision_boundary_raster,
    default_boundary_grid, default_lr_grid, epoch_curves, local_minima, longest_full_span,
    loss_landscape, quadrant_study, run_trial, sweep_learning_rates, Axis, BenchConfig, ModelSetup,
    TrialSpec, DEFAULT_EPOCHS, DEFAULT_LR,
};
use xorlab::{AdamConfig, Batch, InitPolicy, InputRange, ModelArch};

use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::plot;
use crate::records::*;

fn parse_name<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: Display,
{
    s.parse().map_err(|e: T::Err| e.to_string())
}

fn parse_lr_for(s: &str) -> Result<(ModelArch, f64), String> {
    let (m, lr) = s
        .split_once('=')
        .ok_or_else(|| format!("expected MODEL=LR, got {s:?}"))?;
    let lr: f64 = lr
        .parse()
        .map_err(|e| format!("bad learning rate {lr:?}: {e}"))?;
    Ok((parse_name(m)?, lr))
}

#[derive(Debug, Parser)]
#[command(name = "xorlab", version, about = "Single-neuron XOR experiments")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GlobalOpts {
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Base seed; trial i uses stream i
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Leave wall-clock fields empty so outputs are reproducible
    #[arg(long, global = true)]
    pub no_timing: bool,
    /// Training epochs per trial
    #[arg(long, global = true, default_value_t = DEFAULT_EPOCHS)]
    pub epochs: usize,
    #[arg(long, global = true, default_value_t = 0.9)]
    pub beta1: f64,
    #[arg(long, global = true, default_value_t = 0.999)]
    pub beta2: f64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub eps: f64,
    /// Initial weights are drawn from U(-b, b)
    #[arg(long, global = true, default_value_t = xorlab::optim::DEFAULT_WEIGHT_BOUND)]
    pub weight_bound: f64,
}

impl GlobalOpts {
    /// Trial template carrying the shared optimizer and init settings.
    pub fn base_spec(&self) -> CliResult<TrialSpec> {
        if !(self.weight_bound.is_finite() && self.weight_bound > 0.0) {
            return Err(CliError::Usage("--weight-bound must be positive".into()));
        }
        let mut spec = TrialSpec::new(ModelArch::PRELU, InputRange::PlusMinusOne, DEFAULT_LR);
        spec.adam = AdamConfig {
            lr: DEFAULT_LR,
            beta1: self.beta1,
            beta2: self.beta2,
            eps: self.eps,
        };
        spec.epochs = self.epochs;
        spec.policy = InitPolicy {
            weight_bound: self.weight_bound,
            ..InitPolicy::new(self.seed, 0)
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Train one model and write its loss history
    Train(TrainArgs),
    /// Success rate over a learning-rate grid
    Sweep(SweepArgs),
    /// Success rate and mean loss per epoch
    Curves(CurvesArgs),
    /// Loss surface of the PReLU neuron over (w1, w2)
    Landscape(LandscapeArgs),
    /// Mean decision boundary over many trained models
    Boundary(BoundaryArgs),
    /// Wall time of full training runs
    Bench(BenchArgs),
    /// Render a CSV artifact to SVG
    Plot(PlotArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Train(_) => "train",
            Command::Sweep(_) => "sweep",
            Command::Curves(_) => "curves",
            Command::Landscape(_) => "landscape",
            Command::Boundary(_) => "boundary",
            Command::Bench(_) => "bench",
            Command::Plot(_) => "plot",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TrainArgs {
    #[arg(long, value_parser = parse_name::<ModelArch>)]
    pub model: ModelArch,
    /// Input encoding; defaults to the model's usual one
    #[arg(long, value_parser = parse_name::<InputRange>)]
    pub range: Option<InputRange>,
    #[arg(long, default_value_t = DEFAULT_LR)]
    pub lr: f64,
    /// Write every epoch instead of only the first and last
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_name::<ModelArch>,
          default_value = "prelu,prelu-bias,gcu,mlp")]
    pub models: Vec<ModelArch>,
    /// Explicit grid; default is 25 log-spaced rates from 1e-4 to 2
    #[arg(long, value_delimiter = ',')]
    pub lrs: Option<Vec<f64>>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CurvesArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_name::<ModelArch>, default_value = "prelu,gcu,mlp")]
    pub models: Vec<ModelArch>,
    #[arg(long, default_value_t = DEFAULT_LR)]
    pub lr: f64,
    /// Per-model learning rate, e.g. gcu=0.02
    #[arg(long = "lr-for", value_parser = parse_lr_for)]
    pub lr_for: Vec<(ModelArch, f64)>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Number of epochs reported
    #[arg(long, default_value_t = 150)]
    pub length: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct LandscapeArgs {
    #[arg(long, value_parser = parse_name::<InputRange>, default_value = "pm1")]
    pub range: InputRange,
    /// PReLU slope held fixed on the surface
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub slope: f64,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub min: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub max: f64,
    /// Grid points per axis
    #[arg(long, default_value_t = 201)]
    pub steps: usize,
    #[arg(long, default_value_t = DEFAULT_LR)]
    pub lr: f64,
    /// Quadrant-study trials per quadrant
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    /// Number of optimizer paths to write as trajectory_<i>.csv
    #[arg(long, default_value_t = 0)]
    pub trajectories: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BoundaryArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_name::<ModelArch>, default_value = "prelu,gcu,mlp")]
    pub models: Vec<ModelArch>,
    #[arg(long, default_value_t = DEFAULT_LR)]
    pub lr: f64,
    #[arg(long = "lr-for", value_parser = parse_lr_for)]
    pub lr_for: Vec<(ModelArch, f64)>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Raster points per axis
    #[arg(long, default_value_t = 201)]
    pub steps: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_name::<ModelArch>, default_value = "prelu,gcu,mlp")]
    pub models: Vec<ModelArch>,
    #[arg(long, default_value_t = DEFAULT_LR)]
    pub lr: f64,
    #[arg(long, default_value_t = 30)]
    pub repetitions: usize,
    /// Back-to-back trials per timed sample
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 20)]
    pub warmup: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PlotArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to the input path with an .svg extension
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Minima to mark on a landscape; defaults to a sibling minima.csv
    #[arg(long)]
    pub minima: Option<PathBuf>,
}

/// In-memory result of a command, written by [`Outputs::commit`].
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
    summary: serde_json::Value,
}

impl Outputs {
    fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn files(&self) -> &[(String, Vec<u8>)] {
        &self.files
    }

    /// Writes every file and then `manifest.json` under `dir`.
    pub fn commit(self, dir: &Path, mut manifest: RunManifest) -> CliResult<()> {
        fs::create_dir_all(dir).map_err(CliError::file(dir))?;
        manifest.outputs = self.files.iter().map(|(n, _)| n.clone()).collect();
        manifest.summary = self.summary;
        manifest.validate()?;
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(CliError::file(path))?;
        }
        let path = dir.join("manifest.json");
        fs::write(&path, manifest.to_json()?).map_err(CliError::file(path))?;
        Ok(())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn need_trials(n: usize) -> CliResult<()> {
    if n == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    Ok(())
}

fn lr_table(
    models: &[ModelArch],
    lr: f64,
    lr_for: &[(ModelArch, f64)],
) -> CliResult<Vec<(ModelSetup, f64)>> {
    if let Some((m, _)) = lr_for.iter().find(|(m, _)| !models.contains(m)) {
        return Err(usage(format!(
            "--lr-for names {m}, which is not in --models"
        )));
    }
    Ok(models
        .iter()
        .map(|&m| {
            let lr = lr_for
                .iter()
                .rev()
                .find(|(a, _)| *a == m)
                .map_or(lr, |p| p.1);
            (ModelSetup::standard(m), lr)
        })
        .collect())
}

fn unique(models: &[ModelArch]) -> CliResult<()> {
    for (i, m) in models.iter().enumerate() {
        if models[..i].contains(m) {
            return Err(usage(format!("model {m} listed twice")));
        }
    }
    if models.is_empty() {
        return Err(usage("no models given"));
    }
    Ok(())
}

fn class_string(c: [u8; 4]) -> String {
    c.iter().map(|v| char::from(b'0' + v)).collect()
}

pub fn train(g: &GlobalOpts, a: &TrainArgs) -> CliResult<Outputs> {
    let range = a.range.unwrap_or(a.model.default_range());
    let spec = TrialSpec {
        arch: a.model,
        range,
        adam: AdamConfig {
            lr: a.lr,
            ..g.base_spec()?.adam
        },
        record_trace: true,
        ..g.base_spec()?
    };
    let r = run_trial(&spec)?;
    let tr = r.trace.as_ref().expect("traced trial");
    let last = tr.len() - 1;
    let epochs: Vec<usize> = if a.trace {
        (0..=last).collect()
    } else {
        vec![0, last]
    };
    let table = TrialTable {
        param_names: a
            .model
            .param_names()
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows: epochs
            .into_iter()
            .map(|e| TrialRow {
                epoch: e,
                mse: tr.mse[e],
                correct_count: tr.correct[e],
                params: tr.params[e].clone(),
            })
            .collect(),
    };
    let mut buf = Vec::new();
    table.write(&mut buf)?;
    let mut out = Outputs::default();
    out.add("trial.csv", buf);
    out.summary = json!({
        "success": r.success,
        "epochs_to_success": r.epochs_to_success,
        "final_mse": finite_or_null(r.final_mse),
        "diverged": r.diverged,
        "epochs_completed": last,
    });
    Ok(out)
}

fn finite_or_null(v: f64) -> serde_json::Value {
    if v.is_finite() {
        json!(v)
    } else {
        serde_json::Value::Null
    }
}

pub fn sweep(g: &GlobalOpts, a: &SweepArgs) -> CliResult<Outputs> {
    unique(&a.models)?;
    need_trials(a.trials)?;
    let grid = a.lrs.clone().unwrap_or_else(default_lr_grid);
    let setups: Vec<ModelSetup> = a.models.iter().map(|&m| ModelSetup::standard(m)).collect();
    let rows = sweep_learning_rates(&setups, &grid, a.trials, g.seed, &g.base_spec()?)?;
    let records: Vec<SweepRecord> = rows
        .iter()
        .map(|r| SweepRecord {
            model: r.setup.label(),
            lr: r.lr,
            trials: r.trials,
            successes: r.successes,
            success_rate: r.success_rate,
        })
        .collect();
    let mut summary = serde_json::Map::new();
    for s in &setups {
        let rates: Vec<f64> = rows
            .iter()
            .filter(|r| r.setup == *s)
            .map(|r| r.success_rate)
            .collect();
        let span = longest_full_span(&rates);
        summary.insert(
            s.label(),
            json!({
                "full_span_cells": span.map_or(0, |(b, e)| e - b + 1),
                "full_span_lr": span.map(|(b, e)| [grid[b], grid[e]]),
                "best_lr": best_lr(&rows, *s),
            }),
        );
    }
    let mut out = Outputs::default();
    out.add("sweep.csv", to_csv_bytes(&records)?);
    out.summary = summary.into();
    Ok(out)
}

pub fn curves(g: &GlobalOpts, a: &CurvesArgs) -> CliResult<Outputs> {
    unique(&a.models)?;
    need_trials(a.trials)?;
    if a.length == 0 || a.length > g.epochs {
        return Err(usage(format!("--length must be in 1..={}", g.epochs)));
    }
    let setups = lr_table(&a.models, a.lr, &a.lr_for)?;
    let curves = epoch_curves(&setups, a.trials, g.seed, &g.base_spec()?, a.length)?;
    let mut records = Vec::new();
    for c in &curves {
        for (i, (&s, &m)) in c.success_rate.iter().zip(&c.mean_mse).enumerate() {
            records.push(CurveRecord {
                model: c.setup.label(),
                epoch: i + 1,
                success_rate: s,
                mean_mse: m,
            });
        }
    }
    let mut out = Outputs::default();
    out.add("curves.csv", to_csv_bytes(&records)?);
    out.summary = curves
        .iter()
        .map(|c| {
            let full_from = c
                .success_rate
                .iter()
                .rposition(|&s| s < 1.0)
                .map_or(Some(1), |i| (i + 1 < c.success_rate.len()).then_some(i + 2));
            (
                c.setup.label(),
                json!({ "lr": c.lr, "full_success_from_epoch": full_from }),
            )
        })
        .collect::<serde_json::Map<_, _>>()
        .into();
    Ok(out)
}

pub fn landscape(g: &GlobalOpts, a: &LandscapeArgs) -> CliResult<Outputs> {
    need_trials(a.trials)?;
    if !a.slope.is_finite() {
        return Err(usage("--slope must be finite"));
    }
    let x = Axis::new("w1", a.min, a.max, a.steps);
    let y = Axis::new("w2", a.min, a.max, a.steps);
    x.validate().map_err(|e| usage(e.to_string()))?;
    let base = g.base_spec()?;

    let mut traj_spec = base;
    traj_spec.arch = ModelArch::PRELU;
    traj_spec.range = a.range;
    traj_spec.adam.lr = a.lr;
    traj_spec.policy.slope_init = a.slope;
    traj_spec.freeze_slope = true;
    let trajectories: Vec<TrialSpec> = (0..a.trajectories as u64)
        .map(|i| traj_spec.with_seed(g.seed, i))
        .collect();
    let surface = loss_landscape(a.range, a.slope, x, y, &trajectories)?;
    let batch = Batch::xor(a.range);

    let landscape: Vec<LandscapeRecord> = surface
        .cells()
        .map(|c| LandscapeRecord {
            w1: c.x,
            w2: c.y,
            mse: c.value,
        })
        .collect();
    let minima = local_minima(&surface);
    let minima_rows: Vec<MinimumRecord> = minima
        .iter()
        .map(|m| MinimumRecord {
            w1: m.x,
            w2: m.y,
            mse: m.value,
            cells: m.cells.len(),
            classes: class_string(classes(ModelArch::PRELU, &[m.x, m.y, a.slope], &batch)),
        })
        .collect();
    let quadrants = quadrant_study(a.range, a.lr, a.trials, g.seed, &base)?;
    let quadrant_rows: Vec<QuadrantRecord> = quadrants
        .iter()
        .map(|q| QuadrantRecord {
            slope: q.slope.as_str().into(),
            quadrant: q.quadrant,
            trials: q.trials,
            successes: q.successes,
            success_rate: q.success_rate,
            and_pattern: q.and_pattern,
        })
        .collect();

    let mut out = Outputs::default();
    out.add("landscape.csv", to_csv_bytes(&landscape)?);
    out.add("minima.csv", to_csv_bytes(&minima_rows)?);
    out.add("quadrants.csv", to_csv_bytes(&quadrant_rows)?);
    for i in 0..a.trajectories {
        let ov = surface
            .overlay(&format!("trajectory {i}"))
            .expect("trajectory overlay");
        let rows: Vec<TrajectoryRecord> = ov
            .points
            .iter()
            .enumerate()
            .map(|(step, &(w1, w2))| {
                let mut grad = [0.0; 3];
                TrajectoryRecord {
                    step,
                    w1,
                    w2,
                    mse: ModelArch::PRELU
                        .loss_grad(&[w1, w2, a.slope], &batch, &mut grad)
                        .0,
                }
            })
            .collect();
        out.add(format!("trajectory_{i}.csv"), to_csv_bytes(&rows)?);
    }
    let zero_cells = surface.cells().filter(|c| c.value == 0.0).count();
    out.summary = json!({
        "cells": landscape.len(),
        "zero_loss_cells": zero_cells,
        "local_minima": minima_rows.len(),
    });
    Ok(out)
}

pub fn boundary(g: &GlobalOpts, a: &BoundaryArgs) -> CliResult<Outputs> {
    unique(&a.models)?;
    need_trials(a.trials)?;
    let base = g.base_spec()?;
    let mut out = Outputs::default();
    let mut margins = Vec::new();
    for (setup, lr) in lr_table(&a.models, a.lr, &a.lr_for)? {
        let (dx, dy) = default_boundary_grid(setup.range);
        let x = Axis::new(dx.name, dx.min, dx.max, a.steps);
        let y = Axis::new(dy.name, dy.min, dy.max, a.steps);
        x.validate().map_err(|e| usage(e.to_string()))?;
        let surface = decision_boundary_raster(setup, a.trials, lr, g.seed, &base, x, y)?;
        let rows: Vec<BoundaryRecord> = surface
            .cells()
            .map(|c| BoundaryRecord {
                x1: c.x,
                x2: c.y,
                mean_class: c.value,
            })
            .collect();
        out.add(
            format!("boundary_{}.csv", setup.label()),
            to_csv_bytes(&rows)?,
        );
        let margin = boundary_margin(&surface, &Batch::xor(setup.range));
        margins.push(MarginRecord {
            model: setup.label(),
            range: setup.range.to_string(),
            margin,
            relative_margin: margin / setup.range.side(),
        });
    }
    out.add("margins.csv", to_csv_bytes(&margins)?);
    out.summary = margins
        .iter()
        .map(|m| (m.model.clone(), finite_or_null(m.margin)))
        .collect::<serde_json::Map<_, _>>()
        .into();
    Ok(out)
}

pub fn bench(g: &GlobalOpts, a: &BenchArgs) -> CliResult<Outputs> {
    unique(&a.models)?;
    if a.repetitions < 5 {
        return Err(usage(format!(
            "--repetitions must be at least 5, got {}",
            a.repetitions
        )));
    }
    need_trials(a.trials)?;
    let setups = lr_table(&a.models, a.lr, &[])?;
    let cfg = BenchConfig {
        repetitions: a.repetitions,
        trials_per_rep: a.trials,
        warmup: a.warmup,
    };
    let (samples, summaries) = bench_runtime(&setups, g.seed, &g.base_spec()?, cfg)?;
    let timed = !g.no_timing;
    let rows: Vec<BenchRecord> = samples
        .iter()
        .map(|s| BenchRecord {
            model: s.setup.label(),
            repetition: s.repetition,
            wall_time_ns: timed.then_some(s.wall_time_ns),
        })
        .collect();
    let summary_rows: Vec<BenchSummaryRecord> = summaries
        .iter()
        .map(|s| BenchSummaryRecord {
            model: s.setup.label(),
            min_ns: timed.then_some(s.min_ns),
            median_ns: timed.then_some(s.median_ns),
            p95_ns: timed.then_some(s.p95_ns),
        })
        .collect();
    let mut out = Outputs::default();
    out.add("bench.csv", to_csv_bytes(&rows)?);
    out.add("bench_summary.csv", to_csv_bytes(&summary_rows)?);
    if timed {
        out.summary = summaries
            .iter()
            .map(|s| (s.setup.label(), json!(s.median_ns)))
            .collect::<serde_json::Map<_, _>>()
            .into();
    }
    Ok(out)
}

/// Renders `a.input` and writes the SVG; returns the output path.
pub fn plot_file(a: &PlotArgs) -> CliResult<PathBuf> {
    let bytes = fs::read(&a.input).map_err(CliError::file(&a.input))?;
    let table = parse_table(&bytes)?;
    let minima = if matches!(table, Table::Landscape(_)) {
        let path = a
            .minima
            .clone()
            .unwrap_or_else(|| a.input.with_file_name("minima.csv"));
        match fs::read(&path) {
            Ok(b) => Some(read_records::<MinimumRecord, _>(&b[..])?),
            Err(e) if a.minima.is_none() && e.kind() == std::io::ErrorKind::NotFound => None,
            Err(e) => return Err(CliError::file(path)(e)),
        }
    } else {
        None
    };
    let svg = plot::render(&table, minima.as_deref())?;
    let output = a
        .output
        .clone()
        .unwrap_or_else(|| a.input.with_extension("svg"));
    fs::write(&output, svg).map_err(CliError::file(&output))?;
    Ok(output)
}

/// Runs a parsed command line, writing all outputs.
pub fn execute(cli: &Cli) -> CliResult<()> {
    let g = &cli.global;
    let out = match &cli.command {
        Command::Plot(a) => {
            plot_file(a)?;
            return Ok(());
        }
        Command::Train(a) => train(g, a)?,
        Command::Sweep(a) => sweep(g, a)?,
        Command::Curves(a) => curves(g, a)?,
        Command::Landscape(a) => landscape(g, a)?,
        Command::Boundary(a) => boundary(g, a)?,
        Command::Bench(a) => bench(g, a)?,
    };
    let base = g.base_spec()?;
    let config = json!({
        "global": g,
        "command": &cli.command,
        "init": base.policy,
    });
    let manifest = RunManifest::new(cli.command.name(), g.seed, &config, !g.no_timing)?;
    out.commit(&g.out, manifest)
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Err(e) = crate::configure_threads() {
        eprintln!("xorlab: {e}");
        return e.exit_code();
    }
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("xorlab: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("xorlab").chain(args.iter().copied()))
    }

    #[test]
    fn defaults_are_materialized() {
        let cli = parse(&["sweep"]).unwrap();
        let Command::Sweep(a) = &cli.command else {
            panic!()
        };
        assert_eq!(a.models.len(), 4);
        assert_eq!(a.trials, 100);
        assert_eq!(cli.global.out, PathBuf::from("out"));
        assert_eq!(cli.global.epochs, 300);
    }

    #[test]
    fn global_flags_after_subcommand() {
        let cli = parse(&["train", "--model", "gcu", "--seed", "7", "--no-timing"]).unwrap();
        assert_eq!(cli.global.seed, 7);
        assert!(cli.global.no_timing);
    }

    #[test]
    fn usage_errors() {
        assert!(parse(&["train"]).is_err());
        assert!(parse(&["train", "--model", "relu"]).is_err());
        assert!(parse(&["train", "--model", "gcu", "--range", "02"]).is_err());
        assert!(parse(&["curves", "--lr-for", "gcu"]).is_err());
        assert_eq!(parse(&["train"]).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn lr_for_overrides() {
        let t = lr_table(
            &[ModelArch::PRELU, ModelArch::GcuNeuron],
            0.05,
            &[(ModelArch::GcuNeuron, 0.02)],
        )
        .unwrap();
        assert_eq!(t[0].1, 0.05);
        assert_eq!(t[1].1, 0.02);
        assert!(lr_table(&[ModelArch::PRELU], 0.05, &[(ModelArch::MlpTanh, 0.1)]).is_err());
    }

    #[test]
    fn train_without_trace_writes_two_rows() {
        let cli = parse(&["train", "--model", "prelu", "--range", "pm1", "--seed", "7"]).unwrap();
        let Command::Train(a) = &cli.command else {
            panic!()
        };
        let out = train(&cli.global, a).unwrap();
        let t = TrialTable::read(&out.files()[0].1[..]).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0].epoch, 0);
        assert_eq!(t.rows[1].epoch, 300);
        assert_eq!(t.rows[1].correct_count, 4);
    }

    #[test]
    fn bench_requires_five_repetitions() {
        let cli = parse(&["bench", "--repetitions", "4"]).unwrap();
        let Command::Bench(a) = &cli.command else {
            panic!()
        };
        assert!(matches!(bench(&cli.global, a), Err(CliError::Usage(_))));
    }
}

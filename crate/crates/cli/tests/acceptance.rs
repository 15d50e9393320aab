//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xorlab::lab::{
    bench_runtime, best_lr, boundary_margin, classes, decision_boundary_raster,
    default_boundary_grid, default_landscape_grid, default_lr_grid, local_minima,
    longest_full_span, loss_landscape, median_epochs_to_success, quadrant_study, run_batch,
    success_count, sweep_learning_rates, BenchConfig, ModelSetup, SlopeSetup, SweepRow, TrialSpec,
};
use xorlab::models::AND_TARGETS;
use xorlab::scalargrad::prelu_decomposition;
use xorlab::{Activation, Batch, InputRange, ModelArch, ModelParams};

type Outcome = Result<String, String>;

const SEED: u64 = 0;
const POINTS: usize = 10_000;

fn ulps(a: f64, b: f64) -> u64 {
    if a == b {
        return 0;
    }
    let ord = |v: f64| {
        let i = v.to_bits() as i64;
        if i < 0 {
            i64::MIN - i
        } else {
            i
        }
    };
    (ord(a) - ord(b)).unsigned_abs()
}

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sample_x(rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..4) {
        0 => rng.random_range(-1.0..1.0),
        1 => rng.random_range(-1e6..1e6),
        2 => {
            let m: f64 = rng.random_range(-1.0..1.0);
            m * 2f64.powi(rng.random_range(-1000..1000))
        }
        _ => [
            0.0,
            -0.0,
            f64::MIN_POSITIVE,
            -f64::MIN_POSITIVE,
            f64::MAX,
            f64::MIN,
        ][rng.random_range(0..6)],
    }
}

fn activation_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let relu = |x: f64| Activation::Relu.value(x);
    let mut failures = Vec::new();
    let mut worst_ulp = 0;
    for _ in 0..POINTS {
        let x = sample_x(&mut rng);
        let a: f64 = rng.random_range(-2.0..2.0);
        let p = Activation::prelu(a).value(x);
        if Activation::prelu(-1.0).value(x) != x.abs() {
            failures.push(format!("abs at {x}"));
        }
        if Activation::prelu(0.0).value(x) != relu(x) {
            failures.push(format!("relu at {x}"));
        }
        if Activation::prelu(1.0).value(x) != x {
            failures.push(format!("identity at {x}"));
        }
        let maxmin = x.max(0.0) + a * x.min(0.0);
        if p != maxmin && !(p.is_nan() && maxmin.is_nan()) {
            failures.push(format!("max/min at x={x} a={a}"));
        }
        if x.abs() != relu(x) + relu(-x) {
            failures.push(format!("|x| decomposition at {x}"));
        }
        // Overflowing intermediates (a*x beyond f64::MAX) are outside the identity's domain.
        if (a * x).is_finite() && ((1.0 - a) * x).is_finite() {
            let u = ulps(prelu_decomposition(x, a), p);
            worst_ulp = worst_ulp.max(u);
            if u > 1 {
                failures.push(format!("corrected decomposition at x={x} a={a}: {u} ulp"));
            }
        }
    }
    check(
        failures.is_empty(),
        format!(
            "{POINTS} points x 6 identities, worst decomposition error {worst_ulp} ulp{}",
            failures
                .first()
                .map(|f| format!("; first failure: {f}"))
                .unwrap_or_default()
        ),
    )
}

fn gradient_oracle() -> Outcome {
    const DRAWS: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut report = Vec::new();
    let mut ok = true;
    let cases = [
        (ModelArch::PRELU, InputRange::PlusMinusOne),
        (ModelArch::PRELU, InputRange::ZeroOne),
        (ModelArch::PRELU_BIAS, InputRange::PlusMinusOne),
        (ModelArch::GcuNeuron, InputRange::ZeroOne),
        (ModelArch::MlpTanh, InputRange::PlusMinusOne),
    ];
    for (arch, range) in cases {
        let batch = Batch::xor(range);
        let mut accepted = 0;
        let mut worst: f64 = 0.0;
        while accepted < DRAWS {
            let theta: Vec<f64> = (0..arch.param_count())
                .map(|_| rng.random_range(-2.0..2.0))
                .collect();
            if arch
                .kink_distance(&theta, &batch.inputs)
                .is_some_and(|d| d <= 1e-3)
            {
                continue;
            }
            accepted += 1;
            let p = ModelParams::new(arch, theta.clone()).unwrap();
            let grad = p.backward(&batch.inputs, &batch.targets);
            for (i, &an) in grad.iter().enumerate() {
                let h = 1e-6 * (1.0 + theta[i].abs());
                let at = |d: f64| {
                    let mut t = theta.clone();
                    t[i] += d;
                    ModelParams::new(arch, t).unwrap().loss(&batch)
                };
                let fd = (at(h) - at(-h)) / (2.0 * h);
                let rel = (an - fd).abs() / an.abs().max(fd.abs()).max(1e-6);
                worst = worst.max(rel);
            }
        }
        ok &= worst < 1e-4;
        report.push(format!("{}@{} {:.1e}", arch, range, worst));
    }
    check(
        ok,
        format!(
            "{DRAWS} draws each, worst relative error: {}",
            report.join(", ")
        ),
    )
}

fn prelu_convergence() -> Outcome {
    let spec = TrialSpec::new(ModelArch::PRELU, InputRange::PlusMinusOne, 0.05);
    let results = run_batch(&spec, 100, SEED).map_err(|e| e.to_string())?;
    let successes = success_count(&results);
    let max_epochs = results.iter().filter_map(|r| r.epochs_to_success).max();
    let max_mse = results.iter().map(|r| r.final_mse).fold(0.0, f64::max);
    let ok = successes == 100 && max_epochs.is_some_and(|e| e < 20) && max_mse < 1e-4;
    check(
        ok,
        format!("{successes}/100 solved, slowest {max_epochs:?} epochs, largest final mse {max_mse:.2e}"),
    )
}

fn gcu_convergence(sweep: &[SweepRow]) -> Outcome {
    let setup = ModelSetup::standard(ModelArch::GcuNeuron);
    let lr = best_lr(sweep, setup).ok_or("no gcu sweep rows")?;
    let spec = TrialSpec::new(ModelArch::GcuNeuron, InputRange::ZeroOne, lr);
    let results = run_batch(&spec, 100, SEED).map_err(|e| e.to_string())?;
    let successes = success_count(&results);
    let median = median_epochs_to_success(&results);
    let min_mse = results
        .iter()
        .map(|r| r.final_mse)
        .fold(f64::INFINITY, f64::min);
    let ok =
        successes == 100 && median.is_some_and(|m| (30.0..=80.0).contains(&m)) && min_mse > 1e-6;
    check(
        ok,
        format!("best lr {lr:.4}: {successes}/100 solved, median {median:?} epochs (want 30..=80), smallest final mse {min_mse:.3e}"),
    )
}

fn lr_span(sweep: &[SweepRow]) -> Outcome {
    let spans: Vec<(ModelSetup, usize)> = ModelSetup::all_four()
        .into_iter()
        .map(|s| {
            let rates: Vec<f64> = sweep
                .iter()
                .filter(|r| r.setup == s)
                .map(|r| r.success_rate)
                .collect();
            (s, longest_full_span(&rates).map_or(0, |(b, e)| e - b + 1))
        })
        .collect();
    let prelu = spans[0].1;
    let ok = spans[1..].iter().all(|&(_, n)| prelu > n);
    let detail = spans
        .iter()
        .map(|(s, n)| format!("{} {n}", s.label()))
        .collect::<Vec<_>>()
        .join(", ");
    check(ok, format!("cells at 100% success: {detail}"))
}

fn landscapes() -> Outcome {
    let (x, y) = default_landscape_grid();
    let res = x.spacing();
    let pm1 = loss_landscape(InputRange::PlusMinusOne, -1.0, x.clone(), y.clone(), &[])
        .map_err(|e| e.to_string())?;
    let zeros: Vec<(f64, f64)> = pm1
        .cells()
        .filter(|c| c.value < 1e-12)
        .map(|c| (c.x, c.y))
        .collect();
    let near = |p: (f64, f64), q: (f64, f64)| {
        (p.0 - q.0).abs() <= res / 2.0 && (p.1 - q.1).abs() <= res / 2.0
    };
    let zeros_ok = zeros.len() == 2
        && [(0.5, -0.5), (-0.5, 0.5)]
            .iter()
            .all(|&t| zeros.iter().any(|&z| near(z, t)));
    let other_minima = local_minima(&pm1)
        .iter()
        .filter(|m| m.value >= 1e-12)
        .count();
    let a_ok = zeros_ok && other_minima == 0;

    let zo = loss_landscape(InputRange::ZeroOne, -1.0, x, y, &[]).map_err(|e| e.to_string())?;
    let batch = Batch::xor(InputRange::ZeroOne);
    let and = AND_TARGETS.map(|t| t as u8);
    let and_minima: Vec<(f64, f64)> = local_minima(&zo)
        .into_iter()
        .filter(|m| classes(ModelArch::PRELU, &[m.x, m.y, -1.0], &batch) == and)
        .map(|m| (m.x, m.y))
        .collect();
    let b_ok = and_minima.iter().any(|m| m.0 > 0.0 && m.1 > 0.0)
        && and_minima.iter().any(|m| m.0 < 0.0 && m.1 < 0.0);

    let base = TrialSpec::new(ModelArch::PRELU, InputRange::ZeroOne, 0.05);
    let fixed = |range| -> Result<Vec<f64>, String> {
        let rows = quadrant_study(range, 0.05, 50, SEED, &base).map_err(|e| e.to_string())?;
        Ok(rows
            .iter()
            .filter(|r| r.slope == SlopeSetup::FixedMinusOne)
            .map(|r| r.success_rate)
            .collect())
    };
    let q01 = fixed(InputRange::ZeroOne)?;
    let qpm = fixed(InputRange::PlusMinusOne)?;
    let c_ok = q01[1] == 1.0
        && q01[3] == 1.0
        && q01[0] <= 0.05
        && q01[2] <= 0.05
        && qpm.iter().all(|&r| r == 1.0);

    check(
        a_ok && b_ok && c_ok,
        format!(
            "(a) zero cells {zeros:?}, other minima {other_minima} [{}]; (b) AND minima {and_minima:?} [{}]; (c) 01 {q01:?}, pm1 {qpm:?} [{}]",
            tag(a_ok),
            tag(b_ok),
            tag(c_ok)
        ),
    )
}

fn tag(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn margins() -> Outcome {
    let base = TrialSpec::new(ModelArch::PRELU, InputRange::PlusMinusOne, 0.05);
    let mut m = Vec::new();
    for setup in ModelSetup::main_three() {
        let (x, y) = default_boundary_grid(setup.range);
        let s = decision_boundary_raster(setup, 100, 0.05, SEED, &base, x, y)
            .map_err(|e| e.to_string())?;
        m.push((setup.label(), boundary_margin(&s, &Batch::xor(setup.range))));
    }
    let ok = m[0].1 > m[1].1 && m[0].1 > m[2].1;
    let detail = m
        .iter()
        .map(|(l, v)| format!("{l} {v:.3}"))
        .collect::<Vec<_>>()
        .join(", ");
    check(ok, format!("margins: {detail}"))
}

fn runtime() -> Outcome {
    let base = TrialSpec::new(ModelArch::PRELU, InputRange::PlusMinusOne, 0.05);
    let setups: Vec<(ModelSetup, f64)> = ModelSetup::main_three()
        .into_iter()
        .map(|s| (s, 0.05))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?;
    let (_, summary) = pool
        .install(|| bench_runtime(&setups, SEED, &base, BenchConfig::default()))
        .map_err(|e| e.to_string())?;
    let med = |a: ModelArch| {
        summary
            .iter()
            .find(|s| s.setup.arch == a)
            .map(|s| s.median_ns)
            .unwrap()
    };
    let (p, g, m) = (
        med(ModelArch::PRELU),
        med(ModelArch::GcuNeuron),
        med(ModelArch::MlpTanh),
    );
    check(
        m > 1.5 * p && (p - g).abs() < 0.5 * p,
        format!(
            "median per trial: prelu {:.1} us, gcu {:.1} us, mlp {:.1} us (mlp/prelu {:.2}, |prelu-gcu|/prelu {:.2})",
            p / 1e3,
            g / 1e3,
            m / 1e3,
            m / p,
            (p - g).abs() / p
        ),
    )
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

fn determinism() -> Outcome {
    let commands: [&[&str]; 6] = [
        &["train", "--model", "mlp", "--trace"],
        &["sweep", "--trials", "10"],
        &["curves", "--trials", "20"],
        &["landscape", "--range", "01", "--trajectories", "3"],
        &["boundary", "--trials", "20", "--steps", "101"],
        &[
            "bench",
            "--repetitions",
            "5",
            "--trials",
            "2",
            "--warmup",
            "1",
        ],
    ];
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut compared = 0;
    for args in commands {
        let mut runs = Vec::new();
        for k in 0..2 {
            let out = root.path().join(format!("{}-{k}", args[0]));
            let status = Command::new(env!("CARGO_BIN_EXE_xorlab"))
                .args(args)
                .args(["--seed", "11", "--no-timing", "--out"])
                .arg(&out)
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("{} exited with {status}", args[0]));
            }
            runs.push(csv_files(&out));
        }
        if runs[0].is_empty() || runs[0] != runs[1] {
            return Err(format!("{} produced differing CSVs", args[0]));
        }
        compared += runs[0].len();
    }
    Ok(format!(
        "6 commands run twice, {compared} CSV files byte-identical"
    ))
}

fn main() -> ExitCode {
    let base = TrialSpec::new(ModelArch::PRELU, InputRange::PlusMinusOne, 0.05);
    let mut sweep_cache: Option<Result<Vec<SweepRow>, String>> = None;
    let mut sweep = || {
        sweep_cache
            .get_or_insert_with(|| {
                sweep_learning_rates(
                    &ModelSetup::all_four(),
                    &default_lr_grid(),
                    100,
                    SEED,
                    &base,
                )
                .map_err(|e| e.to_string())
            })
            .clone()
    };

    let mut failed = 0;
    let mut report = |n: u32, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        let (status, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if outcome.is_err() {
            failed += 1;
        }
        println!("{status} {n} {name} ({secs:.1}s): {detail}");
    };

    report(1, "activation identities", &mut activation_identities);
    report(2, "gradient oracle", &mut gradient_oracle);
    report(3, "prelu convergence on {-1,1}", &mut prelu_convergence);
    report(4, "gcu convergence on {0,1} at best lr", &mut || {
        gcu_convergence(&sweep()?)
    });
    report(5, "widest full-success lr span", &mut || lr_span(&sweep()?));
    report(6, "loss landscapes and quadrant study", &mut landscapes);
    report(7, "decision boundary margins", &mut margins);
    report(8, "runtime ordering", &mut runtime);
    report(9, "determinism", &mut determinism);

    if failed == 0 {
        println!("acceptance: all 9 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 9 criteria failed");
        ExitCode::FAILURE
    }
}

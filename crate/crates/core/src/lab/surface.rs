use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::models::{Batch, InputRange, ModelArch};
use crate::Result;

use super::classify;
use super::sweep::ModelSetup;
use super::trial::{run_batch, run_trial, TrialSpec};

/// Evenly spaced samples `min ..= max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(name: impl Into<String>, min: f64, max: f64, steps: usize) -> Self {
        Axis {
            name: name.into(),
            min,
            max,
            steps,
        }
    }

    /// Sample `i`, measured from the axis midpoint so that samples mirrored
    /// about the midpoint are exactly mirrored values.
    pub fn value(&self, i: usize) -> f64 {
        let last = self.steps.saturating_sub(1);
        if i == 0 || last == 0 {
            return self.min;
        }
        if i == last {
            return self.max;
        }
        let centre = 0.5 * (self.min + self.max);
        let half = 0.5 * (self.max - self.min);
        let k = 2 * i as i64 - last as i64;
        centre + half * (k as f64 / last as f64)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.value(i)).collect()
    }

    pub fn spacing(&self) -> f64 {
        if self.steps <= 1 {
            0.0
        } else {
            (self.max - self.min) / (self.steps - 1) as f64
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 || !(self.min.is_finite() && self.max.is_finite() && self.min < self.max)
        {
            return Err(crate::Error::InvalidConfig(format!(
                "axis {} needs min < max and at least 2 steps",
                self.name
            )));
        }
        Ok(())
    }
}

/// A labelled sequence of points drawn over a surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Overlay {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Values on a rectangular grid; `values[iy][ix]` sits at
/// `(x_axis.value(ix), y_axis.value(iy))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Surface {
    pub x_axis: Axis,
    pub y_axis: Axis,
    pub values: Vec<Vec<f64>>,
    pub overlays: Vec<Overlay>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    pub ix: usize,
    pub iy: usize,
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

impl Surface {
    /// Evaluates `f(x, y)` on every grid point, rows in parallel.
    pub fn tabulate(
        x_axis: Axis,
        y_axis: Axis,
        f: impl Fn(f64, f64) -> f64 + Sync,
    ) -> Result<Self> {
        x_axis.validate()?;
        y_axis.validate()?;
        let xs = x_axis.values();
        let values = (0..y_axis.steps)
            .into_par_iter()
            .map(|iy| {
                let y = y_axis.value(iy);
                xs.iter().map(|&x| f(x, y)).collect()
            })
            .collect();
        Ok(Surface {
            x_axis,
            y_axis,
            values,
            overlays: Vec::new(),
        })
    }

    pub fn cell(&self, ix: usize, iy: usize) -> GridCell {
        GridCell {
            ix,
            iy,
            x: self.x_axis.value(ix),
            y: self.y_axis.value(iy),
            value: self.values[iy][ix],
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = GridCell> + '_ {
        (0..self.y_axis.steps)
            .flat_map(move |iy| (0..self.x_axis.steps).map(move |ix| self.cell(ix, iy)))
    }

    /// The grid cell closest to `(x, y)`.
    pub fn nearest(&self, x: f64, y: f64) -> GridCell {
        let idx = |a: &Axis, v: f64| {
            (((v - a.min) / a.spacing()).round().max(0.0) as usize).min(a.steps - 1)
        };
        self.cell(idx(&self.x_axis, x), idx(&self.y_axis, y))
    }

    pub fn overlay(&self, label: &str) -> Option<&Overlay> {
        self.overlays.iter().find(|o| o.label == label)
    }
}

/// A local minimum of a surface: a connected plateau of equal-valued cells
/// (8-connectivity) lying strictly below every cell that touches it. A plateau
/// of one cell is an ordinary strict minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMinimum {
    pub value: f64,
    /// Centroid of the plateau.
    pub x: f64,
    pub y: f64,
    pub cells: Vec<GridCell>,
}

/// Plateau minima not touching the grid border.
pub fn local_minima(surface: &Surface) -> Vec<LocalMinimum> {
    let (nx, ny) = (surface.x_axis.steps, surface.y_axis.steps);
    let v = &surface.values;
    let mut seen = vec![false; nx * ny];
    let mut out = Vec::new();
    let neighbours = |ix: usize, iy: usize| {
        (-1isize..=1)
            .flat_map(move |dy| (-1isize..=1).map(move |dx| (dx, dy)))
            .filter_map(move |(dx, dy)| {
                let (x, y) = (ix as isize + dx, iy as isize + dy);
                ((dx, dy) != (0, 0) && x >= 0 && y >= 0 && (x as usize) < nx && (y as usize) < ny)
                    .then_some((x as usize, y as usize))
            })
    };
    for iy in 0..ny {
        for ix in 0..nx {
            if seen[iy * nx + ix] {
                continue;
            }
            let c = v[iy][ix];
            // Cheap reject before the flood fill.
            if neighbours(ix, iy).any(|(x, y)| v[y][x] < c) {
                continue;
            }
            let mut stack = vec![(ix, iy)];
            let mut plateau = Vec::new();
            let mut is_min = true;
            seen[iy * nx + ix] = true;
            while let Some((x, y)) = stack.pop() {
                plateau.push((x, y));
                if x == 0 || y == 0 || x == nx - 1 || y == ny - 1 {
                    is_min = false;
                }
                for (qx, qy) in neighbours(x, y) {
                    let w = v[qy][qx];
                    if w == c {
                        if !seen[qy * nx + qx] {
                            seen[qy * nx + qx] = true;
                            stack.push((qx, qy));
                        }
                    } else if w.partial_cmp(&c) != Some(std::cmp::Ordering::Greater) {
                        is_min = false;
                    }
                }
            }
            if is_min {
                plateau.sort_by_key(|&(x, y)| (y, x));
                let cells: Vec<GridCell> =
                    plateau.iter().map(|&(x, y)| surface.cell(x, y)).collect();
                let n = cells.len() as f64;
                out.push(LocalMinimum {
                    value: c,
                    x: cells.iter().map(|g| g.x).sum::<f64>() / n,
                    y: cells.iter().map(|g| g.y).sum::<f64>() / n,
                    cells,
                });
            }
        }
    }
    out
}

pub fn default_landscape_grid() -> (Axis, Axis) {
    (
        Axis::new("w1", -2.0, 2.0, 201),
        Axis::new("w2", -2.0, 2.0, 201),
    )
}

pub fn default_boundary_grid(range: InputRange) -> (Axis, Axis) {
    let (lo, hi) = match range {
        InputRange::PlusMinusOne => (-2.0, 2.0),
        InputRange::ZeroOne => (-0.5, 1.5),
    };
    (Axis::new("x1", lo, hi, 201), Axis::new("x2", lo, hi, 201))
}

/// MSE of the bias-free PReLU neuron over `(w1, w2)` with the slope held at
/// `slope`. Overlays: `minima` (local minimum centroids) and one `trajectory i`
/// per spec, the `(w1, w2)` path of that trial.
pub fn loss_landscape(
    range: InputRange,
    slope: f64,
    x_axis: Axis,
    y_axis: Axis,
    trajectories: &[TrialSpec],
) -> Result<Surface> {
    let batch = Batch::xor(range);
    let arch = ModelArch::PRELU;
    let mut surface = Surface::tabulate(x_axis, y_axis, |w1, w2| {
        let mut grad = [0.0; 3];
        arch.loss_grad(&[w1, w2, slope], &batch, &mut grad).0
    })?;
    let minima = local_minima(&surface)
        .into_iter()
        .map(|m| (m.x, m.y))
        .collect();
    surface.overlays.push(Overlay {
        label: "minima".into(),
        points: minima,
    });
    for (i, spec) in trajectories.iter().enumerate() {
        let result = run_trial(&spec.traced())?;
        let points = result
            .trace
            .expect("traced trial")
            .params
            .iter()
            .map(|p| (p[0], p[1]))
            .collect();
        surface.overlays.push(Overlay {
            label: format!("trajectory {i}"),
            points,
        });
    }
    Ok(surface)
}

/// Mean predicted class over `n_trials` trained models at every input pixel.
pub fn decision_boundary_raster(
    setup: ModelSetup,
    n_trials: usize,
    lr: f64,
    base_seed: u64,
    base: &TrialSpec,
    x_axis: Axis,
    y_axis: Axis,
) -> Result<Surface> {
    let results = run_batch(&setup.trial(base, lr), n_trials, base_seed)?;
    let thetas: Vec<&[f64]> = results.iter().map(|r| r.final_params.theta()).collect();
    let n = thetas.len() as f64;
    Surface::tabulate(x_axis, y_axis, |x1, x2| {
        let ones: u32 = thetas
            .iter()
            .map(|th| u32::from(classify(setup.arch.output(th, [x1, x2]))))
            .sum();
        f64::from(ones) / n
    })
}

/// Smallest distance from a training point to the 0.5 level set of a mean
/// class raster. Crossings are located by linear interpolation between
/// neighbouring pixels on either side of 0.5. A training point whose nearest
/// pixel is on the wrong side has margin 0; with no crossing at all the margin
/// is infinite.
pub fn boundary_margin(surface: &Surface, batch: &Batch) -> f64 {
    let (nx, ny) = (surface.x_axis.steps, surface.y_axis.steps);
    let (dx, dy) = (surface.x_axis.spacing(), surface.y_axis.spacing());
    let v = &surface.values;
    let side = |a: f64| a >= 0.5;
    let mut crossings = Vec::new();
    let frac = |a: f64, b: f64| (0.5 - a) / (b - a);
    for iy in 0..ny {
        for ix in 0..nx {
            let a = v[iy][ix];
            let (x, y) = (surface.x_axis.value(ix), surface.y_axis.value(iy));
            if ix + 1 < nx && side(a) != side(v[iy][ix + 1]) {
                crossings.push((x + frac(a, v[iy][ix + 1]) * dx, y));
            }
            if iy + 1 < ny && side(a) != side(v[iy + 1][ix]) {
                crossings.push((x, y + frac(a, v[iy + 1][ix]) * dy));
            }
        }
    }
    batch
        .inputs
        .iter()
        .zip(batch.targets)
        .map(|(p, t)| {
            if side(surface.nearest(p[0], p[1]).value) != (t >= 0.5) {
                return 0.0;
            }
            crossings
                .iter()
                .map(|&(cx, cy)| (cx - p[0]).hypot(cy - p[1]))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min)
}

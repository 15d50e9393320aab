//! Scalar activations, their closed-form derivatives and the MSE loss.
//!
//! Every function here is pure and total on finite inputs. The PReLU kink at
//! `x = 0` is assigned to the positive branch: `d/dx = 1` and `d/da = 0` there.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Fixed negative-side slope used by [`Activation::LeakyRelu`].
pub const LEAKY_RELU_SLOPE: f64 = 0.01;

/// Output scale of LeCun's tanh, `1.7159 * tanh(2x / 3)`.
pub const LECUN_TANH_SCALE: f64 = 1.7159;

/// Input scale of LeCun's tanh.
pub const LECUN_TANH_GAIN: f64 = 2.0 / 3.0;

/// An activation function. Only `PRelu` carries a (learnable) parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Activation {
    PRelu { slope: f64 },
    Gcu,
    Relu,
    LeakyRelu,
    TanhLecun,
    Identity,
    Abs,
}

impl Activation {
    pub fn prelu(slope: f64) -> Self {
        Activation::PRelu { slope }
    }

    /// The learnable slope, if this activation has one.
    pub fn slope(&self) -> Option<f64> {
        match *self {
            Activation::PRelu { slope } => Some(slope),
            _ => None,
        }
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Activation::PRelu { slope } => {
                if x >= 0.0 {
                    x
                } else {
                    slope * x
                }
            }
            Activation::Gcu => x * x.cos(),
            Activation::Relu => {
                if x >= 0.0 {
                    x
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu => {
                if x >= 0.0 {
                    x
                } else {
                    LEAKY_RELU_SLOPE * x
                }
            }
            Activation::TanhLecun => LECUN_TANH_SCALE * (LECUN_TANH_GAIN * x).tanh(),
            Activation::Identity => x,
            Activation::Abs => x.abs(),
        }
    }

    /// Derivative with respect to the input.
    #[inline]
    pub fn dvalue_dx(&self, x: f64) -> f64 {
        match *self {
            Activation::PRelu { slope } => {
                if x >= 0.0 {
                    1.0
                } else {
                    slope
                }
            }
            Activation::Gcu => {
                let (s, c) = x.sin_cos();
                c - x * s
            }
            Activation::Relu => {
                if x >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu => {
                if x >= 0.0 {
                    1.0
                } else {
                    LEAKY_RELU_SLOPE
                }
            }
            Activation::TanhLecun => {
                let t = (LECUN_TANH_GAIN * x).tanh();
                LECUN_TANH_SCALE * LECUN_TANH_GAIN * (1.0 - t * t)
            }
            Activation::Identity => 1.0,
            Activation::Abs => {
                if x >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// Derivative with respect to the PReLU slope. Fails for every other kind.
    #[inline]
    pub fn dvalue_dslope(&self, x: f64) -> Result<f64> {
        match self {
            Activation::PRelu { .. } => Ok(prelu_dslope(x)),
            other => Err(Error::NoSlope(*other)),
        }
    }
}

/// `d PReLU(x; a) / da`, which does not depend on `a`.
#[inline]
pub fn prelu_dslope(x: f64) -> f64 {
    if x >= 0.0 {
        0.0
    } else {
        x
    }
}

pub fn act_value(act: Activation, x: f64) -> f64 {
    act.value(x)
}

pub fn act_dvalue_dx(act: Activation, x: f64) -> f64 {
    act.dvalue_dx(x)
}

pub fn act_dvalue_dslope(act: Activation, x: f64) -> Result<f64> {
    act.dvalue_dslope(x)
}

/// Mean squared error.
///
/// Squared residuals are summed smallest first, so the result does not depend
/// on the order of the rows.
pub fn mse(pred: &[f64], target: &[f64]) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(Error::LengthMismatch {
            expected: target.len(),
            actual: pred.len(),
        });
    }
    if pred.is_empty() {
        return Ok(0.0);
    }
    Ok(mse_unchecked(pred, target))
}

#[inline]
pub(crate) fn mse_unchecked(pred: &[f64], target: &[f64]) -> f64 {
    let mut sq = [0.0f64; 4];
    if pred.len() == 4 {
        for i in 0..4 {
            let r = pred[i] - target[i];
            sq[i] = r * r;
        }
        sort4(&mut sq);
        return (((sq[0] + sq[1]) + sq[2]) + sq[3]) / 4.0;
    }
    let mut all: Vec<f64> = pred
        .iter()
        .zip(target)
        .map(|(p, t)| (p - t) * (p - t))
        .collect();
    all.sort_by(f64::total_cmp);
    all.iter().sum::<f64>() / all.len() as f64
}

#[inline]
fn sort4(v: &mut [f64; 4]) {
    // Five compare-exchanges; NaNs end up wherever, which is fine for a loss.
    let mut cx = |i: usize, j: usize| {
        if v[j] < v[i] {
            v.swap(i, j);
        }
    };
    cx(0, 1);
    cx(2, 3);
    cx(0, 2);
    cx(1, 3);
    cx(1, 2);
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `a*x + (1 - a)*ReLU(x)` evaluated with error-free sums and products, so
/// the result is within one ulp of the exact value for finite inputs.
pub fn prelu_decomposition(x: f64, a: f64) -> f64 {
    let r = act_value(Activation::Relu, x);
    let (s, se) = two_sum(1.0, -a);
    let (p1, e1) = two_prod(a, x);
    let (p2, e2) = two_prod(s, r);
    let (h, he) = two_sum(p1, p2);
    h + (he + e1 + e2 + se * r)
}

/// Central difference `(f(x + h) - f(x - h)) / 2h`. Test oracle only.
pub fn fd_derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    debug_assert!(h > 0.0);
    (f(x + h) - f(x - h)) / (2.0 * h)
}

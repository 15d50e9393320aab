//! The three XOR architectures and the fixed four-row training batch.
//!
//! Parameter layouts (canonical order, used by Adam state and CSV traces):
//!
//! | arch                | theta                                   |
//! |---------------------|-----------------------------------------|
//! | PReLU, no bias      | `w1, w2, a`                             |
//! | PReLU, with bias    | `w1, w2, b, a`                          |
//! | GCU                 | `w1, w2, b`                             |
//! | MLP 2-2-1 tanh      | `W11, W12, W21, W22, b1, b2, v1, v2`    |
//!
//! `Wjk` is the weight from input `k` to hidden unit `j`. The MLP output is
//! `v1 * t1 + v2 * t2` with no output bias.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::scalargrad::{mse_unchecked, prelu_dslope, Activation};
use crate::{Error, Result};

/// XOR targets in batch order, for either input encoding.
pub const XOR_TARGETS: [f64; 4] = [0.0, 1.0, 1.0, 0.0];

/// AND targets in batch order.
pub const AND_TARGETS: [f64; 4] = [0.0, 0.0, 0.0, 1.0];

/// Largest parameter count of any architecture.
pub const MAX_PARAMS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputRange {
    /// Inputs in `{0, 1}`.
    ZeroOne,
    /// Inputs in `{-1, 1}`.
    PlusMinusOne,
}

impl InputRange {
    pub fn low(self) -> f64 {
        match self {
            InputRange::ZeroOne => 0.0,
            InputRange::PlusMinusOne => -1.0,
        }
    }

    /// Distance between two adjacent corners of the input square.
    pub fn side(self) -> f64 {
        1.0 - self.low()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InputRange::ZeroOne => "01",
            InputRange::PlusMinusOne => "pm1",
        }
    }
}

impl fmt::Display for InputRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InputRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "01" => Ok(InputRange::ZeroOne),
            "pm1" => Ok(InputRange::PlusMinusOne),
            other => Err(Error::InvalidConfig(format!(
                "unknown input range {other:?}"
            ))),
        }
    }
}

/// The full XOR training set for one input encoding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Batch {
    pub inputs: [[f64; 2]; 4],
    pub targets: [f64; 4],
}

impl Batch {
    pub fn xor(range: InputRange) -> Self {
        let lo = range.low();
        Batch {
            inputs: [[lo, lo], [lo, 1.0], [1.0, lo], [1.0, 1.0]],
            targets: XOR_TARGETS,
        }
    }
}

pub fn xor_batch(range: InputRange) -> ([[f64; 2]; 4], [f64; 4]) {
    let b = Batch::xor(range);
    (b.inputs, b.targets)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "arch", rename_all = "snake_case")]
pub enum ModelArch {
    PReluNeuron { bias: bool },
    GcuNeuron,
    MlpTanh,
}

impl ModelArch {
    pub const PRELU: ModelArch = ModelArch::PReluNeuron { bias: false };
    pub const PRELU_BIAS: ModelArch = ModelArch::PReluNeuron { bias: true };

    /// Every architecture, in reporting order.
    pub const ALL: [ModelArch; 4] = [
        ModelArch::PRELU,
        ModelArch::PRELU_BIAS,
        ModelArch::GcuNeuron,
        ModelArch::MlpTanh,
    ];

    pub fn param_count(self) -> usize {
        match self {
            ModelArch::PReluNeuron { bias: false } => 3,
            ModelArch::PReluNeuron { bias: true } => 4,
            ModelArch::GcuNeuron => 3,
            ModelArch::MlpTanh => 8,
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            ModelArch::PReluNeuron { bias: false } => &["w1", "w2", "a"],
            ModelArch::PReluNeuron { bias: true } => &["w1", "w2", "b", "a"],
            ModelArch::GcuNeuron => &["w1", "w2", "b"],
            ModelArch::MlpTanh => &["W11", "W12", "W21", "W22", "b1", "b2", "v1", "v2"],
        }
    }

    /// What a parameter is, which decides how it is initialized.
    pub fn param_role(self, index: usize) -> ParamRole {
        match (self, index) {
            (ModelArch::PReluNeuron { bias: false }, 2) => ParamRole::Slope,
            (ModelArch::PReluNeuron { bias: true }, 2) => ParamRole::Bias,
            (ModelArch::PReluNeuron { bias: true }, 3) => ParamRole::Slope,
            (ModelArch::GcuNeuron, 2) => ParamRole::Bias,
            (ModelArch::MlpTanh, 4 | 5) => ParamRole::Bias,
            _ => ParamRole::Weight,
        }
    }

    /// Index of the PReLU slope in theta.
    pub fn slope_index(self) -> Option<usize> {
        match self {
            ModelArch::PReluNeuron { bias: false } => Some(2),
            ModelArch::PReluNeuron { bias: true } => Some(3),
            _ => None,
        }
    }

    /// Input encoding each model is trained with by default.
    pub fn default_range(self) -> InputRange {
        match self {
            ModelArch::GcuNeuron => InputRange::ZeroOne,
            _ => InputRange::PlusMinusOne,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModelArch::PReluNeuron { bias: false } => "prelu",
            ModelArch::PReluNeuron { bias: true } => "prelu-bias",
            ModelArch::GcuNeuron => "gcu",
            ModelArch::MlpTanh => "mlp",
        }
    }

    /// Network output for one input pair.
    #[inline]
    pub fn output(self, theta: &[f64], x: [f64; 2]) -> f64 {
        match self {
            ModelArch::PReluNeuron { bias } => {
                let (z, a) = if bias {
                    (theta[0] * x[0] + theta[1] * x[1] + theta[2], theta[3])
                } else {
                    (theta[0] * x[0] + theta[1] * x[1], theta[2])
                };
                Activation::prelu(a).value(z)
            }
            ModelArch::GcuNeuron => {
                Activation::Gcu.value(theta[0] * x[0] + theta[1] * x[1] + theta[2])
            }
            ModelArch::MlpTanh => {
                let act = Activation::TanhLecun;
                let h1 = theta[0] * x[0] + theta[1] * x[1] + theta[4];
                let h2 = theta[2] * x[0] + theta[3] * x[1] + theta[5];
                theta[6] * act.value(h1) + theta[7] * act.value(h2)
            }
        }
    }

    #[inline]
    pub fn outputs(self, theta: &[f64], inputs: &[[f64; 2]; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (o, x) in out.iter_mut().zip(inputs) {
            *o = self.output(theta, *x);
        }
        out
    }

    /// Writes the gradient of the batch MSE into `grad` and returns the MSE
    /// and the four outputs, all evaluated at `theta`.
    #[inline]
    pub fn loss_grad(self, theta: &[f64], batch: &Batch, grad: &mut [f64]) -> (f64, [f64; 4]) {
        let n = self.param_count();
        debug_assert_eq!(theta.len(), n);
        debug_assert_eq!(grad.len(), n);
        grad.fill(0.0);
        let mut pred = [0.0; 4];
        // d(mean r^2)/dy_i = r_i / 2 for a batch of four.
        match self {
            ModelArch::PReluNeuron { bias } => {
                let (a, ia) = if bias { (theta[3], 3) } else { (theta[2], 2) };
                let act = Activation::prelu(a);
                for (i, x) in batch.inputs.iter().enumerate() {
                    let mut z = theta[0] * x[0] + theta[1] * x[1];
                    if bias {
                        z += theta[2];
                    }
                    let y = act.value(z);
                    pred[i] = y;
                    let g = 0.5 * (y - batch.targets[i]);
                    let dz = g * act.dvalue_dx(z);
                    grad[0] += dz * x[0];
                    grad[1] += dz * x[1];
                    if bias {
                        grad[2] += dz;
                    }
                    grad[ia] += g * prelu_dslope(z);
                }
            }
            ModelArch::GcuNeuron => {
                for (i, x) in batch.inputs.iter().enumerate() {
                    let z = theta[0] * x[0] + theta[1] * x[1] + theta[2];
                    let (s, c) = z.sin_cos();
                    let y = z * c;
                    pred[i] = y;
                    let dz = 0.5 * (y - batch.targets[i]) * (c - z * s);
                    grad[0] += dz * x[0];
                    grad[1] += dz * x[1];
                    grad[2] += dz;
                }
            }
            ModelArch::MlpTanh => {
                use crate::scalargrad::{LECUN_TANH_GAIN as K, LECUN_TANH_SCALE as S};
                for (i, x) in batch.inputs.iter().enumerate() {
                    let h1 = theta[0] * x[0] + theta[1] * x[1] + theta[4];
                    let h2 = theta[2] * x[0] + theta[3] * x[1] + theta[5];
                    let (u1, u2) = ((K * h1).tanh(), (K * h2).tanh());
                    let (t1, t2) = (S * u1, S * u2);
                    let y = theta[6] * t1 + theta[7] * t2;
                    pred[i] = y;
                    let g = 0.5 * (y - batch.targets[i]);
                    let d1 = g * theta[6] * S * K * (1.0 - u1 * u1);
                    let d2 = g * theta[7] * S * K * (1.0 - u2 * u2);
                    grad[0] += d1 * x[0];
                    grad[1] += d1 * x[1];
                    grad[2] += d2 * x[0];
                    grad[3] += d2 * x[1];
                    grad[4] += d1;
                    grad[5] += d2;
                    grad[6] += g * t1;
                    grad[7] += g * t2;
                }
            }
        }
        (mse_unchecked(&pred, &batch.targets), pred)
    }

    /// Smallest `|z|` over PReLU pre-activations on the batch, i.e. how close
    /// `theta` sits to a kink. Rows whose pre-activation is identically zero
    /// (the origin without a bias) never cross the kink and are skipped.
    /// `None` for smooth architectures.
    pub fn kink_distance(self, theta: &[f64], inputs: &[[f64; 2]; 4]) -> Option<f64> {
        match self {
            ModelArch::PReluNeuron { bias } => {
                let b = if bias { theta[2] } else { 0.0 };
                inputs
                    .iter()
                    .filter(|x| bias || *x != &[0.0, 0.0])
                    .map(|x| (theta[0] * x[0] + theta[1] * x[1] + b).abs())
                    .reduce(f64::min)
            }
            _ => None,
        }
    }
}

impl fmt::Display for ModelArch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelArch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelArch::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown model {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamRole {
    Weight,
    Bias,
    Slope,
}

/// A parameter vector tied to its architecture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    arch: ModelArch,
    theta: Vec<f64>,
}

impl ModelParams {
    pub fn new(arch: ModelArch, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != arch.param_count() {
            return Err(Error::LengthMismatch {
                expected: arch.param_count(),
                actual: theta.len(),
            });
        }
        if let Some((index, &value)) = theta.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(ModelParams { arch, theta })
    }

    /// Hand-built single-neuron XOR solution: `|x1 - x2|` on `{0, 1}`, and
    /// the same with halved weights on `{-1, 1}`.
    pub fn xor_solution(range: InputRange) -> Self {
        let w = match range {
            InputRange::ZeroOne => 1.0,
            InputRange::PlusMinusOne => 0.5,
        };
        ModelParams {
            arch: ModelArch::PRELU,
            theta: vec![w, -w, -1.0],
        }
    }

    pub fn arch(&self) -> ModelArch {
        self.arch
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn into_theta(self) -> Vec<f64> {
        self.theta
    }

    pub fn predict(&self, x: [f64; 2]) -> f64 {
        self.arch.output(&self.theta, x)
    }

    pub fn forward(&self, inputs: &[[f64; 2]; 4]) -> [f64; 4] {
        self.arch.outputs(&self.theta, inputs)
    }

    /// Gradient of the batch MSE with respect to theta, in canonical order.
    pub fn backward(&self, inputs: &[[f64; 2]; 4], targets: &[f64; 4]) -> Vec<f64> {
        let batch = Batch {
            inputs: *inputs,
            targets: *targets,
        };
        let mut grad = vec![0.0; self.theta.len()];
        self.arch.loss_grad(&self.theta, &batch, &mut grad);
        grad
    }

    pub fn loss(&self, batch: &Batch) -> f64 {
        mse_unchecked(&self.forward(&batch.inputs), &batch.targets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batches_are_in_fixed_order() {
        let (x, t) = xor_batch(InputRange::ZeroOne);
        assert_eq!(x, [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]);
        assert_eq!(t, XOR_TARGETS);
        assert_eq!((x[1], t[1]), ([0.0, 1.0], 1.0));

        let (x, t) = xor_batch(InputRange::PlusMinusOne);
        assert_eq!(x, [[-1.0, -1.0], [-1.0, 1.0], [1.0, -1.0], [1.0, 1.0]]);
        assert_eq!((x[0], t[0]), ([-1.0, -1.0], 0.0));
        assert_eq!(t, [0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(ModelArch::PRELU.param_count(), 3);
        assert_eq!(ModelArch::PRELU_BIAS.param_count(), 4);
        assert_eq!(ModelArch::GcuNeuron.param_count(), 3);
        assert_eq!(ModelArch::MlpTanh.param_count(), 8);
        for arch in ModelArch::ALL {
            assert_eq!(arch.param_names().len(), arch.param_count());
        }
    }

    #[test]
    fn params_validate() {
        assert!(matches!(
            ModelParams::new(ModelArch::GcuNeuron, vec![0.0; 4]),
            Err(Error::LengthMismatch {
                expected: 3,
                actual: 4
            })
        ));
        assert!(matches!(
            ModelParams::new(ModelArch::GcuNeuron, vec![0.0, f64::NAN, 0.0]),
            Err(Error::NonFinite { index: 1, .. })
        ));
    }

    #[test]
    fn brute_force_xor_solutions() {
        for range in [InputRange::ZeroOne, InputRange::PlusMinusOne] {
            let b = Batch::xor(range);
            let p = ModelParams::xor_solution(range);
            // |w (x1 - x2)| row by row
            for (x, t) in b.inputs.iter().zip(b.targets) {
                let w = p.theta()[0];
                assert_eq!((w * x[0] - w * x[1]).abs(), t);
            }
            assert_eq!(p.forward(&b.inputs), XOR_TARGETS);
            assert_eq!(p.loss(&b), 0.0);
        }
    }

    #[test]
    fn gcu_at_origin_outputs_zero() {
        let p = ModelParams::new(ModelArch::GcuNeuron, vec![0.0; 3]).unwrap();
        for range in [InputRange::ZeroOne, InputRange::PlusMinusOne] {
            assert_eq!(p.forward(&Batch::xor(range).inputs), [0.0; 4]);
        }
    }

    #[test]
    fn zero_loss_point_has_vanishing_weight_gradient() {
        let p = ModelParams::xor_solution(InputRange::PlusMinusOne);
        let (x, t) = xor_batch(InputRange::PlusMinusOne);
        let g = p.backward(&x, &t);
        assert!(g[0].hypot(g[1]) < 1e-12);
        assert_eq!(g[2], 0.0);
    }

    #[test]
    fn mlp_symmetric_zero_point() {
        let p = ModelParams::new(ModelArch::MlpTanh, vec![0.0; 8]).unwrap();
        for range in [InputRange::ZeroOne, InputRange::PlusMinusOne] {
            let (x, t) = xor_batch(range);
            let g = p.backward(&x, &t);
            assert!(g.iter().all(|&v| v == 0.0), "{g:?}");
        }
    }

    #[test]
    fn prelu_at_origin_matches_hand_gradient() {
        // a = 0, all z = 0: positive branch everywhere, output 0.
        // dL/dw_k = 1/2 * sum(-t_i * x_ik), dL/da = 0.
        let p = ModelParams::new(ModelArch::PRELU, vec![0.0; 3]).unwrap();
        let (x, t) = xor_batch(InputRange::ZeroOne);
        assert_eq!(p.backward(&x, &t), vec![-0.5, -0.5, 0.0]);
    }

    #[test]
    fn names_round_trip() {
        for arch in ModelArch::ALL {
            assert_eq!(arch.as_str().parse::<ModelArch>().unwrap(), arch);
        }
        assert!("relu".parse::<ModelArch>().is_err());
        assert_eq!(
            "pm1".parse::<InputRange>().unwrap(),
            InputRange::PlusMinusOne
        );
    }
}

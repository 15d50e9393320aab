//! Adam, parameter initialization, and per-trial random streams.
//!
//! Random numbers come from ChaCha8 (`rand_chacha`). A trial's stream is the
//! generator keyed by the run seed with the ChaCha stream id set to the trial
//! index, so trials are independent and can run in any order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::models::{ModelArch, ModelParams, ParamRole};
use crate::{Error, Result};

/// Adam hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamConfig {
    pub fn new(lr: f64) -> Self {
        AdamConfig {
            lr,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.lr.is_finite()
            && self.lr > 0.0
            && self.beta1 > 0.0
            && self.beta1 < 1.0
            && self.beta2 > 0.0
            && self.beta2 < 1.0
            && self.eps.is_finite()
            && self.eps > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("bad Adam settings {self:?}")))
        }
    }
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Moment accumulators and step counter for one parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub config: AdamConfig,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(n_params: usize, config: AdamConfig) -> Self {
        AdamState {
            config,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
        }
    }

    /// One bias-corrected Adam update of `theta`, in place.
    #[inline]
    pub fn update(&mut self, theta: &mut [f64], grad: &[f64]) -> Result<()> {
        let n = self.m.len();
        for len in [theta.len(), grad.len()] {
            if len != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: len,
                });
            }
        }
        let AdamConfig {
            lr,
            beta1,
            beta2,
            eps,
        } = self.config;
        self.t += 1;
        let t = i32::try_from(self.t).unwrap_or(i32::MAX);
        let c1 = 1.0 - beta1.powi(t);
        let c2 = 1.0 - beta2.powi(t);
        for i in 0..n {
            let g = grad[i];
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g;
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            theta[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
        Ok(())
    }
}

/// Value-semantics Adam step: neither input is modified.
pub fn adam_step(
    state: &AdamState,
    params: &ModelParams,
    grad: &[f64],
) -> Result<(AdamState, ModelParams)> {
    let mut next = state.clone();
    let mut theta = params.theta().to_vec();
    next.update(&mut theta, grad)?;
    Ok((next, ModelParams::new(params.arch(), theta)?))
}

/// `1 / sqrt(fan_in)` for the two-input layers every model has, the usual
/// uniform bound for dense layers.
pub const DEFAULT_WEIGHT_BOUND: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// How a trial's starting parameters are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitPolicy {
    /// Weights are uniform on `[-weight_bound, weight_bound]`.
    pub weight_bound: f64,
    pub bias_init: f64,
    pub slope_init: f64,
    pub seed: u64,
    /// Trial index; selects the ChaCha stream.
    pub stream: u64,
}

impl InitPolicy {
    pub fn new(seed: u64, stream: u64) -> Self {
        InitPolicy {
            weight_bound: DEFAULT_WEIGHT_BOUND,
            bias_init: 0.0,
            slope_init: 0.0,
            seed,
            stream,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        trial_rng(self.seed, self.stream)
    }
}

impl Default for InitPolicy {
    fn default() -> Self {
        InitPolicy::new(0, 0)
    }
}

/// The random stream of trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn fill_non_weights(arch: ModelArch, policy: &InitPolicy, theta: &mut [f64]) {
    for (i, p) in theta.iter_mut().enumerate() {
        match arch.param_role(i) {
            ParamRole::Weight => {}
            ParamRole::Bias => *p = policy.bias_init,
            ParamRole::Slope => *p = policy.slope_init,
        }
    }
}

/// Weights i.i.d. uniform, drawn in canonical order; biases and slope fixed.
pub fn init_params(arch: ModelArch, policy: &InitPolicy) -> ModelParams {
    let mut rng = policy.rng();
    let bound = policy.weight_bound;
    let mut theta = vec![0.0; arch.param_count()];
    for (i, p) in theta.iter_mut().enumerate() {
        if arch.param_role(i) == ParamRole::Weight {
            *p = rng.random_range(-bound..=bound);
        }
    }
    fill_non_weights(arch, policy, &mut theta);
    ModelParams::new(arch, theta).expect("finite initial parameters")
}

/// Quadrant draws keep each coordinate magnitude in `(QUADRANT_MARGIN, 1]`.
pub const QUADRANT_MARGIN: f64 = 0.05;

/// Sign pattern `(w1, w2)` of quadrants 1 through 4.
pub fn quadrant_signs(quadrant: u8) -> Result<(f64, f64)> {
    match quadrant {
        1 => Ok((1.0, 1.0)),
        2 => Ok((-1.0, 1.0)),
        3 => Ok((-1.0, -1.0)),
        4 => Ok((1.0, -1.0)),
        q => Err(Error::InvalidQuadrant(q)),
    }
}

/// PReLU neuron with `(w1, w2)` drawn inside one open quadrant, each magnitude
/// in `(0.05, 1]`. The policy's weight bound is not used.
pub fn init_params_in_quadrant(
    arch: ModelArch,
    quadrant: u8,
    policy: &InitPolicy,
) -> Result<ModelParams> {
    if !matches!(arch, ModelArch::PReluNeuron { .. }) {
        return Err(Error::QuadrantNeedsPrelu);
    }
    let (s1, s2) = quadrant_signs(quadrant)?;
    let mut rng = policy.rng();
    let mut magnitude = || {
        let u: f64 = rng.random();
        1.0 - (1.0 - QUADRANT_MARGIN) * u
    };
    let mut theta = vec![0.0; arch.param_count()];
    theta[0] = s1 * magnitude();
    theta[1] = s2 * magnitude();
    fill_non_weights(arch, policy, &mut theta);
    ModelParams::new(arch, theta)
}

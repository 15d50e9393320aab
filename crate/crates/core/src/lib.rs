//! XOR with one neuron.
//!
//! Three tiny architectures trained on the four-row XOR table with Adam and
//! closed-form gradients:
//!
//! - a single PReLU neuron without bias (`w1, w2, a`), optionally with a bias,
//! - a single GCU neuron (`w1, w2, b`),
//! - a 2-2-1 MLP with LeCun tanh hidden units and no output bias.
//!
//! [`lab`] holds the experiment harness built on top: seeded batches of
//! trials, learning-rate sweeps, per-epoch curves, averaged decision
//! boundaries, loss landscapes and a runtime micro-benchmark.

pub mod lab;
pub mod models;
pub mod optim;
pub mod scalargrad;

mod error;

pub use error::{Error, Result};
pub use models::{Batch, InputRange, ModelArch, ModelParams};
pub use optim::{AdamConfig, AdamState, InitPolicy};
pub use scalargrad::Activation;

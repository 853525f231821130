//! Statevector simulation of a phase-encoded quantum neuron.
//!
//! Inputs and weights are real phase vectors `x`, `w` of length `m = 2^N`,
//! stored as unit-modulus amplitudes `e^{i x_j} / sqrt(m)`. The neuron circuit
//! prepares the input state, rotates the weight state onto `|1...1>` and copies
//! that component onto an ancilla, so `P(ancilla = 1) = |<psi_w|psi_x>|^2`.
//!
//! Modules:
//! - [`state`]: dense statevector and gate application
//! - [`circuit`]: gate and circuit types, text format
//! - [`builders`]: rotation-block and HSGS synthesis of the neuron circuit
//! - [`oracle`]: closed-form activation, gradient and dense-matrix references
//! - [`training`]: cost, gradient descent and the binary perceptron loop
//! - [`experiments`]: seeded experiment drivers with CSV output
//!
//! Basis index `j` has qubit 0 as its least significant bit.

pub mod builders;
pub mod circuit;
pub mod config;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod rng;
pub mod state;
pub mod training;

pub use builders::{Backend, GateCostReport, PhaseVector};
pub use circuit::{Circuit, Gate, GateKind};
pub use error::{Error, Result};
pub use state::QuantumState;

//! Circuit synthesis for the phase-encoded neuron.
//!
//! Two interchangeable backends realize the diagonal phase stage
//! `|j> -> e^{i phi_j} |j>` on top of the uniform superposition:
//!
//! - [`Backend::RotationBlocks`] applies one block per nonzero phase. A block
//!   maps the target index onto `|1...1>` with X gates, applies a
//!   multi-controlled `u1`, and maps back.
//! - [`Backend::Hsgs`] applies single-qubit `u1` gates to the weight-one
//!   indices and then multi-controlled corrections by increasing control
//!   count. Phases are first shifted so that index 0 carries phase zero.
//!
//! Both produce the target state up to a single global phase.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::circuit::{is_zero_angle, normalize_angle, Circuit, Gate};
use crate::error::{Error, Result};
use crate::state::QuantumState;

/// Phases below this (mod 2pi) are treated as zero and produce no gate.
pub const ZERO_ANGLE_TOL: f64 = 1e-12;

/// Real phases `x_0..x_{m-1}`, `m = 2^N`, each reduced to `[0, 2pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    phases: Vec<f64>,
}

impl PhaseVector {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        let m = phases.len();
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "phase vector length {m} is not a power of two >= 2"
            )));
        }
        if let Some(bad) = phases.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite phase {bad}")));
        }
        Ok(PhaseVector {
            phases: phases.into_iter().map(normalize_angle).collect(),
        })
    }

    /// All-zero phases on `num_qubits` qubits.
    pub fn zeros(num_qubits: usize) -> Result<Self> {
        Self::new(vec![0.0; 1 << num_qubits])
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn num_qubits(&self) -> usize {
        self.phases.len().trailing_zeros() as usize
    }

    /// Adds `c` to every phase.
    pub fn shifted(&self, c: f64) -> PhaseVector {
        PhaseVector {
            phases: self.phases.iter().map(|p| normalize_angle(p + c)).collect(),
        }
    }

    /// `(1/sqrt(m)) e^{i x_j}`.
    pub fn amplitudes(&self) -> Vec<Complex64> {
        let scale = 1.0 / (self.len() as f64).sqrt();
        self.phases
            .iter()
            .map(|&p| Complex64::from_polar(scale, p))
            .collect()
    }

    /// The encoded state `|psi>` built directly from the phases.
    pub fn to_state(&self) -> Result<QuantumState> {
        QuantumState::from_amplitudes(self.amplitudes())
    }

    pub(crate) fn check_same_len(&self, other: &PhaseVector) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    RotationBlocks,
    Hsgs,
}

impl Backend {
    pub const ALL: [Backend; 2] = [Backend::RotationBlocks, Backend::Hsgs];

    pub fn name(self) -> &'static str {
        match self {
            Backend::RotationBlocks => "rotation",
            Backend::Hsgs => "hsgs",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rotation" | "rotation-blocks" => Ok(Backend::RotationBlocks),
            "hsgs" => Ok(Backend::Hsgs),
            other => Err(Error::Config(format!("unknown backend `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GateCostReport {
    pub total_gates: usize,
    /// Gates with at least one control qubit.
    pub multi_controlled_count: usize,
    pub max_control_arity: usize,
}

/// Multiplies the amplitude of basis state `j` by `e^{i angle}`.
///
/// Gate list: X on every qubit whose bit in `j` is 0, then `u1(angle)` on qubit
/// `n_qubits - 1` controlled by qubits `0..n_qubits - 1`, then the same X gates.
pub fn rotation_block(n_qubits: usize, j: usize, angle: f64) -> Result<Circuit> {
    if n_qubits == 0 || j >> n_qubits != 0 {
        return Err(Error::IndexOutOfRange {
            index: j,
            num_qubits: n_qubits,
        });
    }
    let mut circuit = Circuit::new(n_qubits);
    let flips: Vec<usize> = (0..n_qubits).filter(|l| j & (1 << l) == 0).collect();
    for &l in &flips {
        circuit.push(Gate::x(l))?;
    }
    let controls: Vec<usize> = (0..n_qubits - 1).collect();
    circuit.push(Gate::controlled_phase(&controls, n_qubits - 1, angle)?)?;
    for &l in &flips {
        circuit.push(Gate::x(l))?;
    }
    Ok(circuit)
}

/// Diagonal stage `e^{i sign phi_j}` from rotation blocks, skipping zero phases.
fn rotation_phase_stage(phases: &PhaseVector, sign: f64) -> Result<Circuit> {
    let n = phases.num_qubits();
    let mut circuit = Circuit::new(n);
    for (j, &phi) in phases.phases().iter().enumerate() {
        let angle = sign * phi;
        if is_zero_angle(angle, ZERO_ANGLE_TOL) {
            continue;
        }
        circuit.extend(&rotation_block(n, j, angle)?)?;
    }
    Ok(circuit)
}

/// Parity-ordered phase stage.
///
/// The target phases are first shifted by `-phi_0` so index 0 needs no
/// correction. For every nonempty qubit subset `S`, taken by increasing size,
/// a `u1` controlled on the qubits of `S` applies
/// `c_S = phi_S - sum of c_T over proper nonempty subsets T of S`,
/// which makes the accumulated phase on each index `j` equal to `phi_j`.
/// Corrections that vanish mod 2pi are skipped.
pub fn hsgs_phase_stage(phases: &PhaseVector, sign: i8) -> Result<Circuit> {
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidArgument(format!("sign must be +1 or -1, got {sign}")));
    }
    let sign = f64::from(sign);
    let n = phases.num_qubits();
    let m = phases.len();
    let base = phases.phases()[0];
    let target: Vec<f64> = phases
        .phases()
        .iter()
        .map(|&p| sign * (p - base))
        .collect();

    let mut order: Vec<usize> = (1..m).collect();
    order.sort_by_key(|s| (s.count_ones(), *s));

    let mut correction = vec![0.0; m];
    let mut circuit = Circuit::new(n);
    for s in order {
        let mut induced = 0.0;
        // proper nonempty submasks of s
        let mut t = (s - 1) & s;
        while t != 0 {
            induced += correction[t];
            t = (t - 1) & s;
        }
        let c = target[s] - induced;
        correction[s] = c;
        if is_zero_angle(c, ZERO_ANGLE_TOL) {
            continue;
        }
        let qubits: Vec<usize> = (0..n).filter(|q| s & (1 << q) != 0).collect();
        let (&tgt, controls) = qubits.split_last().expect("nonempty subset");
        circuit.push(Gate::controlled_phase(controls, tgt, c)?)?;
    }
    Ok(circuit)
}

/// Diagonal stage `e^{i sign phi_j}` built by `backend`. `sign` is `+1` or `-1`.
pub fn phase_stage(phases: &PhaseVector, sign: i8, backend: Backend) -> Result<Circuit> {
    match backend {
        Backend::RotationBlocks if sign == 1 || sign == -1 => {
            rotation_phase_stage(phases, f64::from(sign))
        }
        Backend::RotationBlocks => Err(Error::InvalidArgument(format!(
            "sign must be +1 or -1, got {sign}"
        ))),
        Backend::Hsgs => hsgs_phase_stage(phases, sign),
    }
}

/// `U_i`: maps `|0...0>` to `(1/sqrt(m)) sum_j e^{i x_j} |j>` up to global phase.
pub fn build_input_operator(x: &PhaseVector, backend: Backend) -> Result<Circuit> {
    let n = x.num_qubits();
    let mut circuit = Circuit::new(n);
    for q in 0..n {
        circuit.push(Gate::h(q))?;
    }
    circuit.extend(&phase_stage(x, 1, backend)?)?;
    Ok(circuit)
}

/// `U_w`: maps `|psi_w>` to `|1...1>` up to global phase. Negated phase stage,
/// then H and X on every qubit.
pub fn build_weight_operator(w: &PhaseVector, backend: Backend) -> Result<Circuit> {
    let n = w.num_qubits();
    let mut circuit = phase_stage(w, -1, backend)?;
    for q in 0..n {
        circuit.push(Gate::h(q))?;
    }
    for q in 0..n {
        circuit.push(Gate::x(q))?;
    }
    Ok(circuit)
}

/// Full neuron on `N + 1` qubits: `U_i`, `U_w`, then a NOT on the ancilla
/// (qubit `N`) controlled by all register qubits.
pub fn build_neuron_circuit(x: &PhaseVector, w: &PhaseVector, backend: Backend) -> Result<Circuit> {
    x.check_same_len(w)?;
    let n = x.num_qubits();
    let mut circuit = Circuit::new(n + 1);
    circuit.extend(&build_input_operator(x, backend)?)?;
    circuit.extend(&build_weight_operator(w, backend)?)?;
    let register: Vec<usize> = (0..n).collect();
    circuit.push(Gate::mcx(&register, n)?)?;
    Ok(circuit)
}

/// Index of the ancilla qubit in a neuron circuit for `x`.
pub fn ancilla_qubit(x: &PhaseVector) -> usize {
    x.num_qubits()
}

/// Maps a `+-1` vector to phases: `+1 -> 0`, `-1 -> pi`.
pub fn binary_specialize(bits: &[i8]) -> Result<PhaseVector> {
    let phases = bits
        .iter()
        .map(|&b| match b {
            1 => Ok(0.0),
            -1 => Ok(PI),
            other => Err(Error::InvalidArgument(format!(
                "binary entry must be +1 or -1, got {other}"
            ))),
        })
        .collect::<Result<Vec<f64>>>()?;
    PhaseVector::new(phases)
}

pub fn gate_cost(circuit: &Circuit) -> GateCostReport {
    circuit
        .gates()
        .iter()
        .fold(GateCostReport::default(), |mut r, g| {
            r.total_gates += 1;
            let arity = g.controls().len();
            if arity > 0 {
                r.multi_controlled_count += 1;
            }
            r.max_control_arity = r.max_control_arity.max(arity);
            r
        })
}

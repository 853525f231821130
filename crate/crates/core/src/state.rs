//! Dense statevector of an n-qubit register.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::distr::Distribution;
use rand_distr::Binomial;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::rng;

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 24;

/// Input states whose squared norm is further than this from 1 are rejected.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Amplitudes over the `2^n` computational basis states, qubit 0 being the
/// least significant bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_size(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, num_qubits });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(QuantumState {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps an amplitude vector. The length must be a power of two and the
    /// vector normalized within [`NORM_TOLERANCE`].
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude vector length {dim} is not a power of two >= 2"
            )));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        check_size(num_qubits)?;
        let state = QuantumState {
            num_qubits,
            amplitudes,
        };
        state.check_normalized()?;
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    fn check_normalized(&self) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE || !norm_sqr.is_finite() {
            return Err(Error::CorruptedState { norm_sqr });
        }
        Ok(())
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.check_normalized()?;

        let target_bit = 1usize << gate.target();
        let control_mask = gate.control_mask();
        let amps = &mut self.amplitudes;
        match gate.kind() {
            GateKind::Hadamard => {
                let s = FRAC_1_SQRT_2;
                for i in (0..amps.len()).filter(|i| i & target_bit == 0) {
                    let (a, b) = (amps[i], amps[i | target_bit]);
                    amps[i] = (a + b) * s;
                    amps[i | target_bit] = (a - b) * s;
                }
            }
            GateKind::PauliX | GateKind::MultiControlledX => {
                for i in 0..amps.len() {
                    if i & target_bit == 0 && i & control_mask == control_mask {
                        amps.swap(i, i | target_bit);
                    }
                }
            }
            GateKind::ControlledPhase(angle) => {
                let factor = Complex64::from_polar(1.0, angle);
                let mask = control_mask | target_bit;
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a *= factor;
                    }
                }
            }
        }
        Ok(())
    }

    /// Consuming form of [`QuantumState::apply`].
    pub fn apply_gate(mut self, gate: &Gate) -> Result<Self> {
        self.apply(gate)?;
        Ok(self)
    }

    /// `|amplitude_index|^2`.
    pub fn probability(&self, index: usize) -> Result<f64> {
        self.amplitudes
            .get(index)
            .map(Complex64::norm_sqr)
            .ok_or(Error::IndexOutOfRange {
                index,
                num_qubits: self.num_qubits,
            })
    }

    /// Probability of measuring `qubit` in `|1>`.
    pub fn marginal_one(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.num_qubits {
            return Err(Error::IndexOutOfRange {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        let bit = 1usize << qubit;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Simulates `shots` projective measurements of `qubit` and returns
    /// `(count0, count1)`. The outcome is a function of `seed` alone.
    pub fn sample_measurements(&self, qubit: usize, shots: u64, seed: u64) -> Result<(u64, u64)> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be >= 1".into()));
        }
        let p1 = self.marginal_one(qubit)?.clamp(0.0, 1.0);
        let ones = sample_binomial(shots, p1, seed);
        Ok((shots - ones, ones))
    }
}

/// Number of successes in `shots` Bernoulli(`p`) trials drawn from a
/// generator seeded with `seed`.
pub(crate) fn sample_binomial(shots: u64, p: f64, seed: u64) -> u64 {
    let mut rng = rng::seeded(seed);
    Binomial::new(shots, p)
        .expect("probability clamped to [0, 1]")
        .sample(&mut rng)
}

fn check_size(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::Capacity {
            num_qubits,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Runs the gates of `circuit` in order on a copy of `initial`.
pub fn run_circuit(circuit: &Circuit, initial: &QuantumState) -> Result<QuantumState> {
    if circuit.num_qubits() != initial.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: circuit.num_qubits(),
            actual: initial.num_qubits(),
        });
    }
    let mut state = initial.clone();
    for gate in circuit.gates() {
        state.apply(gate)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_amps(state: &QuantumState, expected: &[Complex64]) {
        assert_eq!(state.dim(), expected.len());
        for (a, e) in state.amplitudes().iter().zip(expected) {
            assert!((a - e).norm() < 1e-12, "{a} != {e}");
        }
    }

    fn uniform(n: usize) -> QuantumState {
        let dim = 1 << n;
        let a = c(1.0 / (dim as f64).sqrt(), 0.0);
        QuantumState::from_amplitudes(vec![a; dim]).unwrap()
    }

    #[test]
    fn hadamard_on_zero() {
        let s = QuantumState::zero(1).unwrap().apply_gate(&Gate::h(0)).unwrap();
        assert_amps(&s, &[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]);
    }

    #[test]
    fn controlled_phase_pi_on_uniform() {
        let g = Gate::controlled_phase(&[0], 1, PI).unwrap();
        let s = uniform(2).apply_gate(&g).unwrap();
        assert_amps(&s, &[c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0)]);
    }

    #[test]
    fn pauli_x_flips_bit_one() {
        // |01> is index 1 (qubit 0 set)
        let s = QuantumState::basis(2, 1).unwrap().apply_gate(&Gate::x(1)).unwrap();
        assert_eq!(s.probability(3).unwrap(), 1.0);
    }

    #[test]
    fn mcx_only_fires_when_controls_set() {
        let g = Gate::mcx(&[0, 1], 2).unwrap();
        let s = QuantumState::basis(3, 0b011).unwrap().apply_gate(&g).unwrap();
        assert_eq!(s.probability(0b111).unwrap(), 1.0);
        let s = QuantumState::basis(3, 0b001).unwrap().apply_gate(&g).unwrap();
        assert_eq!(s.probability(0b001).unwrap(), 1.0);
    }

    #[test]
    fn out_of_range_gate() {
        let mut s = QuantumState::zero(2).unwrap();
        assert!(matches!(s.apply(&Gate::h(2)), Err(Error::InvalidGate(_))));
    }

    #[test]
    fn corrupted_input_rejected() {
        let mut s = QuantumState::zero(1).unwrap();
        s.amplitudes[1] = c(0.01, 0.0);
        assert!(matches!(
            s.apply(&Gate::h(0)),
            Err(Error::CorruptedState { .. })
        ));
        assert!(QuantumState::from_amplitudes(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn run_circuit_basics() {
        let init = QuantumState::zero(2).unwrap();
        let empty = Circuit::new(2);
        assert_eq!(run_circuit(&empty, &init).unwrap(), init);

        let mut hh = Circuit::new(2);
        hh.push(Gate::h(0)).unwrap();
        hh.push(Gate::h(1)).unwrap();
        let s = run_circuit(&hh, &init).unwrap();
        assert_amps(&s, &[c(0.5, 0.0); 4]);

        let wrong = QuantumState::zero(3).unwrap();
        assert!(run_circuit(&hh, &wrong).is_err());
    }

    #[test]
    fn probabilities() {
        let s = QuantumState::basis(2, 3).unwrap();
        assert_eq!(s.probability(3).unwrap(), 1.0);
        assert!((uniform(2).probability(3).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(
            s.probability(4),
            Err(Error::IndexOutOfRange { index: 4, .. })
        ));
    }

    #[test]
    fn sampling_edge_cases() {
        let one = QuantumState::basis(2, 2).unwrap();
        assert_eq!(one.sample_measurements(1, 8192, 7).unwrap(), (0, 8192));
        let zero = QuantumState::zero(1).unwrap();
        assert_eq!(zero.sample_measurements(0, 1, 7).unwrap(), (1, 0));
        assert!(zero.sample_measurements(0, 0, 7).is_err());
        assert!(zero.sample_measurements(1, 10, 7).is_err());
    }

    #[test]
    fn sampling_half_within_three_sigma() {
        let s = uniform(1);
        let shots = 8192;
        let bound = 3.0 * (0.25f64 / shots as f64).sqrt();
        for seed in 0..50 {
            let (c0, c1) = s.sample_measurements(0, shots, seed).unwrap();
            assert_eq!(c0 + c1, shots);
            let freq = c1 as f64 / shots as f64;
            assert!((freq - 0.5).abs() <= bound, "seed {seed}: {freq}");
        }
        assert_eq!(
            s.sample_measurements(0, shots, 11).unwrap(),
            s.sample_measurements(0, shots, 11).unwrap()
        );
    }
}

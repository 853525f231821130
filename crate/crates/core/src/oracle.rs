//! Closed-form neuron output and brute-force references.
//!
//! With `alpha_j = x_j - w_j`:
//!
//! - inner product `<psi_w|psi_x> = (1/m) sum_j e^{i alpha_j}`
//! - activation `|<psi_w|psi_x>|^2 = (1/m^2) sum_j sum_l cos(alpha_j - alpha_l)`
//! - gradient `d activation / d w_k = (2/m^2) sum_l sin(alpha_k - alpha_l)`
//!
//! Sums run over every component `j = 0..m-1`.

use ndarray::{linalg::kron, Array2};
use num_complex::Complex64;

use crate::builders::PhaseVector;
use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};

/// Largest register [`dense_unitary`] will expand.
pub const DENSE_MAX_QUBITS: usize = 6;

/// Tolerance of the internal agreement check in [`activation`].
const SELF_CHECK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivationValue {
    /// `<psi_w|psi_x>`
    pub inner: Complex64,
    /// `|inner|^2`
    pub output: f64,
}

fn differences(x: &PhaseVector, w: &PhaseVector) -> Result<Vec<f64>> {
    x.check_same_len(w)?;
    Ok(x.phases()
        .iter()
        .zip(w.phases())
        .map(|(a, b)| a - b)
        .collect())
}

pub fn inner_product(x: &PhaseVector, w: &PhaseVector) -> Result<Complex64> {
    let alpha = differences(x, w)?;
    let m = alpha.len() as f64;
    let sum: Complex64 = alpha.iter().map(|&a| Complex64::from_polar(1.0, a)).sum();
    Ok(sum / m)
}

fn cosine_double_sum(alpha: &[f64]) -> f64 {
    let m = alpha.len() as f64;
    let mut total = 0.0;
    for &aj in alpha {
        for &al in alpha {
            total += (aj - al).cos();
        }
    }
    total / (m * m)
}

/// Neuron output, evaluated as `|inner|^2` and cross-checked against the
/// cosine double sum.
pub fn activation(x: &PhaseVector, w: &PhaseVector) -> Result<ActivationValue> {
    let inner = inner_product(x, w)?;
    let output = inner.norm_sqr();
    let alpha = differences(x, w)?;
    let by_cosines = cosine_double_sum(&alpha);
    debug_assert!(
        (output - by_cosines).abs() <= SELF_CHECK_TOL,
        "activation routes disagree: {output} vs {by_cosines}"
    );
    Ok(ActivationValue { inner, output })
}

/// Activation computed only through the cosine double sum.
pub fn activation_by_cosines(x: &PhaseVector, w: &PhaseVector) -> Result<f64> {
    Ok(cosine_double_sum(&differences(x, w)?))
}

/// Gradient of the activation with respect to each weight phase.
pub fn activation_gradient(x: &PhaseVector, w: &PhaseVector) -> Result<Vec<f64>> {
    let alpha = differences(x, w)?;
    let m = alpha.len() as f64;
    let scale = 2.0 / (m * m);
    Ok(alpha
        .iter()
        .map(|&ak| scale * alpha.iter().map(|&al| (ak - al).sin()).sum::<f64>())
        .collect())
}

fn identity(dim: usize) -> Array2<Complex64> {
    Array2::from_diag_elem(dim, Complex64::new(1.0, 0.0))
}

/// Full-register matrix of a single-qubit operator on `qubit`.
/// Qubit 0 is the rightmost Kronecker factor.
fn embed_single(op: &Array2<Complex64>, qubit: usize, n: usize) -> Array2<Complex64> {
    let mut full = identity(1);
    for q in (0..n).rev() {
        full = if q == qubit { kron(&full, op) } else { kron(&full, &identity(2)) };
    }
    full
}

fn gate_matrix(gate: &Gate, n: usize) -> Array2<Complex64> {
    let dim = 1usize << n;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let bit_set = |i: usize, q: usize| (i >> q) & 1 == 1;
    let controls_set = |i: usize| gate.controls().iter().all(|&c| bit_set(i, c));
    match gate.kind() {
        GateKind::Hadamard => {
            let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let h = Array2::from_shape_vec((2, 2), vec![s, s, s, -s]).unwrap();
            embed_single(&h, gate.target(), n)
        }
        GateKind::PauliX => {
            let x = Array2::from_shape_vec((2, 2), vec![zero, one, one, zero]).unwrap();
            embed_single(&x, gate.target(), n)
        }
        GateKind::ControlledPhase(angle) => {
            let phase = Complex64::from_polar(1.0, angle);
            Array2::from_shape_fn((dim, dim), |(r, c)| {
                if r != c {
                    zero
                } else if controls_set(r) && bit_set(r, gate.target()) {
                    phase
                } else {
                    one
                }
            })
        }
        GateKind::MultiControlledX => {
            let t = 1usize << gate.target();
            Array2::from_shape_fn((dim, dim), |(r, c)| {
                let image = if controls_set(c) { c ^ t } else { c };
                if r == image {
                    one
                } else {
                    zero
                }
            })
        }
    }
}

/// Explicit `2^N x 2^N` unitary of `circuit`, built as the ordered product of
/// per-gate matrices.
pub fn dense_unitary(circuit: &Circuit) -> Result<Array2<Complex64>> {
    let n = circuit.num_qubits();
    if n > DENSE_MAX_QUBITS {
        return Err(Error::Capacity {
            num_qubits: n,
            limit: DENSE_MAX_QUBITS,
        });
    }
    let mut u = identity(1 << n);
    for gate in circuit.gates() {
        u = gate_matrix(gate, n).dot(&u);
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{binary_specialize, build_weight_operator, Backend};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn pv(p: &[f64]) -> PhaseVector {
        PhaseVector::new(p.to_vec()).unwrap()
    }

    #[test]
    fn inner_product_examples() {
        let x = pv(&[0.4, 1.1, 2.0, 6.0]);
        assert!((inner_product(&x, &x).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(inner_product(&pv(&[0.0, PI]), &pv(&[0.0, 0.0])).unwrap().norm() < 1e-15);
        let half = inner_product(&pv(&[0.0, FRAC_PI_2]), &pv(&[0.0, 0.0])).unwrap();
        assert!((half - Complex64::new(0.5, 0.5)).norm() < 1e-15);
        assert!((half.norm_sqr() - 0.5).abs() < 1e-15);
        assert!(inner_product(&pv(&[0.0, 0.0]), &pv(&[0.0; 4])).is_err());
    }

    #[test]
    fn activation_examples() {
        let x = pv(&[0.4, 1.1, 2.0, 6.0]);
        assert!((activation(&x, &x).unwrap().output - 1.0).abs() < 1e-15);
        let a = binary_specialize(&[1, 1, -1, -1]).unwrap();
        let b = binary_specialize(&[1, -1, 1, -1]).unwrap();
        assert!(activation(&a, &b).unwrap().output < 1e-30);
        assert!(activation(&a, &pv(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn gradient_examples() {
        let x = pv(&[0.4, 1.1, 2.0, 6.0]);
        assert!(activation_gradient(&x, &x).unwrap().iter().all(|g| g.abs() < 1e-15));
        let g = activation_gradient(&pv(&[0.0, FRAC_PI_2]), &pv(&[0.0, 0.0])).unwrap();
        assert!((g[0] + 0.5).abs() < 1e-15);
        assert!((g[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dense_small_cases() {
        let u = dense_unitary(&Circuit::new(2)).unwrap();
        assert_eq!(u, identity(4));

        let mut c = Circuit::new(1);
        c.push(Gate::h(0)).unwrap();
        let u = dense_unitary(&c).unwrap();
        let s = FRAC_1_SQRT_2;
        let expected = [[s, s], [s, -s]];
        for r in 0..2 {
            for k in 0..2 {
                assert!((u[[r, k]] - Complex64::new(expected[r][k], 0.0)).norm() < 1e-15);
            }
        }
        assert!(matches!(
            dense_unitary(&Circuit::new(7)),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn dense_x_respects_bit_order() {
        let mut c = Circuit::new(2);
        c.push(Gate::x(0)).unwrap();
        let u = dense_unitary(&c).unwrap();
        // |00> -> |01> (index 1)
        assert_eq!(u[[1, 0]], Complex64::new(1.0, 0.0));
        assert_eq!(u[[2, 0]], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn weight_operator_last_row_is_conjugated_weights() {
        let w = pv(&[0.3, 2.2, 4.1, 5.9]);
        for backend in Backend::ALL {
            let u = dense_unitary(&build_weight_operator(&w, backend).unwrap()).unwrap();
            let row: Vec<Complex64> = (0..4).map(|j| u[[3, j]]).collect();
            let expected: Vec<Complex64> =
                w.amplitudes().iter().map(|a| a.conj()).collect();
            let phase = row[0] / expected[0];
            assert!((phase.norm() - 1.0).abs() < 1e-12);
            for (r, e) in row.iter().zip(&expected) {
                assert!((r - e * phase).norm() < 1e-12);
            }
        }
    }
}

#![allow(dead_code)]

use phaseron::builders::PhaseVector;
use phaseron::rng::SimRng;
use phaseron::training::random_phase_vector;

pub const FD_STEP: f64 = 1e-6;

/// Central finite difference of `f` at `point` along each coordinate.
pub fn finite_difference<F>(point: &[f64], mut f: F) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    (0..point.len())
        .map(|k| {
            let mut plus = point.to_vec();
            let mut minus = point.to_vec();
            plus[k] += FD_STEP;
            minus[k] -= FD_STEP;
            (f(&plus) - f(&minus)) / (2.0 * FD_STEP)
        })
        .collect()
}

/// Relative error, or absolute error when the reference is tiny.
pub fn gradient_error(analytic: f64, numeric: f64) -> f64 {
    if analytic.abs() < 1e-8 {
        (analytic - numeric).abs()
    } else {
        ((analytic - numeric) / analytic).abs()
    }
}

/// Phase vector from raw values, which may leave `[0, 2pi)`.
pub fn pv(phases: &[f64]) -> PhaseVector {
    PhaseVector::new(phases.to_vec()).expect("valid phase vector")
}

pub fn random_pair(rng: &mut SimRng, n: usize) -> (PhaseVector, PhaseVector) {
    (
        random_phase_vector(rng, n).unwrap(),
        random_phase_vector(rng, n).unwrap(),
    )
}

/// `+-1` vector whose entry `k` is `-1` when bit `k` of `index` is set.
pub fn signs(index: usize, m: usize) -> Vec<i8> {
    (0..m).map(|k| if (index >> k) & 1 == 1 { -1 } else { 1 }).collect()
}

pub fn classical_binary_output(x: &[i8], w: &[i8]) -> f64 {
    let dot: i32 = x.iter().zip(w).map(|(&a, &b)| i32::from(a) * i32::from(b)).sum();
    let r = f64::from(dot) / x.len() as f64;
    r * r
}

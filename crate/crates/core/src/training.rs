//! Hybrid training of a single neuron.
//!
//! The cost over a dataset of `n` samples with targets `s_k` is
//! `C = (1/2n) sum_k (s_k - f_k)^2`, where `f_k` is the neuron output for
//! sample `k`. Its weight gradient is `-(1/n) sum_k (s_k - f_k) grad f_k`, with
//! `grad f_k` taken from the closed form in [`crate::oracle`].
//!
//! During [`train`] the weight phase at index 0 stays pinned at zero. Only
//! phase differences enter the output, so this removes a flat direction and
//! leaves `m - 1` trainable parameters.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use crate::builders::{ancilla_qubit, binary_specialize, build_neuron_circuit, Backend, PhaseVector};
use crate::error::{Error, Result};
use crate::oracle::{activation, activation_gradient};
use crate::rng::{self, SimRng, RNG_ALGORITHM};
use crate::state::{run_circuit, sample_binomial, QuantumState};

/// Outputs at or above this value count as a positive classification.
pub const POSITIVE_THRESHOLD: f64 = 0.5;

pub const DEFAULT_COST_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSample {
    pub input: PhaseVector,
    pub target: f64,
}

impl TrainingSample {
    pub fn new(input: PhaseVector, target: f64) -> Result<Self> {
        if !target.is_finite() || !(0.0..=1.0).contains(&target) {
            return Err(Error::InvalidArgument(format!(
                "target {target} is not in [0, 1]"
            )));
        }
        Ok(TrainingSample { input, target })
    }
}

/// How the neuron output is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvaluationMode {
    /// Closed-form activation.
    Analytic,
    /// Exact `P(ancilla = 1)` from simulating the circuit.
    Statevector,
    /// Ancilla frequency over a finite number of shots.
    Sampled { shots: u64 },
}

impl fmt::Display for EvaluationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvaluationMode::Analytic => f.write_str("analytic"),
            EvaluationMode::Statevector => f.write_str("statevector"),
            EvaluationMode::Sampled { shots } => write!(f, "sampled({shots})"),
        }
    }
}

impl EvaluationMode {
    /// Parses `analytic`, `statevector` or `sampled`; the latter takes `shots`.
    pub fn parse(name: &str, shots: u64) -> Result<Self> {
        match name {
            "analytic" => Ok(EvaluationMode::Analytic),
            "statevector" => Ok(EvaluationMode::Statevector),
            "sampled" if shots >= 1 => Ok(EvaluationMode::Sampled { shots }),
            "sampled" => Err(Error::Config("sampled mode needs shots >= 1".into())),
            other => Err(Error::Config(format!("unknown evaluation mode `{other}`"))),
        }
    }
}

impl FromStr for EvaluationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(inner) = s.strip_prefix("sampled(").and_then(|r| r.strip_suffix(')')) {
            let shots = inner
                .parse()
                .map_err(|_| Error::Config(format!("bad shot count in `{s}`")))?;
            return EvaluationMode::parse("sampled", shots);
        }
        EvaluationMode::parse(s, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    pub learning_rate: f64,
    pub max_steps: usize,
    pub cost_threshold: f64,
    pub stop_on_cost_increase: bool,
    pub mode: EvaluationMode,
    pub backend: Backend,
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            learning_rate: 0.1,
            max_steps: 10_000,
            cost_threshold: DEFAULT_COST_THRESHOLD,
            stop_on_cost_increase: true,
            mode: EvaluationMode::Analytic,
            backend: Backend::Hsgs,
            seed: 0,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be >= 1".into()));
        }
        if !self.cost_threshold.is_finite() || self.cost_threshold < 0.0 {
            return Err(Error::Config(format!(
                "cost threshold must be finite and >= 0, got {}",
                self.cost_threshold
            )));
        }
        if let EvaluationMode::Sampled { shots: 0 } = self.mode {
            return Err(Error::Config("sampled mode needs shots >= 1".into()));
        }
        Ok(())
    }

    /// One-line `key=value` summary used in CSV headers.
    pub fn describe(&self) -> String {
        format!(
            "eta={} max_steps={} cost_threshold={} stop_on_cost_increase={} mode={} backend={} seed={} rng={}",
            self.learning_rate,
            self.max_steps,
            self.cost_threshold,
            self.stop_on_cost_increase,
            self.mode,
            self.backend,
            self.seed,
            RNG_ALGORITHM
        )
    }
}

/// Produces neuron outputs in a given [`EvaluationMode`]. Sampled evaluations
/// draw one fresh seed per call from the evaluator's generator, so a sequence
/// of calls is reproducible from the initial seed.
#[derive(Debug, Clone)]
pub struct Evaluator {
    mode: EvaluationMode,
    backend: Backend,
    rng: SimRng,
}

impl Evaluator {
    pub fn new(mode: EvaluationMode, backend: Backend, seed: u64) -> Self {
        Evaluator {
            mode,
            backend,
            rng: rng::seeded(seed),
        }
    }

    pub fn mode(&self) -> EvaluationMode {
        self.mode
    }

    /// Neuron output for input `x` and weights `w`.
    pub fn output(&mut self, x: &PhaseVector, w: &PhaseVector) -> Result<f64> {
        match self.mode {
            EvaluationMode::Analytic => Ok(activation(x, w)?.output),
            EvaluationMode::Statevector => circuit_output(x, w, self.backend),
            EvaluationMode::Sampled { shots } => {
                let p = circuit_output(x, w, self.backend)?.clamp(0.0, 1.0);
                let ones = sample_binomial(shots, p, self.rng.next_u64());
                Ok(ones as f64 / shots as f64)
            }
        }
    }

    fn outputs(&mut self, w: &PhaseVector, data: &[TrainingSample]) -> Result<Vec<f64>> {
        data.iter().map(|s| self.output(&s.input, w)).collect()
    }
}

/// Exact `P(ancilla = 1)` of the neuron circuit.
pub fn circuit_output(x: &PhaseVector, w: &PhaseVector, backend: Backend) -> Result<f64> {
    let circuit = build_neuron_circuit(x, w, backend)?;
    let state = run_circuit(&circuit, &QuantumState::zero(circuit.num_qubits())?)?;
    state.marginal_one(ancilla_qubit(x))
}

fn check_data(w: &PhaseVector, data: &[TrainingSample]) -> Result<()> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    data.iter().try_for_each(|s| w.check_same_len(&s.input))
}

fn half_mean_square(errors: &[f64]) -> f64 {
    errors.iter().map(|e| e * e).sum::<f64>() / (2.0 * errors.len() as f64)
}

/// `(1/2n) sum_k (s_k - f_k)^2` with outputs from `evaluator`.
pub fn cost(w: &PhaseVector, data: &[TrainingSample], evaluator: &mut Evaluator) -> Result<f64> {
    check_data(w, data)?;
    let outputs = evaluator.outputs(w, data)?;
    let errors: Vec<f64> = data.iter().zip(&outputs).map(|(s, f)| s.target - f).collect();
    Ok(half_mean_square(&errors))
}

/// `-(1/n) sum_k error_k grad f_k` for given per-sample errors.
fn gradient_from_errors(w: &PhaseVector, data: &[TrainingSample], errors: &[f64]) -> Result<Vec<f64>> {
    let n = data.len() as f64;
    let mut grad = vec![0.0; w.len()];
    for (sample, &err) in data.iter().zip(errors) {
        let g = activation_gradient(&sample.input, w)?;
        for (acc, gk) in grad.iter_mut().zip(g) {
            *acc -= err * gk / n;
        }
    }
    Ok(grad)
}

/// Exact gradient of the analytic cost with respect to every weight phase.
pub fn cost_gradient(w: &PhaseVector, data: &[TrainingSample]) -> Result<Vec<f64>> {
    check_data(w, data)?;
    let errors = data
        .iter()
        .map(|s| Ok(s.target - activation(&s.input, w)?.output))
        .collect::<Result<Vec<f64>>>()?;
    gradient_from_errors(w, data, &errors)
}

fn descend(w: &PhaseVector, grad: &[f64], eta: f64) -> Result<PhaseVector> {
    PhaseVector::new(
        w.phases()
            .iter()
            .zip(grad)
            .map(|(wk, gk)| wk - eta * gk)
            .collect(),
    )
}

/// `w - eta * grad C(w)`, reduced to `[0, 2pi)`.
pub fn gradient_descent_step(w: &PhaseVector, data: &[TrainingSample], eta: f64) -> Result<PhaseVector> {
    if eta.is_nan() || eta <= 0.0 {
        return Err(Error::InvalidArgument(format!("learning rate must be positive, got {eta}")));
    }
    descend(w, &cost_gradient(w, data)?, eta)
}

/// `|<psi_w|psi_objective>|^2`; 1 iff the weight states coincide up to global phase.
pub fn affinity(w: &PhaseVector, objective: &PhaseVector) -> Result<f64> {
    Ok(activation(w, objective)?.output)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalReason {
    ThresholdReached,
    CostIncreased,
    MaxSteps,
}

impl fmt::Display for TerminalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TerminalReason::ThresholdReached => "threshold_reached",
            TerminalReason::CostIncreased => "cost_increased",
            TerminalReason::MaxSteps => "max_steps",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub cost: f64,
    pub grad_norm: f64,
    pub affinity: Option<f64>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub steps: Vec<StepRecord>,
    pub terminal: TerminalReason,
    pub seed: u64,
    pub rng_algorithm: &'static str,
    /// Order in which training samples were visited, when shuffled.
    pub shuffle: Option<Vec<usize>>,
}

impl RunRecord {
    pub fn final_cost(&self) -> Option<f64> {
        self.steps.last().map(|s| s.cost)
    }

    pub fn initial_cost(&self) -> Option<f64> {
        self.steps.first().map(|s| s.cost)
    }

    /// CSV with columns `step,cost,grad_norm[,affinity],w_0..w_{m-1}`, preceded
    /// by a `# ` comment line carrying `header`.
    pub fn to_csv(&self, header: &str) -> Result<String> {
        let with_affinity = self.steps.iter().any(|s| s.affinity.is_some());
        let m = self.steps.first().map_or(0, |s| s.weights.len());
        let mut columns = vec!["step".to_string(), "cost".into(), "grad_norm".into()];
        if with_affinity {
            columns.push("affinity".into());
        }
        columns.extend((0..m).map(|k| format!("w_{k}")));

        let mut out = Vec::new();
        out.extend_from_slice(format!("# {header}\n").as_bytes());
        {
            let mut wtr = csv::Writer::from_writer(&mut out);
            wtr.write_record(&columns).map_err(csv_error)?;
            for s in &self.steps {
                let mut row = vec![s.step.to_string(), s.cost.to_string(), s.grad_norm.to_string()];
                if with_affinity {
                    row.push(s.affinity.map(|a| a.to_string()).unwrap_or_default());
                }
                row.extend(s.weights.iter().map(|w| w.to_string()));
                wtr.write_record(&row).map_err(csv_error)?;
            }
            wtr.flush().map_err(|e| Error::io("<memory>", e))?;
        }
        Ok(String::from_utf8(out).expect("csv output is utf-8"))
    }
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    Error::io("<csv>", std::io::Error::other(e.to_string()))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Full-batch gradient descent from `w0`.
///
/// Step 0 records the starting point; every later step records the state
/// after one update. Stops when the cost drops below `cost_threshold`, when it
/// rises above the previous step's cost (if `stop_on_cost_increase`), or after
/// `max_steps` updates. In sampled mode the per-sample errors come from shot
/// frequencies while `grad f_k` stays analytic.
pub fn train(config: &TrainingConfig, data: &[TrainingSample], w0: &PhaseVector) -> Result<RunRecord> {
    config.validate()?;
    check_data(w0, data)?;
    let mut evaluator = Evaluator::new(config.mode, config.backend, config.seed);
    let mut w = w0.shifted(-w0.phases()[0]);

    let evaluate = |w: &PhaseVector, ev: &mut Evaluator| -> Result<(f64, Vec<f64>)> {
        let outputs = ev.outputs(w, data)?;
        let errors: Vec<f64> = data.iter().zip(&outputs).map(|(s, f)| s.target - f).collect();
        let mut grad = gradient_from_errors(w, data, &errors)?;
        grad[0] = 0.0;
        Ok((half_mean_square(&errors), grad))
    };

    let (mut cost, mut grad) = evaluate(&w, &mut evaluator)?;
    let mut steps = vec![StepRecord {
        step: 0,
        cost,
        grad_norm: norm(&grad),
        affinity: None,
        weights: w.phases().to_vec(),
    }];
    let mut terminal = TerminalReason::MaxSteps;
    if cost < config.cost_threshold {
        terminal = TerminalReason::ThresholdReached;
    } else {
        for step in 1..=config.max_steps {
            w = descend(&w, &grad, config.learning_rate)?;
            let previous = cost;
            (cost, grad) = evaluate(&w, &mut evaluator)?;
            steps.push(StepRecord {
                step,
                cost,
                grad_norm: norm(&grad),
                affinity: None,
                weights: w.phases().to_vec(),
            });
            if cost < config.cost_threshold {
                terminal = TerminalReason::ThresholdReached;
                break;
            }
            if config.stop_on_cost_increase && cost > previous {
                terminal = TerminalReason::CostIncreased;
                break;
            }
        }
    }
    Ok(RunRecord {
        steps,
        terminal,
        seed: config.seed,
        rng_algorithm: RNG_ALGORITHM,
        shuffle: None,
    })
}

/// Uniform random phases in `[0, 2pi)` on `num_qubits` qubits.
pub fn random_phase_vector<R: Rng + ?Sized>(rng: &mut R, num_qubits: usize) -> Result<PhaseVector> {
    PhaseVector::new(
        (0..1usize << num_qubits)
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect(),
    )
}

/// `n` random inputs labelled with their exact output under `objective`.
pub fn generate_sigmoid_dataset<R: Rng + ?Sized>(
    rng: &mut R,
    objective: &PhaseVector,
    n: usize,
) -> Result<Vec<TrainingSample>> {
    (0..n)
        .map(|_| {
            let x = random_phase_vector(rng, objective.num_qubits())?;
            let target = activation(&x, objective)?.output.clamp(0.0, 1.0);
            TrainingSample::new(x, target)
        })
        .collect()
}

/// A `+-1` input with its label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinarySample {
    pub bits: Vec<i8>,
    pub positive: bool,
}

pub fn random_signs<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<i8> {
    (0..m).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect()
}

/// Rejection-samples random `+-1` inputs until `n_positive` inputs with output
/// `>= POSITIVE_THRESHOLD` under `objective` and `n_negative` below it have been
/// collected. Gives up after `budget` draws.
pub fn generate_binary_dataset<R: Rng + ?Sized>(
    rng: &mut R,
    objective: &[i8],
    n_positive: usize,
    n_negative: usize,
    budget: usize,
) -> Result<Vec<BinarySample>> {
    let w = binary_specialize(objective)?;
    let mut positives = Vec::with_capacity(n_positive);
    let mut negatives = Vec::with_capacity(n_negative);
    for _ in 0..budget {
        if positives.len() == n_positive && negatives.len() == n_negative {
            break;
        }
        let bits = random_signs(rng, objective.len());
        let out = activation(&binary_specialize(&bits)?, &w)?.output;
        if out >= POSITIVE_THRESHOLD {
            if positives.len() < n_positive {
                positives.push(BinarySample { bits, positive: true });
            }
        } else if negatives.len() < n_negative {
            negatives.push(BinarySample { bits, positive: false });
        }
    }
    if positives.len() < n_positive || negatives.len() < n_negative {
        return Err(Error::Config(format!(
            "collected {}/{n_positive} positive and {}/{n_negative} negative samples \
             within {budget} draws; try a different seed",
            positives.len(),
            negatives.len()
        )));
    }
    positives.extend(negatives);
    Ok(positives)
}

fn binary_target(sample: &BinarySample) -> f64 {
    if sample.positive {
        1.0
    } else {
        0.0
    }
}

/// Index whose sign flip most reduces `(target - f)^2` for `sample`, if any
/// flip reduces it.
///
/// Equally good flips are ranked by the squared error they leave over the
/// whole dataset, then by direction (toward a positive input, away from a
/// negative one), then by lowest index.
fn best_flip(w: &[i8], sample: &BinarySample, data: &[BinarySample]) -> Result<Option<usize>> {
    const TIE_TOL: f64 = 1e-12;
    let squared_error = |s: &BinarySample, bits: &[i8]| -> Result<f64> {
        let f = activation(&binary_specialize(&s.bits)?, &binary_specialize(bits)?)?.output;
        Ok((binary_target(s) - f).powi(2))
    };
    let current = squared_error(sample, w)?;
    let mut trial = w.to_vec();
    let mut errors = Vec::with_capacity(w.len());
    for k in 0..w.len() {
        trial[k] = -trial[k];
        errors.push(squared_error(sample, &trial)?);
        trial[k] = -trial[k];
    }
    let best = errors.iter().copied().fold(f64::INFINITY, f64::min);
    if best >= current - TIE_TOL {
        return Ok(None);
    }
    let mut ranked = Vec::new();
    for k in (0..w.len()).filter(|&k| errors[k] <= best + TIE_TOL) {
        trial[k] = -trial[k];
        let total = data
            .iter()
            .map(|s| squared_error(s, &trial))
            .sum::<Result<f64>>()?;
        trial[k] = -trial[k];
        let toward = (w[k] != sample.bits[k]) == sample.positive;
        ranked.push((k, total, toward));
    }
    let least = ranked.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    ranked.retain(|r| r.1 <= least + TIE_TOL);
    Ok(ranked
        .iter()
        .find(|r| r.2)
        .or(ranked.first())
        .map(|r| r.0))
}

/// Perceptron-style training over `+-1` vectors.
///
/// One step visits one sample. The visiting order is shuffled with the config
/// seed and reshuffled at the start of every further pass over the data. On a
/// misclassified sample the weight sign whose flip most reduces that sample's
/// error is flipped, with ties ranked as described on `best_flip`.
/// Each step records the affinity with `objective`. Training stops once every
/// sample is classified correctly.
pub fn train_binary_perceptron(
    config: &TrainingConfig,
    data: &[BinarySample],
    objective: &[i8],
    w0: &[i8],
) -> Result<RunRecord> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let objective_phases = binary_specialize(objective)?;
    let mut w = w0.to_vec();
    binary_specialize(&w)?.check_same_len(&objective_phases)?;
    let samples = data
        .iter()
        .map(|s| {
            let input = binary_specialize(&s.bits)?;
            input.check_same_len(&objective_phases)?;
            TrainingSample::new(input, binary_target(s))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rng = rng::seeded(config.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut rng);
    let mut visited = order.clone();
    let mut evaluator = Evaluator::new(config.mode, config.backend, rng.next_u64());

    let record_step = |step: usize, w: &[i8], ev: &mut Evaluator| -> Result<(StepRecord, bool)> {
        let phases = binary_specialize(w)?;
        let outputs = ev.outputs(&phases, &samples)?;
        let all_correct = data
            .iter()
            .zip(&outputs)
            .all(|(s, &f)| (f >= POSITIVE_THRESHOLD) == s.positive);
        let errors: Vec<f64> = samples.iter().zip(&outputs).map(|(s, f)| s.target - f).collect();
        let grad = gradient_from_errors(&phases, &samples, &errors)?;
        let record = StepRecord {
            step,
            cost: half_mean_square(&errors),
            grad_norm: norm(&grad),
            affinity: Some(affinity(&phases, &objective_phases)?),
            weights: phases.phases().to_vec(),
        };
        Ok((record, all_correct))
    };

    let (first, done) = record_step(0, &w, &mut evaluator)?;
    let mut steps = vec![first];
    let mut terminal = TerminalReason::MaxSteps;
    if done {
        terminal = TerminalReason::ThresholdReached;
    } else {
        for step in 1..=config.max_steps {
            let pos = (step - 1) % data.len();
            if pos == 0 && step > 1 {
                order.shuffle(&mut rng);
                visited.extend_from_slice(&order);
            }
            let idx = order[pos];
            let f = evaluator.output(&samples[idx].input, &binary_specialize(&w)?)?;
            if (f >= POSITIVE_THRESHOLD) != data[idx].positive {
                if let Some(k) = best_flip(&w, &data[idx], data)? {
                    w[k] = -w[k];
                }
            }
            let (rec, all_correct) = record_step(step, &w, &mut evaluator)?;
            steps.push(rec);
            if all_correct {
                terminal = TerminalReason::ThresholdReached;
                break;
            }
        }
    }
    Ok(RunRecord {
        steps,
        terminal,
        seed: config.seed,
        rng_algorithm: RNG_ALGORITHM,
        shuffle: Some(visited),
    })
}

//! Seeded experiment drivers.
//!
//! Every driver is a pure function of its [`ExperimentConfig`]: all randomness
//! flows from one generator seeded with `config.seed`, and repeated runs write
//! byte-identical files.
//!
//! Output files (all CSV, RFC 4180 quoting):
//!
//! | experiment | files |
//! |---|---|
//! | inner product | `pool.csv`, `pairs.csv`, `discrepancy.csv`, `plot_<backend>.csv` |
//! | sigmoid | `dataset.csv`, `trajectory.csv`, `cost.csv` |
//! | binary perceptron | `dataset.csv`, `restarts.csv`, `affinity.csv`, `mean_affinity.csv` |
//!
//! Each run also writes `metadata.txt`, and each plot file `<name>.csv` gets a
//! `<name>.csv.meta` sidecar. Both use the same key-value format: one
//! `key = value` pair per line, `#` starting a comment line. With
//! `dump_circuit`, one neuron circuit per backend is written as
//! `circuit_<backend>.txt` in the format of [`crate::circuit`].

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rand::RngCore;

use crate::builders::{binary_specialize, build_neuron_circuit, Backend, PhaseVector};
use crate::config::{Experiment, ExperimentConfig};
use crate::error::{Error, Result};
use crate::oracle::activation;
use crate::rng::{self, RNG_ALGORITHM};
use crate::training::{
    csv_error, generate_binary_dataset, generate_sigmoid_dataset, random_phase_vector,
    random_signs, train, train_binary_perceptron, BinarySample, Evaluator, RunRecord,
    TrainingSample,
};

/// Draws allowed when rejection-sampling the binary training set.
pub const BINARY_DATASET_BUDGET: usize = 100_000;

/// Trailing window used to smooth the mean affinity trajectory.
pub const AFFINITY_SMOOTHING_WINDOW: usize = 5;

/// `(1/n) sum_k |measured_k - ideal_k|`.
pub fn discrepancy(ideal: &[f64], measured: &[f64]) -> Result<f64> {
    if ideal.len() != measured.len() {
        return Err(Error::DimensionMismatch {
            expected: ideal.len(),
            actual: measured.len(),
        });
    }
    if ideal.is_empty() {
        return Err(Error::InvalidArgument("discrepancy needs at least one pair".into()));
    }
    let total: f64 = ideal.iter().zip(measured).map(|(a, b)| (b - a).abs()).sum();
    Ok(total / ideal.len() as f64)
}

/// Mean binomial standard deviation `sqrt(p(1-p)/shots)` over `probabilities`.
///
/// The expected discrepancy of unbiased shot sampling is about `sqrt(2/pi)`
/// times this value.
pub fn binomial_noise_floor(probabilities: &[f64], shots: u64) -> f64 {
    let n = probabilities.len().max(1) as f64;
    probabilities
        .iter()
        .map(|p| (p * (1.0 - p) / shots as f64).max(0.0).sqrt())
        .sum::<f64>()
        / n
}

/// Standard deviation of a single readout frequency at `p = 1/2`, the largest
/// over all `p`.
pub fn readout_sigma(shots: u64) -> f64 {
    0.5 / (shots as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairResult {
    pub x_index: usize,
    pub w_index: usize,
    pub ideal: f64,
    pub measured: f64,
}

impl PairResult {
    pub fn abs_diff(&self) -> f64 {
        (self.measured - self.ideal).abs()
    }
}

/// Discrepancy of one backend over every ordered pair of the pool.
#[derive(Debug, Clone, PartialEq)]
pub struct BackendDiscrepancy {
    pub backend: Backend,
    pub repeat: usize,
    pub d: f64,
    pub pairs: Vec<PairResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyReport {
    pub pool: Vec<PhaseVector>,
    pub results: Vec<BackendDiscrepancy>,
}

impl DiscrepancyReport {
    /// Number of inner products per backend and repeat.
    pub fn n(&self) -> usize {
        self.pool.len() * self.pool.len()
    }

    /// D values of `backend`, one per repeat.
    pub fn d_values(&self, backend: Backend) -> Vec<f64> {
        self.results
            .iter()
            .filter(|r| r.backend == backend)
            .map(|r| r.d)
            .collect()
    }
}

fn sign_pattern(index: usize, m: usize) -> Vec<i8> {
    (0..m)
        .map(|k| if (index >> k) & 1 == 1 { -1 } else { 1 })
        .collect()
}

/// All `+-1` vectors of length `m` if there are at most `count` of them, in
/// index order (bit `k` of the index set means entry `k` is `-1`); otherwise
/// `count` distinct random ones.
pub fn binary_pool<R: RngCore>(rng: &mut R, m: usize, count: usize) -> Vec<Vec<i8>> {
    if m < usize::BITS as usize && (1usize << m) <= count {
        return (0..1usize << m).map(|p| sign_pattern(p, m)).collect();
    }
    let mut seen = BTreeSet::new();
    let mut pool = Vec::with_capacity(count);
    while pool.len() < count {
        let v = random_signs(rng, m);
        if seen.insert(v.clone()) {
            pool.push(v);
        }
    }
    pool
}

fn vector_pool<R: RngCore>(config: &ExperimentConfig, rng: &mut R) -> Result<Vec<PhaseVector>> {
    let m = 1usize << config.n_qubits;
    match config.experiment {
        Experiment::InnerProductBinary => binary_pool(rng, m, config.vectors)
            .iter()
            .map(|bits| binary_specialize(bits))
            .collect(),
        _ => (0..config.vectors)
            .map(|_| random_phase_vector(rng, config.n_qubits))
            .collect(),
    }
}

/// Evaluates every ordered pair of a seeded vector pool on each configured
/// backend and compares against the closed-form activation. No files are
/// written.
pub fn inner_product_report(config: &ExperimentConfig) -> Result<DiscrepancyReport> {
    if !matches!(
        config.experiment,
        Experiment::InnerProductContinuous | Experiment::InnerProductBinary
    ) {
        return Err(Error::Config(format!(
            "{} is not an inner-product experiment",
            config.experiment
        )));
    }
    let mut master = rng::seeded(config.seed);
    let pool = vector_pool(config, &mut master)?;
    let mut ideal = Vec::with_capacity(pool.len() * pool.len());
    for x in &pool {
        for w in &pool {
            ideal.push(activation(x, w)?.output);
        }
    }

    let mut results = Vec::new();
    for backend in config.backends.backends() {
        for repeat in 0..config.repeats {
            let mut evaluator = Evaluator::new(config.mode, backend, master.next_u64());
            let mut pairs = Vec::with_capacity(ideal.len());
            for (i, x) in pool.iter().enumerate() {
                for (j, w) in pool.iter().enumerate() {
                    pairs.push(PairResult {
                        x_index: i,
                        w_index: j,
                        ideal: ideal[i * pool.len() + j],
                        measured: evaluator.output(x, w)?,
                    });
                }
            }
            let measured: Vec<f64> = pairs.iter().map(|p| p.measured).collect();
            results.push(BackendDiscrepancy {
                backend,
                repeat,
                d: discrepancy(&ideal, &measured)?,
                pairs,
            });
        }
    }
    Ok(DiscrepancyReport { pool, results })
}

/// Runs [`inner_product_report`] and writes its files to `config.out`.
pub fn run_inner_product_experiment(config: &ExperimentConfig) -> Result<DiscrepancyReport> {
    let report = inner_product_report(config)?;
    let out = prepare_dir(&config.out)?;

    write_csv(
        &out.join("pool.csv"),
        phase_header("index", "x", report.pool.first().map_or(0, PhaseVector::len)),
        report.pool.iter().enumerate().map(|(i, p)| {
            std::iter::once(i.to_string())
                .chain(p.phases().iter().map(f64::to_string))
                .collect()
        }),
    )?;
    write_csv(
        &out.join("pairs.csv"),
        ["backend", "repeat", "x_index", "w_index", "ideal", "measured", "abs_diff"]
            .map(String::from)
            .to_vec(),
        report.results.iter().flat_map(|r| {
            r.pairs.iter().map(move |p| {
                vec![
                    r.backend.to_string(),
                    r.repeat.to_string(),
                    p.x_index.to_string(),
                    p.w_index.to_string(),
                    p.ideal.to_string(),
                    p.measured.to_string(),
                    p.abs_diff().to_string(),
                ]
            })
        }),
    )?;
    write_csv(
        &out.join("discrepancy.csv"),
        ["backend", "repeat", "n", "D"].map(String::from).to_vec(),
        report.results.iter().map(|r| {
            vec![
                r.backend.to_string(),
                r.repeat.to_string(),
                r.pairs.len().to_string(),
                r.d.to_string(),
            ]
        }),
    )?;

    let mut meta = base_metadata(config);
    for r in &report.results {
        meta.push((format!("D.{}.{}", r.backend, r.repeat), r.d.to_string()));
        if r.repeat == 0 {
            let path = out.join(format!("plot_{}.csv", r.backend));
            emit_plot_data(r, &path, &meta)?;
        }
    }
    if config.dump_circuit && report.pool.len() > 1 {
        dump_circuits(config, out, &report.pool[0], &report.pool[1])?;
    }
    write_metadata(&out.join("metadata.txt"), &meta)?;
    Ok(report)
}

/// Objective, dataset, start point and training record of a sigmoid run.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmoidOutcome {
    pub objective: PhaseVector,
    pub data: Vec<TrainingSample>,
    pub w0: PhaseVector,
    pub run: RunRecord,
}

/// Draws an objective weight vector (phase 0 pinned at zero), the training
/// set and a random start, then trains. No files are written.
pub fn sigmoid_run(config: &ExperimentConfig) -> Result<SigmoidOutcome> {
    let mut master = rng::seeded(config.seed);
    let raw = random_phase_vector(&mut master, config.n_qubits)?;
    let objective = raw.shifted(-raw.phases()[0]);
    let data = generate_sigmoid_dataset(&mut master, &objective, config.samples)?;
    let w0 = random_phase_vector(&mut master, config.n_qubits)?;
    let run = train(&config.training_config(), &data, &w0)?;
    Ok(SigmoidOutcome {
        objective,
        data,
        w0,
        run,
    })
}

pub fn run_sigmoid_experiment(config: &ExperimentConfig) -> Result<SigmoidOutcome> {
    let outcome = sigmoid_run(config)?;
    let out = prepare_dir(&config.out)?;
    let m = outcome.objective.len();

    write_csv(
        &out.join("dataset.csv"),
        {
            let mut h = vec!["index".to_string(), "target".to_string()];
            h.extend((0..m).map(|k| format!("x_{k}")));
            h
        },
        outcome.data.iter().enumerate().map(|(i, s)| {
            [i.to_string(), s.target.to_string()]
                .into_iter()
                .chain(s.input.phases().iter().map(f64::to_string))
                .collect()
        }),
    )?;
    let header = format!(
        "experiment={} qubits={} samples={} {}",
        config.experiment,
        config.n_qubits,
        config.samples,
        config.training_config().describe()
    );
    write_file(&out.join("trajectory.csv"), outcome.run.to_csv(&header)?.as_bytes())?;

    let mut meta = base_metadata(config);
    meta.push(("objective".into(), join(outcome.objective.phases())));
    meta.push(("w0".into(), join(outcome.w0.phases())));
    meta.push(("terminal".into(), outcome.run.terminal.to_string()));
    meta.push(("steps".into(), (outcome.run.steps.len() - 1).to_string()));
    meta.push((
        "initial_cost".into(),
        outcome.run.initial_cost().unwrap_or(f64::NAN).to_string(),
    ));
    meta.push((
        "final_cost".into(),
        outcome.run.final_cost().unwrap_or(f64::NAN).to_string(),
    ));
    emit_plot_data(&outcome.run, &out.join("cost.csv"), &meta)?;
    if config.dump_circuit {
        dump_circuits(config, out, &outcome.data[0].input, &outcome.w0)?;
    }
    write_metadata(&out.join("metadata.txt"), &meta)?;
    Ok(outcome)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryPerceptronOutcome {
    pub objective: Vec<i8>,
    pub data: Vec<BinarySample>,
    pub starts: Vec<Vec<i8>>,
    pub runs: Vec<RunRecord>,
    /// Mean affinity per step over all restarts, `max_steps + 1` entries.
    pub mean_affinity: Vec<f64>,
}

/// Per-step mean affinity over `runs`. Runs that stopped early contribute
/// their last affinity to the remaining steps.
pub fn mean_affinity_trajectory(runs: &[RunRecord], len: usize) -> Vec<f64> {
    let mut mean = vec![0.0; len];
    if runs.is_empty() {
        return mean;
    }
    for run in runs {
        let last = run.steps.last().and_then(|s| s.affinity).unwrap_or(0.0);
        for (t, acc) in mean.iter_mut().enumerate() {
            *acc += run.steps.get(t).and_then(|s| s.affinity).unwrap_or(last);
        }
    }
    let n = runs.len() as f64;
    mean.iter_mut().for_each(|v| *v /= n);
    mean
}

/// Trailing moving average: entry `t` is the mean of `values[t..t + window]`.
pub fn smooth(values: &[f64], window: usize) -> Vec<f64> {
    if window == 0 || values.len() < window {
        return Vec::new();
    }
    values
        .windows(window)
        .map(|w| w.iter().sum::<f64>() / window as f64)
        .collect()
}

/// Trains from each of `starts` on the same dataset, drawing one shuffle seed
/// per restart from `seeds`.
pub fn binary_perceptron_restarts(
    config: &ExperimentConfig,
    data: &[BinarySample],
    objective: &[i8],
    starts: &[Vec<i8>],
    seeds: &[u64],
) -> Result<Vec<RunRecord>> {
    starts
        .iter()
        .zip(seeds)
        .map(|(w0, &seed)| {
            let tc = crate::training::TrainingConfig {
                seed,
                ..config.training_config()
            };
            train_binary_perceptron(&tc, data, objective, w0)
        })
        .collect()
}

/// Draws the objective, the labelled dataset and `restarts` random starts, then
/// trains from each start. No files are written.
pub fn binary_perceptron_run(config: &ExperimentConfig) -> Result<BinaryPerceptronOutcome> {
    let m = 1usize << config.n_qubits;
    let mut master = rng::seeded(config.seed);
    let objective = random_signs(&mut master, m);
    let data = generate_binary_dataset(
        &mut master,
        &objective,
        config.positives,
        config.negatives,
        BINARY_DATASET_BUDGET,
    )?;
    let starts: Vec<Vec<i8>> = (0..config.restarts).map(|_| random_signs(&mut master, m)).collect();
    let seeds: Vec<u64> = (0..config.restarts).map(|_| master.next_u64()).collect();
    let runs = binary_perceptron_restarts(config, &data, &objective, &starts, &seeds)?;
    let mean_affinity = mean_affinity_trajectory(&runs, config.max_steps + 1);
    Ok(BinaryPerceptronOutcome {
        objective,
        data,
        starts,
        runs,
        mean_affinity,
    })
}

pub fn run_binary_perceptron_experiment(config: &ExperimentConfig) -> Result<BinaryPerceptronOutcome> {
    let outcome = binary_perceptron_run(config)?;
    write_binary_perceptron_files(config, &outcome)?;
    Ok(outcome)
}

/// Writes the files of a binary perceptron run to `config.out`.
pub fn write_binary_perceptron_files(
    config: &ExperimentConfig,
    outcome: &BinaryPerceptronOutcome,
) -> Result<()> {
    let out = prepare_dir(&config.out)?;
    let m = outcome.objective.len();
    let bits = |v: &[i8]| v.iter().map(i8::to_string).collect::<Vec<_>>();

    write_csv(
        &out.join("dataset.csv"),
        {
            let mut h = vec!["index".to_string(), "positive".to_string()];
            h.extend((0..m).map(|k| format!("x_{k}")));
            h
        },
        outcome.data.iter().enumerate().map(|(i, s)| {
            let mut row = vec![i.to_string(), s.positive.to_string()];
            row.extend(bits(&s.bits));
            row
        }),
    )?;
    write_csv(
        &out.join("restarts.csv"),
        {
            let mut h = ["restart", "seed", "terminal", "steps", "final_affinity"]
                .map(String::from)
                .to_vec();
            h.extend((0..m).map(|k| format!("w0_{k}")));
            h
        },
        outcome.runs.iter().zip(&outcome.starts).enumerate().map(|(i, (run, w0))| {
            let mut row = vec![
                i.to_string(),
                run.seed.to_string(),
                run.terminal.to_string(),
                (run.steps.len() - 1).to_string(),
                run.steps
                    .last()
                    .and_then(|s| s.affinity)
                    .map(|a| a.to_string())
                    .unwrap_or_default(),
            ];
            row.extend(bits(w0));
            row
        }),
    )?;
    write_csv(
        &out.join("affinity.csv"),
        ["restart", "step", "affinity"].map(String::from).to_vec(),
        outcome.runs.iter().enumerate().flat_map(|(i, run)| {
            run.steps.iter().map(move |s| {
                vec![
                    i.to_string(),
                    s.step.to_string(),
                    s.affinity.map(|a| a.to_string()).unwrap_or_default(),
                ]
            })
        }),
    )?;

    let mut meta = base_metadata(config);
    meta.push(("objective".into(), bits(&outcome.objective).join(" ")));
    meta.push((
        "final_mean_affinity".into(),
        outcome.mean_affinity.last().copied().unwrap_or(f64::NAN).to_string(),
    ));
    emit_plot_data(
        &MeanAffinity(&outcome.mean_affinity),
        &out.join("mean_affinity.csv"),
        &meta,
    )?;
    if config.dump_circuit {
        if let (Some(sample), Some(w0)) = (outcome.data.first(), outcome.starts.first()) {
            dump_circuits(config, out, &binary_specialize(&sample.bits)?, &binary_specialize(w0)?)?;
        }
    }
    write_metadata(&out.join("metadata.txt"), &meta)
}

/// Runs the experiment selected by `config.experiment` and writes its files.
pub fn run_experiment(config: &ExperimentConfig) -> Result<()> {
    match config.experiment {
        Experiment::InnerProductContinuous | Experiment::InnerProductBinary => {
            run_inner_product_experiment(config).map(drop)
        }
        Experiment::BinaryPerceptron => run_binary_perceptron_experiment(config).map(drop),
        Experiment::SigmoidTraining => run_sigmoid_experiment(config).map(drop),
    }
}

/// A two-column series for plotting.
pub trait PlotData {
    fn columns(&self) -> (&'static str, &'static str);
    fn points(&self) -> Vec<(f64, f64)>;
}

impl PlotData for RunRecord {
    fn columns(&self) -> (&'static str, &'static str) {
        ("step", "cost")
    }

    fn points(&self) -> Vec<(f64, f64)> {
        self.steps.iter().map(|s| (s.step as f64, s.cost)).collect()
    }
}

impl PlotData for BackendDiscrepancy {
    fn columns(&self) -> (&'static str, &'static str) {
        ("ideal", "measured")
    }

    fn points(&self) -> Vec<(f64, f64)> {
        self.pairs.iter().map(|p| (p.ideal, p.measured)).collect()
    }
}

/// Mean affinity per step.
pub struct MeanAffinity<'a>(pub &'a [f64]);

impl PlotData for MeanAffinity<'_> {
    fn columns(&self) -> (&'static str, &'static str) {
        ("step", "mean_affinity")
    }

    fn points(&self) -> Vec<(f64, f64)> {
        self.0.iter().enumerate().map(|(t, &a)| (t as f64, a)).collect()
    }
}

/// Writes `data` as a two-column CSV at `path` and its metadata sidecar at
/// `<path>.meta`.
pub fn emit_plot_data(data: &dyn PlotData, path: &Path, metadata: &[(String, String)]) -> Result<()> {
    let (x, y) = data.columns();
    write_csv(
        path,
        vec![x.to_string(), y.to_string()],
        data.points().into_iter().map(|(a, b)| vec![a.to_string(), b.to_string()]),
    )?;
    let mut sidecar = path.as_os_str().to_owned();
    sidecar.push(".meta");
    write_metadata(Path::new(&sidecar), metadata)
}

fn base_metadata(config: &ExperimentConfig) -> Vec<(String, String)> {
    let mut meta: Vec<(String, String)> = config
        .echo()
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    meta.push(("rng".into(), RNG_ALGORITHM.into()));
    meta.push(("library_version".into(), env!("CARGO_PKG_VERSION").into()));
    meta
}

/// Writes `key = value` lines under a comment header.
pub fn write_metadata(path: &Path, pairs: &[(String, String)]) -> Result<()> {
    let mut text = String::from("# phaseron run metadata\n");
    for (k, v) in pairs {
        text.push_str(&format!("{k} = {v}\n"));
    }
    write_file(path, text.as_bytes())
}

/// Parses the metadata format back into pairs.
pub fn read_metadata(text: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|l| {
            l.split_once(" = ")
                .map(|(k, v)| (k.trim().to_string(), v.to_string()))
                .ok_or_else(|| Error::InvalidArgument(format!("bad metadata line `{l}`")))
        })
        .collect()
}

fn dump_circuits(config: &ExperimentConfig, out: &Path, x: &PhaseVector, w: &PhaseVector) -> Result<()> {
    for backend in config.backends.backends() {
        let circuit = build_neuron_circuit(x, w, backend)?;
        write_file(
            &out.join(format!("circuit_{backend}.txt")),
            circuit.to_text().as_bytes(),
        )?;
    }
    Ok(())
}

fn phase_header(first: &str, prefix: &str, m: usize) -> Vec<String> {
    std::iter::once(first.to_string())
        .chain((0..m).map(|k| format!("{prefix}_{k}")))
        .collect()
}

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

fn prepare_dir(dir: &Path) -> Result<&Path> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(dir)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn write_csv<I>(path: &Path, header: Vec<String>, rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut buf = Vec::new();
    {
        let mut wtr = csv::Writer::from_writer(&mut buf);
        wtr.write_record(&header).map_err(csv_error)?;
        for row in rows {
            wtr.write_record(&row).map_err(csv_error)?;
        }
        wtr.flush().map_err(|e| Error::io(path, e))?;
    }
    write_file(path, &buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ConfigOverrides;

    fn config(experiment: Experiment, o: ConfigOverrides) -> ExperimentConfig {
        ExperimentConfig::resolve(experiment, o).unwrap()
    }

    #[test]
    fn discrepancy_examples() {
        assert_eq!(discrepancy(&[0.2, 0.4], &[0.2, 0.4]).unwrap(), 0.0);
        assert_eq!(discrepancy(&[0.0, 1.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert!(matches!(
            discrepancy(&[0.0], &[0.0, 1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(discrepancy(&[], &[]).is_err());
    }

    #[test]
    fn binary_pool_enumerates_small_cases() {
        let mut rng = rng::seeded(0);
        let pool = binary_pool(&mut rng, 4, 16);
        assert_eq!(pool.len(), 16);
        assert_eq!(pool[0], vec![1, 1, 1, 1]);
        assert_eq!(pool[5], vec![-1, 1, -1, 1]);
        let partial = binary_pool(&mut rng, 4, 6);
        assert_eq!(partial.len(), 6);
        assert_eq!(partial.iter().collect::<BTreeSet<_>>().len(), 6);
    }

    #[test]
    fn exact_mode_has_no_discrepancy() {
        for experiment in [Experiment::InnerProductContinuous, Experiment::InnerProductBinary] {
            let c = config(
                experiment,
                ConfigOverrides { mode: Some("statevector".into()), ..Default::default() },
            );
            let report = inner_product_report(&c).unwrap();
            assert_eq!(report.results.len(), 2);
            for r in &report.results {
                assert!(r.d < 1e-9, "{}: {}", r.backend, r.d);
            }
        }
    }

    #[test]
    fn sampled_discrepancy_near_noise_floor() {
        let c = config(Experiment::InnerProductContinuous, ConfigOverrides::default());
        let report = inner_product_report(&c).unwrap();
        assert_eq!(report.n(), 64);
        for r in &report.results {
            let ideal: Vec<f64> = r.pairs.iter().map(|p| p.ideal).collect();
            let floor = binomial_noise_floor(&ideal, c.shots);
            let ratio = r.d / floor;
            // E|N(0, s)| = sqrt(2/pi) s ~ 0.80 s
            assert!((0.6..1.0).contains(&ratio), "{}: D/floor = {ratio}", r.backend);
        }
    }

    #[test]
    fn repeats_add_rows() {
        let c = config(
            Experiment::InnerProductContinuous,
            ConfigOverrides { repeats: Some(3), vectors: Some(3), ..Default::default() },
        );
        let report = inner_product_report(&c).unwrap();
        assert_eq!(report.d_values(Backend::Hsgs).len(), 3);
        assert_eq!(report.results.len(), 6);
    }

    #[test]
    fn smoothing_and_padding() {
        assert_eq!(smooth(&[1.0, 2.0, 3.0, 4.0], 2), vec![1.5, 2.5, 3.5]);
        assert!(smooth(&[1.0], 5).is_empty());
        assert_eq!(mean_affinity_trajectory(&[], 3), vec![0.0; 3]);
    }

    #[test]
    fn metadata_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.txt");
        let pairs = vec![("seed".to_string(), "4".to_string()), ("eta".into(), "0.1".into())];
        write_metadata(&path, &pairs).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(read_metadata(&text).unwrap(), pairs);
    }

    #[test]
    fn empty_plot_series_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        emit_plot_data(&MeanAffinity(&[]), &path, &[]).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "step,mean_affinity\n");
        assert!(dir.path().join("p.csv.meta").exists());
    }

    #[test]
    fn io_errors_carry_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, b"x").unwrap();
        let c = config(
            Experiment::InnerProductContinuous,
            ConfigOverrides {
                out: Some(blocker.join("sub")),
                mode: Some("analytic".into()),
                vectors: Some(2),
                ..Default::default()
            },
        );
        match run_inner_product_experiment(&c) {
            Err(Error::Io { path, .. }) => assert!(path.ends_with("sub")),
            other => panic!("expected io error, got {other:?}"),
        }
    }
}

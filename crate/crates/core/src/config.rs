//! Experiment configuration.
//!
//! A config file is TOML with one key per CLI flag (flag names with `-`
//! replaced by `_`):
//!
//! ```toml
//! qubits = 2
//! shots = 8192
//! backend = "both"        # rotation | hsgs | both
//! mode = "sampled"        # analytic | statevector | sampled
//! seed = 7
//! eta = 0.1
//! max_steps = 10000
//! out = "runs/sigmoid"
//! dump_circuit = false
//! cost_threshold = 0.001
//! stop_on_cost_increase = true
//! vectors = 8
//! samples = 200
//! positives = 5
//! negatives = 50
//! restarts = 59
//! repeats = 1
//! ```
//!
//! Every key is optional. Values given on the command line override the file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::builders::Backend;
use crate::error::{Error, Result};
use crate::training::{EvaluationMode, TrainingConfig, DEFAULT_COST_THRESHOLD};

/// Largest register the experiment drivers accept.
pub const MAX_EXPERIMENT_QUBITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    InnerProductContinuous,
    InnerProductBinary,
    BinaryPerceptron,
    SigmoidTraining,
}

impl Experiment {
    pub const ALL: [Experiment; 4] = [
        Experiment::InnerProductContinuous,
        Experiment::InnerProductBinary,
        Experiment::BinaryPerceptron,
        Experiment::SigmoidTraining,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::InnerProductContinuous => "inner-product-continuous",
            Experiment::InnerProductBinary => "inner-product-binary",
            Experiment::BinaryPerceptron => "binary-perceptron",
            Experiment::SigmoidTraining => "sigmoid",
        }
    }

    fn default_mode(self) -> &'static str {
        match self {
            Experiment::InnerProductContinuous | Experiment::InnerProductBinary => "sampled",
            Experiment::BinaryPerceptron => "statevector",
            Experiment::SigmoidTraining => "analytic",
        }
    }

    fn default_backend(self) -> BackendSelection {
        match self {
            Experiment::InnerProductContinuous | Experiment::InnerProductBinary => {
                BackendSelection::Both
            }
            _ => BackendSelection::Hsgs,
        }
    }

    fn default_max_steps(self) -> usize {
        match self {
            Experiment::BinaryPerceptron => 50,
            _ => 10_000,
        }
    }

    fn default_vectors(self) -> usize {
        match self {
            Experiment::InnerProductBinary => 16,
            _ => 8,
        }
    }

    fn is_training(self) -> bool {
        matches!(self, Experiment::BinaryPerceptron | Experiment::SigmoidTraining)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendSelection {
    Rotation,
    Hsgs,
    Both,
}

impl BackendSelection {
    pub fn backends(self) -> Vec<Backend> {
        match self {
            BackendSelection::Rotation => vec![Backend::RotationBlocks],
            BackendSelection::Hsgs => vec![Backend::Hsgs],
            BackendSelection::Both => Backend::ALL.to_vec(),
        }
    }
}

impl fmt::Display for BackendSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendSelection::Rotation => "rotation",
            BackendSelection::Hsgs => "hsgs",
            BackendSelection::Both => "both",
        })
    }
}

impl FromStr for BackendSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" => Ok(BackendSelection::Both),
            other => match other.parse::<Backend>()? {
                Backend::RotationBlocks => Ok(BackendSelection::Rotation),
                Backend::Hsgs => Ok(BackendSelection::Hsgs),
            },
        }
    }
}

/// Partially specified settings, as read from a file or the command line.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub qubits: Option<usize>,
    pub shots: Option<u64>,
    pub backend: Option<String>,
    pub mode: Option<String>,
    pub seed: Option<u64>,
    pub eta: Option<f64>,
    pub max_steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub dump_circuit: Option<bool>,
    pub cost_threshold: Option<f64>,
    pub stop_on_cost_increase: Option<bool>,
    pub vectors: Option<usize>,
    pub samples: Option<usize>,
    pub positives: Option<usize>,
    pub negatives: Option<usize>,
    pub restarts: Option<usize>,
    pub repeats: Option<usize>,
}

impl ConfigOverrides {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            qubits: self.qubits.or(base.qubits),
            shots: self.shots.or(base.shots),
            backend: self.backend.or(base.backend),
            mode: self.mode.or(base.mode),
            seed: self.seed.or(base.seed),
            eta: self.eta.or(base.eta),
            max_steps: self.max_steps.or(base.max_steps),
            out: self.out.or(base.out),
            dump_circuit: self.dump_circuit.or(base.dump_circuit),
            cost_threshold: self.cost_threshold.or(base.cost_threshold),
            stop_on_cost_increase: self.stop_on_cost_increase.or(base.stop_on_cost_increase),
            vectors: self.vectors.or(base.vectors),
            samples: self.samples.or(base.samples),
            positives: self.positives.or(base.positives),
            negatives: self.negatives.or(base.negatives),
            restarts: self.restarts.or(base.restarts),
            repeats: self.repeats.or(base.repeats),
        }
    }
}

/// Fully resolved settings for one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n_qubits: usize,
    pub shots: u64,
    pub backends: BackendSelection,
    pub mode: EvaluationMode,
    pub seed: u64,
    pub out: PathBuf,
    pub dump_circuit: bool,
    pub eta: f64,
    pub max_steps: usize,
    pub cost_threshold: f64,
    pub stop_on_cost_increase: bool,
    /// Size of the vector pool in the inner-product experiments.
    pub vectors: usize,
    /// Training-set size of the sigmoid experiment.
    pub samples: usize,
    pub positives: usize,
    pub negatives: usize,
    pub restarts: usize,
    pub repeats: usize,
}

impl ExperimentConfig {
    /// Defaults for `experiment`, matching the reference setups.
    pub fn defaults(experiment: Experiment) -> Self {
        Self::resolve(experiment, ConfigOverrides::default())
            .expect("defaults are valid")
    }

    /// Fills unset fields with the experiment's defaults and validates.
    pub fn resolve(experiment: Experiment, o: ConfigOverrides) -> Result<Self> {
        let shots = o.shots.unwrap_or(8192);
        let backends = match o.backend {
            Some(b) => b.parse()?,
            None => experiment.default_backend(),
        };
        let mode = EvaluationMode::parse(
            o.mode.as_deref().unwrap_or(experiment.default_mode()),
            shots,
        )?;
        let config = ExperimentConfig {
            experiment,
            n_qubits: o.qubits.unwrap_or(2),
            shots,
            backends,
            mode,
            seed: o.seed.unwrap_or(0),
            out: o.out.unwrap_or_else(|| PathBuf::from("out").join(experiment.name())),
            dump_circuit: o.dump_circuit.unwrap_or(false),
            eta: o.eta.unwrap_or(0.1),
            max_steps: o.max_steps.unwrap_or(experiment.default_max_steps()),
            cost_threshold: o.cost_threshold.unwrap_or(DEFAULT_COST_THRESHOLD),
            stop_on_cost_increase: o.stop_on_cost_increase.unwrap_or(true),
            vectors: o.vectors.unwrap_or(experiment.default_vectors()),
            samples: o.samples.unwrap_or(200),
            positives: o.positives.unwrap_or(5),
            negatives: o.negatives.unwrap_or(50),
            restarts: o.restarts.unwrap_or(59),
            repeats: o.repeats.unwrap_or(1),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n_qubits == 0 || self.n_qubits > MAX_EXPERIMENT_QUBITS {
            return fail(format!(
                "qubits must be in 1..={MAX_EXPERIMENT_QUBITS}, got {}",
                self.n_qubits
            ));
        }
        let counts = [
            ("shots", self.shots as usize),
            ("vectors", self.vectors),
            ("samples", self.samples),
            ("positives", self.positives),
            ("negatives", self.negatives),
            ("restarts", self.restarts),
            ("repeats", self.repeats),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return fail(format!("{name} must be >= 1"));
        }
        if self.experiment.is_training() && self.backends == BackendSelection::Both {
            return fail(format!(
                "{} trains with a single backend; pass rotation or hsgs",
                self.experiment
            ));
        }
        self.training_config().validate()
    }

    pub fn training_config(&self) -> TrainingConfig {
        TrainingConfig {
            learning_rate: self.eta,
            max_steps: self.max_steps,
            cost_threshold: self.cost_threshold,
            stop_on_cost_increase: self.stop_on_cost_increase,
            mode: self.mode,
            backend: self.backends.backends()[0],
            seed: self.seed,
        }
    }

    /// `(key, value)` pairs echoed into metadata sidecars.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("experiment", self.experiment.to_string()),
            ("qubits", self.n_qubits.to_string()),
            ("shots", self.shots.to_string()),
            ("backend", self.backends.to_string()),
            ("mode", self.mode.to_string()),
            ("seed", self.seed.to_string()),
        ];
        match self.experiment {
            Experiment::InnerProductContinuous | Experiment::InnerProductBinary => {
                out.push(("vectors", self.vectors.to_string()));
                out.push(("repeats", self.repeats.to_string()));
            }
            Experiment::BinaryPerceptron => {
                out.push(("max_steps", self.max_steps.to_string()));
                out.push(("positives", self.positives.to_string()));
                out.push(("negatives", self.negatives.to_string()));
                out.push(("restarts", self.restarts.to_string()));
            }
            Experiment::SigmoidTraining => {
                out.push(("eta", self.eta.to_string()));
                out.push(("max_steps", self.max_steps.to_string()));
                out.push(("cost_threshold", self.cost_threshold.to_string()));
                out.push((
                    "stop_on_cost_increase",
                    self.stop_on_cost_increase.to_string(),
                ));
                out.push(("samples", self.samples.to_string()));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_per_experiment() {
        let c = ExperimentConfig::defaults(Experiment::InnerProductContinuous);
        assert_eq!(c.vectors, 8);
        assert_eq!(c.mode, EvaluationMode::Sampled { shots: 8192 });
        assert_eq!(c.backends, BackendSelection::Both);

        let c = ExperimentConfig::defaults(Experiment::SigmoidTraining);
        assert_eq!(c.mode, EvaluationMode::Analytic);
        assert_eq!(c.eta, 0.1);
        assert_eq!(c.samples, 200);

        let c = ExperimentConfig::defaults(Experiment::BinaryPerceptron);
        assert_eq!((c.max_steps, c.restarts, c.positives, c.negatives), (50, 59, 5, 50));
        assert_eq!(ExperimentConfig::defaults(Experiment::InnerProductBinary).vectors, 16);
    }

    #[test]
    fn file_values_are_overridden_by_cli() {
        let file = ConfigOverrides::from_toml("qubits = 3\nseed = 4\nmode = \"statevector\"\n").unwrap();
        let cli = ConfigOverrides {
            seed: Some(9),
            ..Default::default()
        };
        let c = ExperimentConfig::resolve(Experiment::SigmoidTraining, cli.over(file)).unwrap();
        assert_eq!(c.n_qubits, 3);
        assert_eq!(c.seed, 9);
        assert_eq!(c.mode, EvaluationMode::Statevector);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            ConfigOverrides { max_steps: Some(0), ..Default::default() },
            ConfigOverrides { qubits: Some(0), ..Default::default() },
            ConfigOverrides { shots: Some(0), ..Default::default() },
            ConfigOverrides { eta: Some(0.0), ..Default::default() },
            ConfigOverrides { backend: Some("both".into()), ..Default::default() },
            ConfigOverrides { mode: Some("noisy".into()), ..Default::default() },
        ];
        for o in bad {
            assert!(matches!(
                ExperimentConfig::resolve(Experiment::SigmoidTraining, o),
                Err(Error::Config(_))
            ));
        }
        assert!(ConfigOverrides::from_toml("bogus = 1").is_err());
    }

    #[test]
    fn experiment_names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!("nope".parse::<Experiment>().is_err());
    }
}

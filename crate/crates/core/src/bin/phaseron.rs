use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use phaseron::config::{ConfigOverrides, Experiment, ExperimentConfig};
use phaseron::experiments::run_experiment;
use phaseron::Error;

/// Phase-encoded quantum perceptron experiments.
#[derive(Parser)]
#[command(name = "phaseron", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inner products of random continuous phase vectors.
    InnerProductContinuous(Flags),
    /// Inner products of binary (+-1) vectors.
    InnerProductBinary(Flags),
    /// Perceptron-style training on binary data.
    BinaryPerceptron(Flags),
    /// Gradient descent on continuous data with sigmoid targets.
    Sigmoid(Flags),
}

#[derive(Args)]
struct Flags {
    /// TOML file with default values; flags given here win.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long)]
    shots: Option<u64>,
    /// rotation, hsgs or both
    #[arg(long)]
    backend: Option<String>,
    /// analytic, statevector or sampled
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Write the neuron circuit of one input/weight pair per backend.
    #[arg(long)]
    dump_circuit: bool,
    #[arg(long)]
    cost_threshold: Option<f64>,
    /// Keep training when the cost goes up.
    #[arg(long)]
    no_stop_on_increase: bool,
    #[arg(long)]
    vectors: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    positives: Option<usize>,
    #[arg(long)]
    negatives: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
}

impl Flags {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            qubits: self.qubits,
            shots: self.shots,
            backend: self.backend.clone(),
            mode: self.mode.clone(),
            seed: self.seed,
            eta: self.eta,
            max_steps: self.max_steps,
            out: self.out.clone(),
            dump_circuit: self.dump_circuit.then_some(true),
            cost_threshold: self.cost_threshold,
            stop_on_cost_increase: self.no_stop_on_increase.then_some(false),
            vectors: self.vectors,
            samples: self.samples,
            positives: self.positives,
            negatives: self.negatives,
            restarts: self.restarts,
            repeats: self.repeats,
        }
    }
}

fn run(experiment: Experiment, flags: &Flags) -> Result<(), Error> {
    let file = match &flags.config {
        Some(path) => ConfigOverrides::load(path)?,
        None => ConfigOverrides::default(),
    };
    let config = ExperimentConfig::resolve(experiment, flags.overrides().over(file))?;
    for (key, value) in config.echo() {
        println!("{key} = {value}");
    }
    run_experiment(&config)?;
    println!("wrote {}", config.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, flags) = match &cli.command {
        Command::InnerProductContinuous(f) => (Experiment::InnerProductContinuous, f),
        Command::InnerProductBinary(f) => (Experiment::InnerProductBinary, f),
        Command::BinaryPerceptron(f) => (Experiment::BinaryPerceptron, f),
        Command::Sigmoid(f) => (Experiment::SigmoidTraining, f),
    };
    match run(experiment, flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

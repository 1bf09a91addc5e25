use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use degdist::ModelKind;

#[derive(Debug, Parser)]
#[command(name = "degdist", version, about = "Fit heavy-tailed degree distributions and run graph experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit distribution models to a degree sample.
    Fit(FitArgs),
    /// Predict high-degree thresholds and counts under power-law and PLN fits.
    Tail(TailArgs),
    /// Generate a synthetic graph.
    Gen(GenArgs),
    /// Run a robustness, influence or privacy experiment.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Whitespace-separated node pairs, one edge per line.
    Edges,
    /// One positive integer degree per line.
    Degrees,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Edges)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Comma-separated model names; all seven when omitted.
    #[arg(long, value_delimiter = ',', value_parser = parse_kind)]
    pub models: Vec<ModelKind>,
    /// Quantile levels in the QQ plot data.
    #[arg(long, default_value_t = 99)]
    pub qq_points: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct TailArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 0.1, value_parser = parse_fraction)]
    pub gamma: f64,
    /// Terms of the asymptotic erfc expansion in the PLN count.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_terms: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenMode {
    ConfigModel,
    /// Experimental growth model.
    TwoPhase,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value_t = GenMode::ConfigModel)]
    pub mode: GenMode,
    /// Model for config-model mode (power_law or pln).
    #[arg(long, value_parser = parse_kind)]
    pub model: Option<ModelKind>,
    /// Explicit parameters, e.g. `beta=2,mu=2,tau=1`.
    #[arg(long)]
    pub params: Option<String>,
    /// A fit.json written by `degdist fit`; `--model` picks the entry (default pln).
    #[arg(long, conflicts_with = "params")]
    pub model_file: Option<PathBuf>,
    #[arg(long)]
    pub n: usize,
    /// Arrival probability (two-phase).
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub m_new: usize,
    #[arg(long, default_value_t = 4.0)]
    pub growth_rate: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentKind {
    Robustness,
    Influence,
    Privacy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Cascade {
    /// Independent cascade; needs `--p`.
    Ic,
    /// Weighted cascade.
    Wc,
    /// Linear threshold.
    Lt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrivacyMode {
    /// Empirical degree pmf of each graph.
    Graph,
    /// Power-law and PLN fits of the input graph.
    Model,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub kind: ExperimentKind,
    /// The real graph (edge list).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub synthetic_pln: Option<PathBuf>,
    #[arg(long)]
    pub synthetic_powerlaw: Option<PathBuf>,
    /// Fit power-law and PLN models to the input and build matched synthetic graphs.
    #[arg(long, conflicts_with_all = ["synthetic_pln", "synthetic_powerlaw"])]
    pub auto_synthetic: bool,
    /// Also write the synthesized graphs as edge lists.
    #[arg(long, requires = "auto_synthetic")]
    pub save_graphs: bool,
    #[arg(long, value_delimiter = ',', default_value = "0,0.01,0.02,0.03,0.05,0.1,0.15,0.2")]
    pub fraction_grid: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Cascade::Ic)]
    pub cascade: Cascade,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, value_delimiter = ',', default_value = "10,50,100,500")]
    pub seed_counts: Vec<usize>,
    /// Largest number of attackers; the sweep starts at the empty attack.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(long, value_parser = parse_fraction)]
    pub epsilon_target: Option<f64>,
    #[arg(long, value_enum, default_value_t = PrivacyMode::Graph)]
    pub privacy_mode: PrivacyMode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn parse_kind(s: &str) -> Result<ModelKind, String> {
    ModelKind::parse(s).ok_or_else(|| {
        let names: Vec<&str> = ModelKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown model `{s}`; expected one of {}", names.join(", "))
    })
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not in (0, 1)"))
    }
}

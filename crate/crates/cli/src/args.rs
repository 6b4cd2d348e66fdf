use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use selbound::{OrliczSpec, SelectionRule, ZLaw};

#[derive(Debug, Parser)]
#[command(name = "selbound", version, about = "Bounds on the mean of a selected coordinate E[Z_T]")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Root seed for Monte Carlo commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// key=value file supplying defaults for any flag; flags given on the
    /// command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "SELBOUND_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate ψ, ψ*, or their generalized inverses at a point.
    Conjugate(ConjugateArgs),
    /// Luxemburg or Amemiya norm of a finite random variable.
    Norm(NormArgs),
    /// Shannon entropy, H(T;q), or mutual information.
    Entropy(EntropyArgs),
    /// Compute one bound.
    Bound(BoundArgs),
    /// Simulate a selection experiment and check every applicable bound.
    Verify(VerifyArgs),
    /// Verify over a grid of n and softmax inverse temperatures.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct ConjugateArgs {
    /// Orlicz function: power:P, subgaussian:S or tabulated:x/y,...
    #[arg(long, value_parser = parse_spec)]
    pub spec: OrliczSpec,

    /// Evaluation point.
    #[arg(long, allow_negative_numbers = true)]
    pub at: f64,

    /// Evaluate the generalized inverse instead.
    #[arg(long)]
    pub inverse: bool,

    /// Use ψ itself rather than its conjugate.
    #[arg(long)]
    pub primal: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NormKind {
    Luxemburg,
    Amemiya,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[arg(long, value_parser = parse_spec)]
    pub spec: OrliczSpec,

    /// Atom values.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub values: Vec<f64>,

    /// Atom probabilities (default: uniform).
    #[arg(long, value_delimiter = ',')]
    pub probs: Option<Vec<f64>>,

    #[arg(long, value_enum, default_value_t = NormKind::Luxemburg)]
    pub kind: NormKind,

    /// Take the norm with respect to ψ* instead of ψ.
    #[arg(long)]
    pub conjugate: bool,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// Selection marginal P_T as comma-separated probabilities.
    #[arg(long, value_delimiter = ',', conflicts_with = "instance")]
    pub marginal: Option<Vec<f64>>,

    /// Joint instance file; its selection marginal is used.
    #[arg(long)]
    pub instance: Option<PathBuf>,

    /// Print H(T;q) instead of the Shannon entropy.
    #[arg(long, requires = "q", conflicts_with = "mi")]
    pub hq: bool,

    /// Exponent for H(T;q): a number ≥ 1 or inf.
    #[arg(long)]
    pub q: Option<f64>,

    /// Print the mutual information I(T;Z) of the instance.
    #[arg(long, requires = "instance")]
    pub mi: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    Mgf,
    Orlicz,
    SoftMi,
    SoftEntropy,
    Thm1Conditional,
    Thm1Marginal,
    PnormConditional,
    PnormMarginal,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub kind: BoundKind,

    /// Orlicz function (defaults to power:P when --p is given).
    #[arg(long, value_parser = parse_spec)]
    pub spec: Option<OrliczSpec>,

    /// Exponent for the p-norm bounds.
    #[arg(long)]
    pub p: Option<f64>,

    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,

    /// Number of coordinates for the classical bounds.
    #[arg(long)]
    pub n: Option<usize>,

    /// Information value for the soft bounds.
    #[arg(long)]
    pub info: Option<f64>,

    #[arg(long, value_delimiter = ',', conflicts_with = "instance")]
    pub marginal: Option<Vec<f64>>,

    #[arg(long)]
    pub instance: Option<PathBuf>,

    /// Also minimize the objective on a dense grid of this resolution and
    /// report the grid value.
    #[arg(long)]
    pub oracle: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// gaussian[:sd], rademacher, uniform[:half_width] or correlated:rho.
    #[arg(long, value_parser = parse_law)]
    pub law: ZLaw,

    #[arg(long)]
    pub n: usize,

    /// argmax, deterministic:i (1-based), uniform or softmax:beta.
    #[arg(long, value_parser = parse_selection)]
    pub selection: SelectionRule,

    #[arg(long, value_parser = parse_spec)]
    pub spec: OrliczSpec,

    #[arg(long, default_value_t = 100_000)]
    pub replicates: u64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_law)]
    pub law: ZLaw,

    /// Comma-separated coordinate counts.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,

    /// Comma-separated softmax inverse temperatures.
    #[arg(long, value_delimiter = ',', required = true)]
    pub beta: Vec<f64>,

    #[arg(long, value_parser = parse_spec)]
    pub spec: OrliczSpec,

    #[arg(long, default_value_t = 100_000)]
    pub replicates: u64,
}

fn parse_spec(s: &str) -> Result<OrliczSpec, String> {
    s.parse().map_err(|e: selbound::Error| e.to_string())
}

fn number(s: &str) -> Result<f64, String> {
    s.trim().parse().map_err(|_| format!("not a number: {s:?}"))
}

pub fn parse_law(s: &str) -> Result<ZLaw, String> {
    let (kind, arg) = match s.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (s, None),
    };
    match (kind.trim().to_ascii_lowercase().as_str(), arg) {
        ("gaussian", a) => Ok(ZLaw::GaussianIid { sd: a.map(number).transpose()?.unwrap_or(1.0) }),
        ("rademacher", None) => Ok(ZLaw::RademacherIid),
        ("uniform", a) => Ok(ZLaw::BoundedUniform { half_width: a.map(number).transpose()?.unwrap_or(1.0) }),
        ("correlated", Some(a)) => Ok(ZLaw::CorrelatedGaussian { correlation: number(a)? }),
        _ => Err(format!(
            "unknown law {s:?}; expected gaussian[:sd], rademacher, uniform[:half_width] or correlated:rho"
        )),
    }
}

pub fn parse_selection(s: &str) -> Result<SelectionRule, String> {
    let (kind, arg) = match s.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (s, None),
    };
    match (kind.trim().to_ascii_lowercase().as_str(), arg) {
        ("argmax", None) => Ok(SelectionRule::Argmax),
        ("uniform", None) => Ok(SelectionRule::UniformRandom),
        ("softmax", Some(b)) => Ok(SelectionRule::Softmax { beta: number(b)? }),
        ("deterministic", Some(i)) => match i.trim().parse::<usize>() {
            Ok(i) if i >= 1 => Ok(SelectionRule::Deterministic(i - 1)),
            _ => Err(format!("deterministic index must be a 1-based integer, got {i:?}")),
        },
        _ => Err(format!(
            "unknown selection {s:?}; expected argmax, deterministic:i, uniform or softmax:beta"
        )),
    }
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "transduce", version, about = "Analyse and correct two-mode Gaussian transducers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a transducer and reduce it to its canonical gate.
    Classify(ClassifyArgs),
    /// Plan a two-pass interference correction from two transducer passes.
    Correct(CorrectArgs),
    /// Added noise and capacity of the lossy beam-splitter transducer over a decay-rate grid.
    SweepLossy(SweepLossyArgs),
    /// Bloch-averaged code fidelities over a grid of displacement-noise widths.
    CodeFidelity(CodeFidelityArgs),
    /// Gains that turn three swapped QND passes into a swap.
    SixPass(SixPassArgs),
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Transducer matrix file.
    pub path: PathBuf,
    /// Write the structured report here instead of only printing it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    #[value(name = "1to2")]
    OneToTwo,
    #[value(name = "2to1")]
    TwoToOne,
}

#[derive(Debug, Args)]
pub struct CorrectArgs {
    /// Matrix file of the first pass.
    pub first: PathBuf,
    /// Matrix file of the second pass.
    pub second: PathBuf,
    #[arg(long, value_enum, default_value = "1to2")]
    pub direction: DirectionArg,
    /// Squeezing available on mode 1 for finishing a 2to1 correction.
    #[arg(long)]
    pub squeezing: Option<f64>,
    /// Homodyne inefficiency for finishing a 1to2 correction.
    #[arg(long)]
    pub inefficiency: Option<f64>,
    /// Write the composite transducer as a matrix file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Interference,
    Standard,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransferArg {
    Writein,
    Readout,
}

#[derive(Debug, Clone, Args)]
pub struct SweepLossyArgs {
    /// Single decay rate in units of g, instead of a range.
    #[arg(long, conflicts_with_all = ["kappa_start", "kappa_stop", "kappa_count"])]
    pub kappa: Option<f64>,
    /// First decay rate in units of g.
    #[arg(long, default_value_t = 0.0)]
    pub kappa_start: f64,
    /// Last decay rate in units of g.
    #[arg(long, default_value_t = 0.2)]
    pub kappa_stop: f64,
    #[arg(long, default_value_t = 21)]
    pub kappa_count: usize,
    #[arg(long, value_enum, default_value = "linear")]
    pub scale: Scale,
    /// Beam-splitter coupling rate.
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    /// Total interaction time as a fraction of the lossless swap time π/(2g).
    #[arg(long, default_value_t = 0.1)]
    pub tau_frac: f64,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "writein")]
    pub direction: TransferArg,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodeArg {
    Cat,
    SqueezedCat,
    Qsp,
}

#[derive(Debug, Clone, Args)]
pub struct CodeFidelityArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_value = "cat,squeezed-cat,qsp")]
    pub codes: Vec<CodeArg>,
    /// Cat amplitude.
    #[arg(long)]
    pub alpha: f64,
    /// Position squeeze factor of the squeezed cat (e^r, below one).
    #[arg(long, default_value_t = 0.5)]
    pub squeeze: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma_start: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_stop: f64,
    #[arg(long, default_value_t = 11)]
    pub sigma_count: usize,
    #[arg(long, value_enum, default_value = "linear")]
    pub scale: Scale,
    /// Photon-number truncation; overrides TRANSDUCE_NTRUNC.
    #[arg(long)]
    pub n_trunc: Option<usize>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn nonzero_strength(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v == 0.0 || !v.is_finite() {
        return Err(format!("strength must be finite and nonzero, got {s}"));
    }
    Ok(v)
}

#[derive(Debug, Args)]
pub struct SixPassArgs {
    /// Swapped QND strengths of the three passes.
    #[arg(num_args = 3, required = true, allow_negative_numbers = true, value_parser = nonzero_strength)]
    pub eta: Vec<f64>,
    /// Write the structured report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use srsc::decoder::DecodeMode;
use srsc::SrscParams;

#[derive(Parser, Debug)]
#[command(name = "srsc", version, about = "SR-staircase code analysis and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a parameter set and print its derived quantities.
    Validate(CodeArgs),
    /// Print the code rate.
    Rate(RateArgs),
    /// Encode information bits into a block file.
    Encode(EncodeArgs),
    /// Decode a received block file with the sliding-window decoder.
    Decode(DecodeArgs),
    /// Density-evolution threshold, and the BSC threshold when `--m1` is given.
    Threshold(ThresholdArgs),
    /// Block-size design search from a benchmark spec file.
    Design(DesignArgs),
    /// Minimum stall pattern size, multiplicity and estimated BER floor.
    Floor(FloorArgs),
    /// Monte Carlo BER/FER at one channel point.
    Simulate(SimulateArgs),
    /// Monte Carlo BER/FER over a list of channel points.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CodeArgs {
    #[arg(long)]
    pub m1: usize,
    /// Defaults to `m1`.
    #[arg(long)]
    pub m2: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub q1: usize,
    /// Defaults to `q1`.
    #[arg(long)]
    pub q2: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub w: usize,
    #[arg(long)]
    pub t1: u32,
    /// Defaults to `t1`.
    #[arg(long)]
    pub t2: Option<u32>,
    #[arg(long)]
    pub nu1: u32,
    /// Defaults to `nu1`.
    #[arg(long)]
    pub nu2: Option<u32>,
    /// Chain length in blocks.
    #[arg(long = "L", default_value_t = 20)]
    pub chain_len: usize,
}

impl CodeArgs {
    pub fn params(&self) -> SrscParams {
        SrscParams {
            m1: self.m1,
            m2: self.m2.unwrap_or(self.m1),
            q1: self.q1,
            q2: self.q2.unwrap_or(self.q1),
            w: self.w,
            nu1: self.nu1,
            nu2: self.nu2.unwrap_or(self.nu1),
            t1: self.t1,
            t2: self.t2.unwrap_or(self.t1),
            chain_len: self.chain_len,
        }
    }
}

#[derive(Args, Debug)]
pub struct RateArgs {
    #[arg(long)]
    pub m1: usize,
    #[arg(long)]
    pub m2: Option<usize>,
    #[arg(long)]
    pub nu1: u32,
    #[arg(long)]
    pub nu2: Option<u32>,
    #[arg(long)]
    pub t1: u32,
    #[arg(long)]
    pub t2: Option<u32>,
    /// Extra parity bits per component codeword (extended BCH).
    #[arg(long, default_value_t = 0)]
    pub extension: usize,
    /// Decimal places.
    #[arg(long, default_value_t = 4)]
    pub digits: usize,
    /// Print the exact fraction instead.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Debug, Clone)]
pub struct DecoderArgs {
    /// Decoding window in blocks.
    #[arg(long = "W", default_value_t = 7)]
    pub window: usize,
    /// BDD sweeps per window position.
    #[arg(long, default_value_t = 10)]
    pub iters: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Plain)]
    pub mode: ModeArg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Plain,
    Mf,
}

impl From<ModeArg> for DecodeMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Plain => DecodeMode::Plain,
            ModeArg::Mf => DecodeMode::MiscorrectionFree,
        }
    }
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Text file of information bits ('0'/'1', other characters ignored).
    /// Random bits from `--seed` are used when absent.
    #[arg(long)]
    pub info: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output block file.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Also write a copy passed through a BSC with this crossover probability.
    #[arg(long, requires = "noisy")]
    pub p: Option<f64>,
    #[arg(long, requires = "p")]
    pub noisy: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[command(flatten)]
    pub decoder: DecoderArgs,
    /// Received block file.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Transmitted block file; required for `--mode mf`, enables error counts.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Decoded block file.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub t1: u32,
    #[arg(long)]
    pub t2: Option<u32>,
    #[arg(long, default_value_t = 2)]
    pub w: usize,
    /// Block width; adds the BSC threshold and Eb/N0 columns.
    #[arg(long, requires = "nu1")]
    pub m1: Option<usize>,
    #[arg(long)]
    pub m2: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub q1: usize,
    #[arg(long)]
    pub q2: Option<usize>,
    #[arg(long)]
    pub nu1: Option<u32>,
    #[arg(long)]
    pub nu2: Option<u32>,
    /// Coupled chain length used by density evolution.
    #[arg(long = "L", default_value_t = 100)]
    pub chain_len: usize,
    /// Sliding-window density evolution with this many positions.
    #[arg(long = "W")]
    pub window: Option<usize>,
    #[arg(long, default_value_t = srsc::de::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub iters: usize,
}

#[derive(Args, Debug)]
pub struct DesignArgs {
    /// key=value spec file.
    pub spec: PathBuf,
    #[arg(long, default_value_t = srsc::de::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct FloorArgs {
    #[arg(long)]
    pub m1: usize,
    #[arg(long)]
    pub m2: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub q1: usize,
    #[arg(long)]
    pub q2: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub w: usize,
    #[arg(long)]
    pub t1: u32,
    #[arg(long)]
    pub t2: Option<u32>,
    /// Crossover probabilities.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub p: Vec<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct SimArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[command(flatten)]
    pub decoder: DecoderArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, default_value_t = 100)]
    pub min_errors: u64,
    #[arg(long, default_value_t = 100_000_000)]
    pub max_bits: u64,
    /// Blocks per independent chain segment.
    #[arg(long, default_value_t = 100)]
    pub trial_blocks: usize,
    /// Transmit random data even under miscorrection-free decoding.
    #[arg(long)]
    pub random_data: bool,
    /// Report wall time in the `seconds` column.
    #[arg(long)]
    pub timing: bool,
    /// Write logged stall events as CSV.
    #[arg(long)]
    pub stall_log: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    #[arg(long, required_unless_present = "ebn0", conflicts_with = "ebn0")]
    pub p: Option<f64>,
    /// Eb/N0 in dB for BPSK over AWGN with hard decisions.
    #[arg(long)]
    pub ebn0: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    #[arg(long, value_delimiter = ',', num_args = 1.., required_unless_present = "ebn0", conflicts_with = "ebn0")]
    pub p: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub ebn0: Vec<f64>,
}

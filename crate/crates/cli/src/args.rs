//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::Overrides;

#[derive(Debug, Parser)]
#[command(
    name = "sysrisk",
    version,
    about = "Rolling PCA and lagged cross-correlation risk measures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse inputs and report their shape and common date range.
    IngestCheck {
        /// `[ID=]PATH`; repeatable.
        #[arg(long = "input", required = true)]
        inputs: Vec<String>,
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
    },
    /// Build a market-cap-weighted sector index from a constituent file.
    Index(IndexArgs),
    /// Rolling first-eigenvalue fraction over two or more series.
    Pca(MeasureArgs),
    /// Rolling lagged cross-correlation of a pair, or a baseline against many.
    Xcorr(MeasureArgs),
    /// Generate a synthetic equicorrelated return panel.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// `[ID=]PATH` of a price, return or panel file; repeatable.
    #[arg(long = "input")]
    pub inputs: Vec<String>,
    /// `key = value` file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub stride: Option<usize>,
    /// Reported lag (xcorr).
    #[arg(long)]
    pub lag: Option<usize>,
    /// Compound this many periods into one before measuring.
    #[arg(long)]
    pub period: Option<usize>,
    /// Covariance divisor (pca): paper (T-N), sample (T-1) or population (T).
    #[arg(long)]
    pub divisor: Option<String>,
    /// a-leads-b or b-leads-a (xcorr).
    #[arg(long)]
    pub direction: Option<String>,
    #[arg(long)]
    pub from: Option<String>,
    #[arg(long)]
    pub to: Option<String>,
    /// Output file, or output directory in batch mode.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Also write eigen decompositions (pca) or every lag (xcorr).
    #[arg(long)]
    pub dump: bool,
    /// Batch mode baseline series (xcorr).
    #[arg(long)]
    pub baseline: Option<String>,
    /// Batch mode comparison series; repeatable (xcorr).
    #[arg(long)]
    pub compare: Vec<String>,
}

impl MeasureArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            inputs: self.inputs.clone(),
            baseline: self.baseline.clone(),
            compare: self.compare.clone(),
            window: self.window,
            stride: self.stride,
            lag: self.lag,
            period: self.period,
            divisor: self.divisor.clone(),
            direction: self.direction.clone(),
            from: self.from.clone(),
            to: self.to.clone(),
            out: self.out.clone(),
            manifest: self.manifest.clone(),
            dump: self.dump.then_some(true),
        }
    }
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    /// Constituent file with header date,firm_id,sic,market_cap,return.
    #[arg(long)]
    pub constituents: PathBuf,
    /// banks, brokerages or insurers.
    #[arg(long, conflicts_with = "sic", required_unless_present = "sic")]
    pub sector: Option<String>,
    /// Inclusive SIC range `LO-HI`.
    #[arg(long)]
    pub sic: Option<String>,
    /// Series id recorded for the index.
    #[arg(long)]
    pub id: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub assets: usize,
    #[arg(long)]
    pub periods: usize,
    /// Base pairwise correlation in [0, 1).
    #[arg(long, default_value_t = 0.0)]
    pub rho: f64,
    /// Per-period standard deviation.
    #[arg(long, default_value_t = 0.01)]
    pub vol: f64,
    /// `START:END:RHO`, periods START..END use correlation RHO.
    #[arg(long)]
    pub regime: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Panel file, or a directory with `--per-asset`.
    #[arg(long)]
    pub out: PathBuf,
    /// One `date,return` file per asset.
    #[arg(long)]
    pub per_asset: bool,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

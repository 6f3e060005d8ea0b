//! Command-line front end for the `sysrisk` measures.

pub mod args;
pub mod config;
pub mod error;
pub mod inputs;
pub mod output;
pub mod pipelines;

use std::path::PathBuf;

use sysrisk::synth::{PanelSpec, Regime};

use args::{Cli, Command, IndexArgs, SynthArgs};
use config::{Measure, RunConfig};
use error::{CliError, CliResult};
use inputs::InputSpec;
use pipelines::{IndexRequest, SectorChoice, SynthRequest};

/// What a successful run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Written(Vec<PathBuf>),
    Report(String),
}

pub fn run(cli: Cli) -> CliResult<Outcome> {
    match cli.command {
        Command::IngestCheck { inputs, from, to } => {
            let specs = inputs
                .iter()
                .map(|s| s.parse())
                .collect::<CliResult<Vec<InputSpec>>>()?;
            let date = |v: Option<String>| {
                v.map(|s| s.parse().map_err(|e: sysrisk::Error| CliError::config(e.to_string())))
                    .transpose()
            };
            let report = pipelines::ingest_check(&specs, (date(from)?, date(to)?))?;
            Ok(Outcome::Report(report))
        }
        Command::Index(a) => pipelines::run_index_pipeline(&index_request(a)?).map(Outcome::Written),
        Command::Pca(a) => {
            let cfg = RunConfig::resolve(Measure::Pca, a.overrides(), a.config.as_deref())?;
            pipelines::run_pca_pipeline(&cfg).map(Outcome::Written)
        }
        Command::Xcorr(a) => {
            let cfg = RunConfig::resolve(Measure::Xcorr, a.overrides(), a.config.as_deref())?;
            pipelines::run_xcorr_pipeline(&cfg).map(Outcome::Written)
        }
        Command::Synth(a) => pipelines::run_synth(&synth_request(a)?).map(Outcome::Written),
    }
}

fn index_request(a: IndexArgs) -> CliResult<IndexRequest> {
    let sector = match (a.sector, a.sic) {
        (Some(name), None) => SectorChoice::Named(name),
        (None, Some(range)) => {
            let bad = || CliError::config(format!("--sic `{range}`: expected LO-HI"));
            let (lo, hi) = range.split_once('-').ok_or_else(bad)?;
            SectorChoice::Range(
                lo.trim().parse().map_err(|_| bad())?,
                hi.trim().parse().map_err(|_| bad())?,
            )
        }
        _ => return Err(CliError::config("give exactly one of --sector or --sic")),
    };
    Ok(IndexRequest {
        constituents: a.constituents,
        sector,
        index_id: a.id,
        out: a.out,
        manifest: a.manifest,
    })
}

fn parse_regime(s: &str) -> CliResult<Regime> {
    let bad = || CliError::config(format!("--regime `{s}`: expected START:END:RHO"));
    let parts: Vec<&str> = s.split(':').collect();
    let [start, end, rho] = parts.as_slice() else {
        return Err(bad());
    };
    Ok(Regime {
        start: start.parse().map_err(|_| bad())?,
        end: end.parse().map_err(|_| bad())?,
        correlation: rho.parse().map_err(|_| bad())?,
    })
}

fn synth_request(a: SynthArgs) -> CliResult<SynthRequest> {
    Ok(SynthRequest {
        spec: PanelSpec {
            n_assets: a.assets,
            n_periods: a.periods,
            base_correlation: a.rho,
            vol: a.vol,
            regime: a.regime.as_deref().map(parse_regime).transpose()?,
            seed: a.seed,
        },
        out: a.out,
        per_asset: a.per_asset,
        manifest: a.manifest,
    })
}

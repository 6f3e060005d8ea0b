//! End-to-end runs behind each subcommand: load, align, measure, write.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;
use sysrisk::index::{build_index, parse_constituents_csv, standard_sector_filters, SectorFilter};
use sysrisk::ingest::{write_panel_csv, write_return_csv};
use sysrisk::pca::{rolling_pca, RollingPcaConfig, DEFAULT_TOLERANCE};
use sysrisk::synth::{generate, PanelSpec};
use sysrisk::xcorr::{rolling_xcorr, RollingXCorrConfig};
use sysrisk::{aggregate, align, AlignedPanel, ReturnSeries};

use crate::config::{absolute, Measure, RunConfig};
use crate::error::{at, CliError, CliResult};
use crate::inputs::{load_series, read_file, sha256_hex, Format, InputSpec, LoadedInput};
use crate::output::{pca_csv, pca_json, sibling, xcorr_csv, xcorr_lags_csv, InputRecord, Manifest, OutputSet};

fn record(input: &LoadedInput) -> InputRecord {
    InputRecord {
        path: input.spec.path.display().to_string(),
        format: input.format,
        asset_ids: input.series.iter().map(|s| s.asset_id().to_owned()).collect(),
        sha256: input.digest.clone(),
    }
}

/// Refuses to overwrite any input with an output.
fn guard_outputs<'a>(inputs: impl Iterator<Item = &'a InputSpec>, outputs: &[PathBuf]) -> CliResult<()> {
    let outs: HashSet<PathBuf> = outputs.iter().map(|p| absolute(p)).collect();
    if outs.len() != outputs.len() {
        return Err(CliError::config("two outputs would share one path"));
    }
    for spec in inputs {
        if outs.contains(&absolute(&spec.path)) {
            return Err(CliError::config(format!(
                "input {} would be overwritten by an output",
                spec.path.display()
            )));
        }
    }
    Ok(())
}

/// Align, restrict to the date range, then compound to `period`.
fn prepare_panel(series: &[ReturnSeries], cfg: &RunConfig) -> CliResult<AlignedPanel> {
    let panel = align(series)?;
    let panel = if cfg.from.is_some() || cfg.to.is_some() {
        panel.restrict(cfg.from, cfg.to)?
    } else {
        panel
    };
    Ok(aggregate(&panel, cfg.period)?)
}

fn finish<P: Serialize>(
    mut outputs: OutputSet,
    manifest_path: PathBuf,
    command: &'static str,
    parameters: P,
    inputs: Vec<InputRecord>,
) -> CliResult<Vec<PathBuf>> {
    let manifest = Manifest::new(command, parameters, inputs, outputs.digests());
    outputs.add(manifest_path, manifest.to_bytes());
    outputs.commit()
}

/// Rolling first-fraction PCA over two or more aligned series.
pub fn run_pca_pipeline(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    if cfg.measure != Measure::Pca {
        return Err(CliError::config("not a pca configuration"));
    }
    let manifest_path = cfg
        .manifest
        .clone()
        .unwrap_or_else(|| sibling(&cfg.out, ".manifest.json"));
    let dump_path = sibling(&cfg.out, ".eigen.json");
    let mut planned = vec![cfg.out.clone(), manifest_path.clone()];
    if cfg.dump {
        planned.push(dump_path.clone());
    }
    guard_outputs(cfg.all_inputs(), &planned)?;

    let loaded = cfg.inputs.iter().map(load_series).collect::<CliResult<Vec<_>>>()?;
    let series: Vec<ReturnSeries> = loaded.iter().flat_map(|l| l.series.iter().cloned()).collect();
    if series.len() < 2 {
        return Err(CliError::config(format!(
            "pca needs at least 2 series, got {}",
            series.len()
        )));
    }
    let panel = prepare_panel(&series, cfg)?;
    let pca_cfg = RollingPcaConfig {
        window: cfg.window,
        stride: cfg.stride,
        divisor: cfg.divisor,
        tolerance: DEFAULT_TOLERANCE,
    };
    pca_cfg.validate(panel.n_assets(), panel.n_periods())?;
    let result = rolling_pca(&panel, &pca_cfg)?;

    let mut outputs = OutputSet::new();
    outputs.add(&cfg.out, pca_csv(&result, panel.n_assets()));
    if cfg.dump {
        outputs.add(dump_path, pca_json(&result));
    }
    finish(
        outputs,
        manifest_path,
        "pca",
        cfg.parameters(),
        loaded.iter().map(record).collect(),
    )
}

fn pair_result(a: &ReturnSeries, b: &ReturnSeries, cfg: &RunConfig) -> CliResult<sysrisk::RollingXCorrResult> {
    let panel = prepare_panel(&[a.clone(), b.clone()], cfg)?;
    let aligned = panel.to_series();
    let x_cfg = RollingXCorrConfig {
        window: cfg.window,
        stride: cfg.stride,
        lag: cfg.lag,
        direction: cfg.direction,
    };
    x_cfg.validate(panel.n_periods())?;
    Ok(rolling_xcorr(&aligned[0], &aligned[1], &x_cfg)?)
}

/// Rolling lagged cross-correlation. Pair mode compares two series; batch
/// mode compares one baseline against each comparison series and writes one
/// file per comparison into the `out` directory.
pub fn run_xcorr_pipeline(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    if cfg.measure != Measure::Xcorr {
        return Err(CliError::config("not an xcorr configuration"));
    }
    let Some(baseline) = &cfg.baseline else {
        return run_xcorr_pair(cfg);
    };

    let base = load_series(baseline)?;
    if base.series.len() != 1 {
        return Err(CliError::config("the baseline must hold exactly one series"));
    }
    let compare = cfg.compare.iter().map(load_series).collect::<CliResult<Vec<_>>>()?;
    let others: Vec<&ReturnSeries> = compare.iter().flat_map(|l| l.series.iter()).collect();
    let mut seen = HashSet::new();
    for s in &others {
        if !seen.insert(s.asset_id()) {
            return Err(CliError::config(format!(
                "comparison id `{}` appears twice; name inputs with ID=PATH",
                s.asset_id()
            )));
        }
    }
    let manifest_path = cfg.manifest.clone().unwrap_or_else(|| cfg.out.join("manifest.json"));
    let mut planned = vec![manifest_path.clone()];
    for s in &others {
        planned.push(cfg.out.join(format!("{}.csv", s.asset_id())));
        if cfg.dump {
            planned.push(cfg.out.join(format!("{}.lags.csv", s.asset_id())));
        }
    }
    guard_outputs(cfg.all_inputs(), &planned)?;

    let mut outputs = OutputSet::new();
    for s in &others {
        let result = pair_result(&base.series[0], s, cfg).map_err(|e| tag(s.asset_id(), e))?;
        outputs.add(cfg.out.join(format!("{}.csv", s.asset_id())), xcorr_csv(&result));
        if cfg.dump {
            outputs.add(
                cfg.out.join(format!("{}.lags.csv", s.asset_id())),
                xcorr_lags_csv(&result),
            );
        }
    }
    let mut records = vec![record(&base)];
    records.extend(compare.iter().map(record));
    finish(outputs, manifest_path, "xcorr", cfg.parameters(), records)
}

fn tag(id: &str, e: CliError) -> CliError {
    match e {
        CliError::Config(m) => CliError::Config(format!("{id}: {m}")),
        CliError::Data(m) => CliError::Data(format!("{id}: {m}")),
        CliError::Numeric(m) => CliError::Numeric(format!("{id}: {m}")),
    }
}

fn run_xcorr_pair(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let manifest_path = cfg
        .manifest
        .clone()
        .unwrap_or_else(|| sibling(&cfg.out, ".manifest.json"));
    let lags_path = sibling(&cfg.out, ".lags.csv");
    let mut planned = vec![cfg.out.clone(), manifest_path.clone()];
    if cfg.dump {
        planned.push(lags_path.clone());
    }
    guard_outputs(cfg.all_inputs(), &planned)?;

    let loaded = cfg.inputs.iter().map(load_series).collect::<CliResult<Vec<_>>>()?;
    let series: Vec<ReturnSeries> = loaded.iter().flat_map(|l| l.series.iter().cloned()).collect();
    if series.len() != 2 {
        return Err(CliError::config(format!(
            "xcorr compares exactly 2 series, got {}; use --baseline/--compare for batches",
            series.len()
        )));
    }
    let result = pair_result(&series[0], &series[1], cfg)?;
    let mut outputs = OutputSet::new();
    outputs.add(&cfg.out, xcorr_csv(&result));
    if cfg.dump {
        outputs.add(lags_path, xcorr_lags_csv(&result));
    }
    finish(
        outputs,
        manifest_path,
        "xcorr",
        cfg.parameters(),
        loaded.iter().map(record).collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SectorChoice {
    Named(String),
    Range(u16, u16),
}

#[derive(Debug, Clone)]
pub struct IndexRequest {
    pub constituents: PathBuf,
    pub sector: SectorChoice,
    pub index_id: Option<String>,
    pub out: PathBuf,
    pub manifest: Option<PathBuf>,
}

#[derive(Serialize)]
struct IndexParameters {
    sector: String,
    sic_lo: u16,
    sic_hi: u16,
    index_id: String,
}

/// Builds a market-cap-weighted sector index and writes it as a return file.
pub fn run_index_pipeline(req: &IndexRequest) -> CliResult<Vec<PathBuf>> {
    let (name, filter) = match &req.sector {
        SectorChoice::Named(name) => {
            let filters = standard_sector_filters();
            let f = filters.get(name.as_str()).copied().ok_or_else(|| {
                CliError::config(format!(
                    "unknown sector `{name}` (known: {})",
                    filters.keys().copied().collect::<Vec<_>>().join(", ")
                ))
            })?;
            (name.clone(), f)
        }
        SectorChoice::Range(lo, hi) => (format!("sic {lo}-{hi}"), SectorFilter::new(*lo, *hi)?),
    };
    let manifest_path = req
        .manifest
        .clone()
        .unwrap_or_else(|| sibling(&req.out, ".manifest.json"));
    let input = InputSpec {
        asset_id: None,
        path: req.constituents.clone(),
    };
    guard_outputs(std::iter::once(&input), &[req.out.clone(), manifest_path.clone()])?;

    let bytes = read_file(&req.constituents)?;
    if Format::detect(&bytes) != Some(Format::Constituents) {
        return Err(CliError::data(format!(
            "{}: expected header date,firm_id,sic,market_cap,return",
            req.constituents.display()
        )));
    }
    let records = parse_constituents_csv(bytes.as_slice()).map_err(|e| at(&req.constituents, e))?;
    let index_id = req.index_id.clone().unwrap_or_else(|| match &req.sector {
        SectorChoice::Named(n) => n.clone(),
        SectorChoice::Range(lo, hi) => format!("sic_{lo}_{hi}"),
    });
    let index = build_index(records, filter, &index_id).map_err(|e| at(&req.constituents, e))?;

    let mut csv = Vec::new();
    write_return_csv(&mut csv, &index)?;
    let mut outputs = OutputSet::new();
    outputs.add(&req.out, csv);
    let params = IndexParameters {
        sector: name,
        sic_lo: filter.lo(),
        sic_hi: filter.hi(),
        index_id: index_id.clone(),
    };
    let inputs = vec![InputRecord {
        path: req.constituents.display().to_string(),
        format: Format::Constituents,
        asset_ids: vec![index_id],
        sha256: sha256_hex(&bytes),
    }];
    finish(outputs, manifest_path, "index", params, inputs)
}

#[derive(Debug, Clone)]
pub struct SynthRequest {
    pub spec: PanelSpec,
    pub out: PathBuf,
    /// Write one `date,return` file per asset into `out` (a directory)
    /// instead of a single panel file.
    pub per_asset: bool,
    pub manifest: Option<PathBuf>,
}

#[derive(Serialize)]
struct SynthParameters {
    assets: usize,
    periods: usize,
    rho: f64,
    vol: f64,
    regime: Option<(usize, usize, f64)>,
    seed: u64,
    generator: &'static str,
    epoch: String,
}

/// Generates a synthetic panel and writes it out.
pub fn run_synth(req: &SynthRequest) -> CliResult<Vec<PathBuf>> {
    let panel = generate(&req.spec)?;
    let mut outputs = OutputSet::new();
    let manifest_path = if req.per_asset {
        for s in panel.to_series() {
            let mut csv = Vec::new();
            write_return_csv(&mut csv, &s)?;
            outputs.add(req.out.join(format!("{}.csv", s.asset_id())), csv);
        }
        req.manifest.clone().unwrap_or_else(|| req.out.join("manifest.json"))
    } else {
        let mut csv = Vec::new();
        write_panel_csv(&mut csv, &panel)?;
        outputs.add(&req.out, csv);
        req.manifest
            .clone()
            .unwrap_or_else(|| sibling(&req.out, ".manifest.json"))
    };
    let s = &req.spec;
    let params = SynthParameters {
        assets: s.n_assets,
        periods: s.n_periods,
        rho: s.base_correlation,
        vol: s.vol,
        regime: s.regime.map(|r| (r.start, r.end, r.correlation)),
        seed: s.seed,
        generator: "ChaCha20Rng::seed_from_u64 + StandardNormal (rand_chacha 0.9, rand_distr 0.5)",
        epoch: sysrisk::synth::epoch().to_string(),
    };
    finish(outputs, manifest_path, "synth", params, Vec::new())
}

/// Parses every input and reports its shape and the shared calendar.
pub fn ingest_check(
    inputs: &[InputSpec],
    cfg_range: (Option<sysrisk::TradingDate>, Option<sysrisk::TradingDate>),
) -> CliResult<String> {
    if inputs.is_empty() {
        return Err(CliError::config("ingest-check needs at least one --input"));
    }
    let mut report = String::new();
    let mut all = Vec::new();
    for spec in inputs {
        let bytes = read_file(&spec.path)?;
        if Format::detect(&bytes) == Some(Format::Constituents) {
            let rows = parse_constituents_csv(bytes.as_slice()).map_err(|e| at(&spec.path, e))?;
            let firms: HashSet<&str> = rows.iter().map(|r| r.firm_id.as_str()).collect();
            writeln!(
                report,
                "{}\tC\t{} rows\t{} firms",
                spec.path.display(),
                rows.len(),
                firms.len()
            )
            .unwrap();
            continue;
        }
        let loaded = load_series(spec)?;
        for s in &loaded.series {
            let pts = s.points();
            writeln!(
                report,
                "{}\t{}\t{}\t{} returns\t{} .. {}",
                spec.path.display(),
                serde_json::to_value(loaded.format).unwrap().as_str().unwrap_or("?"),
                s.asset_id(),
                pts.len(),
                pts[0].0,
                pts[pts.len() - 1].0
            )
            .unwrap();
        }
        all.extend(loaded.series);
    }
    if !all.is_empty() {
        let mut panel = align(&all)?;
        if cfg_range.0.is_some() || cfg_range.1.is_some() {
            panel = panel.restrict(cfg_range.0, cfg_range.1)?;
        }
        let d = panel.dates();
        writeln!(
            report,
            "aligned: {} series x {} dates, {} .. {}",
            panel.n_assets(),
            panel.n_periods(),
            d[0],
            d[d.len() - 1]
        )
        .unwrap();
    }
    Ok(report)
}

//! Run configuration: a flat `key = value` file merged under command-line
//! flags (flags win).

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use sysrisk::{Direction, DivisorMode, TradingDate};

use crate::error::{CliError, CliResult};
use crate::inputs::InputSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Pca,
    Xcorr,
}

/// Settings as given by one source, before defaults apply.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub inputs: Vec<String>,
    pub baseline: Option<String>,
    pub compare: Vec<String>,
    pub window: Option<usize>,
    pub stride: Option<usize>,
    pub lag: Option<usize>,
    pub period: Option<usize>,
    pub divisor: Option<String>,
    pub direction: Option<String>,
    pub from: Option<String>,
    pub to: Option<String>,
    pub out: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub dump: Option<bool>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> CliResult<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::config(format!("config key `{key}`: bad value `{value}`: {e}")))
}

impl Overrides {
    /// Parses a config file body. `#` starts a comment; `input` and
    /// `compare` may repeat, other keys may not.
    pub fn parse_file(text: &str) -> CliResult<Self> {
        let mut o = Overrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("config line {}: expected `key = value`", i + 1)))?;
            let (key, value) = (key.trim(), value.trim().to_owned());
            let once = |slot_set: bool| {
                if slot_set {
                    Err(CliError::config(format!("config line {}: `{key}` given twice", i + 1)))
                } else {
                    Ok(())
                }
            };
            match key {
                "input" => o.inputs.push(value),
                "compare" => o.compare.push(value),
                "baseline" => {
                    once(o.baseline.is_some())?;
                    o.baseline = Some(value);
                }
                "window" => {
                    once(o.window.is_some())?;
                    o.window = Some(parse_value(key, &value)?);
                }
                "stride" => {
                    once(o.stride.is_some())?;
                    o.stride = Some(parse_value(key, &value)?);
                }
                "lag" => {
                    once(o.lag.is_some())?;
                    o.lag = Some(parse_value(key, &value)?);
                }
                "period" => {
                    once(o.period.is_some())?;
                    o.period = Some(parse_value(key, &value)?);
                }
                "divisor" => {
                    once(o.divisor.is_some())?;
                    o.divisor = Some(value);
                }
                "direction" => {
                    once(o.direction.is_some())?;
                    o.direction = Some(value);
                }
                "from" => {
                    once(o.from.is_some())?;
                    o.from = Some(value);
                }
                "to" => {
                    once(o.to.is_some())?;
                    o.to = Some(value);
                }
                "out" => {
                    once(o.out.is_some())?;
                    o.out = Some(value.into());
                }
                "manifest" => {
                    once(o.manifest.is_some())?;
                    o.manifest = Some(value.into());
                }
                "dump" => {
                    once(o.dump.is_some())?;
                    o.dump = Some(parse_value(key, &value)?);
                }
                other => {
                    return Err(CliError::config(format!(
                        "config line {}: unknown key `{other}`",
                        i + 1
                    )))
                }
            }
        }
        Ok(o)
    }

    /// `self` takes precedence over `fallback` key by key.
    pub fn over(self, fallback: Overrides) -> Overrides {
        let list = |a: Vec<String>, b: Vec<String>| if a.is_empty() { b } else { a };
        Overrides {
            inputs: list(self.inputs, fallback.inputs),
            baseline: self.baseline.or(fallback.baseline),
            compare: list(self.compare, fallback.compare),
            window: self.window.or(fallback.window),
            stride: self.stride.or(fallback.stride),
            lag: self.lag.or(fallback.lag),
            period: self.period.or(fallback.period),
            divisor: self.divisor.or(fallback.divisor),
            direction: self.direction.or(fallback.direction),
            from: self.from.or(fallback.from),
            to: self.to.or(fallback.to),
            out: self.out.or(fallback.out),
            manifest: self.manifest.or(fallback.manifest),
            dump: self.dump.or(fallback.dump),
        }
    }
}

/// Fully resolved settings of one measure run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub measure: Measure,
    pub inputs: Vec<InputSpec>,
    pub baseline: Option<InputSpec>,
    pub compare: Vec<InputSpec>,
    pub from: Option<TradingDate>,
    pub to: Option<TradingDate>,
    pub window: usize,
    pub stride: usize,
    pub lag: usize,
    pub period: usize,
    pub divisor: DivisorMode,
    pub direction: Direction,
    pub out: PathBuf,
    pub manifest: Option<PathBuf>,
    pub dump: bool,
}

/// The parameters recorded in a run manifest.
#[derive(Debug, Clone, Serialize)]
pub struct Parameters {
    pub measure: Measure,
    pub window: usize,
    pub stride: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lag: Option<usize>,
    pub period: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divisor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<String>,
    pub from: Option<TradingDate>,
    pub to: Option<TradingDate>,
    pub dump: bool,
}

fn date(key: &str, v: Option<String>) -> CliResult<Option<TradingDate>> {
    v.map(|s| {
        s.parse()
            .map_err(|e: sysrisk::Error| CliError::config(format!("--{key}: {e}")))
    })
    .transpose()
}

impl RunConfig {
    /// Applies defaults and checks everything that does not need the data.
    pub fn resolve(measure: Measure, cli: Overrides, file: Option<&Path>) -> CliResult<Self> {
        let merged = match file {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
                cli.over(Overrides::parse_file(&text)?)
            }
            None => cli,
        };
        let specs = |v: Vec<String>| v.iter().map(|s| s.parse()).collect::<CliResult<Vec<InputSpec>>>();
        let (default_window, default_lag) = match measure {
            Measure::Pca => (sysrisk::pca::DEFAULT_WINDOW, 0),
            Measure::Xcorr => (sysrisk::xcorr::DEFAULT_WINDOW, sysrisk::xcorr::DEFAULT_LAG),
        };
        let cfg = RunConfig {
            measure,
            inputs: specs(merged.inputs)?,
            baseline: merged.baseline.map(|s| s.parse()).transpose()?,
            compare: specs(merged.compare)?,
            from: date("from", merged.from)?,
            to: date("to", merged.to)?,
            window: merged.window.unwrap_or(default_window),
            stride: merged.stride.unwrap_or(1),
            lag: merged.lag.unwrap_or(default_lag),
            period: merged.period.unwrap_or(1),
            divisor: merged.divisor.as_deref().unwrap_or("paper").parse()?,
            direction: merged.direction.as_deref().unwrap_or("a-leads-b").parse()?,
            out: merged.out.ok_or_else(|| CliError::config("--out is required"))?,
            manifest: merged.manifest,
            dump: merged.dump.unwrap_or(false),
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> CliResult<()> {
        if self.window < 2 {
            return Err(CliError::config("--window must be at least 2"));
        }
        if self.stride < 1 {
            return Err(CliError::config("--stride must be at least 1"));
        }
        if self.period < 1 {
            return Err(CliError::config("--period must be at least 1"));
        }
        if let (Some(f), Some(t)) = (self.from, self.to) {
            if f > t {
                return Err(CliError::config(format!("--from {f} is after --to {t}")));
            }
        }
        let batch = self.baseline.is_some() || !self.compare.is_empty();
        match self.measure {
            Measure::Pca => {
                if batch {
                    return Err(CliError::config("--baseline/--compare apply to xcorr only"));
                }
                if self.inputs.is_empty() {
                    return Err(CliError::config("pca needs --input files"));
                }
            }
            Measure::Xcorr => {
                if self.lag >= self.window {
                    return Err(CliError::config(format!(
                        "--lag {} must be smaller than --window {}",
                        self.lag, self.window
                    )));
                }
                if batch {
                    if self.baseline.is_none() || self.compare.is_empty() || !self.inputs.is_empty() {
                        return Err(CliError::config(
                            "batch mode takes one --baseline, at least one --compare and no --input",
                        ));
                    }
                } else if self.inputs.is_empty() {
                    return Err(CliError::config(
                        "xcorr needs two --input series or --baseline/--compare",
                    ));
                }
            }
        }
        let out = absolute(&self.out);
        for spec in self.all_inputs() {
            if absolute(&spec.path) == out {
                return Err(CliError::config(format!(
                    "output path {} is also an input",
                    self.out.display()
                )));
            }
        }
        Ok(())
    }

    pub fn all_inputs(&self) -> impl Iterator<Item = &InputSpec> {
        self.inputs.iter().chain(&self.baseline).chain(&self.compare)
    }

    pub fn parameters(&self) -> Parameters {
        let xcorr = self.measure == Measure::Xcorr;
        Parameters {
            measure: self.measure,
            window: self.window,
            stride: self.stride,
            lag: xcorr.then_some(self.lag),
            period: self.period,
            divisor: (!xcorr).then(|| self.divisor.to_string()),
            direction: xcorr.then(|| self.direction.to_string()),
            from: self.from,
            to: self.to,
            dump: self.dump,
        }
    }
}

pub(crate) fn absolute(p: &Path) -> PathBuf {
    std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf())
}

//! Loading input files into return series. The format of each file is
//! recognised from its header row.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use sha2::{Digest, Sha256};
use sysrisk::ingest::{parse_panel_csv, parse_price_csv, parse_return_csv};
use sysrisk::{prices_to_returns, ReturnSeries};

use crate::error::{at, CliError, CliResult};

/// `[ID=]PATH`. Without an id the file stem is used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputSpec {
    pub asset_id: Option<String>,
    pub path: PathBuf,
}

impl FromStr for InputSpec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(CliError::config("empty input path"));
        }
        Ok(match s.split_once('=') {
            Some((id, path)) if !id.is_empty() && !id.contains(['/', '\\']) => InputSpec {
                asset_id: Some(id.to_owned()),
                path: PathBuf::from(path),
            },
            _ => InputSpec {
                asset_id: None,
                path: PathBuf::from(s),
            },
        })
    }
}

impl fmt::Display for InputSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.asset_id {
            Some(id) => write!(f, "{id}={}", self.path.display()),
            None => write!(f, "{}", self.path.display()),
        }
    }
}

impl InputSpec {
    pub fn default_id(&self) -> String {
        self.asset_id.clone().unwrap_or_else(|| {
            self.path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| self.path.display().to_string())
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Format {
    /// `date,price`
    #[serde(rename = "A")]
    Prices,
    /// `date,return`
    #[serde(rename = "B")]
    Returns,
    /// `date,firm_id,sic,market_cap,return`
    #[serde(rename = "C")]
    Constituents,
    /// `date,<asset>,...`
    #[serde(rename = "panel")]
    Panel,
}

impl Format {
    pub fn detect(bytes: &[u8]) -> Option<Format> {
        let first = bytes.split(|&b| b == b'\n').next()?;
        let header = String::from_utf8_lossy(first);
        let cols: Vec<&str> = header.trim().split(',').map(str::trim).collect();
        match cols.as_slice() {
            ["date", "price"] => Some(Format::Prices),
            ["date", "return"] => Some(Format::Returns),
            ["date", "firm_id", "sic", "market_cap", "return"] => Some(Format::Constituents),
            ["date", rest @ ..] if !rest.is_empty() => Some(Format::Panel),
            _ => None,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads a whole file, tagging failures as data errors.
pub fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

/// A parsed input file and what it contributed.
#[derive(Debug, Clone)]
pub struct LoadedInput {
    pub spec: InputSpec,
    pub format: Format,
    pub digest: String,
    pub series: Vec<ReturnSeries>,
}

/// Parses a price, return or panel file into one or more return series.
pub fn load_series(spec: &InputSpec) -> CliResult<LoadedInput> {
    let bytes = read_file(&spec.path)?;
    let format = Format::detect(&bytes).ok_or_else(|| {
        CliError::data(format!(
            "{}: unrecognised header (expected date,price / date,return / date,<assets...>)",
            spec.path.display()
        ))
    })?;
    let id = spec.default_id();
    let series = match format {
        Format::Prices => vec![prices_to_returns(
            &parse_price_csv(bytes.as_slice(), &id).map_err(|e| at(&spec.path, e))?,
        )],
        Format::Returns => vec![parse_return_csv(bytes.as_slice(), &id).map_err(|e| at(&spec.path, e))?],
        Format::Panel => parse_panel_csv(bytes.as_slice())
            .map_err(|e| at(&spec.path, e))?
            .to_series(),
        Format::Constituents => {
            return Err(CliError::config(format!(
                "{}: constituent files feed the `index` subcommand, not a measure",
                spec.path.display()
            )))
        }
    };
    Ok(LoadedInput {
        spec: spec.clone(),
        format,
        digest: sha256_hex(&bytes),
        series,
    })
}

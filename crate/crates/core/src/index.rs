//! Market-cap-weighted sector return indexes built from per-firm daily rows.

use std::collections::{BTreeMap, HashSet};
use std::io::Read;

use serde::Deserialize;

use crate::date::TradingDate;
use crate::error::{Error, Result};
use crate::ingest::ReturnSeries;

/// One firm-day observation.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ConstituentRecord {
    pub date: TradingDate,
    pub firm_id: String,
    pub sic: u16,
    pub market_cap: f64,
    #[serde(rename = "return")]
    pub ret: f64,
}

impl ConstituentRecord {
    fn validate(&self, line: u64) -> Result<()> {
        if self.sic > 9999 {
            return Err(Error::Malformed {
                line,
                message: format!("SIC code {} outside 0..=9999", self.sic),
            });
        }
        if self.market_cap <= 0.0 || !self.market_cap.is_finite() {
            return Err(Error::Malformed {
                line,
                message: format!("market cap must be positive, got {}", self.market_cap),
            });
        }
        if self.ret <= -1.0 || !self.ret.is_finite() {
            return Err(Error::ReturnOutOfRange { line, value: self.ret });
        }
        Ok(())
    }
}

/// Inclusive SIC code range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectorFilter {
    lo: u16,
    hi: u16,
}

impl SectorFilter {
    pub fn new(lo: u16, hi: u16) -> Result<Self> {
        if lo > hi || hi > 9999 {
            return Err(Error::param(format!("invalid SIC range {lo}..={hi}")));
        }
        Ok(SectorFilter { lo, hi })
    }

    pub fn lo(&self) -> u16 {
        self.lo
    }

    pub fn hi(&self) -> u16 {
        self.hi
    }

    pub fn contains(&self, sic: u16) -> bool {
        (self.lo..=self.hi).contains(&sic)
    }
}

/// Banks, brokerages and insurers by SIC range.
pub fn standard_sector_filters() -> BTreeMap<&'static str, SectorFilter> {
    BTreeMap::from([
        ("banks", SectorFilter { lo: 6000, hi: 6199 }),
        ("brokerages", SectorFilter { lo: 6200, hi: 6299 }),
        ("insurers", SectorFilter { lo: 6300, hi: 6499 }),
    ])
}

/// Parses CSV format C (`date,firm_id,sic,market_cap,return`).
pub fn parse_constituents_csv<R: Read>(input: R) -> Result<Vec<ConstituentRecord>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let expected = ["date", "firm_id", "sic", "market_cap", "return"];
    let header = reader.headers().map_err(|e| Error::Malformed {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().ne(expected) {
        return Err(Error::Malformed {
            line: 1,
            message: format!("expected header `{}`", expected.join(",")),
        });
    }
    let mut out = Vec::new();
    for row in reader.deserialize::<ConstituentRecord>() {
        let record = row.map_err(|e| Error::Malformed {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        record.validate(out.len() as u64 + 2)?;
        out.push(record);
    }
    Ok(out)
}

/// A firm's share of its sector on one date.
#[derive(Debug, Clone, PartialEq)]
pub struct Weighted {
    pub firm_id: String,
    pub weight: f64,
    pub ret: f64,
}

/// Same-date market-cap weights of the firms inside `filter`, grouped by date.
///
/// Firms entering or leaving the sample simply change that date's
/// denominator; there is no survivorship adjustment.
pub fn sector_weights<I>(records: I, filter: SectorFilter) -> Result<BTreeMap<TradingDate, Vec<Weighted>>>
where
    I: IntoIterator<Item = ConstituentRecord>,
{
    let mut by_date: BTreeMap<TradingDate, Vec<ConstituentRecord>> = BTreeMap::new();
    let mut seen: HashSet<(String, TradingDate)> = HashSet::new();
    for (i, record) in records.into_iter().enumerate() {
        record.validate(i as u64 + 1)?;
        if !filter.contains(record.sic) {
            continue;
        }
        if !seen.insert((record.firm_id.clone(), record.date)) {
            return Err(Error::DuplicateFirmDate {
                firm: record.firm_id,
                date: record.date,
            });
        }
        by_date.entry(record.date).or_default().push(record);
    }
    if by_date.is_empty() {
        return Err(Error::EmptySector {
            lo: filter.lo,
            hi: filter.hi,
        });
    }
    Ok(by_date
        .into_iter()
        .map(|(date, firms)| {
            let total: f64 = firms.iter().map(|f| f.market_cap).sum();
            let weighted = firms
                .into_iter()
                .map(|f| Weighted {
                    weight: f.market_cap / total,
                    ret: f.ret,
                    firm_id: f.firm_id,
                })
                .collect();
            (date, weighted)
        })
        .collect())
}

/// Per-date market-cap-weighted average return of the firms inside `filter`.
pub fn build_index<I>(records: I, filter: SectorFilter, index_id: &str) -> Result<ReturnSeries>
where
    I: IntoIterator<Item = ConstituentRecord>,
{
    let points = sector_weights(records, filter)?
        .into_iter()
        .map(|(date, firms)| (date, firms.iter().map(|f| f.weight * f.ret).sum()))
        .collect();
    ReturnSeries::new(index_id, points)
}

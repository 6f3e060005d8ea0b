//! Series ingestion: CSV parsing, price-to-return conversion, calendar
//! alignment and period aggregation.
//!
//! Returns are simple returns, `p_t / p_{t-1} - 1`. Alignment keeps only the
//! dates every series has; nothing is interpolated.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};

use crate::date::TradingDate;
use crate::error::{Error, Result};

/// Daily closing prices for one asset.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    asset_id: String,
    points: Vec<(TradingDate, f64)>,
}

impl PriceSeries {
    /// Builds a series, sorting by date. Rejects duplicate dates, non-positive
    /// prices and fewer than two points.
    pub fn new(asset_id: impl Into<String>, mut points: Vec<(TradingDate, f64)>) -> Result<Self> {
        let asset_id = asset_id.into();
        for (i, &(_, price)) in points.iter().enumerate() {
            if price <= 0.0 || !price.is_finite() {
                return Err(Error::NonPositivePrice {
                    line: i as u64 + 1,
                    price,
                });
            }
        }
        sort_unique(&mut points)?;
        if points.len() < 2 {
            return Err(Error::TooFewRows {
                asset: asset_id,
                found: points.len(),
                required: 2,
            });
        }
        Ok(PriceSeries { asset_id, points })
    }

    pub fn asset_id(&self) -> &str {
        &self.asset_id
    }

    pub fn points(&self) -> &[(TradingDate, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Per-period simple returns for one asset, each stamped with the period's
/// closing date.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    asset_id: String,
    points: Vec<(TradingDate, f64)>,
}

impl ReturnSeries {
    /// Builds a series, sorting by date. Rejects duplicate dates, returns at
    /// or below -1 and empty input.
    pub fn new(asset_id: impl Into<String>, mut points: Vec<(TradingDate, f64)>) -> Result<Self> {
        let asset_id = asset_id.into();
        for (i, &(_, value)) in points.iter().enumerate() {
            check_return(value, i as u64 + 1)?;
        }
        sort_unique(&mut points)?;
        if points.is_empty() {
            return Err(Error::TooFewRows {
                asset: asset_id,
                found: 0,
                required: 1,
            });
        }
        Ok(ReturnSeries { asset_id, points })
    }

    pub fn asset_id(&self) -> &str {
        &self.asset_id
    }

    pub fn points(&self) -> &[(TradingDate, f64)] {
        &self.points
    }

    pub fn dates(&self) -> impl Iterator<Item = TradingDate> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// N assets by T dates of returns on a shared calendar. Row `n` holds asset
/// `n`'s returns in date order.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPanel {
    asset_ids: Vec<String>,
    dates: Vec<TradingDate>,
    returns: Array2<f64>,
}

impl AlignedPanel {
    pub fn new(asset_ids: Vec<String>, dates: Vec<TradingDate>, returns: Array2<f64>) -> Result<Self> {
        let (n, t) = returns.dim();
        if n == 0 || n != asset_ids.len() {
            return Err(Error::param(format!(
                "panel has {n} rows for {} asset ids",
                asset_ids.len()
            )));
        }
        if t != dates.len() {
            return Err(Error::LengthMismatch {
                left: t,
                right: dates.len(),
            });
        }
        if t < 2 {
            return Err(Error::IntersectionTooShort(t));
        }
        if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::DuplicateDate(w[1]));
        }
        if returns.iter().any(|v| !v.is_finite()) {
            return Err(Error::Malformed {
                line: 0,
                message: "panel contains a non-finite return".into(),
            });
        }
        Ok(AlignedPanel {
            asset_ids,
            dates,
            returns,
        })
    }

    pub fn asset_ids(&self) -> &[String] {
        &self.asset_ids
    }

    pub fn dates(&self) -> &[TradingDate] {
        &self.dates
    }

    pub fn returns(&self) -> ArrayView2<'_, f64> {
        self.returns.view()
    }

    pub fn n_assets(&self) -> usize {
        self.returns.nrows()
    }

    pub fn n_periods(&self) -> usize {
        self.returns.ncols()
    }

    pub fn row(&self, asset: usize) -> ArrayView1<'_, f64> {
        self.returns.row(asset)
    }

    /// Splits the panel back into one return series per asset.
    pub fn to_series(&self) -> Vec<ReturnSeries> {
        self.asset_ids
            .iter()
            .zip(self.returns.axis_iter(Axis(0)))
            .map(|(id, row)| ReturnSeries {
                asset_id: id.clone(),
                points: self.dates.iter().copied().zip(row.iter().copied()).collect(),
            })
            .collect()
    }

    /// Keeps only dates inside `[from, to]` (either bound optional).
    pub fn restrict(&self, from: Option<TradingDate>, to: Option<TradingDate>) -> Result<Self> {
        let keep: Vec<usize> = (0..self.dates.len())
            .filter(|&i| {
                let d = self.dates[i];
                from.is_none_or(|f| d >= f) && to.is_none_or(|t| d <= t)
            })
            .collect();
        if keep.len() < 2 {
            return Err(Error::IntersectionTooShort(keep.len()));
        }
        AlignedPanel::new(
            self.asset_ids.clone(),
            keep.iter().map(|&i| self.dates[i]).collect(),
            self.returns.select(Axis(1), &keep),
        )
    }
}

fn check_return(value: f64, line: u64) -> Result<()> {
    if value > -1.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::ReturnOutOfRange { line, value })
    }
}

fn sort_unique(points: &mut [(TradingDate, f64)]) -> Result<()> {
    points.sort_by_key(|p| p.0);
    match points.windows(2).find(|w| w[0].0 == w[1].0) {
        Some(w) => Err(Error::DuplicateDate(w[0].0)),
        None => Ok(()),
    }
}

fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(input)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    Error::Malformed {
        line,
        message: e.to_string(),
    }
}

fn expect_header<R: Read>(reader: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let header = reader.headers().map_err(csv_error)?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::Malformed {
            line: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    Ok(())
}

fn parse_field<T: std::str::FromStr>(field: &str, line: u64, what: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    field.parse().map_err(|e| Error::Malformed {
        line,
        message: format!("bad {what} `{field}`: {e}"),
    })
}

/// Reads `(date, value)` rows under a two-column header.
fn read_dated_values<R: Read>(input: R, value_column: &str) -> Result<Vec<(TradingDate, f64, u64)>> {
    let mut reader = csv_reader(input);
    expect_header(&mut reader, &["date", value_column])?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != 2 {
            return Err(Error::Malformed {
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let date: TradingDate = parse_field(&record[0], line, "date")?;
        let value: f64 = parse_field(&record[1], line, value_column)?;
        rows.push((date, value, line));
    }
    Ok(rows)
}

/// Parses CSV format A (`date,price`).
pub fn parse_price_csv<R: Read>(input: R, asset_id: &str) -> Result<PriceSeries> {
    let rows = read_dated_values(input, "price")?;
    for &(_, price, line) in &rows {
        if price <= 0.0 || !price.is_finite() {
            return Err(Error::NonPositivePrice { line, price });
        }
    }
    PriceSeries::new(asset_id, rows.into_iter().map(|(d, p, _)| (d, p)).collect())
}

/// Parses CSV format B (`date,return`).
pub fn parse_return_csv<R: Read>(input: R, asset_id: &str) -> Result<ReturnSeries> {
    let rows = read_dated_values(input, "return")?;
    for &(_, value, line) in &rows {
        check_return(value, line)?;
    }
    ReturnSeries::new(asset_id, rows.into_iter().map(|(d, v, _)| (d, v)).collect())
}

/// Parses a panel CSV with header `date,<asset_1>,...,<asset_N>`.
pub fn parse_panel_csv<R: Read>(input: R) -> Result<AlignedPanel> {
    let mut reader = csv_reader(input);
    let header = reader.headers().map_err(csv_error)?.clone();
    if header.len() < 2 || &header[0] != "date" {
        return Err(Error::Malformed {
            line: 1,
            message: "panel header must be `date,<asset>,...`".into(),
        });
    }
    let ids: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let mut rows: Vec<(TradingDate, Vec<f64>)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != header.len() {
            return Err(Error::Malformed {
                line,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        let date: TradingDate = parse_field(&record[0], line, "date")?;
        let mut values = Vec::with_capacity(ids.len());
        for field in record.iter().skip(1) {
            let v: f64 = parse_field(field, line, "return")?;
            check_return(v, line)?;
            values.push(v);
        }
        rows.push((date, values));
    }
    rows.sort_by_key(|r| r.0);
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::DuplicateDate(w[0].0));
    }
    let t = rows.len();
    let mut returns = Array2::zeros((ids.len(), t));
    for (k, (_, values)) in rows.iter().enumerate() {
        for (n, v) in values.iter().enumerate() {
            returns[[n, k]] = *v;
        }
    }
    AlignedPanel::new(ids, rows.into_iter().map(|r| r.0).collect(), returns)
}

/// Writes CSV format B.
pub fn write_return_csv<W: Write>(output: W, series: &ReturnSeries) -> Result<()> {
    let mut writer = csv::Writer::from_writer(output);
    writer.write_record(["date", "return"]).map_err(csv_error)?;
    for (date, value) in series.points() {
        writer
            .write_record([date.to_string(), value.to_string()])
            .map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes a panel CSV with header `date,<asset_1>,...`.
pub fn write_panel_csv<W: Write>(output: W, panel: &AlignedPanel) -> Result<()> {
    let mut writer = csv::Writer::from_writer(output);
    let mut header = vec!["date".to_owned()];
    header.extend(panel.asset_ids().iter().cloned());
    writer.write_record(&header).map_err(csv_error)?;
    for (k, date) in panel.dates().iter().enumerate() {
        let mut row = vec![date.to_string()];
        row.extend(panel.returns().column(k).iter().map(f64::to_string));
        writer.write_record(&row).map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

/// Simple returns between consecutive prices, stamped with the later date.
pub fn prices_to_returns(prices: &PriceSeries) -> ReturnSeries {
    let points = prices
        .points
        .windows(2)
        .map(|w| (w[1].0, w[1].1 / w[0].1 - 1.0))
        .collect();
    ReturnSeries {
        asset_id: prices.asset_id.clone(),
        points,
    }
}

/// Restricts every series to the dates they all share.
pub fn align(series: &[ReturnSeries]) -> Result<AlignedPanel> {
    let first = series
        .first()
        .ok_or_else(|| Error::param("align needs at least one series"))?;
    let mut common: Vec<TradingDate> = first.dates().collect();
    for s in &series[1..] {
        let mut other = s.dates().peekable();
        common.retain(|d| {
            while other.next_if(|o| o < d).is_some() {}
            other.peek() == Some(d)
        });
    }
    match common.len() {
        0 => return Err(Error::EmptyIntersection),
        1 => return Err(Error::IntersectionTooShort(1)),
        _ => {}
    }
    let mut returns = Array2::zeros((series.len(), common.len()));
    for (n, s) in series.iter().enumerate() {
        let lookup: BTreeMap<TradingDate, f64> = s.points().iter().copied().collect();
        for (k, d) in common.iter().enumerate() {
            returns[[n, k]] = lookup[d];
        }
    }
    AlignedPanel::new(series.iter().map(|s| s.asset_id.clone()).collect(), common, returns)
}

/// Compounds non-overlapping blocks of `period` consecutive returns. Each
/// block is stamped with its last date; a trailing partial block is dropped.
pub fn aggregate(panel: &AlignedPanel, period: usize) -> Result<AlignedPanel> {
    if period < 1 {
        return Err(Error::param("aggregation period must be at least 1"));
    }
    let t = panel.n_periods();
    if period > t {
        return Err(Error::param(format!(
            "aggregation period {period} exceeds panel length {t}"
        )));
    }
    if period == 1 {
        return Ok(panel.clone());
    }
    let blocks = t / period;
    let n = panel.n_assets();
    let mut returns = Array2::zeros((n, blocks));
    for b in 0..blocks {
        let cols = b * period..(b + 1) * period;
        for a in 0..n {
            let growth: f64 = cols.clone().map(|k| 1.0 + panel.returns[[a, k]]).product();
            returns[[a, b]] = growth - 1.0;
        }
    }
    let dates = (0..blocks).map(|b| panel.dates[(b + 1) * period - 1]).collect();
    AlignedPanel::new(panel.asset_ids.clone(), dates, returns)
}

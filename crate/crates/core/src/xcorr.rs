//! Lagged cross-correlation between two return series.
//!
//! Both windows are demeaned, the follower's convolution matrix is applied to
//! the reversed leader to get the full `2k - 1` lagged product, and the half
//! from the zero-lag center onward is kept. Each lag's sum is divided by its
//! number of overlapping terms and by the product of the two population
//! standard deviations. Coefficients outside `±2/√k` are significant.

use std::fmt;
use std::str::FromStr;

use crate::date::TradingDate;
use crate::error::{Error, Result};
use crate::ingest::ReturnSeries;
use crate::rolling::{run_windows, RollingEntry};

pub const DEFAULT_WINDOW: usize = 90;
pub const DEFAULT_LAG: usize = 1;

/// Per-lag sums of products and their term counts for a window of length `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagCovariances {
    pub sums: Vec<f64>,
    /// `counts[l] == k - l`.
    pub counts: Vec<usize>,
}

/// Which series moves first. With `ALeadsB`, `r[l]` pairs `a_t` with
/// `b_{t+l}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    ALeadsB,
    BLeadsA,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::ALeadsB => "a-leads-b",
            Direction::BLeadsA => "b-leads-a",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a-leads-b" => Ok(Direction::ALeadsB),
            "b-leads-a" => Ok(Direction::BLeadsA),
            other => Err(Error::param(format!(
                "unknown direction `{other}` (expected a-leads-b or b-leads-a)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct XCorrReport {
    /// Coefficient per lag, `0..k`.
    pub r: Vec<f64>,
    pub band: f64,
    pub k: usize,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RollingXCorrConfig {
    pub window: usize,
    pub stride: usize,
    pub lag: usize,
    pub direction: Direction,
}

impl Default for RollingXCorrConfig {
    fn default() -> Self {
        RollingXCorrConfig {
            window: DEFAULT_WINDOW,
            stride: 1,
            lag: DEFAULT_LAG,
            direction: Direction::ALeadsB,
        }
    }
}

impl RollingXCorrConfig {
    pub fn validate(&self, len: usize) -> Result<()> {
        if self.window < 2 {
            return Err(Error::param("window must be at least 2 periods"));
        }
        if self.stride < 1 {
            return Err(Error::param("stride must be at least 1"));
        }
        if self.window > len {
            return Err(Error::param(format!(
                "window {} exceeds the {len} shared periods",
                self.window
            )));
        }
        if self.lag >= self.window {
            return Err(Error::param(format!(
                "lag {} must be smaller than the window {}",
                self.lag, self.window
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RollingXCorrResult {
    pub lag: usize,
    pub window_length: usize,
    pub stride: usize,
    pub entries: Vec<RollingEntry<XCorrReport>>,
}

/// One output row of a rolling run; `r_at_lag` is `None` for gap windows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XCorrPoint {
    pub window_end_date: TradingDate,
    pub r_at_lag: Option<f64>,
    pub band: f64,
}

impl RollingXCorrResult {
    pub fn points(&self) -> impl Iterator<Item = XCorrPoint> + '_ {
        let band = significance_band(self.window_length);
        self.entries.iter().map(move |e| XCorrPoint {
            window_end_date: e.window_end_date,
            r_at_lag: e.value.as_ref().ok().map(|rep| rep.r[self.lag]),
            band,
        })
    }
}

/// `2/√k`.
pub fn significance_band(k: usize) -> f64 {
    2.0 / (k as f64).sqrt()
}

/// `-1`, `0` or `+1` for below `-band`, inside, above `+band`.
pub fn significance(r: f64, band: f64) -> i8 {
    if r > band {
        1
    } else if r < -band {
        -1
    } else {
        0
    }
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::param(format!(
            "cross-correlation needs at least 2 periods, got {}",
            a.len()
        )));
    }
    Ok(a.len())
}

/// `sums[l] = Σ_t follower[t + l] · leader[t]` for `l in 0..k`, taken from the
/// center onward of the full convolution of `follower` with reversed `leader`.
/// Inputs are expected to be demeaned already.
pub fn lag_covariances(follower: &[f64], leader: &[f64]) -> Result<LagCovariances> {
    let k = check_lengths(follower, leader)?;
    let reversed: Vec<f64> = leader.iter().rev().copied().collect();
    // Row j of the (2k-1) x k convolution matrix holds follower[j - i] in
    // column i wherever that index is in range.
    let mut full = vec![0.0; 2 * k - 1];
    for (j, out) in full.iter_mut().enumerate() {
        let lo = j.saturating_sub(k - 1);
        let hi = j.min(k - 1);
        *out = (lo..=hi).map(|i| follower[j - i] * reversed[i]).sum();
    }
    let sums = full.split_off(k - 1);
    Ok(LagCovariances {
        sums,
        counts: (0..k).map(|l| k - l).collect(),
    })
}

/// Window deviations from the mean. A constant window yields `None`.
fn deviations(x: &[f64]) -> Option<Vec<f64>> {
    if x.iter().all(|&v| v == x[0]) {
        return None;
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    Some(x.iter().map(|v| v - mean).collect())
}

fn constant_window() -> Error {
    Error::Degenerate("series is constant over the window (zero standard deviation)".into())
}

/// Cross-correlation coefficients for every lag of one window.
pub fn xcorr(a: &[f64], b: &[f64], direction: Direction) -> Result<XCorrReport> {
    let k = check_lengths(a, b)?;
    let da = deviations(a).ok_or_else(constant_window)?;
    let db = deviations(b).ok_or_else(constant_window)?;
    let lagged = match direction {
        Direction::ALeadsB => lag_covariances(&db, &da)?,
        Direction::BLeadsA => lag_covariances(&da, &db)?,
    };
    // Summed last-to-first, the order the convolution accumulates its center
    // term, so a series correlated with itself gives exactly 1 at lag 0.
    let sum_sq = |d: &[f64]| d.iter().rev().map(|v| v * v).sum::<f64>();
    let var_a = sum_sq(&da) / k as f64;
    let var_b = sum_sq(&db) / k as f64;
    let scale = (var_a * var_b).sqrt();
    let r = lagged
        .sums
        .iter()
        .zip(&lagged.counts)
        .map(|(s, &c)| (s / c as f64) / scale)
        .collect();
    Ok(XCorrReport {
        r,
        band: significance_band(k),
        k,
        direction,
    })
}

/// Same contract as [`xcorr`], evaluated by a direct double loop over lags
/// and overlapping terms. Used to cross-check the convolution path.
pub fn xcorr_bruteforce(a: &[f64], b: &[f64], direction: Direction) -> Result<XCorrReport> {
    let k = check_lengths(a, b)?;
    let da = deviations(a).ok_or_else(constant_window)?;
    let db = deviations(b).ok_or_else(constant_window)?;
    let (follower, leader) = match direction {
        Direction::ALeadsB => (&db, &da),
        Direction::BLeadsA => (&da, &db),
    };
    let var = |d: &[f64]| d.iter().map(|v| v * v).sum::<f64>() / k as f64;
    let scale = (var(&da) * var(&db)).sqrt();
    let mut r = Vec::with_capacity(k);
    for lag in 0..k {
        let mut sum = 0.0;
        for t in 0..k - lag {
            sum += follower[t + lag] * leader[t];
        }
        r.push(sum / (k - lag) as f64 / scale);
    }
    Ok(XCorrReport {
        r,
        band: significance_band(k),
        k,
        direction,
    })
}

/// Slides a window over two aligned series and records the coefficient at
/// `cfg.lag` for each position. Windows where either series is constant
/// become gap entries.
pub fn rolling_xcorr(a: &ReturnSeries, b: &ReturnSeries, cfg: &RollingXCorrConfig) -> Result<RollingXCorrResult> {
    if a.len() != b.len() || a.dates().ne(b.dates()) {
        return Err(Error::param(format!(
            "series `{}` and `{}` are not on the same calendar; align them first",
            a.asset_id(),
            b.asset_id()
        )));
    }
    cfg.validate(a.len())?;
    let av = a.values();
    let bv = b.values();
    let dates: Vec<TradingDate> = a.dates().collect();
    let entries = run_windows(&dates, cfg.window, cfg.stride, |start| {
        let range = start..start + cfg.window;
        xcorr(&av[range.clone()], &bv[range], cfg.direction)
    })?;
    Ok(RollingXCorrResult {
        lag: cfg.lag,
        window_length: cfg.window,
        stride: cfg.stride,
        entries,
    })
}

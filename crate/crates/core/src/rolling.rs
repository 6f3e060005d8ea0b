//! Window bookkeeping shared by the rolling PCA and cross-correlation runs.

use rayon::prelude::*;

use crate::date::TradingDate;
use crate::error::{Error, Result};

/// A window whose data made the measure undefined (for example every series
/// constant). Kept in the output so windows are never silently dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowGap {
    pub reason: String,
}

/// One window position of a rolling computation.
#[derive(Debug, Clone, PartialEq)]
pub struct RollingEntry<T> {
    pub window_index: usize,
    pub window_end_date: TradingDate,
    pub value: std::result::Result<T, WindowGap>,
}

/// Number of window positions for `len` periods.
pub fn window_count(len: usize, window: usize, stride: usize) -> usize {
    if window == 0 || stride == 0 || len < window {
        0
    } else {
        (len - window) / stride + 1
    }
}

/// Evaluates `f(start)` for every window start in parallel and assembles the
/// entries in window order. `Degenerate` errors become gaps; any other error
/// aborts with the lowest failing window index.
pub(crate) fn run_windows<T, F>(
    dates: &[TradingDate],
    window: usize,
    stride: usize,
    f: F,
) -> Result<Vec<RollingEntry<T>>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let count = window_count(dates.len(), window, stride);
    let outcomes: Vec<Result<T>> = (0..count).into_par_iter().map(|i| f(i * stride)).collect();
    outcomes
        .into_iter()
        .enumerate()
        .map(|(i, outcome)| {
            let value = match outcome {
                Ok(v) => Ok(v),
                Err(Error::Degenerate(reason)) => Err(WindowGap { reason }),
                Err(e) => return Err(e.in_window(i)),
            };
            Ok(RollingEntry {
                window_index: i,
                window_end_date: dates[i * stride + window - 1],
                value,
            })
        })
        .collect()
}

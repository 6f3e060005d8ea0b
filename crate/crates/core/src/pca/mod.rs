//! Principal component measure of co-movement.
//!
//! For a window of returns `R` (assets by periods) the rows are demeaned into
//! `M`, the covariance is `M Mᵀ / divisor`, and its eigenvalues normalized to
//! sum to one give the fractional eigenvalues. A first fraction near 1 means a
//! single component explains almost all joint variation; `1/N` is the floor
//! reached by uncorrelated assets of equal variance.

mod jacobi;

use std::fmt;
use std::str::FromStr;

use ndarray::{s, Array1, Array2, ArrayView2, Axis};

use crate::date::TradingDate;
use crate::error::{Error, Result};
use crate::ingest::AlignedPanel;
use crate::rolling::{run_windows, RollingEntry};

pub use jacobi::MAX_SWEEPS;

/// Default eigen-solver tolerance, relative to the covariance trace.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Default rolling window, in periods.
pub const DEFAULT_WINDOW: usize = 30;

/// Returns with each asset's window mean removed.
#[derive(Debug, Clone, PartialEq)]
pub struct DemeanedMatrix {
    pub values: Array2<f64>,
    pub row_means: Array1<f64>,
}

/// Normalization applied to `M Mᵀ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DivisorMode {
    /// `T - N`: periods minus assets.
    #[default]
    PaperTJ,
    /// `T - 1`.
    SampleT1,
    /// `T`.
    PopulationT,
}

impl DivisorMode {
    pub fn divisor(&self, assets: usize, periods: usize) -> Result<f64> {
        let d = match self {
            DivisorMode::PaperTJ => periods as f64 - assets as f64,
            DivisorMode::SampleT1 => periods as f64 - 1.0,
            DivisorMode::PopulationT => periods as f64,
        };
        if d > 0.0 {
            Ok(d)
        } else if *self == DivisorMode::PaperTJ {
            Err(Error::SingularEstimator { assets, periods })
        } else {
            Err(Error::param(format!("{periods} periods is too few for {self} divisor")))
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DivisorMode::PaperTJ => "paper",
            DivisorMode::SampleT1 => "sample",
            DivisorMode::PopulationT => "population",
        }
    }
}

impl fmt::Display for DivisorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DivisorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(DivisorMode::PaperTJ),
            "sample" => Ok(DivisorMode::SampleT1),
            "population" => Ok(DivisorMode::PopulationT),
            other => Err(Error::param(format!(
                "unknown divisor `{other}` (expected paper, sample or population)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    pub values: Array2<f64>,
    pub divisor: f64,
}

impl CovarianceMatrix {
    /// Wraps an existing symmetric matrix. Only the upper triangle is read.
    pub fn from_symmetric(values: Array2<f64>, divisor: f64) -> Result<Self> {
        let (r, c) = values.dim();
        if r != c || r == 0 {
            return Err(Error::param(format!("covariance must be square, got {r}x{c}")));
        }
        let mut values = values;
        for i in 0..r {
            for j in 0..i {
                values[[i, j]] = values[[j, i]];
            }
        }
        Ok(CovarianceMatrix { values, divisor })
    }

    pub fn trace(&self) -> f64 {
        self.values.diag().sum()
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }
}

/// Eigen-structure of one covariance matrix, components ordered by
/// descending eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub eigenvalues: Vec<f64>,
    /// Column `j` is the unit eigenvector for `eigenvalues[j]`, signed so its
    /// first non-negligible coordinate is positive.
    pub eigenvectors: Array2<f64>,
    pub fractional: Vec<f64>,
    pub cumulative: Vec<f64>,
}

impl EigenReport {
    pub fn first_fraction(&self) -> f64 {
        self.fractional[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RollingPcaConfig {
    pub window: usize,
    pub stride: usize,
    pub divisor: DivisorMode,
    pub tolerance: f64,
}

impl Default for RollingPcaConfig {
    fn default() -> Self {
        RollingPcaConfig {
            window: DEFAULT_WINDOW,
            stride: 1,
            divisor: DivisorMode::PaperTJ,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl RollingPcaConfig {
    /// Checks the parameters against a panel shape without computing anything.
    pub fn validate(&self, assets: usize, periods: usize) -> Result<()> {
        if self.window < 2 {
            return Err(Error::param("window must be at least 2 periods"));
        }
        if self.stride < 1 {
            return Err(Error::param("stride must be at least 1"));
        }
        if self.window > periods {
            return Err(Error::param(format!(
                "window {} exceeds the {periods} available periods",
                self.window
            )));
        }
        if self.divisor == DivisorMode::PaperTJ && self.window <= assets {
            return Err(Error::param(format!(
                "window {} must exceed the number of assets ({assets}) under the T-N divisor",
                self.window
            )));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::param("tolerance must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RollingPcaResult {
    pub window_length: usize,
    pub stride: usize,
    pub entries: Vec<RollingEntry<EigenReport>>,
}

pub fn demean(panel: &AlignedPanel) -> Result<DemeanedMatrix> {
    demean_matrix(panel.returns())
}

/// Subtracts each row's mean. Rows whose values are all equal come out as
/// exact zeros.
pub fn demean_matrix(returns: ArrayView2<'_, f64>) -> Result<DemeanedMatrix> {
    let t = returns.ncols();
    if t < 2 {
        return Err(Error::param(format!("demeaning needs at least 2 periods, got {t}")));
    }
    let row_means = returns.mean_axis(Axis(1)).expect("non-empty rows");
    let mut values = returns.to_owned();
    for (mut row, &mean) in values.axis_iter_mut(Axis(0)).zip(row_means.iter()) {
        let first = row[0];
        if row.iter().all(|&v| v == first) {
            row.fill(0.0);
        } else {
            row.mapv_inplace(|v| v - mean);
        }
    }
    Ok(DemeanedMatrix { values, row_means })
}

/// `M Mᵀ / divisor`, filled symmetrically.
pub fn covariance(m: &DemeanedMatrix, mode: DivisorMode) -> Result<CovarianceMatrix> {
    let (n, t) = m.values.dim();
    let divisor = mode.divisor(n, t)?;
    let mut values = Array2::zeros((n, n));
    for i in 0..n {
        let ri = m.values.row(i);
        for j in i..n {
            let v = ri.dot(&m.values.row(j)) / divisor;
            values[[i, j]] = v;
            values[[j, i]] = v;
        }
    }
    Ok(CovarianceMatrix { values, divisor })
}

/// Symmetric eigendecomposition with fractional eigenvalues.
///
/// Eigenvalues in `[-tol·trace, 0)` are treated as rounding noise and
/// clamped to zero; anything more negative is rejected. The decomposition is
/// checked against `max|QΘQᵀ - Σ| <= tol·trace`.
pub fn eigen_symmetric(c: &CovarianceMatrix, tol: f64) -> Result<EigenReport> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::param("tolerance must be positive"));
    }
    let n = c.dim();
    let trace = c.trace();
    if trace.is_nan() || trace <= 0.0 {
        return Err(Error::Degenerate(format!(
            "covariance trace is {trace}; every asset is constant"
        )));
    }
    let decomposition = jacobi::decompose(&c.values).map_err(|residual| Error::NoConvergence {
        sweeps: MAX_SWEEPS,
        residual,
    })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| decomposition.values[j].total_cmp(&decomposition.values[i]));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        let mut value = decomposition.values[src];
        if value < 0.0 {
            if value < -tol * trace {
                return Err(Error::NotPositiveSemidefinite {
                    eigenvalue: value,
                    trace,
                });
            }
            value = 0.0;
        }
        eigenvalues.push(value);
        let mut column = decomposition.vectors.column(src).to_owned();
        let sign = column.iter().find(|x| x.abs() > 1e-10).map_or(1.0, |x| x.signum());
        column *= sign;
        eigenvectors.column_mut(dst).assign(&column);
    }

    let residual = reconstruction_error(&c.values, &eigenvalues, &eigenvectors);
    if residual > tol * trace {
        return Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            residual,
        });
    }

    let total: f64 = eigenvalues.iter().sum();
    let fractional: Vec<f64> = eigenvalues.iter().map(|v| v / total).collect();
    let cumulative = fractional
        .iter()
        .scan(0.0, |acc, f| {
            *acc += f;
            Some(*acc)
        })
        .collect();
    Ok(EigenReport {
        eigenvalues,
        eigenvectors,
        fractional,
        cumulative,
    })
}

/// `max_ij |(Q diag(θ) Qᵀ)_ij - Σ_ij|`.
pub fn reconstruction_error(sigma: &Array2<f64>, eigenvalues: &[f64], q: &Array2<f64>) -> f64 {
    let scaled = q * &Array1::from(eigenvalues.to_vec());
    let rebuilt = scaled.dot(&q.t());
    (&rebuilt - sigma).iter().fold(0.0_f64, |m, d| m.max(d.abs()))
}

/// Runs the covariance and eigen steps over each window position, stamping
/// every entry with its window's last date. Windows where every asset is
/// constant become gap entries.
pub fn rolling_pca(panel: &AlignedPanel, cfg: &RollingPcaConfig) -> Result<RollingPcaResult> {
    cfg.validate(panel.n_assets(), panel.n_periods())?;
    let returns = panel.returns();
    let entries = run_windows(panel.dates(), cfg.window, cfg.stride, |start| {
        let slice = returns.slice(s![.., start..start + cfg.window]);
        window_report(slice, cfg)
    })?;
    Ok(RollingPcaResult {
        window_length: cfg.window,
        stride: cfg.stride,
        entries,
    })
}

fn window_report(returns: ArrayView2<'_, f64>, cfg: &RollingPcaConfig) -> Result<EigenReport> {
    let m = demean_matrix(returns)?;
    let c = covariance(&m, cfg.divisor)?;
    eigen_symmetric(&c, cfg.tolerance)
}

impl RollingPcaResult {
    /// `(window_end_date, first fractional eigenvalue)` for each non-gap window.
    pub fn first_fractions(&self) -> impl Iterator<Item = (TradingDate, f64)> + '_ {
        self.entries
            .iter()
            .filter_map(|e| e.value.as_ref().ok().map(|r| (e.window_end_date, r.first_fraction())))
    }
}

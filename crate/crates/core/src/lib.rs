//! Systemic-risk measures over daily return series.
//!
//! Two measures are provided:
//!
//! * [`pca`]: rolling-window principal components of the cross-asset
//!   covariance, reported as fractional eigenvalues. A rising first fraction
//!   means assets increasingly move as one.
//! * [`xcorr`]: rolling lagged cross-correlation between two series with a
//!   `±2/√k` significance band.
//!
//! [`ingest`] and [`index`] turn CSV inputs into aligned return panels;
//! [`synth`] generates equicorrelated panels with known population answers.

pub mod date;
pub mod error;
pub mod index;
pub mod ingest;
pub mod pca;
pub mod rolling;
pub mod synth;
pub mod xcorr;

pub use date::TradingDate;
pub use error::{Error, ErrorKind, Result};
pub use index::{build_index, sector_weights, standard_sector_filters, ConstituentRecord, SectorFilter};
pub use ingest::{aggregate, align, prices_to_returns, AlignedPanel, PriceSeries, ReturnSeries};
pub use pca::{
    covariance, demean, eigen_symmetric, rolling_pca, CovarianceMatrix, DemeanedMatrix, DivisorMode, EigenReport,
    RollingPcaConfig, RollingPcaResult,
};
pub use rolling::{RollingEntry, WindowGap};
pub use synth::{expected_first_fraction, generate, PanelSpec, Regime};
pub use xcorr::{
    lag_covariances, rolling_xcorr, xcorr, xcorr_bruteforce, Direction, LagCovariances, RollingXCorrConfig,
    RollingXCorrResult, XCorrReport,
};

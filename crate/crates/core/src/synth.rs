//! Synthetic equicorrelated return panels.
//!
//! Generator: `rand_chacha::ChaCha20Rng` seeded with `seed_from_u64(seed)`,
//! standard normals from `rand_distr::StandardNormal` (ziggurat, rand_distr
//! 0.5). Draws are consumed period by period, asset by asset within a period,
//! and correlated with the lower Cholesky factor of the equicorrelation
//! matrix in force for that period. Period `t` is dated `EPOCH + t` calendar
//! days with `EPOCH = 2000-01-01`.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::date::TradingDate;
use crate::error::{Error, Result};
use crate::ingest::AlignedPanel;

/// Date of period 0.
pub fn epoch() -> TradingDate {
    TradingDate::new(2000, 1, 1).expect("valid epoch")
}

/// A block of periods `[start, end)` with its own equicorrelation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub start: usize,
    pub end: usize,
    pub correlation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelSpec {
    pub n_assets: usize,
    pub n_periods: usize,
    pub base_correlation: f64,
    /// Per-period standard deviation of every asset's return.
    pub vol: f64,
    pub regime: Option<Regime>,
    pub seed: u64,
}

impl PanelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_assets < 1 {
            return Err(Error::param("need at least one asset"));
        }
        if self.n_periods < 2 {
            return Err(Error::param("need at least two periods"));
        }
        let in_unit = |rho: f64| (0.0..1.0).contains(&rho);
        if !in_unit(self.base_correlation) {
            return Err(Error::param(format!(
                "base correlation {} outside [0, 1)",
                self.base_correlation
            )));
        }
        if self.vol <= 0.0 || !self.vol.is_finite() {
            return Err(Error::param("vol must be positive"));
        }
        if let Some(r) = self.regime {
            if r.start >= r.end || r.end > self.n_periods {
                return Err(Error::param(format!(
                    "regime [{}, {}) does not fit in {} periods",
                    r.start, r.end, self.n_periods
                )));
            }
            if !in_unit(r.correlation) {
                return Err(Error::param(format!(
                    "regime correlation {} outside [0, 1)",
                    r.correlation
                )));
            }
        }
        // Keep single-period returns above -1 with overwhelming probability.
        if self.vol > 0.2 {
            return Err(Error::param("vol above 0.2 per period is not supported"));
        }
        Ok(())
    }
}

/// Leading eigenvalue fraction of an `n`-asset equicorrelation matrix.
pub fn expected_first_fraction(rho: f64, n: usize) -> f64 {
    (1.0 + (n as f64 - 1.0) * rho) / n as f64
}

fn equicorrelation(n: usize, rho: f64) -> Array2<f64> {
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { 1.0 } else { rho })
}

/// Lower Cholesky factor; fails if `a` is not positive definite.
pub(crate) fn cholesky(a: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let partial: f64 = (0..j).map(|k| l[[i, k]] * l[[j, k]]).sum();
            if i == j {
                let d = a[[i, i]] - partial;
                if d.is_nan() || d <= 0.0 {
                    return Err(Error::Degenerate("correlation matrix is not positive definite".into()));
                }
                l[[i, i]] = d.sqrt();
            } else {
                l[[i, j]] = (a[[i, j]] - partial) / l[[j, j]];
            }
        }
    }
    Ok(l)
}

/// Draws a panel. Identical specs produce bit-identical panels.
pub fn generate(spec: &PanelSpec) -> Result<AlignedPanel> {
    spec.validate()?;
    let n = spec.n_assets;
    let base = cholesky(&equicorrelation(n, spec.base_correlation))?;
    let regime = match spec.regime {
        Some(r) => Some((r, cholesky(&equicorrelation(n, r.correlation))?)),
        None => None,
    };

    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut returns = Array2::zeros((n, spec.n_periods));
    let mut z = vec![0.0; n];
    for t in 0..spec.n_periods {
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        let factor = match &regime {
            Some((r, l)) if (r.start..r.end).contains(&t) => l,
            _ => &base,
        };
        for i in 0..n {
            let x: f64 = (0..=i).map(|j| factor[[i, j]] * z[j]).sum();
            returns[[i, t]] = spec.vol * x;
        }
    }
    let start = epoch();
    AlignedPanel::new(
        (1..=n).map(|i| format!("asset_{i}")).collect(),
        (0..spec.n_periods as u64).map(|t| start.plus_days(t)).collect(),
        returns,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, t: usize, rho: f64, seed: u64) -> PanelSpec {
        PanelSpec {
            n_assets: n,
            n_periods: t,
            base_correlation: rho,
            vol: 0.01,
            regime: None,
            seed,
        }
    }

    #[test]
    fn closed_form_fraction() {
        assert_eq!(expected_first_fraction(0.0, 4), 0.25);
        assert!((expected_first_fraction(0.6, 4) - 0.70).abs() < 1e-15);
        assert!((expected_first_fraction(1.0 - 1e-12, 7) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn same_seed_same_panel() {
        let a = generate(&spec(3, 50, 0.4, 11)).unwrap();
        let b = generate(&spec(3, 50, 0.4, 11)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate(&spec(3, 50, 0.4, 12)).unwrap());
    }

    #[test]
    fn dates_start_at_epoch() {
        let p = generate(&spec(1, 3, 0.0, 0)).unwrap();
        assert_eq!(p.dates()[0].to_string(), "2000-01-01");
        assert_eq!(p.dates()[2].to_string(), "2000-01-03");
        assert_eq!(p.asset_ids(), &["asset_1".to_string()]);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(generate(&spec(2, 10, 1.0, 0)).is_err());
        assert!(generate(&spec(0, 10, 0.0, 0)).is_err());
        let mut s = spec(2, 10, 0.0, 0);
        s.regime = Some(Regime {
            start: 5,
            end: 11,
            correlation: 0.5,
        });
        assert!(generate(&s).is_err());
    }

    #[test]
    fn cholesky_reproduces_matrix() {
        let a = equicorrelation(4, 0.3);
        let l = cholesky(&a).unwrap();
        let back = l.dot(&l.t());
        for (x, y) in back.iter().zip(a.iter()) {
            assert!((x - y).abs() < 1e-14);
        }
    }
}

//! Fixtures shared by the benchmarks.

use sysrisk::synth::{generate, PanelSpec};
use sysrisk::AlignedPanel;

/// Seeded equicorrelated panel with daily volatility 1%.
pub fn panel(n_assets: usize, n_periods: usize, rho: f64) -> AlignedPanel {
    generate(&PanelSpec {
        n_assets,
        n_periods,
        base_correlation: rho,
        vol: 0.01,
        regime: None,
        seed: 99,
    })
    .expect("valid bench panel")
}

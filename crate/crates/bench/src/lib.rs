//! Fixtures shared by the benchmarks.

use mvgrover_core::{EnvelopeSpec, Iterations, LogicalString, ModularGrid, SearchConfig, TargetSpec};

pub fn envelopes(n_modes: usize) -> Vec<EnvelopeSpec> {
    (0..n_modes)
        .map(|i| EnvelopeSpec::Gaussian {
            center: [1.0 + 0.5 * i as f64, 0.5],
            widths: [0.5, 0.25],
        })
        .collect()
}

/// One-target search on a `g × g` grid per mode.
pub fn search_config(n_modes: usize, g: usize) -> SearchConfig {
    let grid = ModularGrid::new(n_modes, g, g).expect("benchmark grid fits");
    let target = LogicalString::from_index(1, n_modes);
    SearchConfig::new(grid, envelopes(n_modes), TargetSpec::single(target)).with_iterations(Iterations::Auto)
}

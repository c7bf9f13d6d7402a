//! Position-space ingestion through the Zak transform, and the CV logical
//! qubit states built from modular envelopes.
//!
//! Positions are dimensionless, `θ = 2πN + θ̄`. A [`PositionWave`] samples the
//! window `[−2π·N_win, 2π·(N_win+1))` at the midpoints of the modular grid, so
//! every sample belongs to exactly one `(N, θ̄_j, band)` triple.
//!
//! The forward kernel is `amp[j][m][b] = Σ_N ψ(2πN + θ̄_j + bπ)·e^{−2πi·k̄_m·N}`.
//! With `2·N_win + 1 ≤ g_k` the midpoint sum over `k̄` is an exact discrete
//! Fourier pair, so the map is an isometry and [`zak_inverse`] undoes it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::ModularGrid;
use crate::state::{ModeState, ZERO_NORM};

/// Largest tolerated fraction of the norm lying outside the window.
pub const LEAKAGE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct PositionWave {
    samples: Vec<Complex64>,
    n_win: usize,
    samples_per_period: usize,
    exterior_norm: f64,
}

impl PositionWave {
    pub fn from_samples(samples: Vec<Complex64>, n_win: usize, samples_per_period: usize) -> Result<Self> {
        if samples_per_period == 0 || !samples_per_period.is_multiple_of(2) {
            return Err(Error::LatticeMisaligned(format!(
                "{samples_per_period} samples per period is not a positive even number"
            )));
        }
        let expected = (2 * n_win + 1) * samples_per_period;
        if samples.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                actual: samples.len(),
            });
        }
        Ok(Self {
            samples,
            n_win,
            samples_per_period,
            exterior_norm: 0.0,
        })
    }

    /// Samples `f` on the lattice aligned with `grid`.
    pub fn from_fn(grid: &ModularGrid, n_win: usize, f: impl Fn(f64) -> Complex64) -> Self {
        let spp = 2 * grid.g_theta();
        let n = (2 * n_win + 1) * spp;
        let samples = (0..n).map(|s| f(lattice_position(grid, n_win, s))).collect();
        Self {
            samples,
            n_win,
            samples_per_period: spp,
            exterior_norm: 0.0,
        }
    }

    /// Records the squared norm the wave carries outside the window.
    pub fn with_exterior_norm(mut self, exterior_norm: f64) -> Self {
        self.exterior_norm = exterior_norm;
        self
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn n_win(&self) -> usize {
        self.n_win
    }

    pub fn samples_per_period(&self) -> usize {
        self.samples_per_period
    }

    pub fn exterior_norm(&self) -> f64 {
        self.exterior_norm
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.samples_per_period as f64
    }

    /// Position of sample `s`.
    pub fn position(&self, s: usize) -> f64 {
        -2.0 * PI * self.n_win as f64 + (s as f64 + 0.5) * self.spacing()
    }

    /// `Σ |ψ|² Δθ` over the window.
    pub fn norm(&self) -> f64 {
        self.samples.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.spacing()
    }

    /// Sample at period `N`, modular index `j`, band `b`.
    fn at(&self, period: i64, j: usize, b: usize) -> Complex64 {
        let half = self.samples_per_period / 2;
        let p = (period + self.n_win as i64) as usize;
        self.samples[p * self.samples_per_period + b * half + j]
    }
}

fn lattice_position(grid: &ModularGrid, n_win: usize, s: usize) -> f64 {
    -2.0 * PI * n_win as f64 + (s as f64 + 0.5) * grid.d_theta()
}

fn check_window(grid: &ModularGrid, n_win: usize) -> Result<()> {
    if n_win == 0 {
        return Err(Error::WindowTooSmall("N_win must be at least 1".into()));
    }
    let periods = 2 * n_win + 1;
    if periods > grid.g_k() {
        return Err(Error::LatticeMisaligned(format!(
            "{} k̄ samples cannot resolve {periods} periods; need g_k >= 2*N_win+1",
            grid.g_k()
        )));
    }
    Ok(())
}

pub fn zak_forward(psi: &PositionWave, grid: &ModularGrid) -> Result<ModeState> {
    let grid = grid.mode_grid();
    if psi.samples_per_period != 2 * grid.g_theta() {
        return Err(Error::LatticeMisaligned(format!(
            "{} samples per period, grid needs {}",
            psi.samples_per_period,
            2 * grid.g_theta()
        )));
    }
    check_window(&grid, psi.n_win)?;
    let inside = psi.norm();
    let total = inside + psi.exterior_norm;
    if psi.exterior_norm > LEAKAGE_TOLERANCE * total {
        return Err(Error::WindowTooSmall(format!(
            "{:.3e} of the norm lies outside N_win = {}",
            psi.exterior_norm / total,
            psi.n_win
        )));
    }
    let w = psi.n_win as i64;
    let phases: Vec<Vec<Complex64>> = (0..grid.g_k())
        .map(|m| {
            (-w..=w)
                .map(|n| Complex64::from_polar(1.0, -2.0 * PI * grid.k(m) * n as f64))
                .collect()
        })
        .collect();
    Ok(ModeState::from_fn(grid, |j, m, b| {
        (-w..=w)
            .zip(&phases[m])
            .map(|(n, ph)| psi.at(n, j, b) * ph)
            .sum()
    }))
}

pub fn zak_inverse(state: &ModeState, n_win: usize) -> Result<PositionWave> {
    let grid = *state.grid();
    if n_win == 0 {
        return Err(Error::WindowTooSmall("N_win must be at least 1".into()));
    }
    let spp = 2 * grid.g_theta();
    let half = grid.g_theta();
    let d_k = grid.d_k();
    let mut samples = Vec::with_capacity((2 * n_win + 1) * spp);
    for p in 0..(2 * n_win + 1) {
        let n = p as f64 - n_win as f64;
        let phases: Vec<Complex64> = (0..grid.g_k())
            .map(|m| Complex64::from_polar(d_k, 2.0 * PI * grid.k(m) * n))
            .collect();
        for q in 0..spp {
            let (j, b) = (q % half, q / half);
            samples.push((0..grid.g_k()).map(|m| state.amp(j, m, b) * phases[m]).sum());
        }
    }
    PositionWave::from_samples(samples, n_win, spp)
}

/// Samples `exp(−(θ−c)²/(4σ²))·e^{i·k₀·θ}`, normalized on the window.
pub fn build_gaussian(
    center_theta: f64,
    sigma_theta: f64,
    momentum_offset: f64,
    grid: &ModularGrid,
    n_win: usize,
) -> Result<PositionWave> {
    if !sigma_theta.is_finite() || sigma_theta <= 0.0 {
        return Err(Error::InvalidParameter(format!("sigma_theta = {sigma_theta}")));
    }
    let lo = -2.0 * PI * n_win as f64;
    let hi = 2.0 * PI * (n_win + 1) as f64;
    if center_theta - 6.0 * sigma_theta < lo || center_theta + 6.0 * sigma_theta >= hi {
        return Err(Error::WindowTooSmall(format!(
            "6σ = {} around {center_theta} leaves [{lo}, {hi})",
            6.0 * sigma_theta
        )));
    }
    let f = |t: f64| {
        let x = t - center_theta;
        Complex64::from_polar((-x * x / (4.0 * sigma_theta * sigma_theta)).exp(), momentum_offset * t)
    };
    let wave = PositionWave::from_fn(grid, n_win, f);
    let norm = wave.norm();
    if norm < ZERO_NORM {
        return Err(Error::ZeroNorm);
    }
    // lattice tail outside the window, out to 40σ
    let d = grid.d_theta();
    let reach = (40.0 * sigma_theta / d).ceil() as i64;
    let count = ((2 * n_win + 1) * 2 * grid.g_theta()) as i64;
    let exterior: f64 = (1..=reach)
        .flat_map(|i| [-i, count - 1 + i])
        .map(|s| f(lo + (s as f64 + 0.5) * d).norm_sqr())
        .sum::<f64>()
        * d;
    let scale = 1.0 / norm.sqrt();
    let samples = wave.samples.iter().map(|a| a * scale).collect();
    Ok(PositionWave::from_samples(samples, n_win, wave.samples_per_period)?.with_exterior_norm(exterior / norm))
}

/// Envelope `g(θ̄, k̄)` of a CV logical qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum EnvelopeSpec {
    Constant,
    /// `exp(−(θ̄−θ̄₀)²/(4σ_θ²) − (k̄−k̄₀)²/(4σ_k²))`.
    Gaussian { center: [f64; 2], widths: [f64; 2] },
    /// Complex values `[re, im]`, indexed `table[j][m]`.
    Tabulated { table: Vec<Vec<[f64; 2]>> },
}

impl EnvelopeSpec {
    /// Tabulates band `band` of a single-mode state, e.g. one produced by [`zak_forward`].
    pub fn from_mode_band(state: &ModeState, band: usize) -> Self {
        let g = state.grid();
        let table = (0..g.g_theta())
            .map(|j| {
                (0..g.g_k())
                    .map(|m| {
                        let a = state.amp(j, m, band);
                        [a.re, a.im]
                    })
                    .collect()
            })
            .collect();
        EnvelopeSpec::Tabulated { table }
    }

    /// Quadrature-normalized values indexed `j * g_k + m`.
    pub fn values(&self, grid: &ModularGrid) -> Result<Vec<Complex64>> {
        let (gt, gk) = (grid.g_theta(), grid.g_k());
        let raw: Vec<Complex64> = match self {
            EnvelopeSpec::Constant => vec![Complex64::new(1.0, 0.0); gt * gk],
            EnvelopeSpec::Gaussian { center, widths } => {
                if !(widths[0] > 0.0 && widths[1] > 0.0) {
                    return Err(Error::InvalidParameter(format!("envelope widths {widths:?}")));
                }
                let mut v = Vec::with_capacity(gt * gk);
                for j in 0..gt {
                    let x = (grid.theta(j) - center[0]) / widths[0];
                    for m in 0..gk {
                        let y = (grid.k(m) - center[1]) / widths[1];
                        v.push(Complex64::new((-(x * x + y * y) / 4.0).exp(), 0.0));
                    }
                }
                v
            }
            EnvelopeSpec::Tabulated { table } => {
                if table.len() != gt || table.iter().any(|row| row.len() != gk) {
                    return Err(Error::ShapeMismatch {
                        expected: gt * gk,
                        actual: table.iter().map(Vec::len).sum(),
                    });
                }
                table
                    .iter()
                    .flatten()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect()
            }
        };
        let norm: f64 = raw.iter().map(|a| a.norm_sqr()).sum::<f64>() * grid.d_theta() * grid.d_k();
        if norm.is_nan() || norm < ZERO_NORM {
            return Err(Error::ZeroNorm);
        }
        let s = 1.0 / norm.sqrt();
        Ok(raw.into_iter().map(|a| a * s).collect())
    }
}

/// `|0̄⟩` (`bit = 0`) or `|1̄⟩` (`bit = 1`) with envelope `env`.
pub fn logical_state(env: &EnvelopeSpec, grid: &ModularGrid, bit: usize) -> Result<ModeState> {
    let g = grid.mode_grid();
    let values = env.values(&g)?;
    let zero = Complex64::new(0.0, 0.0);
    Ok(ModeState::from_fn(g, |j, m, b| {
        if b == bit {
            values[j * g.g_k() + m]
        } else {
            zero
        }
    }))
}

pub fn logical_zero(env: &EnvelopeSpec, grid: &ModularGrid) -> Result<ModeState> {
    logical_state(env, grid, 0)
}

pub fn logical_one(env: &EnvelopeSpec, grid: &ModularGrid) -> Result<ModeState> {
    logical_state(env, grid, 1)
}

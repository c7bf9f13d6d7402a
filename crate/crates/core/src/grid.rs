//! Discretization of the modular domain.
//!
//! Each mode carries a midpoint grid over the half range `θ̄ ∈ [0, π)` and the
//! modular momentum `k̄ ∈ [0, 1)`. The upper half `[π, 2π)` of the modular
//! position is not sampled; it is addressed through the band bit of each
//! cell, so every cell holds one two-level system per mode.
//!
//! Joint cells are enumerated lexicographically: the θ̄ indices of modes
//! `1..n` first, then the k̄ indices of modes `1..n`, with the last index
//! running fastest. Band strings use mode 1 as the most significant bit.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of modes stored densely.
pub const MAX_MODES: usize = 4;

/// Upper bound on amplitudes per state (2 GiB of `Complex64`).
pub const MAX_AMPLITUDES: usize = 1 << 27;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModularGrid {
    n_modes: usize,
    g_theta: usize,
    g_k: usize,
}

impl ModularGrid {
    pub fn new(n_modes: usize, g_theta: usize, g_k: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::ZeroSize("n_modes"));
        }
        if g_theta == 0 {
            return Err(Error::ZeroSize("g_theta"));
        }
        if g_k == 0 {
            return Err(Error::ZeroSize("g_k"));
        }
        if n_modes > MAX_MODES {
            return Err(Error::CapacityExceeded(format!(
                "{n_modes} modes requested, dense storage supports at most {MAX_MODES}"
            )));
        }
        let per_mode = g_theta.checked_mul(g_k).map(|c| c * 2);
        let total = per_mode.and_then(|c| c.checked_pow(n_modes as u32));
        match total {
            Some(t) if t <= MAX_AMPLITUDES => {}
            _ => {
                return Err(Error::CapacityExceeded(format!(
                    "grid {g_theta}x{g_k} with {n_modes} modes exceeds {MAX_AMPLITUDES} amplitudes"
                )))
            }
        }
        Ok(Self {
            n_modes,
            g_theta,
            g_k,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn g_theta(&self) -> usize {
        self.g_theta
    }

    pub fn g_k(&self) -> usize {
        self.g_k
    }

    pub fn d_theta(&self) -> f64 {
        PI / self.g_theta as f64
    }

    pub fn d_k(&self) -> f64 {
        1.0 / self.g_k as f64
    }

    /// Midpoint `θ̄_j = (j + ½)·Δθ̄`.
    pub fn theta(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.d_theta()
    }

    /// Midpoint `k̄_m = (m + ½)·Δk̄`.
    pub fn k(&self, m: usize) -> f64 {
        (m as f64 + 0.5) * self.d_k()
    }

    /// Quadrature weight of one joint cell, `(Δθ̄·Δk̄)^n`.
    pub fn cell_weight(&self) -> f64 {
        (self.d_theta() * self.d_k()).powi(self.n_modes as i32)
    }

    /// Band-space dimension `2^n`.
    pub fn bands(&self) -> usize {
        1 << self.n_modes
    }

    pub fn theta_cells(&self) -> usize {
        self.g_theta.pow(self.n_modes as u32)
    }

    pub fn k_cells(&self) -> usize {
        self.g_k.pow(self.n_modes as u32)
    }

    pub fn n_cells(&self) -> usize {
        self.theta_cells() * self.k_cells()
    }

    /// Number of amplitudes of a state without ancilla.
    pub fn len(&self) -> usize {
        self.n_cells() * self.bands()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The single-mode grid with the same sampling.
    pub fn mode_grid(&self) -> ModularGrid {
        ModularGrid {
            n_modes: 1,
            ..*self
        }
    }

    pub fn with_modes(&self, n_modes: usize) -> Result<ModularGrid> {
        ModularGrid::new(n_modes, self.g_theta, self.g_k)
    }

    /// Same per-mode sampling, ignoring the mode count.
    pub fn same_sampling(&self, other: &ModularGrid) -> bool {
        self.g_theta == other.g_theta && self.g_k == other.g_k
    }

    /// Joint θ̄ index of a cell (the part selecting band matrices that depend on θ̄ only).
    pub fn theta_part(&self, cell: usize) -> usize {
        cell / self.k_cells()
    }

    /// θ̄ index of `mode` within joint cell `cell`.
    pub fn theta_index(&self, cell: usize, mode: usize) -> usize {
        let shift = self.n_modes - 1 - mode;
        (self.theta_part(cell) / self.g_theta.pow(shift as u32)) % self.g_theta
    }

    /// k̄ index of `mode` within joint cell `cell`.
    pub fn k_index(&self, cell: usize, mode: usize) -> usize {
        let shift = self.n_modes - 1 - mode;
        ((cell % self.k_cells()) / self.g_k.pow(shift as u32)) % self.g_k
    }

    /// Per-mode `(j, m)` index pairs of a joint cell.
    pub fn cell_coords(&self, cell: usize) -> Vec<(usize, usize)> {
        (0..self.n_modes)
            .map(|i| (self.theta_index(cell, i), self.k_index(cell, i)))
            .collect()
    }

    /// Joint cell index from per-mode `(j, m)` pairs.
    pub fn cell_from_coords(&self, coords: &[(usize, usize)]) -> usize {
        let theta = coords.iter().fold(0, |acc, &(j, _)| acc * self.g_theta + j);
        let k = coords.iter().fold(0, |acc, &(_, m)| acc * self.g_k + m);
        theta * self.k_cells() + k
    }

    /// Multiplies per-mode tables (indexed `j * g_k + m`) into one value per joint cell.
    pub fn product_over_modes(&self, tables: &[&[f64]]) -> Vec<f64> {
        debug_assert_eq!(tables.len(), self.n_modes);
        (0..self.n_cells())
            .map(|cell| {
                tables
                    .iter()
                    .enumerate()
                    .map(|(i, t)| t[self.theta_index(cell, i) * self.g_k + self.k_index(cell, i)])
                    .product()
            })
            .collect()
    }
}

pub fn make_grid(n_modes: usize, g_theta: usize, g_k: usize) -> Result<ModularGrid> {
    ModularGrid::new(n_modes, g_theta, g_k)
}

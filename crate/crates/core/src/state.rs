//! Amplitude tensors over grid cells and logical bands.
//!
//! A [`JointState`] stores `2^n` band amplitudes per joint cell, laid out as
//! described in [`crate::grid`]. States produced by a unitary dilation carry
//! one extra ancilla bit, stored as the fastest band bit.
//!
//! All reductions sum in storage order (lexicographic over cells, then
//! bands), so results are reproducible bit for bit.

use std::ops::Deref;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::ModularGrid;

/// Norms below this are treated as zero by [`JointState::normalize`].
pub const ZERO_NORM: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    grid: ModularGrid,
    ancilla: bool,
    amp: Vec<Complex64>,
}

impl JointState {
    pub fn zeros(grid: ModularGrid) -> Self {
        Self {
            grid,
            ancilla: false,
            amp: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_amplitudes(grid: ModularGrid, amp: Vec<Complex64>) -> Result<Self> {
        if amp.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                actual: amp.len(),
            });
        }
        Ok(Self {
            grid,
            ancilla: false,
            amp,
        })
    }

    /// Builds a state whose cells carry an extra ancilla bit.
    pub fn from_amplitudes_with_ancilla(grid: ModularGrid, amp: Vec<Complex64>) -> Result<Self> {
        if amp.len() != 2 * grid.len() {
            return Err(Error::ShapeMismatch {
                expected: 2 * grid.len(),
                actual: amp.len(),
            });
        }
        Ok(Self {
            grid,
            ancilla: true,
            amp,
        })
    }

    pub fn grid(&self) -> &ModularGrid {
        &self.grid
    }

    pub fn has_ancilla(&self) -> bool {
        self.ancilla
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amp
    }

    /// Amplitudes per cell: `2^n`, doubled when the ancilla is present.
    pub fn block_len(&self) -> usize {
        self.grid.bands() << usize::from(self.ancilla)
    }

    pub fn cell(&self, cell: usize) -> &[Complex64] {
        let b = self.block_len();
        &self.amp[cell * b..(cell + 1) * b]
    }

    pub fn band_amplitude(&self, cell: usize, band: usize) -> Complex64 {
        self.cell(cell)[band]
    }

    /// `Σ |amp|² · (Δθ̄·Δk̄)^n`.
    pub fn quad_norm(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.cell_weight()
    }

    /// Quadrature inner product `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &JointState) -> Result<Complex64> {
        if self.grid != other.grid || self.ancilla != other.ancilla {
            return Err(Error::GridMismatch);
        }
        let s: Complex64 = self
            .amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid.cell_weight())
    }

    pub fn scale(&self, factor: Complex64) -> JointState {
        JointState {
            amp: self.amp.iter().map(|a| a * factor).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &JointState) -> Result<JointState> {
        if self.grid != other.grid || self.ancilla != other.ancilla {
            return Err(Error::GridMismatch);
        }
        Ok(JointState {
            amp: self.amp.iter().zip(&other.amp).map(|(a, b)| a + b).collect(),
            ..self.clone()
        })
    }

    pub fn normalize(&self) -> Result<JointState> {
        let norm = self.quad_norm();
        if norm.is_nan() || norm < ZERO_NORM {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scale(Complex64::new(1.0 / norm.sqrt(), 0.0)))
    }

    /// Largest `|a_i − b_i|` over all amplitudes.
    pub fn max_abs_diff(&self, other: &JointState) -> Result<f64> {
        if self.grid != other.grid || self.ancilla != other.ancilla {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Embeds the state with the ancilla bit prepared in `|0⟩`.
    pub fn with_ancilla(&self) -> Result<JointState> {
        if self.ancilla {
            return Err(Error::AncillaMismatch);
        }
        let mut amp = Vec::with_capacity(2 * self.amp.len());
        for a in &self.amp {
            amp.push(*a);
            amp.push(Complex64::new(0.0, 0.0));
        }
        JointState::from_amplitudes_with_ancilla(self.grid, amp)
    }

    /// The component with ancilla value `value`, as a state without ancilla.
    pub fn ancilla_branch(&self, value: usize) -> Result<JointState> {
        if !self.ancilla || value > 1 {
            return Err(Error::AncillaMismatch);
        }
        let amp = self.amp.iter().skip(value).step_by(2).copied().collect();
        JointState::from_amplitudes(self.grid, amp)
    }

    /// Quadrature weight carried by each logical band string.
    pub fn band_marginals(&self) -> Vec<f64> {
        let b = self.block_len();
        let mut out = vec![0.0; b];
        for block in self.amp.chunks_exact(b) {
            for (o, a) in out.iter_mut().zip(block) {
                *o += a.norm_sqr();
            }
        }
        let w = self.grid.cell_weight();
        out.iter_mut().for_each(|o| *o *= w);
        out
    }
}

/// A single-mode state: `amp[j][m][b]` over `g_theta × g_k × 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState(JointState);

impl ModeState {
    pub fn zeros(grid: ModularGrid) -> Self {
        ModeState(JointState::zeros(grid.mode_grid()))
    }

    pub fn from_amplitudes(grid: ModularGrid, amp: Vec<Complex64>) -> Result<Self> {
        if grid.n_modes() != 1 {
            return Err(Error::GridMismatch);
        }
        JointState::from_amplitudes(grid, amp).map(ModeState)
    }

    /// Fills every `(j, m, b)` entry from a function.
    pub fn from_fn(grid: ModularGrid, f: impl Fn(usize, usize, usize) -> Complex64) -> Self {
        let grid = grid.mode_grid();
        let mut amp = Vec::with_capacity(grid.len());
        for j in 0..grid.g_theta() {
            for m in 0..grid.g_k() {
                for b in 0..2 {
                    amp.push(f(j, m, b));
                }
            }
        }
        ModeState(JointState {
            grid,
            ancilla: false,
            amp,
        })
    }

    pub fn amp(&self, j: usize, m: usize, b: usize) -> Complex64 {
        self.0.amp[(j * self.0.grid.g_k() + m) * 2 + b]
    }

    pub fn as_joint(&self) -> &JointState {
        &self.0
    }

    pub fn into_joint(self) -> JointState {
        self.0
    }

    pub fn normalize(&self) -> Result<ModeState> {
        self.0.normalize().map(ModeState)
    }
}

impl Deref for ModeState {
    type Target = JointState;

    fn deref(&self) -> &JointState {
        &self.0
    }
}

impl TryFrom<JointState> for ModeState {
    type Error = Error;

    fn try_from(s: JointState) -> Result<Self> {
        if s.grid.n_modes() != 1 || s.ancilla {
            return Err(Error::GridMismatch);
        }
        Ok(ModeState(s))
    }
}

/// Outer product of single-mode states, reordered into the joint layout.
pub fn tensor(modes: &[ModeState]) -> Result<JointState> {
    let first = modes.first().ok_or(Error::ZeroSize("n_modes"))?;
    if modes.iter().any(|m| !m.grid.same_sampling(&first.grid)) {
        return Err(Error::GridMismatch);
    }
    let grid = first.grid.with_modes(modes.len())?;
    let n = grid.n_modes();
    let bands = grid.bands();
    let mut amp = Vec::with_capacity(grid.len());
    let mut coords = vec![(0usize, 0usize); n];
    for cell in 0..grid.n_cells() {
        for (i, c) in coords.iter_mut().enumerate() {
            *c = (grid.theta_index(cell, i), grid.k_index(cell, i));
        }
        for band in 0..bands {
            let mut a = Complex64::new(1.0, 0.0);
            for (i, &(j, m)) in coords.iter().enumerate() {
                let bit = (band >> (n - 1 - i)) & 1;
                a *= modes[i].amp(j, m, bit);
            }
            amp.push(a);
        }
    }
    JointState::from_amplitudes(grid, amp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid1() -> ModularGrid {
        ModularGrid::new(1, 4, 3).unwrap()
    }

    #[test]
    fn constant_amplitude_is_normalized() {
        let h = 1.0 / (2.0 * PI).sqrt();
        let s = ModeState::from_fn(grid1(), |_, _, _| c(h, 0.0));
        assert_abs_diff_eq!(s.quad_norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_state_norm_and_normalize() {
        let s = JointState::zeros(grid1());
        assert_eq!(s.quad_norm(), 0.0);
        assert_eq!(s.normalize(), Err(Error::ZeroNorm));
    }

    #[test]
    fn wrong_length_rejected() {
        let err = JointState::from_amplitudes(grid1(), vec![c(0.0, 0.0); 5]).unwrap_err();
        assert_eq!(
            err,
            Error::ShapeMismatch {
                expected: 24,
                actual: 5
            }
        );
    }

    #[test]
    fn inner_matches_norm_and_grid_checked() {
        let s = ModeState::from_fn(grid1(), |j, m, b| c(j as f64 + 0.5, (m + b) as f64));
        let ip = s.inner(&s).unwrap();
        assert_abs_diff_eq!(ip.re, s.quad_norm(), epsilon = 1e-12);
        assert_eq!(ip.im, 0.0);
        let other = JointState::zeros(ModularGrid::new(1, 2, 3).unwrap());
        assert_eq!(s.inner(&other), Err(Error::GridMismatch));
    }

    #[test]
    fn disjoint_band_support_is_orthogonal() {
        let a = ModeState::from_fn(grid1(), |j, _, b| c(if b == 0 { j as f64 } else { 0.0 }, 0.0));
        let b = ModeState::from_fn(grid1(), |_, m, b| c(0.0, if b == 1 { m as f64 } else { 0.0 }));
        assert_eq!(a.inner(&b).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn normalize_rescales() {
        let s = ModeState::from_fn(grid1(), |j, m, b| c((j + m + b) as f64, 1.0))
            .normalize()
            .unwrap();
        assert_abs_diff_eq!(s.quad_norm(), 1.0, epsilon = 1e-12);
        let again = s.normalize().unwrap();
        assert!(again.max_abs_diff(&s).unwrap() < 1e-12);
        let tripled = s.scale(c(3.0, 0.0)).normalize().unwrap();
        assert!(tripled.max_abs_diff(&s).unwrap() < 1e-12);
    }

    #[test]
    fn tensor_of_one_is_copy() {
        let s = ModeState::from_fn(grid1(), |j, m, b| c(j as f64, (m * b) as f64));
        let t = tensor(std::slice::from_ref(&s)).unwrap();
        assert_eq!(&t, s.as_joint());
    }

    #[test]
    fn tensor_layout_and_norm() {
        let g = grid1();
        let a = ModeState::from_fn(g, |j, m, b| c(1.0 + j as f64, b as f64 - m as f64)).normalize().unwrap();
        let b = ModeState::from_fn(g, |j, m, b| c((m + 2 * b) as f64, j as f64)).normalize().unwrap();
        let t = tensor(&[a.clone(), b.clone()]).unwrap();
        assert_abs_diff_eq!(t.quad_norm(), 1.0, epsilon = 1e-12);
        let jg = t.grid();
        let cell = jg.cell_from_coords(&[(3, 1), (0, 2)]);
        assert_eq!(t.band_amplitude(cell, 0b10), a.amp(3, 1, 1) * b.amp(0, 2, 0));
        assert_eq!(t.band_amplitude(cell, 0b01), a.amp(3, 1, 0) * b.amp(0, 2, 1));
    }

    #[test]
    fn tensor_rejects_mismatched_sampling() {
        let a = ModeState::zeros(ModularGrid::new(1, 2, 2).unwrap());
        let b = ModeState::zeros(ModularGrid::new(1, 3, 2).unwrap());
        assert_eq!(tensor(&[a, b]), Err(Error::GridMismatch));
    }

    #[test]
    fn ancilla_embedding_and_branches() {
        let s = ModeState::from_fn(grid1(), |j, m, b| c(j as f64, (m + b) as f64));
        let e = s.with_ancilla().unwrap();
        assert_eq!(e.block_len(), 4);
        assert_abs_diff_eq!(e.quad_norm(), s.quad_norm(), epsilon = 1e-15);
        assert_eq!(&e.ancilla_branch(0).unwrap(), s.as_joint());
        assert_eq!(e.ancilla_branch(1).unwrap().quad_norm(), 0.0);
        assert_eq!(s.ancilla_branch(0), Err(Error::AncillaMismatch));
    }
}

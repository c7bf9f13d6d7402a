//! Cell-indexed operator families.
//!
//! A [`GlobalOperator`] holds one `2^n × 2^n` band matrix per joint cell and a
//! real weight per cell. Application is strictly cell-local:
//! `out[cell] = w(cell) · M(cell) · in[cell]`. Matrices that depend on the
//! cell at all (interval-set oracles) depend on the θ̄ coordinates only, so
//! they are stored as a small palette plus a per-θ̄-cell selector.
//!
//! The unitary dilation of a weighted Grover operator acts on states with one
//! extra ancilla bit: `U(cell) = Ĝ(cell) ⊗ (w·σ_x + w'·σ_z)` with
//! `w' = √(1 − w²)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::band::{self, BandMatrix};
use crate::error::{Error, Result};
use crate::grid::{ModularGrid, MAX_MODES};
use crate::state::JointState;

/// Tolerance on `|w| ≤ 1` for the dilation.
pub const WEIGHT_RANGE_TOLERANCE: f64 = 1e-12;

/// A logical bit string `b_1 … b_n`, mode 1 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogicalString(Vec<u8>);

impl LogicalString {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() || bits.len() > MAX_MODES || bits.iter().any(|&b| b > 1) {
            return Err(Error::BadTarget(format!("invalid bit string {bits:?}")));
        }
        Ok(Self(bits))
    }

    pub fn from_index(index: usize, n_modes: usize) -> Self {
        Self((0..n_modes).map(|i| ((index >> (n_modes - 1 - i)) & 1) as u8).collect())
    }

    /// All `2^n` strings in band order.
    pub fn all(n_modes: usize) -> Vec<LogicalString> {
        (0..1usize << n_modes).map(|i| Self::from_index(i, n_modes)).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    /// Band index with mode 1 as the most significant bit.
    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }
}

impl fmt::Display for LogicalString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for LogicalString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::BadTarget(format!("`{s}` is not a bit string"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(bits)
    }
}

impl Serialize for LogicalString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LogicalString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Finite union of half-open intervals `[a, b)` inside `[0, π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct IntervalSet(Vec<[f64; 2]>);

impl IntervalSet {
    pub fn new(intervals: Vec<[f64; 2]>) -> Result<Self> {
        if intervals.iter().any(|&[a, b]| !(a.is_finite() && b.is_finite() && a <= b)) {
            return Err(Error::BadTarget(format!("malformed intervals {intervals:?}")));
        }
        Ok(Self(intervals))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn full() -> Self {
        Self(vec![[0.0, PI]])
    }

    pub fn intervals(&self) -> &[[f64; 2]] {
        &self.0
    }

    /// Characteristic function `χ_S(θ̄)`.
    pub fn contains(&self, theta: f64) -> bool {
        self.0.iter().any(|&[a, b]| a <= theta && theta < b)
    }
}

/// The searched item(s).
#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpec {
    /// Constant sets (`S_i` empty or full): one or more logical strings.
    Constant(Vec<LogicalString>),
    /// One interval set per mode; the target band varies with θ̄.
    Intervals(Vec<IntervalSet>),
}

impl TargetSpec {
    pub fn single(s: LogicalString) -> Self {
        TargetSpec::Constant(vec![s])
    }

    pub fn n_modes(&self) -> usize {
        match self {
            TargetSpec::Constant(v) => v.first().map_or(0, LogicalString::len),
            TargetSpec::Intervals(v) => v.len(),
        }
    }

    pub fn m_targets(&self) -> usize {
        match self {
            TargetSpec::Constant(v) => v.len(),
            TargetSpec::Intervals(_) => 1,
        }
    }

    pub fn validate(&self, n_modes: usize) -> Result<()> {
        match self {
            TargetSpec::Constant(v) => {
                if v.is_empty() {
                    return Err(Error::BadTarget("no target strings".into()));
                }
                if let Some(s) = v.iter().find(|s| s.len() != n_modes) {
                    return Err(Error::BadTarget(format!("`{s}` does not have {n_modes} bits")));
                }
                let mut seen = std::collections::BTreeSet::new();
                for s in v {
                    if !seen.insert(s) {
                        return Err(Error::DuplicateTarget(s.to_string()));
                    }
                }
                Ok(())
            }
            TargetSpec::Intervals(v) if v.len() != n_modes => Err(Error::BadTarget(format!(
                "{} interval sets for {n_modes} modes",
                v.len()
            ))),
            TargetSpec::Intervals(_) => Ok(()),
        }
    }

    /// Target band indices for the cells with θ̄ part `theta_part`.
    pub fn bands_at(&self, grid: &ModularGrid, theta_part: usize) -> Vec<usize> {
        match self {
            TargetSpec::Constant(v) => v.iter().map(LogicalString::index).collect(),
            TargetSpec::Intervals(sets) => {
                let n = grid.n_modes();
                let band = sets.iter().enumerate().fold(0, |acc, (i, set)| {
                    let j = (theta_part / grid.g_theta().pow((n - 1 - i) as u32)) % grid.g_theta();
                    (acc << 1) | usize::from(set.contains(grid.theta(j)))
                });
                vec![band]
            }
        }
    }
}

/// A real weight function `ζ(θ̄, k̄)` tabulated on one mode's grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    g_theta: usize,
    g_k: usize,
    values: Vec<f64>,
}

impl WeightTable {
    pub fn constant(grid: &ModularGrid, value: f64) -> Result<Self> {
        Self::from_values(grid, vec![value; grid.g_theta() * grid.g_k()])
    }

    pub fn from_fn(grid: &ModularGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = (0..grid.g_theta())
            .flat_map(|j| (0..grid.g_k()).map(move |m| (j, m)))
            .map(|(j, m)| f(grid.theta(j), grid.k(m)))
            .collect();
        Self::from_values(grid, values)
    }

    /// Values indexed `j * g_k + m`.
    pub fn from_values(grid: &ModularGrid, values: Vec<f64>) -> Result<Self> {
        let expected = grid.g_theta() * grid.g_k();
        if values.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                actual: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonRealWeight(format!("non-finite weight {v}")));
        }
        Ok(Self {
            g_theta: grid.g_theta(),
            g_k: grid.g_k(),
            values,
        })
    }

    /// Accepts complex samples only when every imaginary part is exactly zero.
    pub fn from_complex(grid: &ModularGrid, values: &[Complex64]) -> Result<Self> {
        if let Some(z) = values.iter().find(|z| z.im != 0.0) {
            return Err(Error::NonRealWeight(format!("weight {z} has an imaginary part")));
        }
        Self::from_values(grid, values.iter().map(|z| z.re).collect())
    }

    pub fn value(&self, j: usize, m: usize) -> f64 {
        self.values[j * self.g_k + m]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn check(&self, grid: &ModularGrid) -> Result<()> {
        if self.g_theta != grid.g_theta() || self.g_k != grid.g_k() {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

/// Configurable weight function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ZetaSpec {
    Constant {
        value: f64,
    },
    /// `amplitude · cos(frequency · θ̄ + phase)`.
    Cosine {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `values[j][m]`.
    Table { values: Vec<Vec<f64>> },
}

fn one() -> f64 {
    1.0
}

impl ZetaSpec {
    pub fn unit() -> Self {
        ZetaSpec::Constant { value: 1.0 }
    }

    pub fn table(&self, grid: &ModularGrid) -> Result<WeightTable> {
        match self {
            ZetaSpec::Constant { value } => WeightTable::constant(grid, *value),
            ZetaSpec::Cosine {
                amplitude,
                frequency,
                phase,
            } => WeightTable::from_fn(grid, |t, _| amplitude * (frequency * t + phase).cos()),
            ZetaSpec::Table { values } => {
                if values.len() != grid.g_theta() || values.iter().any(|r| r.len() != grid.g_k()) {
                    return Err(Error::ShapeMismatch {
                        expected: grid.g_theta() * grid.g_k(),
                        actual: values.iter().map(Vec::len).sum(),
                    });
                }
                WeightTable::from_values(grid, values.concat())
            }
        }
    }
}

/// Multiplies per-mode weight tables into one weight per joint cell.
pub fn joint_weights(zetas: &[WeightTable], grid: &ModularGrid) -> Result<Vec<f64>> {
    if zetas.len() != grid.n_modes() {
        return Err(Error::BadMode {
            mode: zetas.len(),
            n_modes: grid.n_modes(),
        });
    }
    for z in zetas {
        z.check(grid)?;
    }
    let tables: Vec<&[f64]> = zetas.iter().map(|z| z.values.as_slice()).collect();
    Ok(grid.product_over_modes(&tables))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn matrix(self) -> BandMatrix {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        let i = Complex64::new(0.0, 1.0);
        match self {
            Axis::X => BandMatrix::from_row_slice(2, 2, &[z, o, o, z]),
            Axis::Y => BandMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
            Axis::Z => BandMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        }
    }
}

/// Overall sign of the cell Grover operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GlobalPhase {
    /// `−H·I₀·H·I_s`, which sends the uniform vector to `+|target⟩` for `N = 4`.
    #[default]
    Negative,
    /// `+H·I₀·H·I_s = I_L·I_s`.
    Positive,
}

impl GlobalPhase {
    pub fn sign(self) -> f64 {
        match self {
            GlobalPhase::Negative => -1.0,
            GlobalPhase::Positive => 1.0,
        }
    }
}

/// Per-cell matrix `phase · H·I₀·H·I_s` for the given target bands.
pub fn grover_matrix(n_modes: usize, targets: &[usize], phase: GlobalPhase) -> BandMatrix {
    let dim = 1 << n_modes;
    let h = band::hadamard(n_modes);
    let i0 = band::reflection(dim, &[0]);
    let is = band::reflection(dim, targets);
    (&h * &i0 * &h * &is) * Complex64::new(phase.sign(), 0.0)
}

/// `I_L = 1 − 2|Ψ_L⟩⟨Ψ_L|`, built from the uniform vector directly.
pub fn list_reflection(n_modes: usize) -> BandMatrix {
    band::reflection_about(&band::uniform(n_modes))
}

#[derive(Debug, Clone)]
enum Selector {
    Uniform,
    ByTheta(Vec<u32>),
}

#[derive(Debug, Clone)]
pub struct GlobalOperator {
    grid: ModularGrid,
    palette: Vec<BandMatrix>,
    selector: Selector,
    weights: Option<Vec<f64>>,
    dilation: Option<Vec<f64>>,
}

impl GlobalOperator {
    fn uniform(grid: ModularGrid, m: BandMatrix) -> Self {
        Self {
            grid,
            palette: vec![m],
            selector: Selector::Uniform,
            weights: None,
            dilation: None,
        }
    }

    /// Builds a family whose matrix depends on the target bands at each θ̄ cell.
    fn from_targets(grid: ModularGrid, target: &TargetSpec, build: impl Fn(&[usize]) -> BandMatrix) -> Result<Self> {
        target.validate(grid.n_modes())?;
        match target {
            TargetSpec::Constant(_) => Ok(Self::uniform(grid, build(&target.bands_at(&grid, 0)))),
            TargetSpec::Intervals(_) => {
                let mut cache: BTreeMap<Vec<usize>, u32> = BTreeMap::new();
                let mut palette = Vec::new();
                let selector = (0..grid.theta_cells())
                    .map(|t| {
                        let bands = target.bands_at(&grid, t);
                        *cache.entry(bands).or_insert_with_key(|b| {
                            palette.push(build(b));
                            (palette.len() - 1) as u32
                        })
                    })
                    .collect();
                Ok(Self {
                    grid,
                    palette,
                    selector: Selector::ByTheta(selector),
                    weights: None,
                    dilation: None,
                })
            }
        }
    }

    pub fn identity(grid: ModularGrid) -> Self {
        Self::uniform(grid, band::identity(grid.bands()))
    }

    /// Replaces the per-cell weights.
    pub fn with_cell_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.grid.n_cells() {
            return Err(Error::ShapeMismatch {
                expected: self.grid.n_cells(),
                actual: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
            return Err(Error::NonRealWeight(format!("non-finite weight {w}")));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn grid(&self) -> &ModularGrid {
        &self.grid
    }

    pub fn has_ancilla(&self) -> bool {
        self.dilation.is_some()
    }

    /// Dimension of one cell matrix, including the ancilla bit if present.
    pub fn dim(&self) -> usize {
        self.grid.bands() << usize::from(self.has_ancilla())
    }

    pub fn weight(&self, cell: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[cell])
    }

    /// The band matrix of `cell`, without weight or ancilla factor.
    pub fn band_matrix(&self, cell: usize) -> &BandMatrix {
        match &self.selector {
            Selector::Uniform => &self.palette[0],
            Selector::ByTheta(sel) => &self.palette[sel[self.grid.theta_part(cell)] as usize],
        }
    }

    /// Full matrix acting on `cell`, including weight and ancilla coupling.
    pub fn cell_matrix(&self, cell: usize) -> BandMatrix {
        let m = self.band_matrix(cell) * Complex64::new(self.weight(cell), 0.0);
        match &self.dilation {
            None => m,
            Some(w) => m.kronecker(&ancilla_rotation(w[cell])),
        }
    }

    /// Number of distinct band matrices stored.
    pub fn palette_len(&self) -> usize {
        self.palette.len()
    }

    pub fn apply(&self, state: &JointState) -> Result<JointState> {
        if state.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        if state.has_ancilla() != self.has_ancilla() {
            return Err(Error::AncillaMismatch);
        }
        let bands = self.grid.bands();
        let block = state.block_len();
        let mut out = vec![Complex64::new(0.0, 0.0); state.amplitudes().len()];
        let zero = Complex64::new(0.0, 0.0);
        out.par_chunks_mut(block)
            .zip(state.amplitudes().par_chunks(block))
            .enumerate()
            .for_each(|(cell, (y, x))| {
                let m = self.band_matrix(cell);
                match &self.dilation {
                    None => {
                        band::mat_vec(m, x, y);
                        let w = self.weight(cell);
                        if w != 1.0 {
                            y.iter_mut().for_each(|v| *v *= w);
                        }
                    }
                    Some(dw) => {
                        let mut xs = [[zero; 1 << MAX_MODES]; 2];
                        let mut zs = [[zero; 1 << MAX_MODES]; 2];
                        for b in 0..bands {
                            xs[0][b] = x[2 * b];
                            xs[1][b] = x[2 * b + 1];
                        }
                        for a in 0..2 {
                            band::mat_vec(m, &xs[a][..bands], &mut zs[a][..bands]);
                        }
                        let r = ancilla_rotation(dw[cell]);
                        for b in 0..bands {
                            y[2 * b] = r[(0, 0)] * zs[0][b] + r[(0, 1)] * zs[1][b];
                            y[2 * b + 1] = r[(1, 0)] * zs[0][b] + r[(1, 1)] * zs[1][b];
                        }
                    }
                }
            });
        if state.has_ancilla() {
            JointState::from_amplitudes_with_ancilla(self.grid, out)
        } else {
            JointState::from_amplitudes(self.grid, out)
        }
    }

    /// Applies `self` `times` times.
    pub fn apply_n(&self, state: &JointState, times: usize) -> Result<JointState> {
        let mut s = state.clone();
        for _ in 0..times {
            s = self.apply(&s)?;
        }
        Ok(s)
    }
}

/// `w·σ_x + √(1−w²)·σ_z`.
fn ancilla_rotation(w: f64) -> BandMatrix {
    let wc = complement(w);
    BandMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(wc, 0.0),
            Complex64::new(w, 0.0),
            Complex64::new(w, 0.0),
            Complex64::new(-wc, 0.0),
        ],
    )
}

fn complement(w: f64) -> f64 {
    (1.0 - w * w).max(0.0).sqrt()
}

pub fn apply(op: &GlobalOperator, state: &JointState) -> Result<JointState> {
    op.apply(state)
}

fn check_mode(mode: usize, grid: &ModularGrid) -> Result<()> {
    if mode >= grid.n_modes() {
        return Err(Error::BadMode {
            mode,
            n_modes: grid.n_modes(),
        });
    }
    Ok(())
}

/// Pauli matrix on one mode's band bit, identity elsewhere.
pub fn pauli(axis: Axis, mode: usize, grid: &ModularGrid) -> Result<GlobalOperator> {
    check_mode(mode, grid)?;
    Ok(GlobalOperator::uniform(
        *grid,
        band::embed(&axis.matrix(), mode, grid.n_modes()),
    ))
}

/// `Γ_α = ∫ ζ σ_α`: the Pauli family weighted by `ζ(θ̄_mode, k̄_mode)`.
pub fn gamma(axis: Axis, mode: usize, zeta: &WeightTable, grid: &ModularGrid) -> Result<GlobalOperator> {
    check_mode(mode, grid)?;
    zeta.check(grid)?;
    let weights = (0..grid.n_cells())
        .map(|c| zeta.value(grid.theta_index(c, mode), grid.k_index(c, mode)))
        .collect();
    pauli(axis, mode, grid)?.with_cell_weights(weights)
}

pub fn hadamard(grid: &ModularGrid) -> GlobalOperator {
    GlobalOperator::uniform(*grid, band::hadamard(grid.n_modes()))
}

/// `I_s = 1 − 2 Σ_targets |s(cell)⟩⟨s(cell)|`.
pub fn oracle(target: &TargetSpec, grid: &ModularGrid) -> Result<GlobalOperator> {
    GlobalOperator::from_targets(*grid, target, |bands| band::reflection(grid.bands(), bands))
}

/// `I₀ = 1 − 2|0…0⟩⟨0…0|`.
pub fn inversion_about_zero(grid: &ModularGrid) -> GlobalOperator {
    GlobalOperator::uniform(*grid, band::reflection(grid.bands(), &[0]))
}

pub fn grover_cell(target: &TargetSpec, grid: &ModularGrid) -> Result<GlobalOperator> {
    grover_cell_with_phase(target, grid, GlobalPhase::Negative)
}

pub fn grover_cell_with_phase(target: &TargetSpec, grid: &ModularGrid, phase: GlobalPhase) -> Result<GlobalOperator> {
    let n = grid.n_modes();
    GlobalOperator::from_targets(*grid, target, |bands| grover_matrix(n, bands, phase))
}

/// Cell Grover operators weighted by `Π_i ζ_i(θ̄_i, k̄_i)`; not unitary in general.
pub fn grover_weighted(target: &TargetSpec, zetas: &[WeightTable], grid: &ModularGrid) -> Result<GlobalOperator> {
    grover_weighted_with_phase(target, zetas, grid, GlobalPhase::Negative)
}

pub fn grover_weighted_with_phase(
    target: &TargetSpec,
    zetas: &[WeightTable],
    grid: &ModularGrid,
    phase: GlobalPhase,
) -> Result<GlobalOperator> {
    let w = joint_weights(zetas, grid)?;
    grover_cell_with_phase(target, grid, phase)?.with_cell_weights(w)
}

fn checked_weights(zetas: &[WeightTable], grid: &ModularGrid) -> Result<Vec<f64>> {
    let w = joint_weights(zetas, grid)?;
    if let Some(&bad) = w.iter().find(|w| w.abs() > 1.0 + WEIGHT_RANGE_TOLERANCE) {
        return Err(Error::WeightOutOfRange(bad));
    }
    Ok(w)
}

/// The Kraus partner `G'` of [`grover_weighted`], weighted by `√(1 − w²)`.
pub fn kraus_complement(target: &TargetSpec, zetas: &[WeightTable], grid: &ModularGrid) -> Result<GlobalOperator> {
    let w = checked_weights(zetas, grid)?;
    grover_cell(target, grid)?.with_cell_weights(w.into_iter().map(complement).collect())
}

/// `U_G = G ⊗ σ_x + G' ⊗ σ_z` on states carrying an ancilla bit.
pub fn dilation(target: &TargetSpec, zetas: &[WeightTable], grid: &ModularGrid) -> Result<GlobalOperator> {
    dilation_with_phase(target, zetas, grid, GlobalPhase::Negative)
}

pub fn dilation_with_phase(
    target: &TargetSpec,
    zetas: &[WeightTable],
    grid: &ModularGrid,
    phase: GlobalPhase,
) -> Result<GlobalOperator> {
    let w = checked_weights(zetas, grid)?;
    let mut op = grover_cell_with_phase(target, grid, phase)?;
    op.dilation = Some(w);
    Ok(op)
}

/// Largest elementwise `|phase·H·I₀·H·I_s − phase·(I_L·I_s)|` over all cells.
///
/// `H·I₀·H = I_L`, so the two sides agree once both carry the same global
/// sign; with mismatched signs they differ by `2·(I_L·I_s)`.
pub fn grover_identity_residual(target: &TargetSpec, grid: &ModularGrid, phase: GlobalPhase) -> Result<f64> {
    let g = grover_cell_with_phase(target, grid, phase)?;
    let h = hadamard(grid);
    let i0 = inversion_about_zero(grid);
    let is = oracle(target, grid)?;
    let il = list_reflection(grid.n_modes());
    let sign = Complex64::new(phase.sign(), 0.0);
    let mut worst: f64 = 0.0;
    for cell in 0..grid.n_cells() {
        let s = is.band_matrix(cell);
        let lhs = (h.band_matrix(cell) * i0.band_matrix(cell) * h.band_matrix(cell) * s) * sign;
        let rhs = (&il * s) * sign;
        worst = worst
            .max(band::max_abs_diff(&lhs, &rhs))
            .max(band::max_abs_diff(g.band_matrix(cell), &lhs));
    }
    Ok(worst)
}

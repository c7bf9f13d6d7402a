//! The search pipeline: list preparation, weighted Grover iterations (or
//! their unitary dilation), readout against the logical basis, and the dense
//! qubit reference used to check every cell.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::ModularGrid;
use crate::operators::{
    dilation_with_phase, grover_weighted_with_phase, hadamard, joint_weights, GlobalPhase, LogicalString, TargetSpec,
    ZetaSpec,
};
use crate::state::{tensor, JointState, ZERO_NORM};
use crate::zak::{logical_state, logical_zero, EnvelopeSpec};

/// Default association threshold on `|overlap|`.
pub const DEFAULT_THRESHOLD: f64 = 1e-8;

/// Minimum weighted envelope mass `Σ |g|² w² ΔV` for a meaningful search.
pub const DEGENERATE_MASS: f64 = 1e-20;

/// Largest `n` accepted by [`reference_qubit_grover`].
pub const REFERENCE_MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Iterations {
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub grid: ModularGrid,
    pub envelopes: Vec<EnvelopeSpec>,
    pub target: TargetSpec,
    /// One weight function per mode; empty means `ζ ≡ 1`.
    pub zetas: Vec<ZetaSpec>,
    pub iterations: Iterations,
    pub use_dilation: bool,
    pub phase: GlobalPhase,
    pub threshold: f64,
}

impl SearchConfig {
    pub fn new(grid: ModularGrid, envelopes: Vec<EnvelopeSpec>, target: TargetSpec) -> Self {
        Self {
            grid,
            envelopes,
            target,
            zetas: Vec::new(),
            iterations: Iterations::Auto,
            use_dilation: false,
            phase: GlobalPhase::Negative,
            threshold: DEFAULT_THRESHOLD,
        }
    }

    pub fn with_zetas(mut self, zetas: Vec<ZetaSpec>) -> Self {
        self.zetas = zetas;
        self
    }

    pub fn with_iterations(mut self, iterations: Iterations) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_dilation(mut self, on: bool) -> Self {
        self.use_dilation = on;
        self
    }

    pub fn with_phase(mut self, phase: GlobalPhase) -> Self {
        self.phase = phase;
        self
    }

    pub fn n_modes(&self) -> usize {
        self.grid.n_modes()
    }

    pub fn resolved_iterations(&self) -> Result<usize> {
        match self.iterations {
            Iterations::Fixed(r) => Ok(r),
            Iterations::Auto => iteration_count(self.n_modes(), self.target.m_targets()),
        }
    }

    fn check(&self) -> Result<()> {
        let n = self.n_modes();
        if self.envelopes.len() != n {
            return Err(Error::InvalidParameter(format!(
                "{} envelopes for {n} modes",
                self.envelopes.len()
            )));
        }
        if !self.zetas.is_empty() && self.zetas.len() != n {
            return Err(Error::InvalidParameter(format!("{} weight functions for {n} modes", self.zetas.len())));
        }
        self.target.validate(n)
    }

    fn zeta_specs(&self) -> Vec<ZetaSpec> {
        if self.zetas.is_empty() {
            vec![ZetaSpec::unit(); self.n_modes()]
        } else {
            self.zetas.clone()
        }
    }
}

/// Outcome of the association step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Identification {
    Unique { string: LogicalString },
    /// Multi-target readout: every string above threshold.
    Set { strings: Vec<LogicalString> },
    Ambiguous { strings: Vec<LogicalString> },
    NoAssociation,
}

impl Identification {
    pub fn is_success(&self) -> bool {
        matches!(self, Identification::Unique { .. } | Identification::Set { .. })
    }

    pub fn unique(&self) -> Option<&LogicalString> {
        match self {
            Identification::Unique { string } => Some(string),
            _ => None,
        }
    }
}

/// Readout of one ancilla branch of a dilation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchReport {
    pub ancilla: usize,
    pub squared_norm: f64,
    pub overlaps: BTreeMap<LogicalString, Complex64>,
    pub identified: Identification,
    pub per_cell_max_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    /// Squared norm of the (selected branch of the) final state before normalization.
    pub norm_constant: f64,
    pub overlaps: BTreeMap<LogicalString, Complex64>,
    pub identified: Identification,
    pub per_cell_max_error: f64,
    pub iterations_used: usize,
    /// Most probable logical string and its squared overlap.
    pub most_likely: LogicalString,
    pub most_likely_probability: f64,
    /// Squared norms of the ancilla-0 and ancilla-1 branches (dilation runs only).
    pub ancilla_branch_norms: Option<[f64; 2]>,
    pub branches: Option<Vec<BranchReport>>,
}

/// `H^{⊗n}` applied to `|0̄⟩⊗…⊗|0̄⟩`.
pub fn build_list(envelopes: &[EnvelopeSpec], grid: &ModularGrid) -> Result<JointState> {
    let zeros = envelopes
        .iter()
        .map(|e| logical_zero(e, grid))
        .collect::<Result<Vec<_>>>()?;
    let blank = tensor(&zeros)?;
    hadamard(blank.grid()).apply(&blank)
}

/// The CV logical basis state `|s̄_1⟩⊗…⊗|s̄_n⟩`.
pub fn logical_basis_state(envelopes: &[EnvelopeSpec], grid: &ModularGrid, s: &LogicalString) -> Result<JointState> {
    let modes = envelopes
        .iter()
        .zip(s.bits())
        .map(|(e, &b)| logical_state(e, grid, b as usize))
        .collect::<Result<Vec<_>>>()?;
    tensor(&modes)
}

/// `floor(π / (4·asin(√(M/N))))`, at least 1.
pub fn iteration_count(n_modes: usize, m_targets: usize) -> Result<usize> {
    let n = 1usize.checked_shl(n_modes as u32).filter(|_| n_modes < 64).unwrap_or(usize::MAX);
    if m_targets == 0 || m_targets >= n {
        return Err(Error::BadTargetCount { m: m_targets, n });
    }
    let angle = (m_targets as f64 / n as f64).sqrt().asin();
    Ok(((PI / (4.0 * angle)).floor() as usize).max(1))
}

/// Dense qubit Grover: `r` applications of `(2|u⟩⟨u| − 1)(1 − 2Σ|t⟩⟨t|)` to `|u⟩`.
pub fn reference_qubit_grover(n: usize, targets: &[LogicalString], r: usize) -> Result<Vec<Complex64>> {
    if n > REFERENCE_MAX_QUBITS {
        return Err(Error::CapacityExceeded(format!(
            "reference Grover supports at most {REFERENCE_MAX_QUBITS} qubits"
        )));
    }
    if let Some(t) = targets.iter().find(|t| t.len() != n) {
        return Err(Error::BadTarget(format!("`{t}` does not have {n} bits")));
    }
    let dim = 1usize << n;
    let u = 1.0 / (dim as f64).sqrt();
    let mut v = vec![Complex64::new(u, 0.0); dim];
    for _ in 0..r {
        for t in targets {
            v[t.index()] = -v[t.index()];
        }
        let proj: Complex64 = v.iter().sum::<Complex64>() * u;
        for a in v.iter_mut() {
            *a = 2.0 * proj * u - *a;
        }
    }
    Ok(v)
}

/// The unique string with `|overlap| > threshold`.
pub fn identify(overlaps: &BTreeMap<LogicalString, Complex64>, threshold: f64) -> Result<LogicalString> {
    let above: Vec<&LogicalString> = overlaps
        .iter()
        .filter(|(_, o)| o.norm() > threshold)
        .map(|(s, _)| s)
        .collect();
    match above.as_slice() {
        [] => Err(Error::NoAssociation),
        [one] => Ok((*one).clone()),
        many => Err(Error::AmbiguousAssociation(many.iter().map(|s| s.to_string()).collect())),
    }
}

fn classify(overlaps: &BTreeMap<LogicalString, Complex64>, threshold: f64, multi: bool) -> Identification {
    let above: Vec<LogicalString> = overlaps
        .iter()
        .filter(|(_, o)| o.norm() > threshold)
        .map(|(s, _)| s.clone())
        .collect();
    match (above.len(), multi) {
        (0, _) => Identification::NoAssociation,
        (_, true) => Identification::Set { strings: above },
        (1, false) => Identification::Unique {
            string: above.into_iter().next().expect("one element"),
        },
        (_, false) => Identification::Ambiguous { strings: above },
    }
}

/// Shared per-cell data for one configuration.
struct Context {
    grid: ModularGrid,
    /// `Π_i g_i(cell)`.
    envelope: Vec<Complex64>,
    weights: Vec<f64>,
    list: JointState,
}

impl Context {
    fn new(cfg: &SearchConfig) -> Result<Self> {
        cfg.check()?;
        let grid = cfg.grid;
        let mode_grid = grid.mode_grid();
        let tables = cfg
            .envelopes
            .iter()
            .map(|e| e.values(&mode_grid))
            .collect::<Result<Vec<_>>>()?;
        let envelope = (0..grid.n_cells())
            .map(|cell| {
                tables
                    .iter()
                    .enumerate()
                    .map(|(i, t)| t[grid.theta_index(cell, i) * grid.g_k() + grid.k_index(cell, i)])
                    .product()
            })
            .collect();
        let zetas = cfg
            .zeta_specs()
            .iter()
            .map(|z| z.table(&mode_grid))
            .collect::<Result<Vec<_>>>()?;
        let weights = joint_weights(&zetas, &grid)?;
        let list = build_list(&cfg.envelopes, &mode_grid)?;
        Ok(Self {
            grid,
            envelope,
            weights,
            list,
        })
    }

    fn weighted_mass(&self) -> f64 {
        self.envelope
            .iter()
            .zip(&self.weights)
            .map(|(g, w)| g.norm_sqr() * w * w)
            .sum::<f64>()
            * self.grid.cell_weight()
    }

    /// Overlaps `⟨s̄|ψ⟩` for every logical string, using that `|s̄⟩` is `Π g_i` on band `s`.
    fn overlaps(&self, psi: &JointState) -> BTreeMap<LogicalString, Complex64> {
        let bands = self.grid.bands();
        let mut acc = vec![Complex64::new(0.0, 0.0); bands];
        for (cell, g) in self.envelope.iter().enumerate() {
            let gc = g.conj();
            for (a, v) in acc.iter_mut().zip(psi.cell(cell)) {
                *a += gc * v;
            }
        }
        let w = self.grid.cell_weight();
        acc.into_iter()
            .enumerate()
            .map(|(b, a)| (LogicalString::from_index(b, self.grid.n_modes()), a * w))
            .collect()
    }

    /// Largest deviation of a per-cell normalized band vector from the qubit reference,
    /// after removing the cell's global phase. Cells with zero weight or amplitude are skipped.
    fn per_cell_error(&self, psi: &JointState, target: &TargetSpec, r: usize) -> Result<f64> {
        let n = self.grid.n_modes();
        let mut refs: BTreeMap<Vec<usize>, Vec<Complex64>> = BTreeMap::new();
        let mut worst: f64 = 0.0;
        for cell in 0..self.grid.n_cells() {
            if self.weights[cell] == 0.0 {
                continue;
            }
            let v = psi.cell(cell);
            let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if norm * norm < f64::MIN_POSITIVE {
                continue;
            }
            let bands = target.bands_at(&self.grid, self.grid.theta_part(cell));
            if !refs.contains_key(&bands) {
                let strings: Vec<LogicalString> = bands.iter().map(|&b| LogicalString::from_index(b, n)).collect();
                refs.insert(bands.clone(), reference_qubit_grover(n, &strings, r)?);
            }
            let reference = &refs[&bands];
            let overlap: Complex64 = reference.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
            let phase = if overlap.norm() > 0.0 {
                overlap / overlap.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            let err = reference
                .iter()
                .zip(v)
                .map(|(rf, a)| (a / norm - phase * rf).norm())
                .fold(0.0, f64::max);
            worst = worst.max(err);
        }
        Ok(worst)
    }

    fn readout(
        &self,
        cfg: &SearchConfig,
        raw: &JointState,
        r: usize,
    ) -> Result<(f64, BTreeMap<LogicalString, Complex64>, Identification, f64)> {
        let norm = raw.quad_norm();
        let psi = raw.normalize().map_err(|_| Error::DegenerateWeights(norm))?;
        let overlaps = self.overlaps(&psi);
        let multi = matches!(&cfg.target, TargetSpec::Constant(v) if v.len() > 1);
        let identified = classify(&overlaps, cfg.threshold, multi);
        let err = self.per_cell_error(&psi, &cfg.target, r)?;
        Ok((norm, overlaps, identified, err))
    }
}

pub fn run_search(cfg: &SearchConfig) -> Result<SearchReport> {
    let ctx = Context::new(cfg)?;
    let mass = ctx.weighted_mass();
    if mass.is_nan() || mass <= DEGENERATE_MASS {
        return Err(Error::DegenerateWeights(mass));
    }
    let r = cfg.resolved_iterations()?;
    let mode_grid = cfg.grid.mode_grid();
    let zetas = cfg
        .zeta_specs()
        .iter()
        .map(|z| z.table(&mode_grid))
        .collect::<Result<Vec<_>>>()?;

    let (norm_constant, overlaps, identified, per_cell_max_error, ancilla_branch_norms, branches) =
        if cfg.use_dilation {
            let u = dilation_with_phase(&cfg.target, &zetas, &cfg.grid, cfg.phase)?;
            let out = u.apply_n(&ctx.list.with_ancilla()?, r)?;
            let mut reports = Vec::new();
            let mut norms = [0.0; 2];
            for (a, norm) in norms.iter_mut().enumerate() {
                let branch = out.ancilla_branch(a)?;
                *norm = branch.quad_norm();
                if *norm < ZERO_NORM {
                    continue;
                }
                let (sq, overlaps, identified, err) = ctx.readout(cfg, &branch, r)?;
                reports.push(BranchReport {
                    ancilla: a,
                    squared_norm: sq,
                    overlaps,
                    identified,
                    per_cell_max_error: err,
                });
            }
            // the σ_x branch (ancilla 1) carries the G-image after one step
            let primary = reports
                .iter()
                .find(|b| b.ancilla == 1)
                .or_else(|| reports.first())
                .ok_or(Error::DegenerateWeights(0.0))?
                .clone();
            (
                primary.squared_norm,
                primary.overlaps,
                primary.identified,
                primary.per_cell_max_error,
                Some(norms),
                Some(reports),
            )
        } else {
            let g = grover_weighted_with_phase(&cfg.target, &zetas, &cfg.grid, cfg.phase)?;
            let out = g.apply_n(&ctx.list, r)?;
            let (sq, overlaps, identified, err) = ctx.readout(cfg, &out, r)?;
            (sq, overlaps, identified, err, None, None)
        };

    let (most_likely, best) = overlaps
        .iter()
        .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
        .map(|(s, o)| (s.clone(), o.norm_sqr()))
        .expect("at least one logical string");
    Ok(SearchReport {
        norm_constant,
        overlaps,
        identified,
        per_cell_max_error,
        iterations_used: r,
        most_likely,
        most_likely_probability: best,
        ancilla_branch_norms,
        branches,
    })
}

fn check_two_mode_single_target(cfg: &SearchConfig) -> Result<()> {
    cfg.check()?;
    match &cfg.target {
        TargetSpec::Constant(v) if cfg.n_modes() == 2 && v.len() == 1 => Ok(()),
        _ => Err(Error::BadTarget(
            "the sum over search results is defined for two modes and one constant target".into(),
        )),
    }
}

/// Sum of the unnormalized final states over all four targets (`n = 2`).
pub fn sum_over_targets(cfg: &SearchConfig) -> Result<JointState> {
    check_two_mode_single_target(cfg)?;
    let r = cfg.resolved_iterations()?;
    let ctx = Context::new(cfg)?;
    let mode_grid = cfg.grid.mode_grid();
    let zetas = cfg
        .zeta_specs()
        .iter()
        .map(|z| z.table(&mode_grid))
        .collect::<Result<Vec<_>>>()?;
    let mut sum = JointState::zeros(cfg.grid);
    for s in LogicalString::all(2) {
        let g = grover_weighted_with_phase(&TargetSpec::single(s), &zetas, &cfg.grid, cfg.phase)?;
        sum = sum.add(&g.apply_n(&ctx.list, r)?)?;
    }
    Ok(sum)
}

/// `w(cell) · Σ_s |s̄⟩`: the equal-weight sum of the logical basis states, scaled by the cell weights.
pub fn weighted_list(cfg: &SearchConfig) -> Result<JointState> {
    let ctx = Context::new(cfg)?;
    let bands = cfg.grid.bands();
    let mut amp = Vec::with_capacity(cfg.grid.len());
    for (g, w) in ctx.envelope.iter().zip(&ctx.weights) {
        amp.extend(std::iter::repeat_n(g * *w, bands));
    }
    JointState::from_amplitudes(cfg.grid, amp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::GlobalPhase;
    use approx::assert_abs_diff_eq;

    fn bits(s: &str) -> LogicalString {
        s.parse().unwrap()
    }

    fn gaussian(i: usize) -> EnvelopeSpec {
        EnvelopeSpec::Gaussian {
            center: [0.9 + 0.7 * i as f64, 0.3 + 0.2 * i as f64],
            widths: [0.6, 0.25],
        }
    }

    fn cfg(n: usize, g: usize, target: &str) -> SearchConfig {
        let grid = ModularGrid::new(n, g, g).unwrap();
        SearchConfig::new(grid, (0..n).map(gaussian).collect(), TargetSpec::single(bits(target)))
    }

    #[test]
    fn iteration_counts() {
        assert_eq!(iteration_count(2, 1).unwrap(), 1);
        assert_eq!(iteration_count(3, 1).unwrap(), 2);
        assert_eq!(iteration_count(1, 1).unwrap(), 1);
        assert_eq!(iteration_count(2, 4), Err(Error::BadTargetCount { m: 4, n: 4 }));
        assert_eq!(iteration_count(2, 0), Err(Error::BadTargetCount { m: 0, n: 4 }));
    }

    #[test]
    fn reference_small_cases() {
        let v = reference_qubit_grover(2, &[bits("01")], 1).unwrap();
        for (i, a) in v.iter().enumerate() {
            let expect = if i == 1 { 1.0 } else { 0.0 };
            assert!((a - Complex64::new(expect, 0.0)).norm() < 1e-15);
        }
        let v = reference_qubit_grover(3, &[bits("000")], 0).unwrap();
        assert!(v.iter().all(|a| (a.re - 8f64.sqrt().recip()).abs() < 1e-16));
        // n = 1, r = 1: probability 1/2 is already the best reachable
        let p1 = reference_qubit_grover(1, &[bits("1")], 1).unwrap()[1].norm_sqr();
        assert_abs_diff_eq!(p1, 0.5, epsilon = 1e-15);
        assert!(matches!(
            reference_qubit_grover(13, &[], 1),
            Err(Error::CapacityExceeded(_))
        ));
    }

    #[test]
    fn reference_three_qubit_probability() {
        // sin²((2r+1)·asin(1/√8)) evaluated independently
        let theta = (1.0f64 / 8.0).sqrt().asin();
        for r in 0..4 {
            let p = reference_qubit_grover(3, &[bits("101")], r).unwrap()[5].norm_sqr();
            assert_abs_diff_eq!(p, ((2 * r + 1) as f64 * theta).sin().powi(2), epsilon = 1e-14);
        }
        let p2 = reference_qubit_grover(3, &[bits("101")], 2).unwrap()[5].norm_sqr();
        assert_abs_diff_eq!(p2, 0.9453125, epsilon = 1e-12);
    }

    #[test]
    fn identify_cases() {
        let mut o: BTreeMap<LogicalString, Complex64> = LogicalString::all(2)
            .into_iter()
            .map(|s| (s, Complex64::new(0.0, 0.0)))
            .collect();
        assert_eq!(identify(&o, DEFAULT_THRESHOLD), Err(Error::NoAssociation));
        o.insert(bits("10"), Complex64::new(0.93, 0.0));
        assert_eq!(identify(&o, DEFAULT_THRESHOLD).unwrap(), bits("10"));
        o.insert(bits("10"), Complex64::new(0.0, 0.0));
        o.insert(bits("00"), Complex64::new(0.5, 0.0));
        o.insert(bits("11"), Complex64::new(0.5, 0.0));
        assert_eq!(
            identify(&o, DEFAULT_THRESHOLD),
            Err(Error::AmbiguousAssociation(vec!["00".into(), "11".into()]))
        );
    }

    #[test]
    fn list_overlaps_are_half() {
        let c = cfg(2, 6, "00");
        let list = build_list(&c.envelopes, &c.grid.mode_grid()).unwrap();
        assert_abs_diff_eq!(list.quad_norm(), 1.0, epsilon = 1e-12);
        for s in LogicalString::all(2) {
            let basis = logical_basis_state(&c.envelopes, &c.grid.mode_grid(), &s).unwrap();
            let o = basis.inner(&list).unwrap();
            assert!((o - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        }
        let back = hadamard(list.grid()).apply(&list).unwrap();
        let zeros: Vec<_> = c.envelopes.iter().map(|e| logical_zero(e, &c.grid).unwrap()).collect();
        assert!(back.max_abs_diff(&tensor(&zeros).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn list_equals_equal_weight_sum() {
        let c = cfg(3, 3, "000");
        let list = build_list(&c.envelopes, &c.grid.mode_grid()).unwrap();
        let mut sum = JointState::zeros(c.grid);
        for s in LogicalString::all(3) {
            sum = sum.add(&logical_basis_state(&c.envelopes, &c.grid, &s).unwrap()).unwrap();
        }
        let scaled = sum.scale(Complex64::new(8f64.sqrt().recip(), 0.0));
        assert!(scaled.max_abs_diff(&list).unwrap() < 1e-12);
    }

    #[test]
    fn fast_overlaps_match_inner_products() {
        let c = cfg(2, 4, "11").with_zetas(vec![
            ZetaSpec::Cosine {
                amplitude: 1.0,
                frequency: 0.5,
                phase: 0.0,
            };
            2
        ]);
        let ctx = Context::new(&c).unwrap();
        let psi = JointState::from_amplitudes(
            c.grid,
            (0..c.grid.len()).map(|i| Complex64::new((i % 7) as f64, (i % 3) as f64)).collect(),
        )
        .unwrap();
        for (s, o) in ctx.overlaps(&psi) {
            let direct = logical_basis_state(&c.envelopes, &c.grid, &s).unwrap().inner(&psi).unwrap();
            assert!((o - direct).norm() < 1e-10 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn unit_weight_two_mode_search() {
        let report = run_search(&cfg(2, 8, "10")).unwrap();
        assert_eq!(report.identified.unique(), Some(&bits("10")));
        assert_abs_diff_eq!(report.overlaps[&bits("10")].norm(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(report.norm_constant, 1.0, epsilon = 1e-10);
        assert!(report.per_cell_max_error < 1e-12);
        assert_eq!(report.iterations_used, 1);
        assert!(report.ancilla_branch_norms.is_none());
    }

    #[test]
    fn weighted_search_closed_form() {
        let c = cfg(2, 6, "01").with_zetas(vec![
            ZetaSpec::Cosine {
                amplitude: 0.9,
                frequency: 0.5,
                phase: 0.1
            };
            2
        ]);
        let report = run_search(&c).unwrap();
        // closed form: Σ|g1 g2|² w ΔV / √N with N = Σ|g1 g2|² w² ΔV
        let ctx = Context::new(&c).unwrap();
        let dv = c.grid.cell_weight();
        let n: f64 = ctx.envelope.iter().zip(&ctx.weights).map(|(g, w)| g.norm_sqr() * w * w).sum::<f64>() * dv;
        let num: f64 = ctx.envelope.iter().zip(&ctx.weights).map(|(g, w)| g.norm_sqr() * w).sum::<f64>() * dv;
        assert_abs_diff_eq!(report.norm_constant, n, epsilon = 1e-12);
        assert!((report.overlaps[&bits("01")] - Complex64::new(num / n.sqrt(), 0.0)).norm() < 1e-10);
        for s in ["00", "10", "11"] {
            assert!(report.overlaps[&bits(s)].norm() < 1e-10);
        }
        assert_eq!(report.identified.unique(), Some(&bits("01")));
    }

    #[test]
    fn degenerate_weights_rejected() {
        let c = cfg(2, 4, "01").with_zetas(vec![ZetaSpec::Constant { value: 0.0 }; 2]);
        assert!(matches!(run_search(&c), Err(Error::DegenerateWeights(_))));
    }

    #[test]
    fn dilation_branches_agree() {
        let c = cfg(2, 6, "11")
            .with_zetas(vec![
                ZetaSpec::Cosine {
                    amplitude: 1.0,
                    frequency: 0.5,
                    phase: 0.0
                };
                2
            ])
            .with_dilation(true);
        let report = run_search(&c).unwrap();
        let norms = report.ancilla_branch_norms.unwrap();
        assert_abs_diff_eq!(norms[0] + norms[1], 1.0, epsilon = 1e-10);
        let branches = report.branches.unwrap();
        assert_eq!(branches.len(), 2);
        for b in &branches {
            assert_eq!(b.identified.unique(), Some(&bits("11")));
            assert!(b.per_cell_max_error < 1e-12);
        }
        // the σ_x branch matches the plain weighted run
        let plain = run_search(&c.clone().with_dilation(false)).unwrap();
        assert_abs_diff_eq!(plain.norm_constant, norms[1], epsilon = 1e-12);
    }

    #[test]
    fn three_modes_follow_reference() {
        let report = run_search(&cfg(3, 3, "110")).unwrap();
        assert_eq!(report.iterations_used, 2);
        let p = reference_qubit_grover(3, &[bits("110")], 2).unwrap()[6].norm_sqr();
        assert_abs_diff_eq!(report.overlaps[&bits("110")].norm_sqr(), p, epsilon = 1e-10);
        assert_eq!(report.most_likely, bits("110"));
        // 5.5% of the weight stays on the other strings, so the strict rule is ambiguous
        assert!(matches!(report.identified, Identification::Ambiguous { .. }));
    }

    #[test]
    fn interval_targets_split_the_result() {
        let grid = ModularGrid::new(2, 4, 3).unwrap();
        let t = TargetSpec::Intervals(vec![
            crate::operators::IntervalSet::new(vec![[0.0, PI / 2.0]]).unwrap(),
            crate::operators::IntervalSet::full(),
        ]);
        let c = SearchConfig::new(grid, vec![EnvelopeSpec::Constant; 2], t);
        let report = run_search(&c).unwrap();
        assert!(report.per_cell_max_error < 1e-12);
        // half the θ̄₁ cells find 11, the other half 01
        assert_abs_diff_eq!(report.overlaps[&bits("11")].norm(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(report.overlaps[&bits("01")].norm(), 0.5, epsilon = 1e-12);
        assert!(matches!(report.identified, Identification::Ambiguous { .. }));
    }

    #[test]
    fn multi_target_reports_set() {
        let grid = ModularGrid::new(3, 2, 2).unwrap();
        let t = TargetSpec::Constant(vec![bits("001"), bits("110")]);
        let c = SearchConfig::new(grid, vec![EnvelopeSpec::Constant; 3], t);
        let report = run_search(&c).unwrap();
        assert_eq!(report.iterations_used, 1);
        assert!(report.per_cell_max_error < 1e-12);
        // N = 8, M = 2: one step puts probability 1/2 on each target
        assert_abs_diff_eq!(report.overlaps[&bits("001")].norm_sqr(), 0.5, epsilon = 1e-12);
        assert!(matches!(report.identified, Identification::Set { .. }));
    }

    #[test]
    fn sum_over_targets_matches_weighted_list() {
        let c = cfg(2, 5, "00").with_zetas(vec![
            ZetaSpec::Cosine {
                amplitude: 1.0,
                frequency: 1.0,
                phase: 0.0
            };
            2
        ]);
        let sum = sum_over_targets(&c).unwrap();
        let direct = weighted_list(&c).unwrap();
        assert!(sum.max_abs_diff(&direct).unwrap() < 1e-12);
        assert!(sum_over_targets(&cfg(3, 2, "000")).is_err());
    }

    #[test]
    fn flipped_phase_lands_on_minus_target() {
        let c = cfg(2, 4, "01").with_phase(GlobalPhase::Positive);
        let report = run_search(&c).unwrap();
        assert!((report.overlaps[&bits("01")] + Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }
}

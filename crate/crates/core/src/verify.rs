//! Built-in invariant checks, run by `mvgrover verify`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::band;
use crate::error::Result;
use crate::grid::ModularGrid;
use crate::operators::{
    dilation_with_phase, grover_cell_with_phase, grover_identity_residual, grover_weighted_with_phase,
    kraus_complement, GlobalPhase, LogicalString, TargetSpec, WeightTable, ZetaSpec,
};
use crate::search::{
    build_list, iteration_count, run_search, sum_over_targets, weighted_list, Iterations, SearchConfig,
};
use crate::zak::{build_gaussian, zak_forward, zak_inverse, EnvelopeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub level: Level,
    /// Test hook: build every operator with the flipped global sign.
    pub corrupt_sign: bool,
}

impl VerifyOptions {
    pub fn new(level: Level) -> Self {
        Self {
            level,
            corrupt_sign: false,
        }
    }

    fn phase(&self) -> GlobalPhase {
        if self.corrupt_sign {
            GlobalPhase::Positive
        } else {
            GlobalPhase::Negative
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn bits(s: &str) -> LogicalString {
    s.parse().expect("valid literal")
}

fn gaussian(i: usize) -> EnvelopeSpec {
    EnvelopeSpec::Gaussian {
        center: [1.0 + 0.5 * i as f64, 0.4 + 0.1 * i as f64],
        widths: [0.5, 0.25],
    }
}

fn search(n: usize, g: usize, target: &str, r: usize, opts: &VerifyOptions) -> Result<SearchConfig> {
    let grid = ModularGrid::new(n, g, g)?;
    Ok(
        SearchConfig::new(grid, (0..n).map(gaussian).collect(), TargetSpec::single(bits(target)))
            .with_iterations(Iterations::Fixed(r))
            .with_phase(opts.phase()),
    )
}

fn cosine_zetas(n: usize) -> Vec<ZetaSpec> {
    vec![
        ZetaSpec::Cosine {
            amplitude: 1.0,
            frequency: 0.5,
            phase: 0.0,
        };
        n
    ]
}

fn tables(zetas: &[ZetaSpec], grid: &ModularGrid) -> Result<Vec<WeightTable>> {
    zetas.iter().map(|z| z.table(&grid.mode_grid())).collect()
}

type Check = fn(&VerifyOptions) -> Result<(bool, String)>;

fn bounded(value: f64, tol: f64) -> (bool, String) {
    (value <= tol, format!("{value:.3e} (tolerance {tol:.0e})"))
}

fn single_cell(opts: &VerifyOptions) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in 1..=2 {
        for r in 1..=2 {
            let target: String = "1".repeat(n);
            let cfg = search(n, 1, &target, r, opts)?;
            worst = worst.max(run_search(&cfg)?.per_cell_max_error);
        }
    }
    Ok(bounded(worst, 1e-12))
}

fn two_mode_single_step(opts: &VerifyOptions) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for s in LogicalString::all(2) {
        let cfg = search(2, 8, &s.to_string(), 1, opts)?;
        let report = run_search(&cfg)?;
        let signed = report.overlaps[&s];
        worst = worst.max((signed - Complex64::new(1.0, 0.0)).norm());
    }
    Ok(bounded(worst, 1e-10))
}

fn unitarity(opts: &VerifyOptions) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in 1..=2 {
        let grid = ModularGrid::new(n, 3, 2)?;
        for s in LogicalString::all(n) {
            let g = grover_cell_with_phase(&TargetSpec::single(s), &grid, opts.phase())?;
            worst = worst.max(band::unitarity_defect(&g.cell_matrix(0)));
        }
    }
    Ok(bounded(worst, 1e-12))
}

fn grover_identity(opts: &VerifyOptions) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in 1..=2 {
        let grid = ModularGrid::new(n, 2, 2)?;
        for s in LogicalString::all(n) {
            // both sides are built with the expected sign
            let g = grover_cell_with_phase(&TargetSpec::single(s.clone()), &grid, opts.phase())?;
            let expected = grover_cell_with_phase(&TargetSpec::single(s.clone()), &grid, GlobalPhase::Negative)?;
            worst = worst
                .max(grover_identity_residual(&TargetSpec::single(s), &grid, GlobalPhase::Negative)?)
                .max(band::max_abs_diff(g.band_matrix(0), expected.band_matrix(0)));
        }
    }
    Ok(bounded(worst, 1e-12))
}

fn norm_preservation(opts: &VerifyOptions) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in 1..=2 {
        let grid = ModularGrid::new(n, 6, 6)?;
        let envs: Vec<_> = (0..n).map(gaussian).collect();
        let list = build_list(&envs, &grid.mode_grid())?;
        let g = grover_cell_with_phase(&TargetSpec::single(bits(&"0".repeat(n))), &grid, opts.phase())?;
        let out = g.apply_n(&list, 3)?;
        worst = worst.max((out.quad_norm() - list.quad_norm()).abs());
    }
    Ok(bounded(worst, 1e-12))
}

fn kraus_completeness(opts: &VerifyOptions) -> Result<(bool, String)> {
    let grid = ModularGrid::new(2, 4, 3)?;
    let target = TargetSpec::single(bits("01"));
    let z = tables(&cosine_zetas(2), &grid)?;
    let g = grover_weighted_with_phase(&target, &z, &grid, opts.phase())?;
    let gp = kraus_complement(&target, &z, &grid)?;
    let id = band::identity(grid.bands());
    let mut worst: f64 = 0.0;
    for cell in 0..grid.n_cells() {
        let (a, b) = (g.cell_matrix(cell), gp.cell_matrix(cell));
        let sum = a.adjoint() * &a + b.adjoint() * &b;
        worst = worst.max(band::max_abs_diff(&sum, &id));
    }
    Ok(bounded(worst, 1e-10))
}

fn dilation_unitarity(opts: &VerifyOptions) -> Result<(bool, String)> {
    let grid = ModularGrid::new(2, 4, 3)?;
    let z = tables(&cosine_zetas(2), &grid)?;
    let u = dilation_with_phase(&TargetSpec::single(bits("11")), &z, &grid, opts.phase())?;
    let worst = (0..grid.n_cells())
        .map(|c| band::unitarity_defect(&u.cell_matrix(c)))
        .fold(0.0, f64::max);
    Ok(bounded(worst, 1e-12))
}

fn sum_targets(opts: &VerifyOptions) -> Result<(bool, String)> {
    let cfg = search(2, 6, "00", 1, opts)?.with_zetas(cosine_zetas(2));
    let diff = sum_over_targets(&cfg)?.max_abs_diff(&weighted_list(&cfg)?)?;
    Ok(bounded(diff, 1e-12))
}

fn iteration_schedule(_: &VerifyOptions) -> Result<(bool, String)> {
    let got = [iteration_count(1, 1)?, iteration_count(2, 1)?, iteration_count(3, 1)?, iteration_count(4, 1)?];
    Ok((got == [1, 1, 2, 3], format!("r(n, 1) for n = 1..4: {got:?}")))
}

fn zak_checks(cases: &[(f64, f64, f64)], g_theta: usize, g_k: usize, n_win: usize) -> Result<(bool, String)> {
    let grid = ModularGrid::new(1, g_theta, g_k)?;
    let (mut parseval, mut round_trip): (f64, f64) = (0.0, 0.0);
    for &(center, sigma, k0) in cases {
        let psi = build_gaussian(center, sigma, k0, &grid, n_win)?;
        let z = zak_forward(&psi, &grid)?;
        parseval = parseval.max((z.quad_norm() - psi.norm()).abs());
        let back = zak_inverse(&z, n_win)?;
        let err = psi
            .samples()
            .iter()
            .zip(back.samples())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        round_trip = round_trip.max(err);
    }
    Ok((
        parseval <= 1e-10 && round_trip <= 1e-8,
        format!("Parseval {parseval:.3e} (1e-10), round trip {round_trip:.3e} (1e-8)"),
    ))
}

fn zak_parseval(_: &VerifyOptions) -> Result<(bool, String)> {
    zak_checks(&[(1.0, 0.6, 0.0), (-2.0, 1.1, 0.3)], 8, 9, 4)
}

fn reference_three_modes(opts: &VerifyOptions) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for r in 1..=2 {
        for s in ["000", "101"] {
            let cfg = search(3, 8, s, r, opts)?;
            worst = worst.max(run_search(&cfg)?.per_cell_max_error);
        }
    }
    Ok(bounded(worst, 1e-12))
}

fn zak_sweep(_: &VerifyOptions) -> Result<(bool, String)> {
    let mut cases = Vec::new();
    for &sigma in &[0.4, 1.0, PI, 5.0] {
        for &center in &[0.0, 1.7, -PI] {
            for &k0 in &[0.0, 0.45] {
                cases.push((center, sigma, k0));
            }
        }
    }
    zak_checks(&cases, 16, 17, 8)
}

fn two_mode_fine_grid(opts: &VerifyOptions) -> Result<(bool, String)> {
    let cfg = search(2, 32, "10", 1, opts)?;
    let report = run_search(&cfg)?;
    let target = bits("10");
    let off = report
        .overlaps
        .iter()
        .filter(|(s, _)| **s != target)
        .map(|(_, o)| o.norm())
        .fold(0.0, f64::max);
    let on = (report.overlaps[&target].norm() - 1.0).abs();
    Ok((
        on <= 1e-10 && off <= 1e-10,
        format!("target {on:.3e}, others {off:.3e} (1e-10)"),
    ))
}

const FAST: &[(&str, Check)] = &[
    ("single-cell-equivalence", single_cell),
    ("two-mode-single-step", two_mode_single_step),
    ("cell-unitarity", unitarity),
    ("grover-identity", grover_identity),
    ("norm-preservation", norm_preservation),
    ("kraus-completeness", kraus_completeness),
    ("dilation-unitarity", dilation_unitarity),
    ("sum-over-targets", sum_targets),
    ("iteration-count", iteration_schedule),
    ("zak-parseval", zak_parseval),
];

const FULL: &[(&str, Check)] = &[
    ("three-mode-reference-equivalence", reference_three_modes),
    ("zak-round-trip-sweep", zak_sweep),
    ("two-mode-32x32", two_mode_fine_grid),
];

pub fn run_checks(opts: &VerifyOptions) -> Vec<CheckResult> {
    let extra: &[(&str, Check)] = match opts.level {
        Level::Fast => &[],
        Level::Full => FULL,
    };
    FAST.iter()
        .chain(extra)
        .map(|(name, check)| {
            let (passed, detail) = check(opts).unwrap_or_else(|e| (false, format!("error: {e}")));
            CheckResult {
                name: name.to_string(),
                passed,
                detail,
            }
        })
        .collect()
}

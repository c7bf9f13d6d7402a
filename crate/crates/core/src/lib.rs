//! Grover search over continuous variables encoded with modular variables.
//!
//! Each mode's modular domain `(θ̄, k̄) ∈ [0, π) × [0, 1)` is discretized into
//! cells, and every cell carries a two-level system formed by the modular
//! eigenstates at `θ̄` and `θ̄ + π`. Gates act independently inside each cell,
//! so one global operator runs the qubit Grover iteration in every cell at
//! once; envelopes over the cells turn the per-cell results into CV logical
//! states.

pub mod band;
pub mod error;
pub mod grid;
pub mod io;
pub mod operators;
pub mod search;
pub mod state;
pub mod verify;
pub mod zak;

pub use error::{Error, Result};
pub use grid::{make_grid, ModularGrid};
pub use operators::{
    apply, dilation, gamma, grover_cell, grover_weighted, hadamard, inversion_about_zero, kraus_complement,
    oracle, pauli, Axis, GlobalOperator, GlobalPhase, IntervalSet, LogicalString, TargetSpec, WeightTable,
    ZetaSpec,
};
pub use search::{
    build_list, identify, iteration_count, reference_qubit_grover, run_search, sum_over_targets, Identification,
    Iterations, SearchConfig, SearchReport,
};
pub use state::{tensor, JointState, ModeState};
pub use zak::{build_gaussian, logical_one, logical_zero, zak_forward, zak_inverse, EnvelopeSpec, PositionWave};

/// Version string embedded in run records.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

//! Quintic defocusing NLS `(i∂t + Δ) u = ρ|u|⁴u` on the box × torus grid.

pub mod checkpoint;
pub mod diagnostics;
pub mod solver;

pub use diagnostics::{diagnostics, CenterPath, DiagnosticsRow};
pub use solver::{
    galilean_boost, nonlinear_step, NlsDrift, NlsEvolution, NlsEvolveOptions, NlsSolver, NlsState, TAIL_LIMIT,
};

//! The truncated quintic resonant system
//! `(i∂t + ∂xx) u_j = Σ_{R(j)} u_{p1} ū_{p2} u_{p3} ū_{p4} u_{p5}` on `j ∈ {|j|∞ ≤ P}`.

pub mod checkpoint;
pub mod conserved;
pub mod nonlinearity;
pub mod state;
pub mod stepper;

pub use conserved::{conserved_set, ConservedSet};
pub use nonlinearity::{nonlinearity_direct, nonlinearity_factored, DirectTable, FactoredPlan, OpCounts};
pub use state::VecState;
pub use stepper::{
    galilean_boost, step_strang, w_norm, ConservedDrift, EvolveOptions, Evolution, ResonantSolver, Trajectory,
};

//! Grids, transforms, Littlewood-Paley projectors, norm estimators and the
//! exact linear propagator on `ℝ × 𝕋²`.

pub mod cutoff;
pub mod fourier;
pub mod grid;
pub mod norms;
pub mod projector;
pub mod propagate;
pub mod strichartz;
pub mod weyl;
pub mod znorm;

pub use cutoff::{dyadic_scales, eta, eta_cutoff, eta_high, eta_piece};
pub use fourier::{fourier_forward, fourier_inverse, Fourier1D, Fourier3D};
pub use grid::{Field3D, GridSpec};
pub use norms::{boundary_mass_fraction, h1_norm, l2_norm, lp_norm, sobolev_norm, NormReport};
pub use projector::{apply_projector, ProjectorSpec};
pub use propagate::linear_propagate;
pub use strichartz::{strichartz_ratio, strichartz_ratio_with, StrichartzSampling};
pub use weyl::weyl_kernel_sup;
pub use znorm::z_norm;

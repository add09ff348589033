//! Large-scale and Euclidean rescalings, periodic mode decomposition, the
//! `V_M` reconstruction and the multi-scale comparison with the full flow.

pub mod modes;
pub mod multiscale;
pub mod rescale;
pub mod residual;

pub use modes::{
    compose_periodic, decompose_periodic_fourier, interpolate_state, reconstruct_vm, GaussianY2Mode,
};
pub use multiscale::{
    loglog_slope, multiscale_experiment, nonresonant_residual, MultiscaleConfig, MultiscaleReport, MultiscaleRow,
};
pub use rescale::{euclidean_data, large_scale_data, large_scale_data_uncut};
pub use residual::{nonresonant_forcing, ResidualSummary};

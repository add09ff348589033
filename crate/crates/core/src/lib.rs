//! Spectral laboratory for the quintic resonant system on `ℝ` and the
//! quintic NLS on the waveguide `ℝ × 𝕋²`.

pub mod checkpoint;
pub mod error;
pub mod lattice;
pub mod nls;
pub mod profiles;
pub mod resonant;
pub mod spectral;

pub use error::{Error, Result};

//! Subcommand bodies. Each writes its outputs through the run directory and
//! returns whether every validity monitor passed.

mod lattice;
mod multiscale;
mod nls;
mod resonant;
mod spectral;

pub use lattice::{resonances, sumlem_sweep};
pub use multiscale::multiscale;
pub use nls::simulate_nls;
pub use resonant::simulate_resonant;
pub use spectral::{strichartz, weyl};

use serde::Serialize;

use crate::error::CliError;

pub(crate) fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

pub(crate) fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>, CliError> {
    let mut b = serde_json::to_vec_pretty(v)?;
    b.push(b'\n');
    Ok(b)
}

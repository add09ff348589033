//! `NLS3` checkpoints: magic, version, `Nx` and `Ny` as `u64`, `Lx`, `dt`
//! and time as `f64`, then the field in grid layout.

use std::io::{Read, Write};

use super::solver::NlsState;
use crate::checkpoint::{Decoder, Encoder};
use crate::error::Result;
use crate::spectral::grid::{Field3D, GridSpec};

pub const MAGIC: &[u8; 4] = b"NLS3";

pub fn write_state<W: Write>(s: &NlsState, w: W) -> Result<()> {
    let g = s.field.grid;
    let mut e = Encoder(w);
    e.header(MAGIC)?;
    e.u64(g.nx as u64)?;
    e.u64(g.ny as u64)?;
    e.f64(g.lx)?;
    e.f64(g.dt)?;
    e.f64(s.time)?;
    e.complex(&s.field.values)
}

pub fn read_state<R: Read>(r: R) -> Result<NlsState> {
    let mut d = Decoder(r);
    d.header(MAGIC)?;
    let nx = d.u64()? as usize;
    let ny = d.u64()? as usize;
    let lx = d.f64()?;
    let dt = d.f64()?;
    let time = d.f64()?;
    let grid = GridSpec::new(lx, nx, ny, dt)?;
    let values = d.complex(grid.len())?;
    d.finish()?;
    let mut s = NlsState::new(Field3D::from_values(grid, values)?)?;
    s.time = time;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn round_trip() {
        let g = GridSpec::new(5.0, 8, 4, 0.01).unwrap();
        let mut s = NlsState::new(Field3D::from_fn(g, |x, y1, y2| Complex64::new(x, y1 - y2))).unwrap();
        s.time = 0.5;
        let mut buf = Vec::new();
        write_state(&s, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"NLS3");
        assert_eq!(read_state(&buf[..]).unwrap(), s);
        assert!(read_state(&buf[..20]).is_err());
    }
}

//! `RSNL` checkpoints: magic, version, radius `u32`, mode count `u32`,
//! `Nx` `u64`, `Lx` and time as `f64`, then every mode field in canonical
//! mode order.

use std::io::{Read, Write};

use super::state::VecState;
use crate::checkpoint::{Decoder, Encoder};
use crate::error::{Error, Result};
use crate::lattice::ModeSet;

pub const MAGIC: &[u8; 4] = b"RSNL";

pub fn write_state<W: Write>(s: &VecState, w: W) -> Result<()> {
    let mut e = Encoder(w);
    e.header(MAGIC)?;
    e.u32(s.modes.radius())?;
    e.u32(s.modes.len() as u32)?;
    e.u64(s.nx as u64)?;
    e.f64(s.lx)?;
    e.f64(s.time)?;
    for f in &s.fields {
        e.complex(f)?;
    }
    Ok(())
}

pub fn read_state<R: Read>(r: R) -> Result<VecState> {
    let mut d = Decoder(r);
    d.header(MAGIC)?;
    let radius = d.u32()?;
    let count = d.u32()? as usize;
    let nx = d.u64()? as usize;
    let lx = d.f64()?;
    let time = d.f64()?;
    let modes = ModeSet::new(radius);
    if modes.len() != count {
        return Err(Error::Format(format!("radius {radius} implies {} modes, header says {count}", modes.len())));
    }
    let mut s = VecState::zeros(modes, lx, nx)?;
    s.time = time;
    for f in &mut s.fields {
        *f = d.complex(nx)?;
    }
    d.finish()?;
    s.require_finite()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn round_trip_and_corruption() {
        let mut s = VecState::from_fn(ModeSet::new(1), 6.0, 8, |p, x| {
            Complex64::new(x * p.px as f64, 0.5 - p.py as f64)
        })
        .unwrap();
        s.time = 1.25;
        let mut buf = Vec::new();
        write_state(&s, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"RSNL");
        assert_eq!(buf.len(), 4 + 4 + 4 + 4 + 8 + 8 + 8 + 9 * 8 * 16);
        assert_eq!(read_state(&buf[..]).unwrap(), s);
        assert!(read_state(&buf[..buf.len() - 1]).is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_state(&bad[..]).is_err());
    }
}

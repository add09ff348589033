//! Little-endian binary encoding shared by the state checkpoints.
//!
//! Layout: 4-byte magic, `u32` format version, then format-specific counts
//! and scalars, then complex samples as interleaved `f64` re/im pairs.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

pub(crate) struct Encoder<W: Write>(pub W);

impl<W: Write> Encoder<W> {
    pub fn header(&mut self, magic: &[u8; 4]) -> Result<()> {
        self.0.write_all(magic)?;
        self.u32(FORMAT_VERSION)
    }

    pub fn u32(&mut self, v: u32) -> Result<()> {
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }

    pub fn u64(&mut self, v: u64) -> Result<()> {
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }

    pub fn f64(&mut self, v: f64) -> Result<()> {
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }

    pub fn complex(&mut self, values: &[Complex64]) -> Result<()> {
        let mut bytes = Vec::with_capacity(16 * values.len());
        for z in values {
            bytes.extend_from_slice(&z.re.to_le_bytes());
            bytes.extend_from_slice(&z.im.to_le_bytes());
        }
        Ok(self.0.write_all(&bytes)?)
    }
}

pub(crate) struct Decoder<R: Read>(pub R);

impl<R: Read> Decoder<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.0
            .read_exact(&mut b)
            .map_err(|e| Error::Format(format!("truncated input: {e}")))?;
        Ok(b)
    }

    pub fn header(&mut self, magic: &[u8; 4]) -> Result<()> {
        let got = self.bytes::<4>()?;
        if &got != magic {
            return Err(Error::Format(format!(
                "bad magic {:?}, expected {:?}",
                String::from_utf8_lossy(&got),
                String::from_utf8_lossy(magic)
            )));
        }
        let v = self.u32()?;
        if v != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {v}")));
        }
        Ok(())
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }

    pub fn complex(&mut self, n: usize) -> Result<Vec<Complex64>> {
        let mut bytes = vec![0u8; 16 * n];
        self.0
            .read_exact(&mut bytes)
            .map_err(|e| Error::Format(format!("truncated samples: {e}")))?;
        Ok(bytes
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect())
    }

    /// Fails unless the input is exhausted.
    pub fn finish(&mut self) -> Result<()> {
        let mut rest = [0u8; 1];
        match self.0.read(&mut rest)? {
            0 => Ok(()),
            _ => Err(Error::Format("trailing bytes".into())),
        }
    }
}

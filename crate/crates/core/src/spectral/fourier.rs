use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::{Field3D, GridSpec};
use crate::error::{Error, Result};

/// Forward/inverse 1D transform pair of a fixed length.
///
/// `forward` is normalized by `1/n`, so a unit plane wave maps to a unit
/// coefficient; `inverse` is the plain synthesis sum.
#[derive(Clone)]
pub struct Fourier1D {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fourier1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fourier1D").field("n", &self.n).finish()
    }
}

impl Fourier1D {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fourier1D {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Transforms every contiguous chunk of length `n` in `buf`.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.fwd.process(buf);
        let s = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|z| *z *= s);
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inv.process(buf);
    }
}

/// Cached plans for the three axes of a [`GridSpec`].
#[derive(Debug, Clone)]
pub struct Fourier3D {
    grid: GridSpec,
    x: Fourier1D,
    y: Fourier1D,
}

impl Fourier3D {
    pub fn new(grid: &GridSpec) -> Self {
        Fourier3D {
            grid: *grid,
            x: Fourier1D::new(grid.nx),
            y: Fourier1D::new(grid.ny),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn check(&self, buf: &[Complex64]) -> Result<()> {
        if buf.len() != self.grid.len() {
            return Err(Error::ShapeMismatch {
                expected: self.grid.len(),
                got: buf.len(),
            });
        }
        Ok(())
    }

    /// Physical values → coefficients, in place.
    pub fn forward_in_place(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check(buf)?;
        self.x.forward(buf);
        self.y_axes(buf, true);
        Ok(())
    }

    /// Coefficients → physical values, in place.
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check(buf)?;
        self.x.inverse(buf);
        self.y_axes(buf, false);
        Ok(())
    }

    /// Transforms along y1 and y2 only (x untouched).
    pub fn forward_y(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check(buf)?;
        self.y_axes(buf, true);
        Ok(())
    }

    pub fn inverse_y(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check(buf)?;
        self.y_axes(buf, false);
        Ok(())
    }

    /// Transforms along x only, line by line.
    pub fn forward_x(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check(buf)?;
        self.x.forward(buf);
        Ok(())
    }

    pub fn inverse_x(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check(buf)?;
        self.x.inverse(buf);
        Ok(())
    }

    fn y_axes(&self, buf: &mut [Complex64], forward: bool) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        if ny == 1 {
            return;
        }
        // y1: within each y2-plane the stride is nx; y2: stride nx·ny.
        strided_axis(buf, ny, nx, &self.y, forward);
        strided_axis(buf, ny, nx * ny, &self.y, forward);
    }

    pub fn forward(&self, f: &Field3D) -> Result<Field3D> {
        let mut out = f.clone();
        self.forward_in_place(&mut out.values)?;
        Ok(out)
    }

    pub fn inverse(&self, f: &Field3D) -> Result<Field3D> {
        let mut out = f.clone();
        self.inverse_in_place(&mut out.values)?;
        Ok(out)
    }
}

/// Transforms the axis of length `n` with element stride `stride` for every
/// block of `n·stride` elements in `buf`.
fn strided_axis(buf: &mut [Complex64], n: usize, stride: usize, plan: &Fourier1D, forward: bool) {
    let block = n * stride;
    let mut scratch = vec![Complex64::new(0.0, 0.0); block];
    for chunk in buf.chunks_exact_mut(block) {
        // Gather into [inner][axis] so each line is contiguous.
        for a in 0..n {
            for i in 0..stride {
                scratch[i * n + a] = chunk[a * stride + i];
            }
        }
        if forward {
            plan.forward(&mut scratch);
        } else {
            plan.inverse(&mut scratch);
        }
        for a in 0..n {
            for i in 0..stride {
                chunk[a * stride + i] = scratch[i * n + a];
            }
        }
    }
}

pub fn fourier_forward(f: &Field3D) -> Result<Field3D> {
    Fourier3D::new(&f.grid).forward(f)
}

pub fn fourier_inverse(f: &Field3D) -> Result<Field3D> {
    Fourier3D::new(&f.grid).inverse(f)
}

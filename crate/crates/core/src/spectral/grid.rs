use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discretization of the box × torus `[-Lx/2, Lx/2) × [0, 2π)²`.
///
/// Arrays of length `nx · ny²` are laid out with `x` fastest, then `y1`,
/// then `y2`: index `ix + nx·(iy1 + ny·iy2)`. Spectral arrays use the same
/// layout with FFT ordering along each axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lx: f64,
    pub nx: usize,
    pub ny: usize,
    pub dt: f64,
}

impl GridSpec {
    pub fn new(lx: f64, nx: usize, ny: usize, dt: f64) -> Result<Self> {
        let g = GridSpec { lx, nx, ny, dt };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lx.is_finite() && self.lx > 0.0) {
            return Err(Error::InvalidGrid(format!("Lx must be positive, got {}", self.lx)));
        }
        if !self.nx.is_power_of_two() || self.nx < 2 {
            return Err(Error::InvalidGrid(format!(
                "Nx must be a power of two >= 2, got {}",
                self.nx
            )));
        }
        if !self.ny.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "Ny must be a power of two, got {}",
                self.ny
            )));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidGrid(format!("dt must be positive, got {}", self.dt)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.ny as f64
    }

    /// Volume element of the grid quadrature.
    pub fn cell_volume(&self) -> f64 {
        self.dx() * self.dy() * self.dy()
    }

    /// `Lx · (2π)²`
    pub fn volume(&self) -> f64 {
        self.lx * (2.0 * std::f64::consts::PI).powi(2)
    }

    pub fn x(&self, ix: usize) -> f64 {
        -0.5 * self.lx + ix as f64 * self.dx()
    }

    pub fn y(&self, iy: usize) -> f64 {
        iy as f64 * self.dy()
    }

    /// Angular x-frequency of FFT bin `ix`, in `(2π/Lx)·{-Nx/2, …, Nx/2-1}`.
    pub fn xi(&self, ix: usize) -> f64 {
        2.0 * std::f64::consts::PI / self.lx * signed_index(ix, self.nx) as f64
    }

    /// Integer y-frequency of FFT bin `iy`.
    pub fn k(&self, iy: usize) -> i64 {
        signed_index(iy, self.ny)
    }

    /// FFT bin of an integer y-frequency, if representable.
    pub fn k_bin(&self, k: i64) -> Option<usize> {
        let half = (self.ny / 2) as i64;
        if self.ny == 1 {
            return (k == 0).then_some(0);
        }
        if k < -half || k >= half {
            return None;
        }
        Some(k.rem_euclid(self.ny as i64) as usize)
    }

    pub fn index(&self, ix: usize, iy1: usize, iy2: usize) -> usize {
        ix + self.nx * (iy1 + self.ny * iy2)
    }

    pub fn xi_nyquist(&self) -> f64 {
        std::f64::consts::PI / self.dx()
    }

    pub fn k_nyquist(&self) -> i64 {
        (self.ny / 2) as i64
    }

    /// Grid with the same spacing and a different time step.
    pub fn with_dt(&self, dt: f64) -> Self {
        GridSpec { dt, ..*self }
    }
}

/// FFT bin → signed frequency index in `{-n/2, …, n/2-1}`.
pub fn signed_index(i: usize, n: usize) -> i64 {
    if i < n / 2 || n == 1 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// A complex field on the box × torus grid (physical or spectral values).
#[derive(Debug, Clone, PartialEq)]
pub struct Field3D {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl Field3D {
    pub fn zeros(grid: GridSpec) -> Self {
        Field3D {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_values(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Field3D { grid, values })
    }

    /// Samples `f(x, y1, y2)` at the grid points.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for iy2 in 0..grid.ny {
            let y2 = grid.y(iy2);
            for iy1 in 0..grid.ny {
                let y1 = grid.y(iy1);
                for ix in 0..grid.nx {
                    values.push(f(grid.x(ix), y1, y2));
                }
            }
        }
        Field3D { grid, values }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn require_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::Undefined("field contains non-finite values".into()))
        }
    }

    pub fn scale(&mut self, s: Complex64) {
        self.values.iter_mut().for_each(|z| *z *= s);
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    pub fn conj(&self) -> Self {
        Field3D {
            grid: self.grid,
            values: self.values.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn sub(&self, other: &Field3D) -> Result<Self> {
        self.check_same(other)?;
        Ok(Field3D {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn check_same(&self, other: &Field3D) -> Result<()> {
        if self.grid.nx != other.grid.nx || self.grid.ny != other.grid.ny {
            return Err(Error::ShapeMismatch {
                expected: self.grid.len(),
                got: other.grid.len(),
            });
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::spectral::cutoff::eta;
use crate::spectral::fourier::{Fourier1D, Fourier3D};
use crate::spectral::grid::{signed_index, Field3D, GridSpec};
use crate::spectral::norms::boundary_mass_fraction;
use crate::spectral::projector::{apply_projector, ProjectorSpec};

/// Largest boundary-mass fraction accepted for rescaled data.
pub const BOX_LIMIT: f64 = 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Trigonometric interpolation of x-lines from a source grid at the points
/// `m · x_i` of a target grid.
#[derive(Debug, Clone)]
pub(crate) struct LineSampler {
    src_nx: usize,
    fft: Fourier1D,
    /// `None` when the target points coincide with the source nodes.
    phases: Option<Vec<Complex64>>,
}

impl LineSampler {
    pub(crate) fn new(src_lx: f64, src_nx: usize, m: f64, dst_lx: f64, dst_nx: usize) -> Result<Self> {
        let span = m * dst_lx;
        if span > src_lx * (1.0 + 1e-12) {
            return Err(Error::InvalidGrid(format!(
                "rescaled box M·Lx = {span} exceeds the reference box {src_lx}"
            )));
        }
        let exact = src_nx == dst_nx && (span - src_lx).abs() <= 1e-12 * src_lx;
        let phases = (!exact).then(|| {
            let dst_dx = dst_lx / dst_nx as f64;
            let mut p = Vec::with_capacity(dst_nx * src_nx);
            for i in 0..dst_nx {
                let s = m * (-0.5 * dst_lx + i as f64 * dst_dx) + 0.5 * src_lx;
                for k in 0..src_nx {
                    let xi = 2.0 * PI / src_lx * signed_index(k, src_nx) as f64;
                    p.push(Complex64::from_polar(1.0, xi * s));
                }
            }
            p
        });
        Ok(LineSampler {
            src_nx,
            fft: Fourier1D::new(src_nx),
            phases,
        })
    }

    pub(crate) fn sample(&self, line: &[Complex64], out: &mut [Complex64]) {
        match &self.phases {
            None => out.copy_from_slice(line),
            Some(p) => {
                let mut c = line.to_vec();
                self.fft.forward(&mut c);
                for (o, row) in out.iter_mut().zip(p.chunks_exact(self.src_nx)) {
                    *o = row.iter().zip(&c).fold(ZERO, |acc, (e, z)| acc + e * z);
                }
            }
        }
    }
}

/// `f ↦ f(m x, y)` on `grid`, with zero-padding in `y` when `grid.ny`
/// exceeds the source resolution.
fn rescale_x(f: &Field3D, m: f64, grid: &GridSpec) -> Result<Field3D> {
    let src = f.grid;
    if grid.ny < src.ny {
        return Err(Error::InvalidGrid(format!(
            "target Ny = {} is coarser than the source Ny = {}",
            grid.ny, src.ny
        )));
    }
    let sampler = LineSampler::new(src.lx, src.nx, m, grid.lx, grid.nx)?;
    let mid = GridSpec { ny: src.ny, ..*grid };
    let mut x_done = Field3D::zeros(mid);
    for (dst, line) in x_done
        .values
        .chunks_exact_mut(grid.nx)
        .zip(f.values.chunks_exact(src.nx))
    {
        sampler.sample(line, dst);
    }
    if grid.ny == src.ny {
        return Ok(Field3D { grid: *grid, ..x_done });
    }
    Fourier3D::new(&mid).forward_y(&mut x_done.values)?;
    let mut out = Field3D::zeros(*grid);
    for iy2 in 0..src.ny {
        for iy1 in 0..src.ny {
            let (k1, k2) = (src.k(iy1), src.k(iy2));
            let (Some(b1), Some(b2)) = (grid.k_bin(k1), grid.k_bin(k2)) else {
                continue;
            };
            let s = mid.index(0, iy1, iy2);
            let d = grid.index(0, b1, b2);
            out.values[d..d + grid.nx].copy_from_slice(&x_done.values[s..s + grid.nx]);
        }
    }
    Fourier3D::new(grid).inverse_y(&mut out.values)?;
    Ok(out)
}

fn check_scale(m: f64) -> Result<()> {
    if !(m > 0.0 && m <= 1.0) {
        return Err(invalid("M", format!("{m} not in (0, 1]")));
    }
    Ok(())
}

fn large_scale(psi: &Field3D, m: f64, grid: &GridSpec, cut: bool) -> Result<Field3D> {
    check_scale(m)?;
    grid.validate()?;
    psi.require_finite()?;
    let src = if cut {
        apply_projector(psi, ProjectorSpec::XLow(m.powf(-0.01)))?
    } else {
        psi.clone()
    };
    let mut out = rescale_x(&src, m, grid)?;
    out.scale(Complex64::new(m.sqrt(), 0.0));
    let fraction = boundary_mass_fraction(&out);
    if fraction > BOX_LIMIT {
        return Err(Error::BoxTooSmall { fraction, limit: BOX_LIMIT });
    }
    Ok(out)
}

/// `M^{1/2} (P^x_{≤M^{-1/100}} ψ)(M x, y)` sampled on `grid`.
///
/// `ψ` lives on a reference box with `Lx_ref ≥ M · grid.lx`; the sample is
/// an exact copy when `M · grid.lx = Lx_ref` and the x-resolutions agree,
/// trigonometric interpolation otherwise.
pub fn large_scale_data(psi: &Field3D, m: f64, grid: GridSpec) -> Result<Field3D> {
    large_scale(psi, m, &grid, true)
}

/// [`large_scale_data`] without the x-band cutoff.
pub fn large_scale_data_uncut(psi: &Field3D, m: f64, grid: GridSpec) -> Result<Field3D> {
    large_scale(psi, m, &grid, false)
}

/// Wraps an angle to `[-π, π)`.
fn wrap(y: f64) -> f64 {
    (y + PI).rem_euclid(2.0 * PI) - PI
}

/// `N^{1/2} η(N^{1/2}|z|) φ(N z)` with `z = (x, y)` and `y` taken in
/// `[-π, π)²`, so the bump sits at the origin of `ℝ × 𝕋²`.
pub fn euclidean_data(phi: impl Fn(f64, f64, f64) -> Complex64, n: f64, grid: GridSpec) -> Result<Field3D> {
    if !(n >= 1.0 && n.is_finite()) {
        return Err(invalid("N", format!("{n} must be ≥ 1")));
    }
    grid.validate()?;
    let rn = n.sqrt();
    let out = Field3D::from_fn(grid, |x, y1, y2| {
        let (a, b) = (wrap(y1), wrap(y2));
        let r = (x * x + a * a + b * b).sqrt();
        let w = eta(rn * r);
        if w == 0.0 {
            ZERO
        } else {
            phi(n * x, n * a, n * b) * (rn * w)
        }
    });
    out.require_finite()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::norms::{grad_norm, l2_norm};

    fn psi(g: GridSpec) -> Field3D {
        Field3D::from_fn(g, |x, y1, y2| {
            let e = (-x * x / 8.0).exp();
            Complex64::new(e, 0.0) + Complex64::from_polar(0.4 * e, y1 + 2.0 * y2)
        })
    }

    #[test]
    fn scale_one_is_the_cutoff_profile() {
        let g = GridSpec::new(40.0, 128, 8, 0.01).unwrap();
        let p = psi(g);
        let out = large_scale_data(&p, 1.0, g).unwrap();
        let cut = apply_projector(&p, ProjectorSpec::XLow(1.0)).unwrap();
        assert!(out.sub(&cut).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn l2_isometry() {
        let g = GridSpec::new(40.0, 128, 8, 0.01).unwrap();
        let p = psi(g);
        let cut = apply_projector(&p, ProjectorSpec::XLow(0.25f64.powf(-0.01))).unwrap();
        // exact copy and interpolated targets
        for (lx, nx) in [(160.0, 128), (160.0, 512), (160.0, 256)] {
            let t = GridSpec::new(lx, nx, 16, 0.01).unwrap();
            let out = large_scale_data(&p, 0.25, t).unwrap();
            assert!((l2_norm(&out) - l2_norm(&cut)).abs() < 1e-8 * l2_norm(&cut), "{lx} {nx}");
        }
    }

    #[test]
    fn box_checks() {
        let g = GridSpec::new(40.0, 128, 8, 0.01).unwrap();
        let p = psi(g);
        let wide = GridSpec::new(200.0, 128, 8, 0.01).unwrap();
        assert!(matches!(large_scale_data(&p, 0.25, wide), Err(Error::InvalidGrid(_))));
        let narrow = GridSpec::new(40.0, 128, 8, 0.01).unwrap();
        assert!(matches!(large_scale_data(&p, 0.25, narrow), Err(Error::BoxTooSmall { .. })));
        assert!(large_scale_data(&p, 0.0, g).is_err());
        assert!(large_scale_data(&p, 1.5, g).is_err());
    }

    #[test]
    fn euclidean_gradient_invariance() {
        // φ = e^{-|z|²}: ‖∇φ‖² = 3 (π/2)^{3/2}, ‖φ‖² = (π/2)^{3/2}
        let phi = |x: f64, a: f64, b: f64| Complex64::new((-(x * x + a * a + b * b)).exp(), 0.0);
        let grad = (3.0 * (PI / 2.0).powf(1.5)).sqrt();
        let l2 = (PI / 2.0).powf(0.75);
        for (n, lx, nx, ny) in [(4.0, 4.0, 64, 64), (8.0, 3.0, 64, 128), (16.0, 2.0, 128, 256)] {
            let g = GridSpec::new(lx, nx, ny, 0.01).unwrap();
            let f = euclidean_data(phi, n, g).unwrap();
            let gn = grad_norm(&f).unwrap();
            assert!((gn / grad - 1.0).abs() < 0.02, "N={n}: {gn} vs {grad}");
            assert!((l2_norm(&f) * n / l2 - 1.0).abs() < 0.02, "N={n}");
        }
    }

    #[test]
    fn euclidean_scale_one() {
        let g = GridSpec::new(8.0, 32, 16, 0.01).unwrap();
        let phi = |x: f64, a: f64, b: f64| Complex64::new(1.0 + x + a * b, 0.0);
        let f = euclidean_data(phi, 1.0, g).unwrap();
        let i = g.index(20, 2, 15);
        let (x, a, b) = (g.x(20), g.y(2), g.y(15) - 2.0 * PI);
        let r = (x * x + a * a + b * b).sqrt();
        assert!((f.values[i] - phi(x, a, b) * eta(r)).norm() < 1e-14);
    }
}

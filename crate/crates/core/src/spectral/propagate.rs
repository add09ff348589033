use std::f64::consts::PI;

use num_complex::Complex64;

use super::fourier::{Fourier1D, Fourier3D};
use super::grid::{signed_index, Field3D, GridSpec};
use crate::error::{invalid, Result};

/// Symbol `ξ² + |k|²` of `-Δ` in spectral layout.
pub fn dispersion_table(grid: &GridSpec) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    for iy2 in 0..grid.ny {
        let k2 = grid.k(iy2) as f64;
        for iy1 in 0..grid.ny {
            let k1 = grid.k(iy1) as f64;
            for ix in 0..grid.nx {
                let xi = grid.xi(ix);
                out.push(xi * xi + k1 * k1 + k2 * k2);
            }
        }
    }
    out
}

/// Applies `e^{itΔ}` to spectral coefficients in place.
pub fn propagate_spectral(coeffs: &mut [Complex64], dispersion: &[f64], t: f64) {
    coeffs
        .iter_mut()
        .zip(dispersion)
        .for_each(|(z, &w)| *z *= Complex64::from_polar(1.0, -t * w));
}

/// `e^{itΔ} f`: multiplies `f̂(ξ, k)` by `e^{-it(ξ² + |k|²)}`.
pub fn linear_propagate(f: &Field3D, t: f64) -> Result<Field3D> {
    f.require_finite()?;
    let plan = Fourier3D::new(&f.grid);
    let mut c = plan.forward(f)?;
    propagate_spectral(&mut c.values, &dispersion_table(&f.grid), t);
    plan.inverse(&c)
}

/// Checks `ξ0 ∈ (2π/Lx)ℤ`, the boosts that respect x-periodicity.
pub fn check_boost(lx: f64, xi0: f64) -> Result<()> {
    let m = xi0 * lx / (2.0 * PI);
    if !m.is_finite() || (m - m.round()).abs() > 1e-9 * m.abs().max(1.0) {
        return Err(invalid("xi0", format!("{xi0} is not a multiple of 2π/Lx")));
    }
    Ok(())
}

/// Galilean boost of every x-line of `buf` (contiguous, length `plan.len()`):
/// `u ↦ e^{i(ξ0 x - ξ0² t)} u(x - 2 ξ0 t)` on `x ∈ [-Lx/2, Lx/2)`.
pub fn boost_lines(buf: &mut [Complex64], lx: f64, xi0: f64, t: f64, plan: &Fourier1D) -> Result<()> {
    check_boost(lx, xi0)?;
    let nx = plan.len();
    let dx = lx / nx as f64;
    let shift = 2.0 * xi0 * t;
    let translate: Vec<Complex64> = (0..nx)
        .map(|i| {
            let xi = 2.0 * PI / lx * signed_index(i, nx) as f64;
            Complex64::from_polar(1.0, -xi * shift)
        })
        .collect();
    let phase: Vec<Complex64> = (0..nx)
        .map(|i| Complex64::from_polar(1.0, xi0 * (-0.5 * lx + i as f64 * dx) - xi0 * xi0 * t))
        .collect();
    plan.forward(buf);
    for line in buf.chunks_mut(nx) {
        line.iter_mut().zip(&translate).for_each(|(z, m)| *z *= m);
    }
    plan.inverse(buf);
    for line in buf.chunks_mut(nx) {
        line.iter_mut().zip(&phase).for_each(|(z, m)| *z *= m);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::norms::l2_norm;
    use rand::{Rng, SeedableRng};

    #[test]
    fn identity_at_zero_and_plane_wave_phase() {
        let g = GridSpec::new(4.0, 16, 8, 0.01).unwrap();
        let xi0 = g.xi(3);
        let (k1, k2) = (1.0, -2.0);
        let f = Field3D::from_fn(g, |x, y1, y2| Complex64::from_polar(0.8, xi0 * x + k1 * y1 + k2 * y2));
        let same = linear_propagate(&f, 0.0).unwrap();
        assert!(same.sub(&f).unwrap().max_abs() < 1e-13);
        let t = 0.37;
        let out = linear_propagate(&f, t).unwrap();
        let phase = Complex64::from_polar(1.0, -t * (xi0 * xi0 + k1 * k1 + k2 * k2));
        assert!(out.sub(&f.scaled(phase)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn unitary_and_group_law() {
        let g = GridSpec::new(5.0, 16, 8, 0.01).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let f = Field3D::from_values(
            g,
            (0..g.len())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap();
        let (s, t) = (0.3, -1.7);
        let a = linear_propagate(&f, s).unwrap();
        assert!((l2_norm(&a) - l2_norm(&f)).abs() <= 1e-12 * l2_norm(&f));
        let ab = linear_propagate(&a, t).unwrap();
        let direct = linear_propagate(&f, s + t).unwrap();
        assert!(l2_norm(&ab.sub(&direct).unwrap()) <= 1e-12 * l2_norm(&f));
    }

    #[test]
    fn boost_inverse_and_compatibility() {
        let lx = 12.0;
        let nx = 64;
        let plan = Fourier1D::new(nx);
        let xi0 = 3.0 * 2.0 * PI / lx;
        let orig: Vec<Complex64> = (0..2 * nx)
            .map(|i| {
                let x = -0.5 * lx + (i % nx) as f64 * lx / nx as f64;
                Complex64::new((-x * x).exp(), 0.3 * (-(x - 1.0).powi(2)).exp())
            })
            .collect();
        let mut buf = orig.clone();
        boost_lines(&mut buf, lx, xi0, 0.4, &plan).unwrap();
        boost_lines(&mut buf, lx, -xi0, 0.4, &plan).unwrap();
        let err = buf.iter().zip(&orig).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
        assert!(check_boost(lx, 0.5).is_err());
        assert!(check_boost(lx, 0.0).is_ok());
    }
}

use serde::{Deserialize, Serialize};

use super::fourier::Fourier3D;
use super::grid::{Field3D, GridSpec};
use crate::error::Result;

/// A named, parameterized measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub name: String,
    pub value: f64,
    pub parameters: Vec<(String, f64)>,
    pub note: String,
}

impl NormReport {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        NormReport {
            name: name.into(),
            value,
            parameters: Vec::new(),
            note: String::new(),
        }
    }

    pub fn param(mut self, key: &str, v: f64) -> Self {
        self.parameters.push((key.to_string(), v));
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.parameters.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

/// Pairwise (cascade) summation with a fixed split order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if v.len() <= BLOCK {
        v.iter().sum()
    } else {
        let mid = v.len() / 2;
        pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
    }
}

fn weighted_coeff_sum(grid: &GridSpec, coeffs: &[num_complex::Complex64], w: impl Fn(f64, i64, i64) -> f64) -> f64 {
    let mut terms = Vec::with_capacity(coeffs.len());
    for iy2 in 0..grid.ny {
        let k2 = grid.k(iy2);
        for iy1 in 0..grid.ny {
            let k1 = grid.k(iy1);
            let base = grid.index(0, iy1, iy2);
            for ix in 0..grid.nx {
                terms.push(w(grid.xi(ix), k1, k2) * coeffs[base + ix].norm_sqr());
            }
        }
    }
    pairwise_sum(&terms)
}

/// `(Σ ⟨ξ⟩^{2 s1} ⟨k⟩^{2 s2} |û|²)^{1/2}` scaled by the volume `Lx (2π)²`,
/// so that for `s1 = s2 = 0` it equals the grid `L²` norm.
pub fn sobolev_norm(f: &Field3D, s1: f64, s2: f64) -> Result<NormReport> {
    let c = Fourier3D::new(&f.grid).forward(f)?;
    Ok(sobolev_norm_spectral(&c, s1, s2))
}

pub fn sobolev_norm_spectral(c: &Field3D, s1: f64, s2: f64) -> NormReport {
    let g = &c.grid;
    let sum = weighted_coeff_sum(g, &c.values, |xi, k1, k2| {
        (1.0 + xi * xi).powf(s1) * (1.0 + (k1 * k1 + k2 * k2) as f64).powf(s2)
    });
    NormReport::new("sobolev", (g.volume() * sum).sqrt())
        .param("s1", s1)
        .param("s2", s2)
        .note("spectral sum on the periodic box approximating R")
}

/// Isotropic `H¹`: weight `1 + ξ² + |k|²`.
pub fn h1_norm(f: &Field3D) -> Result<f64> {
    let c = Fourier3D::new(&f.grid).forward(f)?;
    Ok(h1_norm_spectral(&c))
}

pub fn h1_norm_spectral(c: &Field3D) -> f64 {
    let g = &c.grid;
    let sum = weighted_coeff_sum(g, &c.values, |xi, k1, k2| {
        1.0 + xi * xi + (k1 * k1 + k2 * k2) as f64
    });
    (g.volume() * sum).sqrt()
}

/// Homogeneous `Ḣ¹`: weight `ξ² + |k|²`.
pub fn grad_norm(f: &Field3D) -> Result<f64> {
    let c = Fourier3D::new(&f.grid).forward(f)?;
    let g = &c.grid;
    let sum = weighted_coeff_sum(g, &c.values, |xi, k1, k2| xi * xi + (k1 * k1 + k2 * k2) as f64);
    Ok((g.volume() * sum).sqrt())
}

/// Grid quadrature `(Σ |u|² dx dy²)^{1/2}`.
pub fn l2_norm(f: &Field3D) -> f64 {
    let terms: Vec<f64> = f.values.iter().map(|z| z.norm_sqr()).collect();
    (pairwise_sum(&terms) * f.grid.cell_volume()).sqrt()
}

/// Grid quadrature of `∫ |u|^p`.
pub fn lp_integral(f: &Field3D, p: f64) -> f64 {
    let terms: Vec<f64> = f.values.iter().map(|z| z.norm().powf(p)).collect();
    pairwise_sum(&terms) * f.grid.cell_volume()
}

pub fn lp_norm(f: &Field3D, p: f64) -> f64 {
    lp_integral(f, p).powf(1.0 / p)
}

/// Fraction of the mass in the outer 10% of the x-box (`|x| ≥ 0.45 Lx`).
pub fn boundary_mass_fraction(f: &Field3D) -> f64 {
    let g = &f.grid;
    let edge = 0.45 * g.lx;
    let mut outer = Vec::new();
    let mut all = Vec::with_capacity(f.values.len());
    for (i, z) in f.values.iter().enumerate() {
        let m = z.norm_sqr();
        all.push(m);
        if g.x(i % g.nx).abs() >= edge {
            outer.push(m);
        }
    }
    let total = pairwise_sum(&all);
    if total == 0.0 {
        0.0
    } else {
        pairwise_sum(&outer) / total
    }
}

/// Fraction of spectral mass with `|ξ| > frac·ξ_Nyq` or `|k_i| > frac·k_Nyq`.
pub fn tail_mass_fraction(c: &Field3D, frac: f64) -> f64 {
    let g = &c.grid;
    let xi_cut = frac * g.xi_nyquist();
    let k_cut = frac * g.k_nyquist() as f64;
    let total = weighted_coeff_sum(g, &c.values, |_, _, _| 1.0);
    if total == 0.0 {
        return 0.0;
    }
    let tail = weighted_coeff_sum(g, &c.values, |xi, k1, k2| {
        let ky = (k1.abs().max(k2.abs())) as f64;
        if xi.abs() > xi_cut || (g.ny > 1 && ky > k_cut) {
            1.0
        } else {
            0.0
        }
    });
    tail / total
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn plane_wave_sobolev() {
        let g = GridSpec::new(8.0, 32, 8, 0.01).unwrap();
        let (ixi, k1, k2) = (5usize, 2i64, -3i64);
        let xi0 = g.xi(ixi);
        let f = Field3D::from_fn(g, |x, y1, y2| {
            Complex64::from_polar(1.0, xi0 * x + k1 as f64 * y1 + k2 as f64 * y2)
        });
        for (s1, s2) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (0.5, 2.0)] {
            let n = sobolev_norm(&f, s1, s2).unwrap().value;
            let expect = (1.0 + xi0 * xi0).powf(s1 / 2.0)
                * (1.0 + (k1 * k1 + k2 * k2) as f64).powf(s2 / 2.0)
                * g.volume().sqrt();
            assert!((n - expect).abs() < 1e-11 * expect, "{s1} {s2}: {n} vs {expect}");
        }
        // quadrature oracle for the L² case
        assert!((l2_norm(&f) - g.volume().sqrt()).abs() < 1e-12 * g.volume().sqrt());
    }

    #[test]
    fn zero_field_norms() {
        let g = GridSpec::new(8.0, 16, 4, 0.01).unwrap();
        let f = Field3D::zeros(g);
        assert_eq!(sobolev_norm(&f, 1.0, 1.0).unwrap().value, 0.0);
        assert_eq!(h1_norm(&f).unwrap(), 0.0);
        assert_eq!(boundary_mass_fraction(&f), 0.0);
    }

    #[test]
    fn pairwise_matches_naive_sum() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sin().abs()).collect();
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - naive).abs() < 1e-10);
    }
}

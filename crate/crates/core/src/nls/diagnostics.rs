use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::spectral::cutoff::eta_cutoff;
use crate::spectral::fourier::Fourier3D;
use crate::spectral::grid::Field3D;
use crate::spectral::norms::{boundary_mass_fraction, lp_integral, pairwise_sum};

/// Center `x̲` of the virial weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "x", rename_all = "snake_case")]
pub enum CenterPath {
    Fixed(f64),
    /// Mass centroid `∫ x |u|² / ∫ |u|²` of the current state.
    Centroid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub momentum: [f64; 3],
    pub virial: f64,
    pub boundary_frac: f64,
}

pub fn mass(f: &Field3D) -> f64 {
    let terms: Vec<f64> = f.values.iter().map(|z| z.norm_sqr()).collect();
    pairwise_sum(&terms) * f.grid.cell_volume()
}

pub fn centroid(f: &Field3D) -> f64 {
    let g = &f.grid;
    let m: Vec<f64> = f.values.iter().map(|z| z.norm_sqr()).collect();
    let xm: Vec<f64> = m.iter().enumerate().map(|(i, v)| g.x(i % g.nx) * v).collect();
    let total = pairwise_sum(&m);
    if total == 0.0 {
        0.0
    } else {
        pairwise_sum(&xm) / total
    }
}

/// Mass, energy `½‖∇u‖² + ⅙‖u‖⁶_{L⁶}`, momentum `Im ∫ ū ∇u`, virial action
/// `∫ χ_R(x - x̲)(x - x̲) Im[ū ∂x u]` with `χ_R = η(·/R)`, and the
/// boundary-mass fraction. Gradients are spectral; first derivatives drop
/// the unpaired Nyquist bin so that real fields carry no momentum.
pub fn diagnostics(f: &Field3D, time: f64, r: f64, center: CenterPath) -> Result<DiagnosticsRow> {
    let plan = Fourier3D::new(&f.grid);
    diagnostics_with(&plan, f, time, r, center)
}

pub(crate) fn diagnostics_with(
    plan: &Fourier3D,
    f: &Field3D,
    time: f64,
    r: f64,
    center: CenterPath,
) -> Result<DiagnosticsRow> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid("R", "must be positive"));
    }
    let g = f.grid;
    let c = plan.forward(f)?;
    let mut grad = Vec::with_capacity(g.len());
    let mut mom = [Vec::with_capacity(g.len()), Vec::with_capacity(g.len()), Vec::with_capacity(g.len())];
    let mut dx = c.clone();
    let odd = |k: f64, i: usize, n: usize| if n > 1 && i == n / 2 { 0.0 } else { k };
    for iy2 in 0..g.ny {
        let k2 = g.k(iy2) as f64;
        let k2o = odd(k2, iy2, g.ny);
        for iy1 in 0..g.ny {
            let k1 = g.k(iy1) as f64;
            let k1o = odd(k1, iy1, g.ny);
            let base = g.index(0, iy1, iy2);
            for ix in 0..g.nx {
                let xi = g.xi(ix);
                let xio = odd(xi, ix, g.nx);
                let m = c.values[base + ix].norm_sqr();
                grad.push((xi * xi + k1 * k1 + k2 * k2) * m);
                mom[0].push(xio * m);
                mom[1].push(k1o * m);
                mom[2].push(k2o * m);
                dx.values[base + ix] *= Complex64::new(0.0, xio);
            }
        }
    }
    let vol = g.volume();
    let energy = 0.5 * vol * pairwise_sum(&grad) + lp_integral(f, 6.0) / 6.0;
    let momentum = [
        vol * pairwise_sum(&mom[0]),
        vol * pairwise_sum(&mom[1]),
        vol * pairwise_sum(&mom[2]),
    ];
    plan.inverse_in_place(&mut dx.values)?;
    let x0 = match center {
        CenterPath::Fixed(x) => x,
        CenterPath::Centroid => centroid(f),
    };
    let virial_terms: Vec<f64> = f
        .values
        .iter()
        .zip(&dx.values)
        .enumerate()
        .map(|(i, (u, ux))| {
            let s = g.x(i % g.nx) - x0;
            eta_cutoff(s, r) * s * (u.conj() * ux).im
        })
        .collect();
    Ok(DiagnosticsRow {
        t: time,
        mass: mass(f),
        energy,
        momentum,
        virial: pairwise_sum(&virial_terms) * g.cell_volume(),
        boundary_frac: boundary_mass_fraction(f),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::GridSpec;

    #[test]
    fn zero_state() {
        let g = GridSpec::new(8.0, 16, 4, 0.01).unwrap();
        let d = diagnostics(&Field3D::zeros(g), 0.0, 1.0, CenterPath::Fixed(0.0)).unwrap();
        assert_eq!((d.mass, d.energy, d.virial, d.boundary_frac), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(d.momentum, [0.0; 3]);
    }

    #[test]
    fn plane_wave_momentum() {
        let g = GridSpec::new(6.0, 32, 8, 0.01).unwrap();
        let (a, xi0) = (0.8, g.xi(3));
        let f = Field3D::from_fn(g, |x, y1, _| Complex64::from_polar(a, xi0 * x + 2.0 * y1));
        let d = diagnostics(&f, 0.0, 2.0, CenterPath::Centroid).unwrap();
        let expect = a * a * xi0 * g.volume();
        assert!((d.momentum[0] - expect).abs() < 1e-12 * expect);
        assert!((d.momentum[1] - 2.0 * a * a * g.volume()).abs() < 1e-12 * expect);
        assert!(d.momentum[2].abs() < 1e-12);
        // quadrature cross-check of Im ∫ ū ∂x u with the exact derivative
        let quad: f64 = f.values.iter().map(|u| (u.conj() * u * Complex64::new(0.0, xi0)).im).sum::<f64>()
            * g.cell_volume();
        assert!((quad - expect).abs() < 1e-12 * expect);
        let kinetic = 0.5 * a * a * (xi0 * xi0 + 4.0) * g.volume();
        let potential = a.powi(6) * g.volume() / 6.0;
        assert!((d.energy - kinetic - potential).abs() < 1e-12 * d.energy);
    }

    #[test]
    fn real_field_has_no_momentum() {
        let g = GridSpec::new(6.0, 32, 4, 0.01).unwrap();
        let f = Field3D::from_fn(g, |x, y1, y2| Complex64::new((-x * x).exp() * (1.0 + 0.3 * (y1 - y2).cos()), 0.0));
        let d = diagnostics(&f, 0.0, 1.0, CenterPath::Fixed(0.0)).unwrap();
        assert!(d.momentum.iter().all(|m| m.abs() < 1e-13));
        assert!(d.virial.abs() < 1e-13);
    }
}

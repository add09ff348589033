use serde::{Deserialize, Serialize};

use super::cutoff::{dyadic_scales, eta3_low, eta_cutoff, eta_high, eta_piece, is_dyadic};
use super::fourier::Fourier3D;
use super::grid::{Field3D, GridSpec};
use crate::error::{invalid, Result};

/// Fourier multipliers built from the cutoff `η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "scale", rename_all = "snake_case")]
pub enum ProjectorSpec {
    /// `P_{≤N}`, tensor cutoff in `(ξ, k1, k2)`.
    Low(f64),
    /// `P_N` (isotropic Littlewood-Paley piece).
    Isotropic(f64),
    /// `P^x_{≤M}`; the scale need not be dyadic.
    XLow(f64),
    /// `P^x_M`.
    XBand(f64),
    /// `P^x_{≥M}`.
    XHigh(f64),
    /// `P^y_{≤N}`.
    YLow(f64),
    /// `P^y_N`.
    YBand(f64),
    /// `Σ_{N≥1} P_N P^x_{≥δN}` for `δ ∈ (0, 1]`.
    Angular(f64),
}

impl ProjectorSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ProjectorSpec::Isotropic(n)
            | ProjectorSpec::XBand(n)
            | ProjectorSpec::YBand(n)
            | ProjectorSpec::Low(n)
            | ProjectorSpec::YLow(n) => {
                if !is_dyadic(n) {
                    return Err(invalid("projector", format!("scale {n} is not dyadic ≥ 1")));
                }
            }
            ProjectorSpec::XLow(m) | ProjectorSpec::XHigh(m) => {
                if !(m.is_finite() && m > 0.0) {
                    return Err(invalid("projector", format!("scale {m} must be positive")));
                }
            }
            ProjectorSpec::Angular(d) => {
                if !(d > 0.0 && d <= 1.0) {
                    return Err(invalid("projector", format!("delta {d} not in (0,1]")));
                }
            }
        }
        Ok(())
    }

    /// Multiplier value at `(ξ, k1, k2)`. `max_freq` bounds the dyadic sum of
    /// the angular projector.
    pub fn symbol(&self, xi: f64, k1: f64, k2: f64, max_freq: f64) -> f64 {
        match *self {
            ProjectorSpec::Low(n) => eta3_low(xi, k1, k2, n),
            ProjectorSpec::Isotropic(n) => iso_piece(xi, k1, k2, n),
            ProjectorSpec::XLow(m) => eta_cutoff(xi, m),
            ProjectorSpec::XBand(m) => eta_piece(xi, m),
            ProjectorSpec::XHigh(m) => eta_high(xi, m),
            ProjectorSpec::YLow(n) => eta_cutoff(k1, n) * eta_cutoff(k2, n),
            ProjectorSpec::YBand(n) => {
                let low = eta_cutoff(k1, n) * eta_cutoff(k2, n);
                if n <= 1.0 {
                    low
                } else {
                    low - eta_cutoff(k1, n / 2.0) * eta_cutoff(k2, n / 2.0)
                }
            }
            ProjectorSpec::Angular(delta) => dyadic_scales(max_freq)
                .into_iter()
                .map(|n| iso_piece(xi, k1, k2, n) * eta_high(xi, delta * n))
                .sum(),
        }
    }
}

fn iso_piece(xi: f64, k1: f64, k2: f64, n: f64) -> f64 {
    if n <= 1.0 {
        eta3_low(xi, k1, k2, 1.0)
    } else {
        eta3_low(xi, k1, k2, n) - eta3_low(xi, k1, k2, n / 2.0)
    }
}

/// Largest frequency magnitude present on the grid, over all three axes.
pub fn grid_max_freq(grid: &GridSpec) -> f64 {
    grid.xi_nyquist().max(grid.k_nyquist() as f64)
}

/// Multiplier table in spectral layout.
pub fn symbol_table(grid: &GridSpec, spec: ProjectorSpec) -> Vec<f64> {
    let maxf = grid_max_freq(grid);
    let mut out = Vec::with_capacity(grid.len());
    for iy2 in 0..grid.ny {
        let k2 = grid.k(iy2) as f64;
        for iy1 in 0..grid.ny {
            let k1 = grid.k(iy1) as f64;
            for ix in 0..grid.nx {
                out.push(spec.symbol(grid.xi(ix), k1, k2, maxf));
            }
        }
    }
    out
}

/// Multiplies spectral coefficients in place.
pub fn apply_symbol(coeffs: &mut Field3D, table: &[f64]) {
    coeffs
        .values
        .iter_mut()
        .zip(table)
        .for_each(|(z, &m)| *z *= m);
}

pub fn apply_projector(f: &Field3D, spec: ProjectorSpec) -> Result<Field3D> {
    spec.validate()?;
    let plan = Fourier3D::new(&f.grid);
    apply_projector_with(&plan, f, spec)
}

pub fn apply_projector_with(plan: &Fourier3D, f: &Field3D, spec: ProjectorSpec) -> Result<Field3D> {
    let mut c = plan.forward(f)?;
    apply_symbol(&mut c, &symbol_table(&f.grid, spec));
    plan.inverse(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::cutoff::dyadic_scales;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};

    fn random_field(g: GridSpec, seed: u64) -> Field3D {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Field3D::from_values(
            g,
            (0..g.len())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap()
    }

    fn grid() -> GridSpec {
        GridSpec::new(6.0, 32, 16, 0.01).unwrap()
    }

    #[test]
    fn low_pass_above_nyquist_is_identity() {
        let g = grid();
        let f = random_field(g, 1);
        let n = dyadic_scales(grid_max_freq(&g)).last().copied().unwrap();
        let p = apply_projector(&f, ProjectorSpec::Low(n)).unwrap();
        assert!(p.sub(&f).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn littlewood_paley_telescopes() {
        let g = grid();
        let f = random_field(g, 2);
        let mut acc = Field3D::zeros(g);
        for n in dyadic_scales(grid_max_freq(&g)) {
            let p = apply_projector(&f, ProjectorSpec::Isotropic(n)).unwrap();
            acc.values.iter_mut().zip(&p.values).for_each(|(a, b)| *a += b);
        }
        assert!(acc.sub(&f).unwrap().max_abs() <= 1e-12 * f.max_abs());
    }

    #[test]
    fn disjoint_pieces_annihilate() {
        let g = grid();
        let f = random_field(g, 3);
        let p1 = apply_projector(&f, ProjectorSpec::Isotropic(1.0)).unwrap();
        let both = apply_projector(&p1, ProjectorSpec::Isotropic(8.0)).unwrap();
        assert!(both.max_abs() < 1e-13);
        let p2 = apply_projector(&f, ProjectorSpec::Isotropic(2.0)).unwrap();
        let both = apply_projector(&p2, ProjectorSpec::Isotropic(16.0)).unwrap();
        assert!(both.max_abs() < 1e-13);
    }

    #[test]
    fn angular_delta_one_matches_definition() {
        let g = grid();
        let f = random_field(g, 4);
        let a = apply_projector(&f, ProjectorSpec::Angular(1.0)).unwrap();
        let mut direct = Field3D::zeros(g);
        for n in dyadic_scales(grid_max_freq(&g)) {
            let pn = apply_projector(&f, ProjectorSpec::Isotropic(n)).unwrap();
            let both = apply_projector(&pn, ProjectorSpec::XHigh(n)).unwrap();
            direct.values.iter_mut().zip(&both.values).for_each(|(a, b)| *a += b);
        }
        assert!(a.sub(&direct).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(ProjectorSpec::Isotropic(3.0).validate().is_err());
        assert!(ProjectorSpec::Angular(0.0).validate().is_err());
        assert!(ProjectorSpec::Angular(1.5).validate().is_err());
        assert!(ProjectorSpec::XLow(1.02).validate().is_ok());
    }
}

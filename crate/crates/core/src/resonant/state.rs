use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::lattice::{Mode, ModeSet};
use crate::spectral::grid::signed_index;
use crate::spectral::norms::pairwise_sum;

/// Vector-valued unknown `{u_p(x)}_{p ∈ modes}` on the x-box `[-Lx/2, Lx/2)`.
///
/// `fields[i]` belongs to `modes.modes()[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VecState {
    pub modes: ModeSet,
    pub lx: f64,
    pub nx: usize,
    pub fields: Vec<Vec<Complex64>>,
    pub time: f64,
}

pub(crate) fn check_line(lx: f64, nx: usize) -> Result<()> {
    if !(lx.is_finite() && lx > 0.0) {
        return Err(Error::InvalidGrid(format!("Lx = {lx} must be positive")));
    }
    if nx < 2 || !nx.is_power_of_two() {
        return Err(Error::InvalidGrid(format!("Nx = {nx} must be a power of two ≥ 2")));
    }
    Ok(())
}

impl VecState {
    pub fn zeros(modes: ModeSet, lx: f64, nx: usize) -> Result<Self> {
        check_line(lx, nx)?;
        let fields = vec![vec![Complex64::new(0.0, 0.0); nx]; modes.len()];
        Ok(VecState { modes, lx, nx, fields, time: 0.0 })
    }

    /// Samples `f(p, x)` for every mode and grid point.
    pub fn from_fn(modes: ModeSet, lx: f64, nx: usize, f: impl Fn(Mode, f64) -> Complex64) -> Result<Self> {
        let mut s = Self::zeros(modes, lx, nx)?;
        for (i, &p) in s.modes.modes().iter().enumerate() {
            for ix in 0..nx {
                s.fields[i][ix] = f(p, -0.5 * lx + ix as f64 * lx / nx as f64);
            }
        }
        s.require_finite()?;
        Ok(s)
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn x(&self, ix: usize) -> f64 {
        -0.5 * self.lx + ix as f64 * self.dx()
    }

    pub fn xi(&self, ix: usize) -> f64 {
        2.0 * PI / self.lx * signed_index(ix, self.nx) as f64
    }

    pub fn field(&self, p: Mode) -> Result<&[Complex64]> {
        Ok(&self.fields[self.modes.require(p)?])
    }

    pub fn field_mut(&mut self, p: Mode) -> Result<&mut [Complex64]> {
        let i = self.modes.require(p)?;
        Ok(&mut self.fields[i])
    }

    pub fn is_finite(&self) -> bool {
        self.fields
            .iter()
            .all(|f| f.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    pub fn require_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(invalid("state", "non-finite entries"))
        }
    }

    pub fn check_same_shape(&self, other: &VecState) -> Result<()> {
        if self.modes != other.modes || self.nx != other.nx || self.lx != other.lx {
            return Err(Error::ShapeMismatch {
                expected: self.modes.len() * self.nx,
                got: other.modes.len() * other.nx,
            });
        }
        Ok(())
    }

    /// Multiplies every field by the same constant.
    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.fields.iter_mut().flatten().for_each(|z| *z *= c);
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.fields.iter_mut().flatten().for_each(|z| *z = z.conj());
        out
    }

    /// `‖u_p‖²_{L²}` by grid quadrature.
    pub fn mode_mass(&self, i: usize) -> f64 {
        let terms: Vec<f64> = self.fields[i].iter().map(|z| z.norm_sqr()).collect();
        pairwise_sum(&terms) * self.dx()
    }

    /// `(Σ_p ‖u_p‖²_{L²})^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let m: Vec<f64> = (0..self.modes.len()).map(|i| self.mode_mass(i)).collect();
        pairwise_sum(&m).sqrt()
    }

    /// `(Σ_p ‖u_p - v_p‖²_{L²})^{1/2}`.
    pub fn l2_distance(&self, other: &VecState) -> Result<f64> {
        self.check_same_shape(other)?;
        let terms: Vec<f64> = self
            .fields
            .iter()
            .zip(&other.fields)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()))
            .collect();
        Ok((pairwise_sum(&terms) * self.dx()).sqrt())
    }

    /// `Σ_p ⟨p⟩² ‖u_p‖²_{L²}`.
    pub fn h1l2_norm_sq(&self) -> f64 {
        let terms: Vec<f64> = self
            .modes
            .modes()
            .iter()
            .enumerate()
            .map(|(i, p)| p.bracket_sq() * self.mode_mass(i))
            .collect();
        pairwise_sum(&terms)
    }

    /// Share of the `h¹L²` mass carried by the modes with `|p|∞ = radius`.
    pub fn boundary_mode_fraction(&self) -> f64 {
        let total = self.h1l2_norm_sq();
        if total == 0.0 {
            return 0.0;
        }
        let edge: Vec<f64> = self
            .modes
            .modes()
            .iter()
            .enumerate()
            .filter(|(_, p)| self.modes.is_boundary(**p))
            .map(|(i, p)| p.bracket_sq() * self.mode_mass(i))
            .collect();
        pairwise_sum(&edge) / total
    }

    /// Fraction of the x-mass in the outer tenth of the box (`|x| ≥ 0.45 Lx`).
    pub fn boundary_mass_fraction(&self) -> f64 {
        let edge = 0.45 * self.lx;
        let mut outer = Vec::new();
        let mut all = Vec::new();
        for f in &self.fields {
            for (ix, z) in f.iter().enumerate() {
                all.push(z.norm_sqr());
                if self.x(ix).abs() >= edge {
                    outer.push(z.norm_sqr());
                }
            }
        }
        let total = pairwise_sum(&all);
        if total == 0.0 {
            0.0
        } else {
            pairwise_sum(&outer) / total
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_and_validation() {
        let s = VecState::zeros(ModeSet::new(1), 10.0, 16).unwrap();
        assert_eq!(s.fields.len(), 9);
        assert!(s.fields.iter().all(|f| f.len() == 16));
        assert!(VecState::zeros(ModeSet::new(1), 10.0, 12).is_err());
        assert!(VecState::zeros(ModeSet::new(1), -1.0, 16).is_err());
        assert!(s.field(Mode::new(2, 0)).is_err());
    }

    #[test]
    fn constant_mass_and_fractions() {
        let c = Complex64::new(0.3, 0.4);
        let s = VecState::from_fn(ModeSet::new(1), 8.0, 32, |p, _| {
            if p == Mode::new(1, 0) {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let i = s.modes.index_of(Mode::new(1, 0)).unwrap();
        assert!((s.mode_mass(i) - 0.25 * 8.0).abs() < 1e-14);
        assert!((s.h1l2_norm_sq() - 2.0 * 0.25 * 8.0).abs() < 1e-14);
        assert_eq!(s.boundary_mode_fraction(), 1.0);
        assert!((s.boundary_mass_fraction() - 0.1).abs() < 0.05);
    }
}

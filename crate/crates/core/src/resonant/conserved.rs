use serde::{Deserialize, Serialize};

use super::nonlinearity::FactoredPlan;
use super::state::VecState;
use crate::error::Result;
use crate::spectral::fourier::Fourier1D;
use crate::spectral::norms::pairwise_sum;

/// g-energies `Σ_p g(p) ‖u_p‖²` for `g ∈ {1, p1, p2, |p|²}`, their sum
/// `E_ls = E_1 + E_{|p|²}`, and the Hamiltonian
/// `H = ½ Σ_p ‖∂x u_p‖² + (1/6) Σ_{(q,n)} ‖T_{q,n}‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConservedSet {
    pub e1: f64,
    pub ep1: f64,
    pub ep2: f64,
    pub ekin: f64,
    pub els: f64,
    pub h: f64,
}

impl ConservedSet {
    pub const NAMES: [&'static str; 6] = ["E_1", "E_p1", "E_p2", "E_kin", "E_ls", "H"];

    pub fn values(&self) -> [f64; 6] {
        [self.e1, self.ep1, self.ep2, self.ekin, self.els, self.h]
    }
}

/// Relative change `|b - a| / |a|`, or the absolute change when `a = 0`.
pub fn relative_change(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        (b - a).abs()
    } else {
        (b - a).abs() / a.abs()
    }
}

pub fn conserved_set(s: &VecState, plan: &FactoredPlan) -> Result<ConservedSet> {
    s.require_finite()?;
    let fft = Fourier1D::new(s.nx);
    conserved_with(s, plan, &fft)
}

pub(crate) fn conserved_with(s: &VecState, plan: &FactoredPlan, fft: &Fourier1D) -> Result<ConservedSet> {
    if plan.radius() != s.modes.radius() {
        return Err(crate::error::invalid("plan", "radius does not match the state"));
    }
    let mut e1 = Vec::new();
    let mut ep1 = Vec::new();
    let mut ep2 = Vec::new();
    let mut ekin = Vec::new();
    let mut grad = Vec::new();
    let mut buf = vec![num_complex::Complex64::new(0.0, 0.0); s.nx];
    for (i, p) in s.modes.modes().iter().enumerate() {
        let m = s.mode_mass(i);
        e1.push(m);
        ep1.push(p.px as f64 * m);
        ep2.push(p.py as f64 * m);
        ekin.push(p.norm_sq() as f64 * m);
        buf.copy_from_slice(&s.fields[i]);
        fft.forward(&mut buf);
        let terms: Vec<f64> = buf
            .iter()
            .enumerate()
            .map(|(ix, c)| s.xi(ix).powi(2) * c.norm_sqr())
            .collect();
        grad.push(s.lx * pairwise_sum(&terms));
    }
    let e1 = pairwise_sum(&e1);
    let ekin = pairwise_sum(&ekin);
    let potential = plan.sum_t_squared(&s.fields, s.nx) * s.dx() / 6.0;
    Ok(ConservedSet {
        e1,
        ep1: pairwise_sum(&ep1),
        ep2: pairwise_sum(&ep2),
        ekin,
        els: e1 + ekin,
        h: 0.5 * pairwise_sum(&grad) + potential,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{enumerate_triples, Mode, ModeSet, DEFAULT_BUDGET};
    use num_complex::Complex64;

    #[test]
    fn single_mode_constant() {
        let c = Complex64::new(0.5, 0.2);
        let (lx, nx) = (7.0, 16);
        let s = VecState::from_fn(ModeSet::new(1), lx, nx, |p, _| {
            if p == Mode::ZERO {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let plan = FactoredPlan::new(&s.modes, &enumerate_triples(&s.modes, DEFAULT_BUDGET).unwrap()).unwrap();
        let e = conserved_set(&s, &plan).unwrap();
        let a2 = c.norm_sqr();
        assert!((e.e1 - a2 * lx).abs() < 1e-14);
        assert_eq!(e.ekin, 0.0);
        assert_eq!(e.ep1, 0.0);
        assert!((e.h - a2.powi(3) * lx / 6.0).abs() < 1e-14);
    }

    #[test]
    fn zero_state() {
        let s = VecState::zeros(ModeSet::new(1), 3.0, 8).unwrap();
        let plan = FactoredPlan::new(&s.modes, &enumerate_triples(&s.modes, DEFAULT_BUDGET).unwrap()).unwrap();
        assert_eq!(conserved_set(&s, &plan).unwrap(), ConservedSet::default());
    }

    #[test]
    fn plane_wave_kinetic_term() {
        let (lx, nx) = (2.0 * std::f64::consts::PI, 32);
        let s = VecState::from_fn(ModeSet::new(0), lx, nx, |_, x| Complex64::from_polar(1e-3, 3.0 * x)).unwrap();
        let plan = FactoredPlan::new(&s.modes, &enumerate_triples(&s.modes, DEFAULT_BUDGET).unwrap()).unwrap();
        let e = conserved_set(&s, &plan).unwrap();
        let kinetic = 0.5 * 9.0 * 1e-6 * lx;
        assert!((e.h - kinetic - 1e-18 * lx / 6.0).abs() < 1e-12 * kinetic);
    }

    #[test]
    fn relative_change_handles_zero() {
        assert_eq!(relative_change(0.0, 1e-9), 1e-9);
        assert!((relative_change(2.0, 2.2) - 0.1).abs() < 1e-12);
    }
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::diagnostics::{diagnostics_with, CenterPath, DiagnosticsRow};
use crate::error::{invalid, Error, Result};
use crate::resonant::conserved::relative_change;
use crate::resonant::stepper::step_count;
use crate::spectral::fourier::{Fourier1D, Fourier3D};
use crate::spectral::grid::{Field3D, GridSpec};
use crate::spectral::norms::tail_mass_fraction;
use crate::spectral::propagate::{boost_lines, dispersion_table};

/// Share of spectral mass above 2/3 of Nyquist that invalidates a run.
pub const TAIL_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct NlsState {
    pub field: Field3D,
    pub time: f64,
}

impl NlsState {
    pub fn new(field: Field3D) -> Result<Self> {
        field.require_finite()?;
        Ok(NlsState { field, time: 0.0 })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.field.grid
    }
}

/// Pointwise exact flow of `i∂t u = ρ|u|⁴u`: `u ← u e^{-iρ dt |u|⁴}`.
pub fn nonlinear_phase(values: &mut [Complex64], rho: f64, dt: f64) {
    if rho == 0.0 {
        return;
    }
    for z in values {
        let a = z.norm_sqr();
        *z *= Complex64::from_polar(1.0, -rho * dt * a * a);
    }
}

pub fn nonlinear_step(s: &NlsState, dt: f64) -> NlsState {
    let mut out = s.clone();
    nonlinear_phase(&mut out.field.values, 1.0, dt);
    out
}

/// Strang splitting for `(i∂t + Δ) u = ρ |u|⁴ u` on a [`GridSpec`], `ρ ∈ {0, 1}`.
#[derive(Debug, Clone)]
pub struct NlsSolver {
    grid: GridSpec,
    plan: Fourier3D,
    disp: Vec<f64>,
    rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NlsEvolveOptions {
    /// Steps between diagnostic rows.
    pub cadence: usize,
    pub store_snapshots: bool,
    pub virial_radius: f64,
    pub center: CenterPath,
}

impl Default for NlsEvolveOptions {
    fn default() -> Self {
        NlsEvolveOptions {
            cadence: 1,
            store_snapshots: false,
            virial_radius: 1.0,
            center: CenterPath::Centroid,
        }
    }
}

/// Largest relative change over a run: mass, energy, each momentum component.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NlsDrift {
    pub mass: f64,
    pub energy: f64,
    pub momentum: [f64; 3],
}

impl NlsDrift {
    pub fn from_rows(rows: &[DiagnosticsRow]) -> Self {
        let mut d = NlsDrift::default();
        if let Some(r0) = rows.first() {
            for r in rows {
                d.mass = d.mass.max(relative_change(r0.mass, r.mass));
                d.energy = d.energy.max(relative_change(r0.energy, r.energy));
                for k in 0..3 {
                    d.momentum[k] = d.momentum[k].max(relative_change(r0.momentum[k], r.momentum[k]));
                }
            }
        }
        d
    }

    /// Momentum drift relative to the largest initial component, which stays
    /// meaningful when one component starts at zero.
    pub fn momentum_scaled(rows: &[DiagnosticsRow]) -> f64 {
        let Some(r0) = rows.first() else { return 0.0 };
        let scale = r0.momentum.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut worst = 0.0f64;
        for r in rows {
            for k in 0..3 {
                worst = worst.max((r.momentum[k] - r0.momentum[k]).abs());
            }
        }
        if scale == 0.0 {
            worst
        } else {
            worst / scale
        }
    }
}

#[derive(Debug, Clone)]
pub struct NlsEvolution {
    pub final_state: NlsState,
    pub snapshots: Vec<NlsState>,
    pub rows: Vec<DiagnosticsRow>,
    pub drift: NlsDrift,
    /// Largest spectral mass share above 2/3 Nyquist seen at a sample.
    pub max_tail: f64,
    pub max_boundary_frac: f64,
}

impl NlsEvolution {
    /// Both validity monitors pass.
    pub fn valid(&self, boundary_limit: f64) -> bool {
        self.max_tail <= TAIL_LIMIT && self.max_boundary_frac <= boundary_limit
    }
}

impl NlsSolver {
    pub fn new(grid: GridSpec, rho: u8) -> Result<Self> {
        grid.validate()?;
        if rho > 1 {
            return Err(invalid("rho", "must be 0 or 1"));
        }
        Ok(NlsSolver {
            grid,
            plan: Fourier3D::new(&grid),
            disp: dispersion_table(&grid),
            rho: rho as f64,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn plan(&self) -> &Fourier3D {
        &self.plan
    }

    fn check(&self, s: &NlsState) -> Result<()> {
        if s.field.grid.nx != self.grid.nx || s.field.grid.ny != self.grid.ny || s.field.grid.lx != self.grid.lx {
            return Err(invalid("state", "grid differs from the solver's"));
        }
        Ok(())
    }

    fn linear_spectral(&self, c: &mut [Complex64], tau: f64) {
        c.iter_mut()
            .zip(&self.disp)
            .for_each(|(z, &w)| *z *= Complex64::from_polar(1.0, -tau * w));
    }

    /// `e^{i(dt/2)Δ} ∘ N(dt) ∘ e^{i(dt/2)Δ}`.
    pub fn strang_step(&self, s: &NlsState, dt: f64) -> Result<NlsState> {
        self.check(s)?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", "must be positive"));
        }
        let mut v = s.field.values.clone();
        self.plan.forward_in_place(&mut v)?;
        self.linear_spectral(&mut v, 0.5 * dt);
        self.plan.inverse_in_place(&mut v)?;
        nonlinear_phase(&mut v, self.rho, dt);
        self.plan.forward_in_place(&mut v)?;
        self.linear_spectral(&mut v, 0.5 * dt);
        self.plan.inverse_in_place(&mut v)?;
        let out = NlsState {
            field: Field3D::from_values(s.field.grid, v)?,
            time: s.time + dt,
        };
        if !out.field.is_finite() {
            return Err(Error::NonFinite { step: 1, time: out.time });
        }
        Ok(out)
    }

    pub fn diagnostics(&self, s: &NlsState, opts: &NlsEvolveOptions) -> Result<DiagnosticsRow> {
        diagnostics_with(&self.plan, &s.field, s.time, opts.virial_radius, opts.center)
    }

    fn tail(&self, s: &NlsState) -> Result<f64> {
        let c = self.plan.forward(&s.field)?;
        Ok(tail_mass_fraction(&c, 2.0 / 3.0))
    }

    /// Repeated Strang steps; adjacent half linear steps between samples are
    /// merged into one full step.
    pub fn evolve(&self, s0: &NlsState, t_final: f64, dt: f64, opts: &NlsEvolveOptions) -> Result<NlsEvolution> {
        self.check(s0)?;
        s0.field.require_finite()?;
        let n_steps = step_count(t_final, dt)?;
        if opts.cadence == 0 || n_steps % opts.cadence != 0 {
            return Err(invalid("cadence", format!("must divide the step count {n_steps}")));
        }
        let mut rows = vec![self.diagnostics(s0, opts)?];
        let mut snapshots = Vec::new();
        if opts.store_snapshots {
            snapshots.push(s0.clone());
        }
        let mut max_tail = self.tail(s0)?;
        let mut max_boundary = rows[0].boundary_frac;
        let mut warned = false;
        let grid = s0.field.grid;
        let t_start = s0.time;
        let mut v = s0.field.values.clone();
        let mut step = 0;
        while step < n_steps {
            // One block of `cadence` steps, ending in physical space.
            self.plan.forward_in_place(&mut v)?;
            self.linear_spectral(&mut v, 0.5 * dt);
            for k in 0..opts.cadence {
                self.plan.inverse_in_place(&mut v)?;
                nonlinear_phase(&mut v, self.rho, dt);
                self.plan.forward_in_place(&mut v)?;
                let tau = if k + 1 == opts.cadence { 0.5 * dt } else { dt };
                self.linear_spectral(&mut v, tau);
            }
            self.plan.inverse_in_place(&mut v)?;
            step += opts.cadence;
            let time = t_start + step as f64 * dt;
            if v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::NonFinite { step, time });
            }
            let s = NlsState {
                field: Field3D::from_values(grid, v.clone())?,
                time,
            };
            let row = self.diagnostics(&s, opts)?;
            let tail = self.tail(&s)?;
            if tail > TAIL_LIMIT && !warned {
                log::warn!("spectral tail {tail:e} above 2/3 Nyquist at t = {time}");
                warned = true;
            }
            max_tail = max_tail.max(tail);
            max_boundary = max_boundary.max(row.boundary_frac);
            rows.push(row);
            if opts.store_snapshots {
                snapshots.push(s);
            }
        }
        let final_state = NlsState {
            field: Field3D::from_values(grid, v)?,
            time: t_start + n_steps as f64 * dt,
        };
        Ok(NlsEvolution {
            final_state,
            snapshots,
            drift: NlsDrift::from_rows(&rows),
            rows,
            max_tail,
            max_boundary_frac: max_boundary,
        })
    }
}

/// `v(x, y, t) = e^{i(ξ0 x - ξ0² t)} u(x - 2ξ0 t, y, t)` at `t = s.time`.
pub fn galilean_boost(s: &NlsState, xi0: f64) -> Result<NlsState> {
    let g = s.field.grid;
    let plan = Fourier1D::new(g.nx);
    let mut out = s.clone();
    boost_lines(&mut out.field.values, g.lx, xi0, s.time, &plan)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::norms::l2_norm;

    fn gaussian(g: GridSpec) -> Field3D {
        Field3D::from_fn(g, |x, y1, y2| {
            Complex64::from_polar(0.5 * (-x * x / 2.0).exp() * (1.0 + 0.2 * y1.cos()), 0.3 * x + 0.1 * y2.sin())
        })
    }

    #[test]
    fn nonlinear_step_cases() {
        let g = GridSpec::new(4.0, 8, 4, 0.1).unwrap();
        let z = NlsState::new(Field3D::zeros(g)).unwrap();
        assert_eq!(nonlinear_step(&z, 0.3).field, z.field);
        let c = Complex64::new(0.6, 0.2);
        let s = NlsState::new(Field3D::from_fn(g, |_, _, _| c)).unwrap();
        let out = nonlinear_step(&s, 0.7);
        let expect = c * Complex64::from_polar(1.0, -0.7 * c.norm_sqr().powi(2));
        assert!(out.field.values.iter().all(|v| (v - expect).norm() < 1e-15));
        let r = NlsState::new(gaussian(g)).unwrap();
        let out = nonlinear_step(&r, 1.3);
        for (a, b) in out.field.values.iter().zip(&r.field.values) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_data_closed_form() {
        let g = GridSpec::new(4.0, 8, 4, 0.01).unwrap();
        let c = Complex64::new(0.7, 0.0);
        let s = NlsState::new(Field3D::from_fn(g, |_, _, _| c)).unwrap();
        let solver = NlsSolver::new(g, 1).unwrap();
        let ev = solver.evolve(&s, 1.0, 0.01, &NlsEvolveOptions { cadence: 25, ..Default::default() }).unwrap();
        let expect = c * Complex64::from_polar(1.0, -0.7f64.powi(4));
        assert!(ev.final_state.field.values.iter().all(|v| (v - expect).norm() < 1e-10));
        assert_eq!(ev.rows.len(), 5);
    }

    #[test]
    fn fused_evolution_matches_single_steps() {
        let g = GridSpec::new(10.0, 32, 4, 0.01).unwrap();
        let s = NlsState::new(gaussian(g)).unwrap();
        let solver = NlsSolver::new(g, 1).unwrap();
        let mut manual = s.clone();
        for _ in 0..6 {
            manual = solver.strang_step(&manual, 0.02).unwrap();
        }
        let ev = solver.evolve(&s, 0.12, 0.02, &NlsEvolveOptions { cadence: 3, ..Default::default() }).unwrap();
        let err = l2_norm(&ev.final_state.field.sub(&manual.field).unwrap());
        assert!(err < 1e-13 * l2_norm(&s.field));
        assert!(ev.drift.mass < 1e-13);
    }

    #[test]
    fn boost_validation() {
        let g = GridSpec::new(10.0, 16, 2, 0.01).unwrap();
        let s = NlsState::new(gaussian(g)).unwrap();
        assert!(galilean_boost(&s, 0.1).is_err());
        let same = galilean_boost(&s, 0.0).unwrap();
        assert!(same.field.sub(&s.field).unwrap().max_abs() < 1e-14);
        assert!(NlsSolver::new(g, 2).is_err());
    }
}

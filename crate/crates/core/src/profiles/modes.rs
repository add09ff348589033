use num_complex::Complex64;

use super::rescale::LineSampler;
use crate::error::{invalid, Error, Result};
use crate::lattice::{Mode, ModeSet};
use crate::resonant::{Trajectory, VecState};
use crate::spectral::fourier::Fourier3D;
use crate::spectral::grid::{Field3D, GridSpec};

/// Largest τ-spacing of resonant snapshots used for reconstruction.
pub const MAX_SNAPSHOT_SPACING: f64 = 1e-2;

fn bins(grid: &GridSpec, p: Mode) -> Option<(usize, usize)> {
    Some((grid.k_bin(p.px)?, grid.k_bin(p.py)?))
}

/// Periodic Fourier coefficients `ψ_p(x) = (2π)^{-2} ∫ ψ(x, y) e^{-i⟨p,y⟩} dy`
/// for every `p` with `|p|_∞ ≤ radius`, via the y-DFT. `p1` pairs with `y1`.
pub fn decompose_periodic_fourier(f: &Field3D, radius: u32) -> Result<VecState> {
    let g = f.grid;
    let r = radius as i64;
    if g.k_bin(r).is_none() || g.k_bin(-r).is_none() {
        return Err(invalid(
            "radius",
            format!("{radius} exceeds the y-resolution Ny = {}", g.ny),
        ));
    }
    let mut c = f.values.clone();
    Fourier3D::new(&g).forward_y(&mut c)?;
    let modes = ModeSet::new(radius);
    let mut out = VecState::zeros(modes.clone(), g.lx, g.nx)?;
    for (i, p) in modes.modes().iter().enumerate() {
        let (b1, b2) = bins(&g, *p).expect("checked above");
        let s = g.index(0, b1, b2);
        out.fields[i].copy_from_slice(&c[s..s + g.nx]);
    }
    Ok(out)
}

/// `Σ_p e^{i⟨p,y⟩} v_p(x)` on `grid` (same x-discretization as `v`).
pub fn compose_periodic(v: &VecState, grid: GridSpec) -> Result<Field3D> {
    grid.validate()?;
    if grid.nx != v.nx || grid.lx != v.lx {
        return Err(Error::InvalidGrid("x-discretization differs from the mode state".into()));
    }
    assemble(v, 1.0, 0.0, &grid, &LineSampler::new(v.lx, v.nx, 1.0, grid.lx, grid.nx)?)
}

/// `Σ_q e^{-it|q|²} e^{i⟨q,y⟩} m^{1/2} v_q(m x)`.
pub(crate) fn assemble(v: &VecState, m: f64, t: f64, grid: &GridSpec, sampler: &LineSampler) -> Result<Field3D> {
    let mut out = Field3D::zeros(*grid);
    let amp = m.sqrt();
    let mut line = vec![Complex64::new(0.0, 0.0); grid.nx];
    for (p, f) in v.modes.modes().iter().zip(&v.fields) {
        if f.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
            continue;
        }
        let Some((b1, b2)) = bins(grid, *p) else {
            return Err(Error::InvalidGrid(format!(
                "mode ({},{}) is not representable with Ny = {}",
                p.px, p.py, grid.ny
            )));
        };
        sampler.sample(f, &mut line);
        let phase = Complex64::from_polar(amp, -t * p.norm_sq() as f64);
        let s = grid.index(0, b1, b2);
        for (o, z) in out.values[s..s + grid.nx].iter_mut().zip(&line) {
            *o = z * phase;
        }
    }
    Fourier3D::new(grid).inverse_y(&mut out.values)?;
    Ok(out)
}

/// State at `τ`, linear in time between neighbouring snapshots.
pub fn interpolate_state(traj: &Trajectory, tau: f64) -> Result<VecState> {
    let snaps = &traj.snapshots;
    let (Some(first), Some(last)) = (snaps.first(), snaps.last()) else {
        return Err(invalid("trajectory", "no snapshots"));
    };
    let (t0, t1) = (first.time, last.time);
    let tol = 1e-9 * traj.dt_snapshot.max(1.0);
    if !(tau >= t0 - tol && tau <= t1 + tol) {
        return Err(Error::TimeOutOfRange {
            requested: tau,
            start: t0,
            end: t1,
        });
    }
    if snaps.len() == 1 {
        return Ok(first.clone());
    }
    let h = traj.dt_snapshot;
    let pos = ((tau - t0) / h).clamp(0.0, (snaps.len() - 1) as f64);
    let i = (pos.floor() as usize).min(snaps.len() - 2);
    let theta = pos - i as f64;
    let near = 1e-12;
    let mut out = if theta <= near {
        snaps[i].clone()
    } else if theta >= 1.0 - near {
        snaps[i + 1].clone()
    } else {
        let (a, b) = (&snaps[i], &snaps[i + 1]);
        let mut s = a.clone();
        for (fs, fb) in s.fields.iter_mut().zip(&b.fields) {
            for (z, w) in fs.iter_mut().zip(fb) {
                *z = *z * (1.0 - theta) + w * theta;
            }
        }
        s
    };
    out.time = tau;
    Ok(out)
}

fn check_spacing(traj: &Trajectory) -> Result<()> {
    if traj.snapshots.len() > 1 && traj.dt_snapshot > MAX_SNAPSHOT_SPACING * (1.0 + 1e-12) {
        return Err(invalid(
            "trajectory",
            format!("snapshot spacing {} exceeds {MAX_SNAPSHOT_SPACING}", traj.dt_snapshot),
        ));
    }
    Ok(())
}

/// `V_M(x, y, t) = Σ_q e^{-it|q|²} e^{i⟨y,q⟩} M^{1/2} v_q(M x, M² t)` on
/// `grid`, with `v(τ)` interpolated linearly between snapshots.
pub fn reconstruct_vm(traj: &Trajectory, m: f64, t: f64, grid: GridSpec) -> Result<Field3D> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(invalid("M", "must be positive"));
    }
    grid.validate()?;
    check_spacing(traj)?;
    let v = interpolate_state(traj, m * m * t)?;
    let sampler = LineSampler::new(v.lx, v.nx, m, grid.lx, grid.nx)?;
    assemble(&v, m, t, &grid, &sampler)
}

/// Reference profile `e^{-x²/(2σ²)} (a0 + a1 e^{2iy1} + a2 e^{2iy2})`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GaussianY2Mode {
    pub sigma: f64,
    pub amplitudes: [f64; 3],
}

impl Default for GaussianY2Mode {
    fn default() -> Self {
        GaussianY2Mode {
            sigma: 6.0,
            amplitudes: [0.5, 0.35, 0.25],
        }
    }
}

impl GaussianY2Mode {
    pub fn sample(&self, grid: GridSpec) -> Result<Field3D> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(invalid("sigma", "must be positive"));
        }
        grid.validate()?;
        if grid.ny < 8 {
            return Err(Error::InvalidGrid("y-mode 2 needs Ny ≥ 8".into()));
        }
        let [a0, a1, a2] = self.amplitudes;
        let s2 = 2.0 * self.sigma * self.sigma;
        Ok(Field3D::from_fn(grid, |x, y1, y2| {
            let g = (-x * x / s2).exp();
            (Complex64::new(a0, 0.0) + Complex64::from_polar(a1, 2.0 * y1) + Complex64::from_polar(a2, 2.0 * y2)) * g
        }))
    }
}

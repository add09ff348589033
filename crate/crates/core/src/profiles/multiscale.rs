use serde::{Deserialize, Serialize};

use super::modes::{decompose_periodic_fourier, reconstruct_vm, MAX_SNAPSHOT_SPACING};
use super::rescale::{large_scale_data, BOX_LIMIT};
use super::residual::{residual_along, ResidualSummary};
use crate::error::{invalid, Result};
use crate::nls::{CenterPath, NlsEvolveOptions, NlsSolver, NlsState};
use crate::resonant::{ConservedDrift, EvolveOptions, ResonantSolver, Trajectory};
use crate::spectral::grid::{Field3D, GridSpec};
use crate::spectral::norms::{h1_norm_spectral, NormReport};

/// Spectral-tail limit for a valid row.
pub const TAIL_LIMIT: f64 = 1e-8;
/// Largest `h¹L²` share of the resonant boundary modes for a valid row.
pub const BOUNDARY_MODE_LIMIT: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MultiscaleConfig {
    pub m_list: Vec<f64>,
    /// Horizon in the slow time `τ = M² t`.
    pub t0: f64,
    /// Mode-set radius of the resonant reference.
    pub radius: u32,
    /// `Ny` of the three-dimensional grids.
    pub ny: usize,
    /// Resonant step in `τ`.
    pub dt_tau: f64,
    /// Spacing in `τ` of compared samples and stored snapshots.
    pub tau_sample: f64,
    /// Largest NLS step in `t`.
    pub nls_dt: f64,
    /// Scale of the `ρ = 0` control row, if any.
    pub control_m: Option<f64>,
    /// Whether to evaluate the non-resonant residual per row.
    pub residual: bool,
}

impl Default for MultiscaleConfig {
    fn default() -> Self {
        MultiscaleConfig {
            m_list: vec![0.25, 0.125, 0.0625],
            t0: 0.5,
            radius: 3,
            ny: 16,
            dt_tau: 1e-3,
            tau_sample: 1e-2,
            nls_dt: 0.02,
            control_m: Some(0.25),
            residual: true,
        }
    }
}

impl MultiscaleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m_list.is_empty() || self.m_list.iter().any(|m| !(*m > 0.0 && *m <= 1.0)) {
            return Err(invalid("m_list", "entries must lie in (0, 1]"));
        }
        if let Some(m) = self.control_m {
            if !(m > 0.0 && m <= 1.0) {
                return Err(invalid("control_m", "must lie in (0, 1]"));
            }
        }
        for (name, v) in [("t0", self.t0), ("dt_tau", self.dt_tau), ("tau_sample", self.tau_sample), ("nls_dt", self.nls_dt)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, "must be positive"));
            }
        }
        if self.tau_sample > MAX_SNAPSHOT_SPACING * (1.0 + 1e-12) {
            return Err(invalid("tau_sample", format!("must be ≤ {MAX_SNAPSHOT_SPACING}")));
        }
        let ratio = self.tau_sample / self.dt_tau;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio || ratio.round() < 1.0 {
            return Err(invalid("tau_sample", "must be a multiple of dt_tau"));
        }
        let n = self.t0 / self.tau_sample;
        if (n - n.round()).abs() > 1e-9 * n {
            return Err(invalid("t0", "must be a multiple of tau_sample"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiscaleRow {
    pub m: f64,
    pub rho: u8,
    /// `sup_n ‖U_M(t_n) − V_M(t_n)‖_{H¹}` over the compared samples.
    pub sup_h1_error: f64,
    /// The same supremum divided by `sup_n ‖V_M(t_n)‖_{H¹}`.
    pub rel_error: f64,
    /// Log-log slope over the valid rows up to and including this one.
    pub slope_running: Option<f64>,
    pub residual: Option<ResidualSummary>,
    pub boundary_frac: f64,
    pub tail_mass: f64,
    pub nls_dt: f64,
    pub samples: usize,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiscaleReport {
    pub rows: Vec<MultiscaleRow>,
    pub control: Option<MultiscaleRow>,
    /// Least-squares slope of `log error` against `log M` over valid rows.
    pub error_slope: Option<f64>,
    /// Same for the Duhamel residual.
    pub residual_slope: Option<f64>,
    pub resonant_drift: ConservedDrift,
    pub resonant_tail: f64,
    pub resonant_boundary_modes: f64,
}

/// Least-squares slope of `ln y` against `ln x`; needs two distinct `x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

struct Reference {
    solver: ResonantSolver,
    traj: Trajectory,
    drift: ConservedDrift,
    tail: f64,
    boundary_modes: f64,
}

/// Modes whose largest value is below this fraction of the largest mode
/// value carry only transform roundoff and are zeroed.
pub const ROUNDOFF_MODE: f64 = 1e-14;

fn resonant_reference(psi: &Field3D, cfg: &MultiscaleConfig, rho: u8) -> Result<Reference> {
    let mut v0 = decompose_periodic_fourier(psi, cfg.radius)?;
    let peak = |f: &Vec<num_complex::Complex64>| f.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let top = v0.fields.iter().map(peak).fold(0.0, f64::max);
    for f in &mut v0.fields {
        if peak(f) <= ROUNDOFF_MODE * top {
            f.iter_mut().for_each(|z| *z = num_complex::Complex64::new(0.0, 0.0));
        }
    }
    let solver = ResonantSolver::for_radius(cfg.radius, v0.lx, v0.nx)?.with_rho(rho)?;
    let cadence = (cfg.tau_sample / cfg.dt_tau).round() as usize;
    let ev = solver.evolve(
        &v0,
        cfg.t0,
        cfg.dt_tau,
        &EvolveOptions {
            cadence,
            store_snapshots: true,
        },
    )?;
    let boundary_modes = ev
        .trajectory
        .snapshots
        .iter()
        .map(|s| s.boundary_mode_fraction())
        .fold(0.0, f64::max);
    Ok(Reference {
        solver,
        traj: ev.trajectory,
        drift: ev.drift,
        tail: ev.max_tail,
        boundary_modes,
    })
}

fn nls_grid(psi: &Field3D, m: f64, cfg: &MultiscaleConfig) -> Result<GridSpec> {
    GridSpec::new(psi.grid.lx / m, psi.grid.nx, cfg.ny, cfg.nls_dt)
}

fn run_row(psi: &Field3D, m: f64, rho: u8, r: &Reference, cfg: &MultiscaleConfig) -> Result<MultiscaleRow> {
    let grid = nls_grid(psi, m, cfg)?;
    let h = cfg.tau_sample / (m * m);
    let sub = (h / cfg.nls_dt).ceil() as usize;
    let dt = h / sub as f64;
    let grid = grid.with_dt(dt);
    let solver = NlsSolver::new(grid, rho)?;
    let plan = solver.plan();
    let opts = NlsEvolveOptions {
        cadence: sub,
        store_snapshots: false,
        virial_radius: 0.25 * grid.lx,
        center: CenterPath::Fixed(0.0),
    };
    let mut u = NlsState::new(large_scale_data(psi, m, grid)?)?;
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    let (mut tail, mut boundary) = (r.tail, 0.0f64);
    let n = r.traj.snapshots.len();
    for (i, snap) in r.traj.snapshots.iter().enumerate() {
        let t = snap.time / (m * m);
        if i > 0 {
            let ev = solver.evolve(&u, h, dt, &opts)?;
            tail = tail.max(ev.max_tail);
            boundary = boundary.max(ev.max_boundary_frac);
            u = ev.final_state;
            u.time = t;
        }
        let v = reconstruct_vm(&r.traj, m, t, grid)?;
        let diff = u.field.sub(&v)?;
        err = err.max(h1_norm_spectral(&plan.forward(&diff)?));
        scale = scale.max(h1_norm_spectral(&plan.forward(&v)?));
        log::debug!("M = {m}: sample {i}/{} error {err:e}", n - 1);
    }
    let residual = if cfg.residual && rho == 1 {
        Some(residual_along(&r.solver, &r.traj, m, &grid)?)
    } else {
        None
    };
    let valid =
        boundary <= BOX_LIMIT && tail <= TAIL_LIMIT && r.boundary_modes <= BOUNDARY_MODE_LIMIT && err.is_finite();
    Ok(MultiscaleRow {
        m,
        rho,
        sup_h1_error: err,
        rel_error: if scale > 0.0 { err / scale } else { err },
        slope_running: None,
        residual,
        boundary_frac: boundary,
        tail_mass: tail,
        nls_dt: dt,
        samples: n,
        valid,
    })
}

/// For each `M`: evolves the quintic NLS from `T^{ls}_M ψ` to `T0 / M²`,
/// compares it in `H¹` with the reconstruction `V_M` of the resonant
/// evolution of the periodic Fourier modes of `ψ` at the snapshot times
/// `τ_n / M²`, and records validity monitors. A `ρ = 0` control row runs
/// both flows linearly.
///
/// `ψ` is given on the reference box `[-Lx/2, Lx/2)`; the row for `M` uses
/// the box `Lx / M` with the same `Nx`, so the rescaled samples are exact
/// copies.
pub fn multiscale_experiment(psi: &Field3D, cfg: &MultiscaleConfig) -> Result<MultiscaleReport> {
    cfg.validate()?;
    psi.require_finite()?;
    let reference = resonant_reference(psi, cfg, 1)?;
    let mut rows = Vec::new();
    for &m in &cfg.m_list {
        log::info!("multiscale row M = {m}");
        let mut row = run_row(psi, m, 1, &reference, cfg)?;
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .chain(std::iter::once(&row))
            .filter(|r: &&MultiscaleRow| r.valid)
            .map(|r| (r.m, r.sup_h1_error))
            .collect();
        row.slope_running = loglog_slope(&pts);
        rows.push(row);
    }
    let control = match cfg.control_m {
        Some(m) => {
            let linear = resonant_reference(psi, cfg, 0)?;
            Some(run_row(psi, m, 0, &linear, cfg)?)
        }
        None => None,
    };
    let valid: Vec<&MultiscaleRow> = rows.iter().filter(|r| r.valid).collect();
    let error_slope = loglog_slope(&valid.iter().map(|r| (r.m, r.sup_h1_error)).collect::<Vec<_>>());
    let residual_slope = loglog_slope(
        &valid
            .iter()
            .filter_map(|r| r.residual.map(|s| (r.m, s.duhamel_h1)))
            .collect::<Vec<_>>(),
    );
    Ok(MultiscaleReport {
        rows,
        control,
        error_slope,
        residual_slope,
        resonant_drift: reference.drift,
        resonant_tail: reference.tail,
        resonant_boundary_modes: reference.boundary_modes,
    })
}

/// Norms of `|V_M|⁴V_M − (i∂t + Δ)V_M` along the reconstruction over
/// `[0, T0 / M²]`: the `L¹_t H¹` integral and the Duhamel `H¹` supremum.
pub fn nonresonant_residual(psi: &Field3D, m: f64, cfg: &MultiscaleConfig) -> Result<NormReport> {
    cfg.validate()?;
    if !(m > 0.0 && m <= 1.0) {
        return Err(invalid("M", "must lie in (0, 1]"));
    }
    let r = resonant_reference(psi, cfg, 1)?;
    let grid = nls_grid(psi, m, cfg)?;
    let s = residual_along(&r.solver, &r.traj, m, &grid)?;
    Ok(NormReport::new("nonresonant_residual", s.duhamel_h1)
        .param("M", m)
        .param("T0", cfg.t0)
        .param("L1H1", s.l1h1)
        .param("duhamel_H1", s.duhamel_h1)
        .param("nodes", s.nodes as f64)
        .param("fine_samples", s.fine_samples as f64)
        .param("Ny", s.ny as f64)
        .note("value is the Duhamel H1 supremum; L1H1 is the time-integrated H1 norm"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::modes::GaussianY2Mode;

    #[test]
    fn slope_fit() {
        let pts = [(0.25, 0.25f64.powi(2)), (0.125, 0.125f64.powi(2)), (0.0625, 0.0625f64.powi(2))];
        assert!((loglog_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(loglog_slope(&pts[..1]), None);
        assert_eq!(loglog_slope(&[(0.5, 1.0), (0.5, 2.0)]), None);
    }

    #[test]
    fn config_checks() {
        assert!(MultiscaleConfig::default().validate().is_ok());
        let bad = MultiscaleConfig {
            tau_sample: 0.02,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = MultiscaleConfig {
            m_list: vec![2.0],
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn linear_control_is_exact() {
        let g = GridSpec::new(128.0, 256, 8, 0.01).unwrap();
        let psi = GaussianY2Mode {
            sigma: 6.0,
            amplitudes: [0.5, 0.3, 0.2],
        }
        .sample(g)
        .unwrap();
        let cfg = MultiscaleConfig {
            m_list: vec![0.5],
            t0: 0.05,
            radius: 2,
            ny: 8,
            dt_tau: 5e-3,
            tau_sample: 1e-2,
            nls_dt: 0.05,
            control_m: Some(0.5),
            residual: false,
        };
        let rep = multiscale_experiment(&psi, &cfg).unwrap();
        let c = rep.control.unwrap();
        assert!(c.sup_h1_error < 1e-10, "{}", c.sup_h1_error);
        assert!(rep.rows[0].sup_h1_error > 1e-6);
    }
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::conserved::{conserved_with, relative_change, ConservedSet};
use super::nonlinearity::FactoredPlan;
use super::state::{check_line, VecState};
use crate::error::{invalid, Error, Result};
use crate::lattice::{enumerate_triples, ModeSet, TripleTable, DEFAULT_BUDGET};
use crate::spectral::fourier::Fourier1D;
use crate::spectral::norms::{pairwise_sum, NormReport};
use crate::spectral::propagate::boost_lines;

/// Spectral mass share above the dealiasing cutoff that triggers a warning.
pub const TAIL_WARNING: f64 = 1e-8;

type Fields = Vec<Vec<Complex64>>;

/// Strang splitting for the truncated resonant system on a fixed x-grid.
///
/// One step: exact half linear step `e^{i(dt/2)∂xx}`, a full RK4 step of
/// `i∂t u_j = N_j(u)`, removal of `|ξ| > ξ_Nyq/3`, and a second half
/// linear step.
#[derive(Debug, Clone)]
pub struct ResonantSolver {
    plan: FactoredPlan,
    fft: Fourier1D,
    lx: f64,
    nx: usize,
    xi2: Vec<f64>,
    keep: Vec<bool>,
    rho: f64,
}

struct Scratch {
    k: [Fields; 4],
    stage: Fields,
}

impl Scratch {
    fn new(n_modes: usize, nx: usize) -> Self {
        let z = vec![vec![Complex64::new(0.0, 0.0); nx]; n_modes];
        Scratch {
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            stage: z,
        }
    }
}

impl ResonantSolver {
    pub fn new(modes: &ModeSet, triples: &TripleTable, lx: f64, nx: usize) -> Result<Self> {
        check_line(lx, nx)?;
        let plan = FactoredPlan::new(modes, triples)?;
        let cut = std::f64::consts::PI * nx as f64 / lx / 3.0;
        let xi: Vec<f64> = (0..nx)
            .map(|i| 2.0 * std::f64::consts::PI / lx * crate::spectral::grid::signed_index(i, nx) as f64)
            .collect();
        Ok(ResonantSolver {
            plan,
            fft: Fourier1D::new(nx),
            lx,
            nx,
            xi2: xi.iter().map(|x| x * x).collect(),
            keep: xi.iter().map(|x| x.abs() <= cut).collect(),
            rho: 1.0,
        })
    }

    /// Coupling `ρ ∈ {0, 1}` in front of the nonlinearity; `ρ = 0` gives the
    /// free flow.
    pub fn with_rho(mut self, rho: u8) -> Result<Self> {
        if rho > 1 {
            return Err(invalid("rho", "must be 0 or 1"));
        }
        self.rho = rho as f64;
        Ok(self)
    }

    pub fn for_radius(radius: u32, lx: f64, nx: usize) -> Result<Self> {
        let modes = ModeSet::new(radius);
        let triples = enumerate_triples(&modes, DEFAULT_BUDGET)?;
        Self::new(&modes, &triples, lx, nx)
    }

    pub fn plan(&self) -> &FactoredPlan {
        &self.plan
    }

    fn check(&self, s: &VecState) -> Result<()> {
        if s.lx != self.lx || s.nx != self.nx || s.modes.radius() != self.plan.radius() {
            return Err(invalid("state", "grid or mode set differs from the solver's"));
        }
        Ok(())
    }

    pub fn conserved(&self, s: &VecState) -> Result<ConservedSet> {
        self.check(s)?;
        conserved_with(s, &self.plan, &self.fft)
    }

    /// `N(u)` for every mode.
    pub fn nonlinearity(&self, s: &VecState) -> Result<Fields> {
        self.check(s)?;
        let mut out = vec![vec![Complex64::new(0.0, 0.0); s.nx]; s.fields.len()];
        self.plan.apply_fields(&s.fields, s.nx, &mut out);
        Ok(out)
    }

    /// Applies `e^{iτ∂xx}` to every mode in place.
    pub fn linear_in_place(&self, s: &mut VecState, tau: f64) {
        for f in &mut s.fields {
            self.fft.forward(f);
            f.iter_mut()
                .zip(&self.xi2)
                .for_each(|(z, &w)| *z *= Complex64::from_polar(1.0, -tau * w));
            self.fft.inverse(f);
        }
    }

    fn rhs(&self, u: &Fields, out: &mut Fields) {
        self.plan.apply_fields(u, self.nx, out);
        // i ∂t u = N  ⇒  ∂t u = -i N
        out.iter_mut()
            .flatten()
            .for_each(|z| *z = Complex64::new(z.im, -z.re));
    }

    fn rk4(&self, u: &mut Fields, dt: f64, sc: &mut Scratch) {
        let Scratch { k, stage } = sc;
        let combine = |stage: &mut Fields, u: &Fields, k: &Fields, h: f64| {
            for ((s, a), b) in stage.iter_mut().zip(u).zip(k) {
                for ((s, a), b) in s.iter_mut().zip(a).zip(b) {
                    *s = a + b * h;
                }
            }
        };
        self.rhs(u, &mut k[0]);
        combine(stage, u, &k[0], 0.5 * dt);
        self.rhs(stage, &mut k[1]);
        combine(stage, u, &k[1], 0.5 * dt);
        self.rhs(stage, &mut k[2]);
        combine(stage, u, &k[2], dt);
        self.rhs(stage, &mut k[3]);
        let h = dt / 6.0;
        for (m, f) in u.iter_mut().enumerate() {
            for (x, z) in f.iter_mut().enumerate() {
                *z += (k[0][m][x] + (k[1][m][x] + k[2][m][x]) * 2.0 + k[3][m][x]) * h;
            }
        }
    }

    /// Dealiases and applies the closing half step; returns the discarded
    /// spectral mass share.
    fn close_step(&self, s: &mut VecState, half: f64) -> f64 {
        let mut removed = Vec::with_capacity(s.fields.len());
        let mut total = Vec::with_capacity(s.fields.len());
        for f in &mut s.fields {
            self.fft.forward(f);
            let mut cut = 0.0;
            let mut all = 0.0;
            for ((z, &w), &keep) in f.iter_mut().zip(&self.xi2).zip(&self.keep) {
                let m = z.norm_sqr();
                all += m;
                if keep {
                    *z *= Complex64::from_polar(1.0, -half * w);
                } else {
                    cut += m;
                    *z = Complex64::new(0.0, 0.0);
                }
            }
            removed.push(cut);
            total.push(all);
            self.fft.inverse(f);
        }
        let total = pairwise_sum(&total);
        if total == 0.0 {
            0.0
        } else {
            pairwise_sum(&removed) / total
        }
    }

    fn step_with(&self, s: &mut VecState, dt: f64, index: usize, sc: &mut Scratch) -> Result<f64> {
        self.linear_in_place(s, 0.5 * dt);
        if self.rho != 0.0 {
            self.rk4(&mut s.fields, dt, sc);
        }
        let tail = self.close_step(s, 0.5 * dt);
        s.time += dt;
        if !s.is_finite() {
            return Err(Error::NonFinite { step: index, time: s.time });
        }
        Ok(tail)
    }

    pub fn step_strang(&self, s: &VecState, dt: f64) -> Result<VecState> {
        self.check(s)?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", "must be positive"));
        }
        let mut out = s.clone();
        let mut sc = Scratch::new(s.fields.len(), s.nx);
        self.step_with(&mut out, dt, 1, &mut sc)?;
        Ok(out)
    }

    pub fn evolve(&self, s0: &VecState, t_final: f64, dt: f64, opts: &EvolveOptions) -> Result<Evolution> {
        self.check(s0)?;
        s0.require_finite()?;
        let n_steps = step_count(t_final, dt)?;
        if opts.cadence == 0 || n_steps % opts.cadence != 0 {
            return Err(invalid("cadence", format!("must divide the step count {n_steps}")));
        }
        let mut s = s0.clone();
        let mut sc = Scratch::new(s.fields.len(), s.nx);
        let c0 = self.conserved(&s)?;
        let mut conserved = vec![(s.time, c0)];
        let mut snapshots = Vec::new();
        if opts.store_snapshots {
            snapshots.push(s.clone());
        }
        let mut max_tail: f64 = 0.0;
        let mut warned = false;
        for step in 1..=n_steps {
            let tail = self.step_with(&mut s, dt, step, &mut sc)?;
            max_tail = max_tail.max(tail);
            if tail > TAIL_WARNING && !warned {
                log::warn!("spectral tail {tail:e} above the dealiasing cutoff at step {step}");
                warned = true;
            }
            if step % opts.cadence == 0 {
                conserved.push((s.time, self.conserved(&s)?));
                if opts.store_snapshots {
                    snapshots.push(s.clone());
                }
            }
        }
        let drift = ConservedDrift::from_series(&conserved);
        Ok(Evolution {
            final_state: s,
            trajectory: Trajectory {
                dt_snapshot: opts.cadence as f64 * dt,
                snapshots,
            },
            conserved,
            drift,
            max_tail,
        })
    }
}

/// `T / dt` as an integer; rejects step sizes that do not divide the horizon.
pub fn step_count(t_final: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", "must be positive"));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(invalid("T", "must be non-negative"));
    }
    let n = (t_final / dt).round();
    if (n * dt - t_final).abs() > 1e-9 * t_final.max(dt) {
        return Err(invalid("dt", format!("{dt} does not divide T = {t_final}")));
    }
    Ok(n as usize)
}

pub fn step_strang(s: &VecState, dt: f64, triples: &TripleTable) -> Result<VecState> {
    ResonantSolver::new(&s.modes, triples, s.lx, s.nx)?.step_strang(s, dt)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    /// Steps between recorded samples.
    pub cadence: usize,
    pub store_snapshots: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions { cadence: 1, store_snapshots: true }
    }
}

/// Uniformly spaced states.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt_snapshot: f64,
    pub snapshots: Vec<VecState>,
}

/// Largest relative change of every conserved quantity against its initial value.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConservedDrift {
    pub e1: f64,
    pub ep1: f64,
    pub ep2: f64,
    pub ekin: f64,
    pub els: f64,
    pub h: f64,
}

impl ConservedDrift {
    pub fn from_series(series: &[(f64, ConservedSet)]) -> Self {
        let mut d = [0.0f64; 6];
        if let Some((_, c0)) = series.first() {
            let v0 = c0.values();
            for (_, c) in series {
                for (k, v) in c.values().iter().enumerate() {
                    d[k] = d[k].max(relative_change(v0[k], *v));
                }
            }
        }
        ConservedDrift { e1: d[0], ep1: d[1], ep2: d[2], ekin: d[3], els: d[4], h: d[5] }
    }

    pub fn values(&self) -> [f64; 6] {
        [self.e1, self.ep1, self.ep2, self.ekin, self.els, self.h]
    }

    pub fn max(&self) -> f64 {
        self.values().into_iter().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub final_state: VecState,
    pub trajectory: Trajectory,
    pub conserved: Vec<(f64, ConservedSet)>,
    pub drift: ConservedDrift,
    /// Largest spectral mass share removed by dealiasing in a single step.
    pub max_tail: f64,
}

/// `W = (Σ_p ⟨p⟩² ‖u_p‖²_{L⁶_{x,t}})^{1/2}` with trapezoid weights in time;
/// a single snapshot carries the weight `dt_snapshot`.
pub fn w_norm(traj: &Trajectory) -> Result<NormReport> {
    let snaps = &traj.snapshots;
    if snaps.is_empty() {
        return Ok(NormReport::new("w_norm", 0.0));
    }
    for w in snaps.windows(2) {
        w[0].check_same_shape(&w[1])?;
        let gap = w[1].time - w[0].time;
        if (gap - traj.dt_snapshot).abs() > 1e-9 * traj.dt_snapshot.max(1e-300) {
            return Err(invalid("trajectory", "snapshots are not uniformly spaced"));
        }
    }
    let h = traj.dt_snapshot;
    let weights: Vec<f64> = if snaps.len() == 1 {
        vec![h]
    } else {
        (0..snaps.len())
            .map(|i| if i == 0 || i + 1 == snaps.len() { 0.5 * h } else { h })
            .collect()
    };
    let first = &snaps[0];
    let mut terms = Vec::with_capacity(first.modes.len());
    for (m, p) in first.modes.modes().iter().enumerate() {
        let per_time: Vec<f64> = snaps
            .iter()
            .zip(&weights)
            .map(|(s, w)| {
                let v: Vec<f64> = s.fields[m].iter().map(|z| z.norm_sqr().powi(3)).collect();
                w * pairwise_sum(&v) * s.dx()
            })
            .collect();
        let l6 = pairwise_sum(&per_time).powf(1.0 / 6.0);
        terms.push(p.bracket_sq() * l6 * l6);
    }
    Ok(NormReport::new("w_norm", pairwise_sum(&terms).sqrt())
        .param("snapshots", snaps.len() as f64)
        .param("dt_snapshot", h)
        .note("trapezoid in time over stored snapshots"))
}

/// `u_p ↦ e^{i(ξ0 x - ξ0² t)} u_p(x - 2ξ0 t)` for every mode, `t = s.time`.
pub fn galilean_boost(s: &VecState, xi0: f64) -> Result<VecState> {
    let plan = Fourier1D::new(s.nx);
    let mut out = s.clone();
    for f in &mut out.fields {
        boost_lines(f, s.lx, xi0, s.time, &plan)?;
    }
    Ok(out)
}

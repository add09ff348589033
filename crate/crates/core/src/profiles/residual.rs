use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::rescale::LineSampler;
use crate::error::{Error, Result};
use crate::lattice::Mode;
use crate::resonant::{ResonantSolver, Trajectory, VecState};
use crate::spectral::fourier::{Fourier1D, Fourier3D};
use crate::spectral::grid::{Field3D, GridSpec};
use crate::spectral::norms::pairwise_sum;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn active_modes(states: &[&VecState]) -> Vec<usize> {
    let n = states[0].fields.len();
    (0..n)
        .filter(|&i| states.iter().any(|s| s.fields[i].iter().any(|z| *z != ZERO)))
        .collect()
}

/// Every `p1 - p2 + p3 - p4 + p5` over `modes`.
fn quintic_support(modes: &[Mode]) -> BTreeSet<Mode> {
    let one: BTreeSet<Mode> = modes.iter().copied().collect();
    let mut acc = one.clone();
    for sign in [-1, 1, -1, 1] {
        let mut next = BTreeSet::new();
        for a in &acc {
            for b in &one {
                next.insert(Mode::new(a.px + sign * b.px, a.py + sign * b.py));
            }
        }
        acc = next;
    }
    acc
}

/// Smallest power of two `Ny` whose frequency range `(-Ny/2, Ny/2)` holds
/// every output of the quintic product.
fn alias_free_ny(support: &BTreeSet<Mode>) -> usize {
    let k = support.iter().map(|p| p.sup_norm()).max().unwrap_or(0) as usize;
    if k == 0 {
        1
    } else {
        (2 * k + 1).next_power_of_two()
    }
}

/// The full quintic `|V|⁴V` of a mode assembly, split by the total phase
/// `Ω = |p1|² - |p2|² + |p3|² - |p4|² + |p5|²` of its monomials, with the
/// resonant nonlinearity removed from the matching class.
///
/// With `V(t) = Σ_q e^{-it|q|²} e^{i⟨q,y⟩} M^{1/2} v_q(M x)` the forcing is
/// `F(t) = Σ_Ω e^{-itΩ} F_Ω`; resonant interactions are the monomials with
/// `Ω = |q_out|²`.
pub(crate) struct ForcingModel<'a> {
    solver: &'a ResonantSolver,
    m: f64,
    grid: GridSpec,
    plan: Fourier3D,
    sampler: LineSampler,
    active: Vec<(usize, Mode)>,
    /// `Ω_j = e_min + d·j` for `j ∈ [-2A, 3A]`
    omegas: Vec<i64>,
    e_min: i64,
    step: i64,
    y_phase: Vec<Vec<Complex64>>,
    /// Spectral indices that can carry forcing, with `H¹` weight and `|ζ|²+|k|²`.
    pub(crate) bins: Vec<usize>,
    weight: Vec<f64>,
    disp: Vec<f64>,
    lookup: Vec<usize>,
}

/// Spectral forcing per phase class on [`ForcingModel::bins`].
pub(crate) struct ForcingClasses {
    pub(crate) values: Vec<Vec<Complex64>>,
}

impl<'a> ForcingModel<'a> {
    /// `states` fixes the set of modes that may be nonzero; `x_grid` gives
    /// the x-discretization (its `Ny` is raised to the alias-free size).
    pub(crate) fn new(solver: &'a ResonantSolver, states: &[&VecState], m: f64, x_grid: &GridSpec) -> Result<Self> {
        let ny = {
            let first = states[0];
            let act = active_modes(states);
            let modes: Vec<Mode> = act.iter().map(|&i| first.modes.modes()[i]).collect();
            alias_free_ny(&quintic_support(&modes)).max(x_grid.ny)
        };
        Self::with_grid(solver, states, m, GridSpec { ny, ..*x_grid })
    }

    pub(crate) fn with_grid(solver: &'a ResonantSolver, states: &[&VecState], m: f64, grid: GridSpec) -> Result<Self> {
        grid.validate()?;
        let first = states[0];
        let act = active_modes(states);
        let active: Vec<(usize, Mode)> = act.iter().map(|&i| (i, first.modes.modes()[i])).collect();
        let modes: Vec<Mode> = active.iter().map(|a| a.1).collect();
        let support = quintic_support(&modes);
        if alias_free_ny(&support) > grid.ny {
            return Err(Error::InvalidGrid(format!(
                "Ny = {} aliases the quintic product (needs {})",
                grid.ny,
                alias_free_ny(&support)
            )));
        }
        let energies: Vec<i64> = modes.iter().map(|p| p.norm_sq()).collect();
        let e_min = energies.iter().copied().min().unwrap_or(0);
        let e_max = energies.iter().copied().max().unwrap_or(0);
        let step = energies.iter().fold(0, |g, e| gcd(g, e - e_min));
        let a = if step == 0 { 0 } else { (e_max - e_min) / step };
        let omegas: Vec<i64> = (-2 * a..=3 * a).map(|j| e_min + step * j).collect();
        let y_phase = modes
            .iter()
            .map(|p| {
                let mut v = Vec::with_capacity(grid.ny * grid.ny);
                for iy2 in 0..grid.ny {
                    for iy1 in 0..grid.ny {
                        let arg = p.px as f64 * grid.y(iy1) + p.py as f64 * grid.y(iy2);
                        v.push(Complex64::from_polar(1.0, arg));
                    }
                }
                v
            })
            .collect();
        let mut bins = Vec::new();
        let mut weight = Vec::new();
        let mut disp = Vec::new();
        let mut lookup = vec![usize::MAX; grid.len()];
        for q in &support {
            let (b1, b2) = (grid.k_bin(q.px).unwrap(), grid.k_bin(q.py).unwrap());
            for ix in 0..grid.nx {
                let idx = grid.index(ix, b1, b2);
                let xi = grid.xi(ix);
                lookup[idx] = bins.len();
                bins.push(idx);
                disp.push(xi * xi + q.norm_sq() as f64);
                weight.push(1.0 + xi * xi + q.norm_sq() as f64);
            }
        }
        Ok(ForcingModel {
            solver,
            m,
            plan: Fourier3D::new(&grid),
            sampler: LineSampler::new(first.lx, first.nx, m, grid.lx, grid.nx)?,
            grid,
            active,
            omegas,
            e_min,
            step,
            y_phase,
            bins,
            weight,
            disp,
            lookup,
        })
    }

    pub(crate) fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub(crate) fn omegas(&self) -> &[i64] {
        &self.omegas
    }

    pub(crate) fn classes(&self, v: &VecState) -> Result<ForcingClasses> {
        let g = &self.grid;
        let amp = self.m.sqrt();
        let lines: Vec<Vec<Complex64>> = self
            .active
            .iter()
            .map(|&(i, _)| {
                let mut l = vec![ZERO; g.nx];
                self.sampler.sample(&v.fields[i], &mut l);
                l.iter_mut().for_each(|z| *z *= amp);
                l
            })
            .collect();
        for (i, f) in v.fields.iter().enumerate() {
            if !self.active.iter().any(|a| a.0 == i) && f.iter().any(|z| *z != ZERO) {
                return Err(Error::Undefined(format!("mode {i} became active outside the forcing model")));
            }
        }
        let k = self.omegas.len();
        let ny2 = g.ny * g.ny;
        let mut phys = vec![vec![ZERO; g.len()]; k];
        let mut p = vec![ZERO; g.len()];
        for kk in 0..k {
            let theta = if self.step == 0 {
                0.0
            } else {
                2.0 * PI * kk as f64 / (self.step as f64 * k as f64)
            };
            let rot: Vec<Complex64> = self
                .active
                .iter()
                .map(|a| Complex64::from_polar(1.0, -theta * a.1.norm_sq() as f64))
                .collect();
            for iy in 0..ny2 {
                let coef: Vec<Complex64> = rot.iter().zip(&self.y_phase).map(|(r, y)| r * y[iy]).collect();
                let row = &mut p[iy * g.nx..(iy + 1) * g.nx];
                for (ix, out) in row.iter_mut().enumerate() {
                    let mut s = ZERO;
                    for (c, l) in coef.iter().zip(&lines) {
                        s += c * l[ix];
                    }
                    *out = s * s.norm_sqr() * s.norm_sqr();
                }
            }
            // Q_j = (1/K) Σ_k e^{iθ_k Ω_j} P(θ_k)
            for (j, dst) in phys.iter_mut().enumerate() {
                let w = Complex64::from_polar(1.0 / k as f64, theta * self.omegas[j] as f64);
                for (d, z) in dst.iter_mut().zip(&p) {
                    *d += z * w;
                }
            }
        }
        let mut values = Vec::with_capacity(k);
        for mut q in phys {
            self.plan.forward_in_place(&mut q)?;
            values.push(self.bins.iter().map(|&b| q[b]).collect::<Vec<_>>());
        }
        self.remove_resonant(v, &mut values)?;
        Ok(ForcingClasses { values })
    }

    fn remove_resonant(&self, v: &VecState, values: &mut [Vec<Complex64>]) -> Result<()> {
        let g = &self.grid;
        let n = self.solver.nonlinearity(v)?;
        let fft = Fourier1D::new(g.nx);
        let amp = self.m.powf(2.5);
        let mut line = vec![ZERO; g.nx];
        for (p, f) in v.modes.modes().iter().zip(&n) {
            if f.iter().all(|z| *z == ZERO) {
                continue;
            }
            let e = p.norm_sq();
            let class = if self.step == 0 {
                (e == self.e_min).then_some(0)
            } else {
                let off = e - self.e_min;
                let a = (self.omegas.len() as i64 - 1) / 5;
                (off % self.step == 0 && (-2 * a..=3 * a).contains(&(off / self.step)))
                    .then(|| (off / self.step + 2 * a) as usize)
            };
            let bins = (g.k_bin(p.px), g.k_bin(p.py));
            let (Some(class), (Some(b1), Some(b2))) = (class, bins) else {
                return Err(Error::Undefined(format!(
                    "resonant output at ({},{}) lies outside the forcing support",
                    p.px, p.py
                )));
            };
            self.sampler.sample(f, &mut line);
            fft.forward(&mut line);
            for (ix, z) in line.iter().enumerate() {
                let pos = self.lookup[g.index(ix, b1, b2)];
                if pos == usize::MAX {
                    return Err(Error::Undefined("resonant output outside the forcing support".into()));
                }
                values[class][pos] -= z * amp;
            }
        }
        Ok(())
    }

    /// Spectral values of `F(t)` on the model bins.
    pub(crate) fn at_time(&self, c: &ForcingClasses, t: f64) -> Vec<Complex64> {
        let rot: Vec<Complex64> = self.omegas.iter().map(|&o| Complex64::from_polar(1.0, -t * o as f64)).collect();
        (0..self.bins.len())
            .map(|b| c.values.iter().zip(&rot).fold(ZERO, |acc, (v, r)| acc + v[b] * r))
            .collect()
    }

    pub(crate) fn h1(&self, spectral: &[Complex64]) -> f64 {
        let terms: Vec<f64> = spectral.iter().zip(&self.weight).map(|(z, w)| w * z.norm_sqr()).collect();
        (self.grid.volume() * pairwise_sum(&terms)).sqrt()
    }

    /// `F(t)` in physical space.
    pub(crate) fn field_at(&self, c: &ForcingClasses, t: f64) -> Result<Field3D> {
        let mut out = Field3D::zeros(self.grid);
        for (b, z) in self.bins.iter().zip(self.at_time(c, t)) {
            out.values[*b] = z;
        }
        self.plan.inverse_in_place(&mut out.values)?;
        Ok(out)
    }
}

/// `F(t) = |V_M|⁴ V_M − (i∂t + Δ) V_M` for the assembly of `v` at time `t`,
/// on `grid` (whose `Ny` must resolve the quintic product).
pub fn nonresonant_forcing(solver: &ResonantSolver, v: &VecState, m: f64, t: f64, grid: GridSpec) -> Result<Field3D> {
    let model = ForcingModel::with_grid(solver, &[v], m, grid)?;
    let c = model.classes(v)?;
    model.field_at(&c, t)
}

/// `∫_0^h e^{-iωr} (1 - r/h) dr` and `∫_0^h e^{-iωr} (r/h) dr`.
fn filon_weights(omega: f64, h: f64) -> (Complex64, Complex64) {
    let th = omega * h;
    let (i0, i1) = if th.abs() < 1e-3 {
        let t2 = th * th;
        (
            Complex64::new(1.0 - t2 / 6.0, -th / 2.0 + th * t2 / 24.0),
            Complex64::new(0.5 - t2 / 8.0, -th / 3.0 + th * t2 / 30.0),
        )
    } else {
        let e = Complex64::from_polar(1.0, -th);
        let i = Complex64::new(0.0, 1.0);
        ((1.0 - e) / (i * th), (e * (1.0 + i * th) - 1.0) / (th * th))
    };
    ((i0 - i1) * h, i1 * h)
}

/// Norms of the non-resonant forcing along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ResidualSummary {
    /// `∫ ‖F(t)‖_{H¹} dt`, trapezoid on a grid resolving the class beats.
    pub l1h1: f64,
    /// `sup_n ‖∫_0^{t_n} e^{-isΔ} F(s) ds‖_{H¹}` over snapshot times.
    pub duhamel_h1: f64,
    pub nodes: usize,
    pub fine_samples: usize,
    pub ny: usize,
}

/// Evaluates the forcing classes at each snapshot `τ_n` (times
/// `t_n = τ_n / M²`), interpolates them linearly in `t`, and integrates the
/// class phases exactly (Filon) for the Duhamel term.
pub(crate) fn residual_along(
    solver: &ResonantSolver,
    traj: &Trajectory,
    m: f64,
    x_grid: &GridSpec,
) -> Result<ResidualSummary> {
    let snaps = &traj.snapshots;
    if snaps.is_empty() {
        return Err(crate::error::invalid("trajectory", "no snapshots"));
    }
    let refs: Vec<&VecState> = snaps.iter().collect();
    let model = ForcingModel::new(solver, &refs, m, x_grid)?;
    let times: Vec<f64> = snaps.iter().map(|s| s.time / (m * m)).collect();
    let om = model.omegas();
    let beat = (om.last().unwrap() - om.first().unwrap()) as f64;
    let fine_dt = if beat > 0.0 { 2.0 * PI / beat / 16.0 } else { f64::INFINITY };
    let nb = model.bins.len();
    let mut duhamel = vec![ZERO; nb];
    let mut sup = 0.0f64;
    let mut l1 = Vec::new();
    let mut fine = 0usize;
    let mut prev = model.classes(&snaps[0])?;
    let mut prev_norm = model.h1(&model.at_time(&prev, times[0]));
    if snaps.len() == 1 {
        return Ok(ResidualSummary {
            l1h1: 0.0,
            duhamel_h1: 0.0,
            nodes: 1,
            fine_samples: 1,
            ny: model.grid().ny,
        });
    }
    for n in 1..snaps.len() {
        let cur = model.classes(&snaps[n])?;
        let (a, b) = (times[n - 1], times[n]);
        let h = b - a;
        let sub = ((h / fine_dt).ceil() as usize).max(1);
        let mut norms = vec![prev_norm];
        for s in 1..=sub {
            let th = s as f64 / sub as f64;
            if s == sub {
                norms.push(model.h1(&model.at_time(&cur, b)));
            } else {
                let mix = ForcingClasses {
                    values: prev
                        .values
                        .iter()
                        .zip(&cur.values)
                        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * (1.0 - th) + q * th).collect())
                        .collect(),
                };
                norms.push(model.h1(&model.at_time(&mix, a + th * h)));
            }
        }
        let hs = h / sub as f64;
        l1.push(hs * (pairwise_sum(&norms) - 0.5 * (norms[0] + norms[sub])));
        fine += sub;
        prev_norm = norms[sub];
        for (j, &o) in om.iter().enumerate() {
            let (va, vb) = (&prev.values[j], &cur.values[j]);
            for (bi, d) in duhamel.iter_mut().enumerate() {
                let omega = o as f64 - model.disp[bi];
                let (w0, w1) = filon_weights(omega, h);
                *d += Complex64::from_polar(1.0, -omega * a) * (va[bi] * w0 + vb[bi] * w1);
            }
        }
        sup = sup.max(model.h1(&duhamel));
        prev = cur;
    }
    Ok(ResidualSummary {
        l1h1: pairwise_sum(&l1),
        duhamel_h1: sup,
        nodes: snaps.len(),
        fine_samples: fine + 1,
        ny: model.grid().ny,
    })
}

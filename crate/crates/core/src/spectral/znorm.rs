//! Discrete evaluation of the time-divisible `Z` norm
//!
//! ```text
//! ‖u‖_Z(I) = Σ_{p0 ∈ {9/2, 18}} ( Σ_N N^{5 - p0/2} ‖1_I P_N u‖^{p0}_{ℓ^{r}_γ L^{p0}(R×T²×I_γ)} )^{1/p0}
//! ```
//!
//! with `r = 4 p0 / (p0 - 2)` and windows `I_γ = [2πγ, 2π(γ+1)]`. Time
//! integrals are trapezoid sums over the stored snapshots.

use std::f64::consts::PI;

use super::cutoff::dyadic_scales;
use super::fourier::Fourier3D;
use super::grid::Field3D;
use super::norms::{lp_integral, NormReport};
use super::projector::{grid_max_freq, symbol_table, ProjectorSpec};
use crate::error::{invalid, Result};

pub const Z_EXPONENTS: [f64; 2] = [4.5, 18.0];

/// Checks uniform spacing and that the spacing divides `2π`; returns it.
pub fn snapshot_spacing(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(invalid("snapshots", "need at least two snapshots"));
    }
    let h = times[1] - times[0];
    if h <= 0.0 {
        return Err(invalid("snapshots", "times must increase"));
    }
    for w in times.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0) {
            return Err(invalid("snapshots", "non-uniform spacing"));
        }
    }
    let per = 2.0 * PI / h;
    if (per - per.round()).abs() > 1e-6 {
        return Err(invalid("snapshots", format!("spacing {h} does not divide 2π")));
    }
    Ok(h)
}

/// Trapezoid integral of samples `vals[i]` at `times[i]` restricted to `[a, b]`.
fn window_trapezoid(times: &[f64], vals: &[f64], a: f64, b: f64, h: f64) -> f64 {
    let tol = 1e-9 * h;
    let idx: Vec<usize> = (0..times.len())
        .filter(|&i| times[i] >= a - tol && times[i] <= b + tol)
        .collect();
    idx.windows(2)
        .map(|w| 0.5 * (vals[w[0]] + vals[w[1]]) * (times[w[1]] - times[w[0]]))
        .sum()
}

pub fn z_norm(snapshots: &[(f64, Field3D)], t0: f64, t1: f64) -> Result<NormReport> {
    if t1 < t0 {
        return Err(invalid("interval", "t1 < t0"));
    }
    let times: Vec<f64> = snapshots.iter().map(|(t, _)| *t).collect();
    let h = snapshot_spacing(&times)?;
    let grid = snapshots[0].1.grid;
    let plan = Fourier3D::new(&grid);
    let scales = dyadic_scales(grid_max_freq(&grid));
    let tables: Vec<Vec<f64>> = scales
        .iter()
        .map(|&n| symbol_table(&grid, ProjectorSpec::Isotropic(n)))
        .collect();

    // integrals[N][p0][snapshot] = ∫ |P_N u(t)|^{p0} dx dy
    let mut integrals = vec![vec![vec![0.0; snapshots.len()]; 2]; scales.len()];
    for (s, (_, f)) in snapshots.iter().enumerate() {
        f.check_same(&snapshots[0].1)?;
        let c = plan.forward(f)?;
        for (ni, table) in tables.iter().enumerate() {
            let mut pn = c.clone();
            pn.values.iter_mut().zip(table).for_each(|(z, &m)| *z *= m);
            plan.inverse_in_place(&mut pn.values)?;
            for (pi, &p0) in Z_EXPONENTS.iter().enumerate() {
                integrals[ni][pi][s] = lp_integral(&pn, p0);
            }
        }
    }

    let g_lo = (t0 / (2.0 * PI)).floor() as i64;
    let g_hi = (t1 / (2.0 * PI)).ceil() as i64;
    let mut total = 0.0;
    for (pi, &p0) in Z_EXPONENTS.iter().enumerate() {
        let r = 4.0 * p0 / (p0 - 2.0);
        let mut sum_n = 0.0;
        for (ni, &n) in scales.iter().enumerate() {
            let mut lr = 0.0;
            for gamma in g_lo..g_hi {
                let a = (2.0 * PI * gamma as f64).max(t0);
                let b = (2.0 * PI * (gamma + 1) as f64).min(t1);
                if b <= a {
                    continue;
                }
                let w = window_trapezoid(&times, &integrals[ni][pi], a, b, h);
                lr += w.powf(r / p0);
            }
            let lr = lr.powf(1.0 / r);
            sum_n += n.powf(5.0 - p0 / 2.0) * lr.powf(p0);
        }
        total += sum_n.powf(1.0 / p0);
    }
    Ok(NormReport::new("z_norm", total)
        .param("t0", t0)
        .param("t1", t1)
        .param("dt_snapshot", h)
        .param("n_max", *scales.last().unwrap())
        .note("trapezoid in time over stored snapshots; windows truncated to the interval"))
}

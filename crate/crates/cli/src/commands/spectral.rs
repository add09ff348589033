use std::f64::consts::PI;

use num_complex::Complex64;
use qrs_core::spectral::{strichartz_ratio_with, weyl_kernel_sup, Field3D, GridSpec, StrichartzSampling};
use serde::Serialize;

use super::{csv_bytes, json_bytes};
use crate::error::{CliError, InModule};
use crate::manifest::Run;
use crate::params::{Profile, StrichartzParams, WeylParams};

#[derive(Serialize)]
struct StrichartzRow {
    #[serde(rename = "N")]
    n: f64,
    p: f64,
    q: f64,
    ratio: f64,
    numerator: f64,
    boundary_fraction: f64,
}

#[derive(Serialize)]
struct StrichartzSummary {
    min_ratio: f64,
    max_ratio: f64,
    variation: f64,
}

/// Initial data of the Strichartz sweep, modulated by `e^{iξ0 x}`:
/// `gaussian` `e^{-x²/(2σ²)}`, `bump` `e^{1 - 1/(1 - (x/4σ)²)}` on `|x| < 4σ`,
/// `planewave` the modulation alone.
pub fn profile(kind: Profile, grid: GridSpec, sigma: f64, xi0: f64) -> Field3D {
    Field3D::from_fn(grid, |x, _, _| {
        let env = match kind {
            Profile::Gaussian => (-x * x / (2.0 * sigma * sigma)).exp(),
            Profile::Bump => {
                let r = x / (4.0 * sigma);
                if r.abs() < 1.0 {
                    (1.0 - 1.0 / (1.0 - r * r)).exp()
                } else {
                    0.0
                }
            }
            Profile::Planewave => 1.0,
        };
        Complex64::from_polar(env, xi0 * x)
    })
}

pub fn strichartz(run: &mut Run, p: &StrichartzParams) -> Result<bool, CliError> {
    let u0 = profile(p.profile, p.grid()?, p.sigma, p.xi0);
    let sampling = StrichartzSampling { uniform: p.uniform, graded: p.graded };
    let mut rows = Vec::new();
    for &n in &p.n_list {
        log::info!("strichartz N = {n}");
        let r = strichartz_ratio_with(&u0, n, p.p, p.gamma_max, &sampling).in_module("spectral")?;
        rows.push(StrichartzRow {
            n,
            p: p.p,
            q: r.get("q").unwrap_or(f64::NAN),
            ratio: r.value,
            numerator: r.get("numerator").unwrap_or(f64::NAN),
            boundary_fraction: r.get("boundary_fraction").unwrap_or(f64::NAN),
        });
        run.write(&p.out, &csv_bytes(&rows)?)?;
    }
    let min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let max = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let summary = StrichartzSummary { min_ratio: min, max_ratio: max, variation: max / min };
    run.write("summary.json", &json_bytes(&summary)?)?;
    println!("ratio range [{min:.4e}, {max:.4e}], variation {:.3}", summary.variation);
    Ok(true)
}

#[derive(Serialize)]
struct WeylRow {
    t: f64,
    sup: f64,
}

pub fn weyl(run: &mut Run, p: &WeylParams) -> Result<bool, CliError> {
    let rows = (0..p.t_samples)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / p.t_samples as f64;
            Ok(WeylRow { t, sup: weyl_kernel_sup(p.n, t).in_module("spectral")? })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    run.write(&p.out, &csv_bytes(&rows)?)?;
    Ok(true)
}

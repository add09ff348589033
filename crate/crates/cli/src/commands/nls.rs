use num_complex::Complex64;
use qrs_core::nls::checkpoint::{read_state, write_state};
use qrs_core::nls::{galilean_boost, CenterPath, DiagnosticsRow, NlsDrift, NlsEvolveOptions, NlsSolver, NlsState, TAIL_LIMIT};
use qrs_core::profiles::rescale::BOX_LIMIT;
use qrs_core::profiles::{euclidean_data, large_scale_data, GaussianY2Mode};
use qrs_core::spectral::{Field3D, GridSpec};
use serde::Serialize;

use super::{csv_bytes, json_bytes};
use crate::config::precondition;
use crate::error::{CliError, InModule};
use crate::manifest::Run;
use crate::params::{InitNls, NlsParams};

const MODULE: &str = "nls3d";

#[derive(Serialize)]
struct Row {
    t: f64,
    mass: f64,
    energy: f64,
    mom_x: f64,
    mom_y1: f64,
    mom_y2: f64,
    virial: f64,
    boundary_frac: f64,
}

impl From<&DiagnosticsRow> for Row {
    fn from(r: &DiagnosticsRow) -> Self {
        Row {
            t: r.t,
            mass: r.mass,
            energy: r.energy,
            mom_x: r.momentum[0],
            mom_y1: r.momentum[1],
            mom_y2: r.momentum[2],
            virial: r.virial,
            boundary_frac: r.boundary_frac,
        }
    }
}

#[derive(Serialize)]
struct Summary {
    steps: usize,
    drift: NlsDrift,
    momentum_drift_scaled: f64,
    max_tail: f64,
    max_boundary_frac: f64,
    box_monitor: bool,
}

/// `A e^{-x²/(2σ²)} e^{(cos y1 - 1)/σ²} e^{(cos y2 - 1)/σ²}`: Gaussian in `x`,
/// the periodic (von Mises) Gaussian in `y`.
pub fn gaussian3d(grid: GridSpec, a: f64, sigma: f64) -> Field3D {
    let s2 = sigma * sigma;
    Field3D::from_fn(grid, |x, y1, y2| {
        Complex64::new(a * (-x * x / (2.0 * s2) + (y1.cos() - 1.0) / s2 + (y2.cos() - 1.0) / s2).exp(), 0.0)
    })
}

fn initial_field(p: &NlsParams, grid: GridSpec) -> Result<Field3D, CliError> {
    match p.init {
        InitNls::Gaussian3d => Ok(gaussian3d(grid, p.amplitude, p.sigma)),
        InitNls::Constant => Ok(Field3D::from_fn(grid, |_, _, _| Complex64::new(p.amplitude, 0.0))),
        InitNls::Largescale => {
            let base = GaussianY2Mode::default();
            let profile = GaussianY2Mode {
                sigma: p.sigma,
                amplitudes: base.amplitudes.map(|a| a * p.amplitude),
            };
            let psi_grid = GridSpec::new(p.m * p.lx, p.nx, p.ny, p.dt).in_module("profiles")?;
            let psi = profile.sample(psi_grid).in_module("profiles")?;
            large_scale_data(&psi, p.m, grid).in_module("profiles")
        }
        InitNls::Euclidean => {
            let (a, s2) = (p.amplitude, p.sigma * p.sigma);
            let phi = move |x: f64, y1: f64, y2: f64| Complex64::new(a * (-(x * x + y1 * y1 + y2 * y2) / (2.0 * s2)).exp(), 0.0);
            euclidean_data(phi, p.n, grid).in_module("profiles")
        }
        InitNls::File => {
            let path = p.init_file.as_ref().expect("validated");
            let f = std::fs::File::open(path)?;
            let s = read_state(std::io::BufReader::new(f)).in_module(MODULE)?;
            let g = s.field.grid;
            if g.lx != grid.lx || g.nx != grid.nx || g.ny != grid.ny {
                return Err(precondition(
                    MODULE,
                    format!("checkpoint grid ({}, {}, {}) differs from the run grid", g.lx, g.nx, g.ny),
                ));
            }
            Ok(Field3D::from_values(grid, s.field.values).in_module(MODULE)?)
        }
    }
}

fn checkpoint(run: &mut Run, name: &str, s: &NlsState) -> Result<(), CliError> {
    let mut buf = Vec::new();
    write_state(s, &mut buf).in_module(MODULE)?;
    run.write(name, &buf)
}

pub fn simulate_nls(run: &mut Run, p: &NlsParams) -> Result<bool, CliError> {
    let grid = p.grid()?;
    let mut s = NlsState::new(initial_field(p, grid)?).in_module(MODULE)?;
    if p.boost != 0.0 {
        s = galilean_boost(&s, p.boost).in_module(MODULE)?;
    }
    let solver = NlsSolver::new(grid, p.rho).in_module(MODULE)?;
    let opts = NlsEvolveOptions {
        cadence: p.cadence,
        store_snapshots: false,
        virial_radius: p.virial_radius,
        center: p.center.map_or(CenterPath::Centroid, CenterPath::Fixed),
    };
    let n_steps = qrs_core::resonant::stepper::step_count(p.t, p.dt).in_module(MODULE)?;
    let segment = if p.checkpoint_every == 0 { n_steps } else { p.checkpoint_every };
    let mut rows: Vec<DiagnosticsRow> = Vec::new();
    let (mut max_tail, mut max_boundary) = (0.0f64, 0.0f64);
    let mut done = 0;
    while done < n_steps {
        let ev = solver.evolve(&s, segment as f64 * p.dt, p.dt, &opts).in_module(MODULE)?;
        let skip = usize::from(!rows.is_empty());
        rows.extend(ev.rows.into_iter().skip(skip));
        max_tail = max_tail.max(ev.max_tail);
        max_boundary = max_boundary.max(ev.max_boundary_frac);
        s = ev.final_state;
        done += segment;
        if done < n_steps {
            checkpoint(run, &format!("state_{done:08}.bin"), &s)?;
        }
    }
    let table: Vec<Row> = rows.iter().map(Row::from).collect();
    run.write("diagnostics.csv", &csv_bytes(&table)?)?;
    checkpoint(run, "state_final.bin", &s)?;
    // Spatially homogeneous data fills the box by construction.
    let box_monitor = p.init != InitNls::Constant;
    let summary = Summary {
        steps: n_steps,
        drift: NlsDrift::from_rows(&rows),
        momentum_drift_scaled: NlsDrift::momentum_scaled(&rows),
        max_tail,
        max_boundary_frac: max_boundary,
        box_monitor,
    };
    run.write("summary.json", &json_bytes(&summary)?)?;
    let mut ok = run.monitor("spectral_tail", max_tail, TAIL_LIMIT);
    if box_monitor {
        ok &= run.monitor("boundary_frac", max_boundary, BOX_LIMIT);
    }
    println!(
        "{n_steps} steps, mass drift {:e}, energy drift {:e}",
        summary.drift.mass, summary.drift.energy
    );
    Ok(ok)
}

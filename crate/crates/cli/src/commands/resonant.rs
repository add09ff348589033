use std::f64::consts::PI;

use num_complex::Complex64;
use qrs_core::lattice::{enumerate_triples, Mode, ModeSet, DEFAULT_BUDGET};
use qrs_core::resonant::checkpoint::{read_state, write_state};
use qrs_core::resonant::stepper::TAIL_WARNING;
use qrs_core::resonant::{ConservedDrift, ConservedSet, EvolveOptions, ResonantSolver, VecState};
use rand::Rng;
use serde::Serialize;

use super::{csv_bytes, json_bytes};
use crate::config::precondition;
use crate::error::{CliError, InModule};
use crate::manifest::Run;
use crate::params::{InitResonant, ResonantParams};
use crate::seed::stream;

const MODULE: &str = "resonant_system";
/// Largest mass share in the outer tenth of the x-box.
pub const BOX_LIMIT: f64 = 1e-6;

#[derive(Serialize)]
struct ConservedRow {
    time: f64,
    #[serde(rename = "E_1")]
    e1: f64,
    #[serde(rename = "E_p1")]
    ep1: f64,
    #[serde(rename = "E_p2")]
    ep2: f64,
    #[serde(rename = "E_kin")]
    ekin: f64,
    #[serde(rename = "E_ls")]
    els: f64,
    #[serde(rename = "H")]
    h: f64,
}

impl ConservedRow {
    fn new(time: f64, c: &ConservedSet) -> Self {
        ConservedRow { time, e1: c.e1, ep1: c.ep1, ep2: c.ep2, ekin: c.ekin, els: c.els, h: c.h }
    }
}

#[derive(Serialize)]
struct Summary {
    steps: usize,
    drift: ConservedDrift,
    max_drift: f64,
    max_tail: f64,
    boundary_mass: f64,
    boundary_modes: f64,
    quintuples: u64,
}

/// `A e^{-x²/(2σ²)}` on the zero mode.
pub fn scalar_gaussian(modes: ModeSet, lx: f64, nx: usize, a: f64, sigma: f64) -> qrs_core::Result<VecState> {
    VecState::from_fn(modes, lx, nx, |p, x| {
        if p == Mode::ZERO {
            Complex64::new(a * (-x * x / (2.0 * sigma * sigma)).exp(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `u_p = A r_p e^{-|p|²/4} e^{iφ_p} e^{-(x - x_p)²/(2σ²)}` with `r_p` uniform
/// in `[1/2, 3/2)`, `φ_p` uniform in `[0, 2π)` and `x_p` uniform in
/// `[-Lx/16, Lx/16)`, drawn from the stream `("multimode-gaussian", index of p)`.
/// The random weights `r_p` break the `p ↦ -p` symmetry so that both
/// momenta `E_{p1}`, `E_{p2}` are nonzero.
pub fn multimode_gaussian(
    modes: ModeSet,
    lx: f64,
    nx: usize,
    a: f64,
    sigma: f64,
    seed: u64,
) -> qrs_core::Result<VecState> {
    let draws: Vec<(f64, f64, f64)> = (0..modes.len())
        .map(|i| {
            let mut rng = stream(seed, "multimode-gaussian", i as u64);
            let weight = 0.5 + rng.gen::<f64>();
            let phase = 2.0 * PI * rng.gen::<f64>();
            let center = (rng.gen::<f64>() - 0.5) * lx / 8.0;
            (weight, phase, center)
        })
        .collect();
    let index = modes.clone();
    VecState::from_fn(modes, lx, nx, |p, x| {
        let (w, phase, c) = draws[index.index_of(p).unwrap()];
        let env = a * w * (-(p.norm_sq() as f64) / 4.0).exp() * (-(x - c) * (x - c) / (2.0 * sigma * sigma)).exp();
        Complex64::from_polar(env, phase)
    })
}

fn initial_state(p: &ResonantParams, seed: u64) -> Result<VecState, CliError> {
    let modes = ModeSet::new(p.radius);
    match p.init {
        InitResonant::ScalarGaussian => scalar_gaussian(modes, p.lx, p.nx, p.amplitude, p.sigma).in_module(MODULE),
        InitResonant::MultimodeGaussian => {
            multimode_gaussian(modes, p.lx, p.nx, p.amplitude, p.sigma, seed).in_module(MODULE)
        }
        InitResonant::File => {
            let path = p.init_file.as_ref().expect("validated");
            let f = std::fs::File::open(path)?;
            let s = read_state(std::io::BufReader::new(f)).in_module(MODULE)?;
            if s.modes.radius() != p.radius || s.nx != p.nx || s.lx != p.lx {
                return Err(precondition(
                    MODULE,
                    format!(
                        "checkpoint has radius {}, Lx {}, Nx {}; the run asks for {}, {}, {}",
                        s.modes.radius(),
                        s.lx,
                        s.nx,
                        p.radius,
                        p.lx,
                        p.nx
                    ),
                ));
            }
            Ok(s)
        }
    }
}

fn checkpoint(run: &mut Run, name: &str, s: &VecState) -> Result<(), CliError> {
    let mut buf = Vec::new();
    write_state(s, &mut buf).in_module(MODULE)?;
    run.write(name, &buf)
}

pub fn simulate_resonant(run: &mut Run, p: &ResonantParams, seed: u64) -> Result<bool, CliError> {
    let modes = ModeSet::new(p.radius);
    let triples = enumerate_triples(&modes, DEFAULT_BUDGET).in_module("lattice")?;
    let solver = ResonantSolver::new(&modes, &triples, p.lx, p.nx).in_module(MODULE)?;
    let mut s = initial_state(p, seed)?;
    let n_steps = qrs_core::resonant::stepper::step_count(p.t, p.dt).in_module(MODULE)?;
    let segment = if p.checkpoint_every == 0 { n_steps } else { p.checkpoint_every };
    let opts = EvolveOptions { cadence: p.cadence, store_snapshots: false };

    let mut series: Vec<(f64, ConservedSet)> = Vec::new();
    let mut max_tail: f64 = 0.0;
    let mut boundary = s.boundary_mass_fraction();
    let mut done = 0;
    while done < n_steps {
        let ev = solver.evolve(&s, segment as f64 * p.dt, p.dt, &opts).in_module(MODULE)?;
        let skip = usize::from(!series.is_empty());
        series.extend(ev.conserved.into_iter().skip(skip));
        max_tail = max_tail.max(ev.max_tail);
        s = ev.final_state;
        boundary = boundary.max(s.boundary_mass_fraction());
        done += segment;
        if done < n_steps {
            checkpoint(run, &format!("state_{done:08}.bin"), &s)?;
        }
    }
    let rows: Vec<ConservedRow> = series.iter().map(|(t, c)| ConservedRow::new(*t, c)).collect();
    run.write("conserved.csv", &csv_bytes(&rows)?)?;
    checkpoint(run, "state_final.bin", &s)?;

    let drift = ConservedDrift::from_series(&series);
    let summary = Summary {
        steps: n_steps,
        drift,
        max_drift: drift.max(),
        max_tail,
        boundary_mass: boundary,
        boundary_modes: s.boundary_mode_fraction(),
        quintuples: solver.plan().num_quintuples(),
    };
    run.write("summary.json", &json_bytes(&summary)?)?;
    let ok_tail = run.monitor("dealias_tail", max_tail, TAIL_WARNING);
    let ok_box = run.monitor("boundary_mass", boundary, BOX_LIMIT);
    println!("{n_steps} steps, max relative drift {:e}", summary.max_drift);
    Ok(ok_tail && ok_box)
}

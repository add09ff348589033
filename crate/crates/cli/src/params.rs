//! Validated parameters of every subcommand. Keys match the flag names.

use std::path::PathBuf;

use clap::ValueEnum;
use qrs_core::lattice::Mode;
use qrs_core::resonant::stepper::step_count;
use qrs_core::spectral::cutoff::is_dyadic;
use qrs_core::spectral::GridSpec;
use serde::{Deserialize, Serialize};

use crate::config::{positive, precondition, Params};
use crate::error::CliError;

/// Largest 3D grid accepted, in points (one field is 16 bytes per point).
pub const MAX_GRID_POINTS: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OutFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InitResonant {
    #[default]
    ScalarGaussian,
    MultimodeGaussian,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InitNls {
    #[default]
    Gaussian3d,
    Largescale,
    Euclidean,
    Constant,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PsiKind {
    #[default]
    GaussianY2mode,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    #[default]
    Gaussian,
    Bump,
    Planewave,
}

fn grid(module: &str, lx: f64, nx: usize, ny: usize, dt: f64) -> Result<GridSpec, CliError> {
    let g = GridSpec::new(lx, nx, ny, dt).map_err(|e| precondition(module, format!("GridSpec: {e}")))?;
    if g.len() > MAX_GRID_POINTS {
        return Err(precondition(
            module,
            format!("grid has {} points, limit is {MAX_GRID_POINTS}", g.len()),
        ));
    }
    Ok(g)
}

fn steps(module: &str, t: f64, dt: f64, cadence: usize) -> Result<usize, CliError> {
    positive(module, "T", t)?;
    positive(module, "dt", dt)?;
    let n = step_count(t, dt).map_err(|e| precondition(module, e))?;
    if cadence == 0 || n % cadence != 0 {
        return Err(precondition(module, format!("cadence {cadence} must divide the step count {n}")));
    }
    Ok(n)
}

fn need_file(module: &str, key: &str, f: &Option<PathBuf>) -> Result<(), CliError> {
    if f.is_none() {
        return Err(precondition(module, format!("`{key}` is required for file input")));
    }
    Ok(())
}

pub fn parse_mode(s: &str) -> Result<Mode, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::Config(format!("mode `{s}` must be written JX,JY"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let px = parts[0].parse().map_err(|_| bad())?;
    let py = parts[1].parse().map_err(|_| bad())?;
    Ok(Mode::new(px, py))
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ResonancesParams {
    pub radius: u32,
    pub j: String,
    pub format: OutFormat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl Params for ResonancesParams {
    const REQUIRED: &'static [&'static str] = &["radius", "j"];
    fn validate(&self) -> Result<(), CliError> {
        let j = parse_mode(&self.j)?;
        if j.sup_norm() > self.radius as i64 {
            return Err(precondition(
                "lattice",
                format!("mode ({},{}) is outside the mode set of radius {}", j.px, j.py, self.radius),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SumlemParams {
    pub radius: u32,
    pub out: String,
}

impl Default for SumlemParams {
    fn default() -> Self {
        SumlemParams { radius: 0, out: "sumlem.csv".into() }
    }
}

impl Params for SumlemParams {
    const REQUIRED: &'static [&'static str] = &["radius"];
    fn validate(&self) -> Result<(), CliError> {
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResonantParams {
    pub radius: u32,
    #[serde(rename = "Lx")]
    pub lx: f64,
    #[serde(rename = "Nx")]
    pub nx: usize,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub init: InitResonant,
    pub amplitude: f64,
    pub sigma: f64,
    #[serde(rename = "init-file", skip_serializing_if = "Option::is_none")]
    pub init_file: Option<PathBuf>,
    pub cadence: usize,
    #[serde(rename = "checkpoint-every")]
    pub checkpoint_every: usize,
}

impl Default for ResonantParams {
    fn default() -> Self {
        ResonantParams {
            radius: 0,
            lx: 0.0,
            nx: 0,
            dt: 0.0,
            t: 0.0,
            init: InitResonant::ScalarGaussian,
            amplitude: 0.3,
            sigma: 2.0,
            init_file: None,
            cadence: 10,
            checkpoint_every: 0,
        }
    }
}

impl Params for ResonantParams {
    const REQUIRED: &'static [&'static str] = &["radius", "Lx", "Nx", "dt", "T", "init"];
    fn validate(&self) -> Result<(), CliError> {
        let m = "resonant_system";
        grid(m, self.lx, self.nx, 1, self.dt)?;
        let n = steps(m, self.t, self.dt, self.cadence)?;
        if self.checkpoint_every != 0 && n % self.checkpoint_every != 0 {
            return Err(precondition(m, "`checkpoint-every` must divide the step count"));
        }
        if self.checkpoint_every % self.cadence != 0 {
            return Err(precondition(m, "`checkpoint-every` must be a multiple of `cadence`"));
        }
        if !self.amplitude.is_finite() {
            return Err(precondition(m, "`amplitude` must be finite"));
        }
        positive(m, "sigma", self.sigma)?;
        if self.init == InitResonant::File {
            need_file(m, "init-file", &self.init_file)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NlsParams {
    #[serde(rename = "Lx")]
    pub lx: f64,
    #[serde(rename = "Nx")]
    pub nx: usize,
    #[serde(rename = "Ny")]
    pub ny: usize,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub init: InitNls,
    pub rho: u8,
    pub amplitude: f64,
    pub sigma: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub boost: f64,
    #[serde(rename = "init-file", skip_serializing_if = "Option::is_none")]
    pub init_file: Option<PathBuf>,
    pub cadence: usize,
    #[serde(rename = "virial-radius")]
    pub virial_radius: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(rename = "checkpoint-every")]
    pub checkpoint_every: usize,
}

impl Default for NlsParams {
    fn default() -> Self {
        NlsParams {
            lx: 0.0,
            nx: 0,
            ny: 0,
            dt: 0.0,
            t: 0.0,
            init: InitNls::Gaussian3d,
            rho: 1,
            amplitude: 1.0,
            sigma: 1.0,
            m: 0.5,
            n: 1.0,
            boost: 0.0,
            init_file: None,
            cadence: 10,
            virial_radius: 4.0,
            center: None,
            checkpoint_every: 0,
        }
    }
}

impl NlsParams {
    pub fn grid(&self) -> Result<GridSpec, CliError> {
        grid("nls3d", self.lx, self.nx, self.ny, self.dt)
    }
}

impl Params for NlsParams {
    const REQUIRED: &'static [&'static str] = &["Lx", "Nx", "Ny", "dt", "T", "init"];
    fn validate(&self) -> Result<(), CliError> {
        let m = "nls3d";
        self.grid()?;
        let n = steps(m, self.t, self.dt, self.cadence)?;
        if self.checkpoint_every != 0 && (n % self.checkpoint_every != 0 || self.checkpoint_every % self.cadence != 0) {
            return Err(precondition(
                m,
                "`checkpoint-every` must divide the step count and be a multiple of `cadence`",
            ));
        }
        if self.rho > 1 {
            return Err(precondition(m, format!("`rho` must be 0 or 1, got {}", self.rho)));
        }
        positive(m, "sigma", self.sigma)?;
        positive(m, "virial-radius", self.virial_radius)?;
        if !(self.amplitude.is_finite() && self.boost.is_finite()) {
            return Err(precondition(m, "`amplitude` and `boost` must be finite"));
        }
        if self.center.is_some_and(|c| !c.is_finite()) {
            return Err(precondition(m, "`center` must be finite"));
        }
        match self.init {
            InitNls::Largescale if !(self.m > 0.0 && self.m <= 1.0) => {
                Err(precondition("profiles", format!("`M` must lie in (0, 1], got {}", self.m)))
            }
            InitNls::Euclidean if !(self.n >= 1.0 && self.n.is_finite()) => {
                Err(precondition("profiles", format!("`N` must be at least 1, got {}", self.n)))
            }
            InitNls::File => need_file(m, "init-file", &self.init_file),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MultiscaleParams {
    pub psi: PsiKind,
    #[serde(rename = "M-list")]
    pub m_list: Vec<f64>,
    #[serde(rename = "T0")]
    pub t0: f64,
    #[serde(rename = "Lx")]
    pub lx: f64,
    #[serde(rename = "Nx")]
    pub nx: usize,
    #[serde(rename = "Ny")]
    pub ny: usize,
    pub sigma: f64,
    pub amplitudes: Vec<f64>,
    #[serde(rename = "psi-file", skip_serializing_if = "Option::is_none")]
    pub psi_file: Option<PathBuf>,
    pub radius: u32,
    #[serde(rename = "dt-tau")]
    pub dt_tau: f64,
    #[serde(rename = "tau-sample")]
    pub tau_sample: f64,
    #[serde(rename = "nls-dt")]
    pub nls_dt: f64,
    #[serde(rename = "control-M")]
    pub control_m: f64,
    pub residual: bool,
}

impl Default for MultiscaleParams {
    fn default() -> Self {
        let c = qrs_core::profiles::MultiscaleConfig::default();
        let p = qrs_core::profiles::GaussianY2Mode::default();
        MultiscaleParams {
            psi: PsiKind::GaussianY2mode,
            m_list: c.m_list,
            t0: c.t0,
            lx: 128.0,
            nx: 256,
            ny: c.ny,
            sigma: p.sigma,
            amplitudes: p.amplitudes.to_vec(),
            psi_file: None,
            radius: c.radius,
            dt_tau: c.dt_tau,
            tau_sample: c.tau_sample,
            nls_dt: c.nls_dt,
            control_m: c.control_m.unwrap_or(0.0),
            residual: c.residual,
        }
    }
}

impl MultiscaleParams {
    pub fn core_config(&self) -> qrs_core::profiles::MultiscaleConfig {
        qrs_core::profiles::MultiscaleConfig {
            m_list: self.m_list.clone(),
            t0: self.t0,
            radius: self.radius,
            ny: self.ny,
            dt_tau: self.dt_tau,
            tau_sample: self.tau_sample,
            nls_dt: self.nls_dt,
            control_m: (self.control_m > 0.0).then_some(self.control_m),
            residual: self.residual,
        }
    }

    pub fn psi_grid(&self) -> Result<GridSpec, CliError> {
        grid("profiles", self.lx, self.nx, self.ny, self.tau_sample)
    }
}

impl Params for MultiscaleParams {
    const REQUIRED: &'static [&'static str] = &["psi"];
    fn validate(&self) -> Result<(), CliError> {
        let m = "profiles";
        self.core_config().validate().map_err(|e| precondition(m, e))?;
        match self.psi {
            PsiKind::GaussianY2mode => {
                self.psi_grid()?;
                positive(m, "sigma", self.sigma)?;
                if self.amplitudes.len() != 3 || self.amplitudes.iter().any(|a| !a.is_finite()) {
                    return Err(precondition(m, "`amplitudes` must hold three finite values"));
                }
            }
            PsiKind::File => need_file(m, "psi-file", &self.psi_file)?,
        }
        for &mm in &self.m_list {
            grid("nls3d", self.lx / mm, self.nx, self.ny, self.nls_dt)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrichartzParams {
    pub profile: Profile,
    #[serde(rename = "N-list")]
    pub n_list: Vec<f64>,
    pub p: f64,
    #[serde(rename = "gamma-max")]
    pub gamma_max: u32,
    #[serde(rename = "Lx")]
    pub lx: f64,
    #[serde(rename = "Nx")]
    pub nx: usize,
    #[serde(rename = "Ny")]
    pub ny: usize,
    pub sigma: f64,
    pub xi0: f64,
    pub uniform: usize,
    pub graded: usize,
    pub out: String,
}

impl Default for StrichartzParams {
    fn default() -> Self {
        StrichartzParams {
            profile: Profile::Gaussian,
            n_list: Vec::new(),
            p: 0.0,
            gamma_max: 0,
            lx: 0.008 * (1 << 19) as f64,
            nx: 1 << 19,
            ny: 1,
            sigma: 0.02,
            xi0: 0.0,
            uniform: 32,
            graded: 64,
            out: "strichartz.csv".into(),
        }
    }
}

impl StrichartzParams {
    pub fn grid(&self) -> Result<GridSpec, CliError> {
        grid("spectral", self.lx, self.nx, self.ny, 1.0)
    }
}

impl Params for StrichartzParams {
    const REQUIRED: &'static [&'static str] = &["profile", "N-list", "p", "gamma-max"];
    fn validate(&self) -> Result<(), CliError> {
        let m = "spectral";
        self.grid()?;
        if self.n_list.is_empty() {
            return Err(precondition(m, "`N-list` is empty"));
        }
        if let Some(n) = self.n_list.iter().find(|n| !is_dyadic(**n)) {
            return Err(precondition(m, format!("N = {n} is not dyadic")));
        }
        if !(self.p > 4.0 && self.p.is_finite()) {
            return Err(precondition(m, format!("`p` must exceed 4, got {}", self.p)));
        }
        positive(m, "sigma", self.sigma)?;
        if self.uniform == 0 || self.graded == 0 {
            return Err(precondition(m, "`uniform` and `graded` must be positive"));
        }
        if !self.xi0.is_finite() {
            return Err(precondition(m, "`xi0` must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeylParams {
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "t-samples")]
    pub t_samples: usize,
    pub out: String,
}

impl Default for WeylParams {
    fn default() -> Self {
        WeylParams { n: 0.0, t_samples: 0, out: "weyl.csv".into() }
    }
}

impl Params for WeylParams {
    const REQUIRED: &'static [&'static str] = &["N", "t-samples"];
    fn validate(&self) -> Result<(), CliError> {
        if !is_dyadic(self.n) {
            return Err(precondition("spectral", format!("N = {} is not dyadic", self.n)));
        }
        if self.t_samples == 0 {
            return Err(precondition("spectral", "`t-samples` must be positive"));
        }
        Ok(())
    }
}

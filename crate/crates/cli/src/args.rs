//! Command-line flags. Every subcommand flag is optional here; values from
//! `--config` fill the gaps and the merged table is validated afterwards.
//! Config keys are the flag names without the leading dashes.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::params::{InitNls, InitResonant, OutFormat, Profile, PsiKind};

#[derive(Debug, Parser)]
#[command(name = "qrs", version, about = "Quintic resonant system and waveguide NLS laboratory")]
pub struct Cli {
    /// Flat TOML file with the subcommand's keys (and optionally `seed`, `threads`).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Recorded in the manifest; execution is sequential.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long = "out-dir", global = true, default_value = "qrs-out")]
    pub out_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the resonant quintuples of one output mode.
    Resonances(ResonancesFlags),
    /// Summability statistic for every mode of a truncated set.
    #[command(name = "sumlem-sweep")]
    SumlemSweep(SumlemFlags),
    /// Evolve the truncated resonant system.
    #[command(name = "simulate-resonant")]
    SimulateResonant(ResonantFlags),
    /// Evolve the quintic NLS on the box × torus grid.
    #[command(name = "simulate-nls")]
    SimulateNls(NlsFlags),
    /// Compare the NLS flow of rescaled data with the resonant reconstruction.
    Multiscale(MultiscaleFlags),
    /// Empirical Strichartz ratio over dyadic frequencies.
    Strichartz(StrichartzFlags),
    /// Supremum of the Weyl-sum kernel over sampled times.
    Weyl(WeylFlags),
    /// Summarize every run below the output directory.
    Report,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Resonances(_) => "resonances",
            Command::SumlemSweep(_) => "sumlem-sweep",
            Command::SimulateResonant(_) => "simulate-resonant",
            Command::SimulateNls(_) => "simulate-nls",
            Command::Multiscale(_) => "multiscale",
            Command::Strichartz(_) => "strichartz",
            Command::Weyl(_) => "weyl",
            Command::Report => "report",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ResonancesFlags {
    #[arg(long)]
    pub radius: Option<u32>,
    /// Output mode as `JX,JY`.
    #[arg(long, allow_hyphen_values = true)]
    pub j: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<OutFormat>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct SumlemFlags {
    #[arg(long)]
    pub radius: Option<u32>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct ResonantFlags {
    #[arg(long)]
    pub radius: Option<u32>,
    #[arg(long = "Lx")]
    #[serde(rename = "Lx")]
    pub lx: Option<f64>,
    #[arg(long = "Nx")]
    #[serde(rename = "Nx")]
    pub nx: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub t: Option<f64>,
    #[arg(long, value_enum)]
    pub init: Option<InitResonant>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long = "init-file")]
    #[serde(rename = "init-file")]
    pub init_file: Option<PathBuf>,
    /// Steps between conserved-quantity rows.
    #[arg(long)]
    pub cadence: Option<usize>,
    /// Steps between intermediate checkpoints; 0 writes only the final state.
    #[arg(long = "checkpoint-every")]
    #[serde(rename = "checkpoint-every")]
    pub checkpoint_every: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct NlsFlags {
    #[arg(long = "Lx")]
    #[serde(rename = "Lx")]
    pub lx: Option<f64>,
    #[arg(long = "Nx")]
    #[serde(rename = "Nx")]
    pub nx: Option<usize>,
    #[arg(long = "Ny")]
    #[serde(rename = "Ny")]
    pub ny: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub t: Option<f64>,
    #[arg(long, value_enum)]
    pub init: Option<InitNls>,
    #[arg(long)]
    pub rho: Option<u8>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Scale of the `largescale` initial data.
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub m: Option<f64>,
    /// Scale of the `euclidean` initial data.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<f64>,
    /// Galilean boost applied to the initial data.
    #[arg(long, allow_hyphen_values = true)]
    pub boost: Option<f64>,
    #[arg(long = "init-file")]
    #[serde(rename = "init-file")]
    pub init_file: Option<PathBuf>,
    #[arg(long)]
    pub cadence: Option<usize>,
    #[arg(long = "virial-radius")]
    #[serde(rename = "virial-radius")]
    pub virial_radius: Option<f64>,
    /// Fixed virial center; the mass centroid when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<f64>,
    #[arg(long = "checkpoint-every")]
    #[serde(rename = "checkpoint-every")]
    pub checkpoint_every: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct MultiscaleFlags {
    #[arg(long, value_enum)]
    pub psi: Option<PsiKind>,
    #[arg(long = "M-list", value_delimiter = ',')]
    #[serde(rename = "M-list")]
    pub m_list: Option<Vec<f64>>,
    #[arg(long = "T0")]
    #[serde(rename = "T0")]
    pub t0: Option<f64>,
    /// Reference box of ψ.
    #[arg(long = "Lx")]
    #[serde(rename = "Lx")]
    pub lx: Option<f64>,
    #[arg(long = "Nx")]
    #[serde(rename = "Nx")]
    pub nx: Option<usize>,
    #[arg(long = "Ny")]
    #[serde(rename = "Ny")]
    pub ny: Option<usize>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub amplitudes: Option<Vec<f64>>,
    #[arg(long = "psi-file")]
    #[serde(rename = "psi-file")]
    pub psi_file: Option<PathBuf>,
    #[arg(long)]
    pub radius: Option<u32>,
    #[arg(long = "dt-tau")]
    #[serde(rename = "dt-tau")]
    pub dt_tau: Option<f64>,
    #[arg(long = "tau-sample")]
    #[serde(rename = "tau-sample")]
    pub tau_sample: Option<f64>,
    #[arg(long = "nls-dt")]
    #[serde(rename = "nls-dt")]
    pub nls_dt: Option<f64>,
    /// Scale of the ρ = 0 control row; 0 disables it.
    #[arg(long = "control-M")]
    #[serde(rename = "control-M")]
    pub control_m: Option<f64>,
    #[arg(long)]
    pub residual: Option<bool>,
}

#[derive(Debug, Args, Serialize)]
pub struct StrichartzFlags {
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,
    #[arg(long = "N-list", value_delimiter = ',')]
    #[serde(rename = "N-list")]
    pub n_list: Option<Vec<f64>>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long = "gamma-max")]
    #[serde(rename = "gamma-max")]
    pub gamma_max: Option<u32>,
    #[arg(long = "Lx")]
    #[serde(rename = "Lx")]
    pub lx: Option<f64>,
    #[arg(long = "Nx")]
    #[serde(rename = "Nx")]
    pub nx: Option<usize>,
    #[arg(long = "Ny")]
    #[serde(rename = "Ny")]
    pub ny: Option<usize>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub xi0: Option<f64>,
    /// Time nodes per window away from t = 0.
    #[arg(long)]
    pub uniform: Option<usize>,
    /// Time nodes per window adjacent to t = 0.
    #[arg(long)]
    pub graded: Option<usize>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct WeylFlags {
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<f64>,
    /// Number of times `t_k = 2πk / samples`, k < samples.
    #[arg(long = "t-samples")]
    #[serde(rename = "t-samples")]
    pub t_samples: Option<usize>,
    #[arg(long)]
    pub out: Option<String>,
}

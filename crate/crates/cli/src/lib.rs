//! Command-line driver: configuration merging, run manifests, seeded
//! initial data and report generation around the `qrs-core` modules.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod params;
pub mod report;
pub mod seed;

use std::path::Path;

use args::{Cli, Command};
use config::{resolve, Globals, Params};
use error::{CliError, EXIT_INVALID, EXIT_OK};
use manifest::{Run, Status};
use serde::Serialize;

fn execute<P: Params, F: Serialize>(
    cli: &Cli,
    flags: &F,
    body: impl FnOnce(&mut Run, &P, u64) -> Result<bool, CliError>,
) -> Result<bool, CliError> {
    let file = cli.config.as_deref().map(config::read_file).transpose()?;
    let globals = Globals { seed: cli.seed, threads: cli.threads };
    let r = resolve::<P, F>(file, flags, &globals)?;
    let mut run = Run::start(&cli.out_dir, cli.command.name(), r.table, r.flag_overrides, r.seed, r.threads)?;
    match body(&mut run, &r.params, r.seed) {
        Ok(valid) => {
            run.finish(if valid { Status::Ok } else { Status::Invalid }, None)?;
            Ok(valid)
        }
        Err(e) => {
            let msg = e.to_string();
            // Keep the original error even if the manifest cannot be finalized.
            if let Err(e2) = run.finish(Status::Failed, Some(msg)) {
                log::error!("could not finalize manifest: {e2}");
            }
            Err(e)
        }
    }
}

/// Runs one parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Report => report::run(&cli.out_dir).map(|_| true),
        Command::Resonances(f) => execute(&cli, f, |run, p, _| commands::resonances(run, p)),
        Command::SumlemSweep(f) => execute(&cli, f, |run, p, _| commands::sumlem_sweep(run, p)),
        Command::SimulateResonant(f) => execute(&cli, f, commands::simulate_resonant),
        Command::SimulateNls(f) => execute(&cli, f, |run, p, _| commands::simulate_nls(run, p)),
        Command::Multiscale(f) => execute(&cli, f, |run, p, _| commands::multiscale(run, p)),
        Command::Strichartz(f) => execute(&cli, f, |run, p, _| commands::strichartz(run, p)),
        Command::Weyl(f) => execute(&cli, f, |run, p, _| commands::weyl(run, p)),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("validity monitor failed; see {}", Path::new(&cli.out_dir).join(manifest::MANIFEST).display());
            EXIT_INVALID
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Parses `args` (including the program name) and runs.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                error::EXIT_CONFIG
            } else {
                EXIT_OK
            }
        }
    }
}

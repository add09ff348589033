use qrs_core::nls::checkpoint::read_state;
use qrs_core::profiles::{multiscale_experiment, GaussianY2Mode, MultiscaleRow};
use qrs_core::spectral::Field3D;
use serde::Serialize;

use super::{csv_bytes, json_bytes};
use crate::error::{CliError, InModule};
use crate::manifest::Run;
use crate::params::{MultiscaleParams, PsiKind};

#[derive(Serialize)]
pub struct CsvRow {
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "sup_H1_error")]
    pub sup_h1_error: f64,
    pub slope_running: Option<f64>,
    #[serde(rename = "residual_L1H1")]
    pub residual_l1h1: Option<f64>,
    pub boundary_frac: f64,
    pub tail_mass: f64,
    pub valid: bool,
    pub rho: u8,
    pub rel_error: f64,
    #[serde(rename = "residual_duhamel_H1")]
    pub residual_duhamel_h1: Option<f64>,
}

impl From<&MultiscaleRow> for CsvRow {
    fn from(r: &MultiscaleRow) -> Self {
        CsvRow {
            m: r.m,
            sup_h1_error: r.sup_h1_error,
            slope_running: r.slope_running,
            residual_l1h1: r.residual.map(|s| s.l1h1),
            boundary_frac: r.boundary_frac,
            tail_mass: r.tail_mass,
            valid: r.valid,
            rho: r.rho,
            rel_error: r.rel_error,
            residual_duhamel_h1: r.residual.map(|s| s.duhamel_h1),
        }
    }
}

fn profile(p: &MultiscaleParams) -> Result<Field3D, CliError> {
    match p.psi {
        PsiKind::GaussianY2mode => {
            let g = GaussianY2Mode {
                sigma: p.sigma,
                amplitudes: [p.amplitudes[0], p.amplitudes[1], p.amplitudes[2]],
            };
            g.sample(p.psi_grid()?).in_module("profiles")
        }
        PsiKind::File => {
            let f = std::fs::File::open(p.psi_file.as_ref().expect("validated"))?;
            Ok(read_state(std::io::BufReader::new(f)).in_module("profiles")?.field)
        }
    }
}

pub fn multiscale(run: &mut Run, p: &MultiscaleParams) -> Result<bool, CliError> {
    let psi = profile(p)?;
    let report = multiscale_experiment(&psi, &p.core_config()).in_module("profiles")?;
    let rows: Vec<CsvRow> = report.rows.iter().chain(report.control.iter()).map(CsvRow::from).collect();
    run.write("multiscale.csv", &csv_bytes(&rows)?)?;
    run.write("summary.json", &json_bytes(&report)?)?;
    let mut ok = true;
    for r in report.rows.iter().chain(report.control.iter()) {
        ok &= run.monitor(&format!("row_valid M={} rho={}", r.m, r.rho), if r.valid { 0.0 } else { 1.0 }, 0.0);
    }
    let valid = report.rows.iter().filter(|r| r.valid).count();
    match report.error_slope {
        Some(s) => println!("error slope {s:.3} over {valid} valid rows"),
        None => println!("error slope undefined ({valid} valid rows)"),
    }
    Ok(ok)
}

//! Aggregation of every run below an output directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use qrs_core::profiles::loglog_slope;
use serde::Serialize;

use crate::error::CliError;
use crate::manifest::{read_manifest, sha256_hex, Manifest, Status, MANIFEST};

pub const REPORT_MD: &str = "report.md";
pub const REPORT_JSON: &str = "report.json";

#[derive(Debug, Clone, Serialize)]
pub struct Problem {
    pub path: String,
    pub issue: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunEntry {
    pub dir: String,
    pub command: String,
    pub status: Status,
    pub config_hash: String,
    pub failed_monitors: Vec<String>,
    /// Outputs whose bytes no longer match the recorded hash.
    pub modified_outputs: Vec<String>,
}

/// Largest relative change of each column against its first row.
#[derive(Debug, Clone, Serialize)]
pub struct DriftEntry {
    pub dir: String,
    pub command: String,
    pub columns: Vec<(String, f64)>,
    pub max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiscaleEntry {
    pub dir: String,
    pub rows: usize,
    pub valid_rows: usize,
    /// Fitted on valid `ρ = 1` rows only.
    pub error_slope: Option<f64>,
    pub residual_slope: Option<f64>,
    pub control_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StrichartzEntry {
    pub dir: String,
    /// `(N, p, q, ratio)`.
    pub rows: Vec<[f64; 4]>,
    pub variation: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub runs: Vec<RunEntry>,
    pub drifts: Vec<DriftEntry>,
    pub multiscale: Vec<MultiscaleEntry>,
    pub strichartz: Vec<StrichartzEntry>,
    pub problems: Vec<Problem>,
}

struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn read(path: &Path) -> Result<Table, CliError> {
        let mut r = csv::Reader::from_path(path)?;
        let headers: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            rows.push(
                rec.iter()
                    .map(|v| match v {
                        "true" => 1.0,
                        "false" => 0.0,
                        s => s.parse().unwrap_or(f64::NAN),
                    })
                    .collect(),
            );
        }
        Ok(Table { headers, rows })
    }

    fn col(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }
}

/// Momentum-type columns whose initial values may vanish; their drift is
/// taken relative to the largest initial magnitude in the group, or is
/// absolute when that magnitude is at roundoff level against the table.
const GROUPS: [&[&str]; 2] = [&["mom_x", "mom_y1", "mom_y2"], &["E_p1", "E_p2"]];

fn relative_drift(t: &Table, skip: &[&str]) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    let Some(first) = t.rows.first() else { return out };
    let table_scale = first.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (k, h) in t.headers.iter().enumerate() {
        if skip.contains(&h.as_str()) {
            continue;
        }
        let a = first[k];
        let scale = match GROUPS.iter().find(|g| g.contains(&h.as_str())) {
            Some(g) => g
                .iter()
                .filter_map(|c| t.col(c))
                .map(|c| first[c].abs())
                .fold(0.0, f64::max),
            None => a.abs(),
        };
        let d = t
            .rows
            .iter()
            .map(|r| {
                if scale <= 1e-12 * table_scale {
                    (r[k] - a).abs()
                } else {
                    (r[k] - a).abs() / scale
                }
            })
            .fold(0.0, f64::max);
        out.push((h.clone(), d));
    }
    out
}

fn find_manifest_dirs(dir: &Path, found: &mut Vec<PathBuf>, missing: &mut Vec<PathBuf>) -> std::io::Result<()> {
    let mut subdirs = Vec::new();
    let mut has_outputs = false;
    let mut entries: Vec<_> = fs::read_dir(dir)?.collect::<Result<_, _>>()?;
    entries.sort_by_key(|e| e.file_name());
    for e in entries {
        let ft = e.file_type()?;
        let name = e.file_name();
        if ft.is_dir() {
            subdirs.push(e.path());
        } else if ft.is_file() {
            let n = name.to_string_lossy();
            if n.ends_with(".csv") || n.ends_with(".bin") {
                has_outputs = true;
            }
        }
    }
    if dir.join(MANIFEST).is_file() {
        found.push(dir.to_path_buf());
    } else if has_outputs {
        missing.push(dir.to_path_buf());
    }
    for d in subdirs {
        find_manifest_dirs(&d, found, missing)?;
    }
    Ok(())
}

fn rel(root: &Path, p: &Path) -> String {
    let r = p.strip_prefix(root).unwrap_or(p).to_string_lossy().into_owned();
    if r.is_empty() {
        ".".into()
    } else {
        r
    }
}

fn summarize_run(root: &Path, dir: &Path, m: &Manifest, report: &mut Report) {
    let name = rel(root, dir);
    let mut modified = Vec::new();
    for o in &m.outputs {
        match fs::read(dir.join(&o.path)) {
            Ok(b) if sha256_hex(&b) == o.sha256 => {}
            Ok(_) => modified.push(o.path.clone()),
            Err(_) => modified.push(format!("{} (missing)", o.path)),
        }
    }
    report.runs.push(RunEntry {
        dir: name.clone(),
        command: m.command.clone(),
        status: m.status,
        config_hash: m.config_hash.clone(),
        failed_monitors: m.monitors.iter().filter(|x| !x.ok).map(|x| x.name.clone()).collect(),
        modified_outputs: modified,
    });
    let mut unreadable = Vec::new();
    let mut table = |file: &str| -> Option<Table> {
        m.outputs.iter().any(|o| o.path == file).then(|| Table::read(&dir.join(file))).and_then(|r| match r {
            Ok(t) => Some(t),
            Err(e) => {
                unreadable.push(Problem { path: format!("{name}/{file}"), issue: e.to_string() });
                None
            }
        })
    };
    match m.command.as_str() {
        "simulate-resonant" | "simulate-nls" => {
            let (file, skip): (&str, &[&str]) = if m.command == "simulate-resonant" {
                ("conserved.csv", &["time"])
            } else {
                ("diagnostics.csv", &["t", "virial", "boundary_frac"])
            };
            if let Some(t) = table(file) {
                let columns = relative_drift(&t, skip);
                let max = columns.iter().map(|c| c.1).fold(0.0, f64::max);
                report.drifts.push(DriftEntry { dir: name.clone(), command: m.command.clone(), columns, max });
            }
        }
        "multiscale" => {
            if let Some(t) = table("multiscale.csv") {
                let c = |h: &str| t.col(h);
                if let (Some(cm), Some(ce), Some(cv), Some(cr)) = (c("M"), c("sup_H1_error"), c("valid"), c("rho")) {
                    let main: Vec<&Vec<f64>> = t.rows.iter().filter(|r| r[cr] == 1.0).collect();
                    let valid: Vec<&&Vec<f64>> = main.iter().filter(|r| r[cv] == 1.0).collect();
                    let error_slope = loglog_slope(&valid.iter().map(|r| (r[cm], r[ce])).collect::<Vec<_>>());
                    let residual_slope = c("residual_duhamel_H1").and_then(|cd| {
                        loglog_slope(
                            &valid
                                .iter()
                                .filter(|r| r[cd].is_finite())
                                .map(|r| (r[cm], r[cd]))
                                .collect::<Vec<_>>(),
                        )
                    });
                    let control_error = t.rows.iter().find(|r| r[cr] == 0.0).map(|r| r[ce]);
                    report.multiscale.push(MultiscaleEntry {
                        dir: name.clone(),
                        rows: main.len(),
                        valid_rows: valid.len(),
                        error_slope,
                        residual_slope,
                        control_error,
                    });
                }
            }
        }
        "strichartz" => {
            let out = m.config.get("out").and_then(|v| v.as_str()).unwrap_or("strichartz.csv").to_string();
            if let Some(t) = table(&out) {
                if let (Some(a), Some(b), Some(c), Some(d)) = (t.col("N"), t.col("p"), t.col("q"), t.col("ratio")) {
                    let rows: Vec<[f64; 4]> = t.rows.iter().map(|r| [r[a], r[b], r[c], r[d]]).collect();
                    let max = rows.iter().map(|r| r[3]).fold(0.0, f64::max);
                    let min = rows.iter().map(|r| r[3]).fold(f64::INFINITY, f64::min);
                    report.strichartz.push(StrichartzEntry { dir: name.clone(), rows, variation: max / min });
                }
            }
        }
        _ => {}
    }
    report.problems.extend(unreadable);
}

/// Scans `root` recursively. Unreadable manifests and output directories
/// without a manifest are listed as problems, not errors.
pub fn build(root: &Path) -> Result<Report, CliError> {
    let mut report = Report::default();
    if !root.is_dir() {
        return Ok(report);
    }
    let (mut found, mut missing) = (Vec::new(), Vec::new());
    find_manifest_dirs(root, &mut found, &mut missing)?;
    for d in missing {
        report.problems.push(Problem { path: rel(root, &d), issue: "outputs without a manifest".into() });
    }
    for d in found {
        match read_manifest(&d.join(MANIFEST)) {
            Ok(m) => {
                if m.status == Status::Running {
                    report.problems.push(Problem {
                        path: rel(root, &d),
                        issue: "run never finished (manifest still running)".into(),
                    });
                }
                summarize_run(root, &d, &m, &mut report);
            }
            Err(e) => report.problems.push(Problem { path: rel(root, &d), issue: format!("invalid manifest: {e}") }),
        }
    }
    Ok(report)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("n/a".into(), |x| format!("{x:.4}"))
}

pub fn markdown(r: &Report) -> String {
    let mut s = String::from("# Run report\n\n");
    if r.runs.is_empty() && r.problems.is_empty() {
        s.push_str("No runs found.\n");
        return s;
    }
    s.push_str("## Runs\n\n| dir | command | status | failed monitors | modified outputs |\n|---|---|---|---|---|\n");
    for e in &r.runs {
        let _ = writeln!(
            s,
            "| {} | {} | {:?} | {} | {} |",
            e.dir,
            e.command,
            e.status,
            e.failed_monitors.join(", "),
            e.modified_outputs.join(", ")
        );
    }
    if !r.drifts.is_empty() {
        s.push_str("\n## Conserved-quantity drift\n\n| dir | command | max relative drift | per column |\n|---|---|---|---|\n");
        for d in &r.drifts {
            let cols: Vec<String> = d.columns.iter().map(|(k, v)| format!("{k} {v:.2e}")).collect();
            let _ = writeln!(s, "| {} | {} | {:.3e} | {} |", d.dir, d.command, d.max, cols.join("; "));
        }
    }
    if !r.multiscale.is_empty() {
        s.push_str("\n## Multiscale error sweeps\n\n| dir | valid rows | error slope | residual slope | control error |\n|---|---|---|---|---|\n");
        for m in &r.multiscale {
            let _ = writeln!(
                s,
                "| {} | {}/{} | {} | {} | {} |",
                m.dir,
                m.valid_rows,
                m.rows,
                fmt_opt(m.error_slope),
                fmt_opt(m.residual_slope),
                m.control_error.map_or("n/a".into(), |x| format!("{x:.3e}"))
            );
        }
    }
    for t in &r.strichartz {
        let _ = write!(s, "\n## Strichartz ratios ({})\n\n| N | p | q | ratio |\n|---|---|---|---|\n", t.dir);
        for row in &t.rows {
            let _ = writeln!(s, "| {} | {} | {:.4} | {:.5e} |", row[0], row[1], row[2], row[3]);
        }
        let _ = writeln!(s, "\nvariation max/min: {:.3}", t.variation);
    }
    if !r.problems.is_empty() {
        s.push_str("\n## Problems\n\n");
        for p in &r.problems {
            let _ = writeln!(s, "- {}: {}", p.path, p.issue);
        }
    }
    s
}

pub fn run(root: &Path) -> Result<Report, CliError> {
    let report = build(root)?;
    fs::create_dir_all(root)?;
    fs::write(root.join(REPORT_MD), markdown(&report))?;
    let mut json = serde_json::to_vec_pretty(&report)?;
    json.push(b'\n');
    fs::write(root.join(REPORT_JSON), json)?;
    println!(
        "{} runs, {} drift tables, {} multiscale sweeps, {} strichartz tables, {} problems",
        report.runs.len(),
        report.drifts.len(),
        report.multiscale.len(),
        report.strichartz.len(),
        report.problems.len()
    );
    Ok(report)
}

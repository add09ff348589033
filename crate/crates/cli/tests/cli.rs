use std::fs;
use std::path::Path;
use std::process::Command;

use proptest::prelude::*;
use qrs_cli::manifest::{read_manifest, Status};
use qrs_cli::run_from;
use qrs_core::lattice::{enumerate_resonances_bruteforce, Mode, ModeSet, DEFAULT_BUDGET};
use tempfile::TempDir;

fn qrs(args: &[&str]) -> i32 {
    run_from(std::iter::once("qrs").chain(args.iter().copied()))
}

fn out(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL_RESONANT: &str = "radius = 1\nLx = 32\nNx = 128\ndt = 0.01\nT = 0.1\ninit = \"multimode-gaussian\"\n";

#[test]
fn empty_config_lists_required_keys() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "empty.toml", "");
    let bin = env!("CARGO_BIN_EXE_qrs");
    let o = Command::new(bin)
        .args(["--config", &cfg, "--out-dir", &out(tmp.path(), "r"), "simulate-resonant"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    for key in ["radius", "Lx", "Nx", "dt", "T", "init"] {
        assert!(err.contains(key), "{err}");
    }
    assert!(!tmp.path().join("r").exists(), "nothing is written for a rejected config");
}

#[test]
fn unknown_key_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.toml", &format!("{SMALL_RESONANT}dtt = 0.1\n"));
    assert_eq!(qrs(&["--config", &cfg, "--out-dir", &out(tmp.path(), "r"), "simulate-resonant"]), 2);
}

#[test]
fn non_power_of_two_grid_cites_gridspec() {
    let tmp = TempDir::new().unwrap();
    let bin = env!("CARGO_BIN_EXE_qrs");
    let o = Command::new(bin)
        .args(["--out-dir", &out(tmp.path(), "n"), "simulate-nls"])
        .args(["--Lx", "10", "--Nx", "1000", "--Ny", "4", "--dt", "0.01", "--T", "0.1", "--init", "gaussian3d"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("GridSpec") && err.contains("1000"), "{err}");
}

#[test]
fn flag_overrides_file_and_is_recorded() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.toml", &format!("{SMALL_RESONANT}seed = 3\n"));
    let dir = out(tmp.path(), "r");
    assert_eq!(qrs(&["--config", &cfg, "--out-dir", &dir, "simulate-resonant", "--dt", "0.005"]), 0);
    let m = read_manifest(&Path::new(&dir).join("manifest.json")).unwrap();
    assert_eq!(m.config["dt"].as_float(), Some(0.005));
    assert_eq!(m.config["Nx"].as_integer(), Some(128));
    assert_eq!(m.seed, 3);
    assert_eq!(m.flag_overrides, vec!["dt".to_string()]);
    assert_eq!(m.status, Status::Ok);
    let rows = fs::read_to_string(Path::new(&dir).join("conserved.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 1 + 20 / 10);
}

#[test]
fn resonance_rows_match_bruteforce_count() {
    let tmp = TempDir::new().unwrap();
    let modes = ModeSet::new(1);
    for j in ["0,0", "1,-1", "-1,0"] {
        let dir = out(tmp.path(), j);
        assert_eq!(qrs(&["--out-dir", &dir, "resonances", "--radius", "1", "--j", j]), 0);
        let text = fs::read_to_string(Path::new(&dir).join("resonances.csv")).unwrap();
        let (a, b) = j.split_once(',').unwrap();
        let mode = Mode::new(a.parse().unwrap(), b.parse().unwrap());
        let oracle = enumerate_resonances_bruteforce(mode, &modes, DEFAULT_BUDGET).unwrap();
        assert_eq!(text.lines().count() - 1, oracle.len(), "j = {j}");
        assert!(text.starts_with("p1x,p1y,p2x,p2y,p3x,p3y,p4x,p4y,p5x,p5y\n"));
    }
}

#[test]
fn mode_outside_set_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(qrs(&["--out-dir", &out(tmp.path(), "x"), "resonances", "--radius", "1", "--j", "2,0"]), 2);
}

#[test]
fn repeated_run_gives_identical_bytes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.toml", SMALL_RESONANT);
    let (a, b) = (out(tmp.path(), "a"), out(tmp.path(), "b"));
    for d in [&a, &b] {
        assert_eq!(qrs(&["--config", &cfg, "--seed", "11", "--out-dir", d, "simulate-resonant"]), 0);
    }
    for f in ["conserved.csv", "state_final.bin"] {
        assert_eq!(fs::read(Path::new(&a).join(f)).unwrap(), fs::read(Path::new(&b).join(f)).unwrap());
    }
    let ma = read_manifest(&Path::new(&a).join("manifest.json")).unwrap();
    let mb = read_manifest(&Path::new(&b).join("manifest.json")).unwrap();
    assert_eq!(ma.config_hash, mb.config_hash);
    assert_eq!(ma.outputs, mb.outputs);

    let c = out(tmp.path(), "c");
    assert_eq!(qrs(&["--config", &cfg, "--seed", "12", "--out-dir", &c, "simulate-resonant"]), 0);
    let mc = read_manifest(&Path::new(&c).join("manifest.json")).unwrap();
    assert_ne!(ma.config_hash, mc.config_hash);
    assert_ne!(
        fs::read(Path::new(&a).join("state_final.bin")).unwrap(),
        fs::read(Path::new(&c).join("state_final.bin")).unwrap()
    );
}

#[test]
fn numerical_abort_marks_manifest_failed() {
    let tmp = TempDir::new().unwrap();
    let dir = out(tmp.path(), "f");
    let code = qrs(&[
        "--out-dir", &dir, "simulate-resonant", "--radius", "0", "--Lx", "16", "--Nx", "32", "--dt", "0.1",
        "--T", "1", "--init", "scalar-gaussian", "--amplitude", "1e70", "--cadence", "1", "--checkpoint-every", "1",
    ]);
    assert_eq!(code, 3);
    let m = read_manifest(&Path::new(&dir).join("manifest.json")).unwrap();
    assert_eq!(m.status, Status::Failed);
    assert!(m.error.as_deref().unwrap().contains("non-finite"));
    // Only files written before the abort are listed, and they exist.
    for o in &m.outputs {
        assert!(Path::new(&dir).join(&o.path).is_file());
    }
    assert!(m.outputs.iter().all(|o| o.path != "conserved.csv"));
}

#[test]
fn outputs_cannot_leave_out_dir() {
    let tmp = TempDir::new().unwrap();
    let dir = out(tmp.path(), "w");
    assert_eq!(qrs(&["--out-dir", &dir, "weyl", "--N", "1", "--t-samples", "2", "--out", "../escape.csv"]), 2);
    assert!(!tmp.path().join("escape.csv").exists());
    assert_eq!(qrs(&["--out-dir", &dir, "weyl", "--N", "1", "--t-samples", "2", "--out", "/tmp/abs.csv"]), 2);
}

#[test]
fn zero_threads_rejected() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(qrs(&["--threads", "0", "--out-dir", &out(tmp.path(), "w"), "weyl", "--N", "1", "--t-samples", "2"]), 2);
}

#[test]
fn report_on_empty_directory() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(qrs(&["--out-dir", tmp.path().to_str().unwrap(), "report"]), 0);
    let md = fs::read_to_string(tmp.path().join("report.md")).unwrap();
    assert!(md.contains("No runs found"));
    let json: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["runs"].as_array().unwrap().len(), 0);
}

#[test]
fn report_fits_slope_on_valid_rows_only() {
    let tmp = TempDir::new().unwrap();
    let root = tmp.path();
    let ms = root.join("ms");
    // M = 1/2 trips the spectral-tail monitor; the smaller scales are valid.
    let code = qrs(&[
        "--out-dir", ms.to_str().unwrap(), "multiscale", "--psi", "gaussian-y2mode", "--M-list",
        "0.5,0.25,0.125", "--T0", "0.05", "--residual", "false",
    ]);
    assert_eq!(code, 4);
    assert_eq!(read_manifest(&ms.join("manifest.json")).unwrap().status, Status::Invalid);
    // A directory with outputs but no manifest, and a corrupt manifest.
    fs::create_dir_all(root.join("orphan")).unwrap();
    fs::write(root.join("orphan/x.csv"), "a\n1\n").unwrap();
    fs::create_dir_all(root.join("broken")).unwrap();
    fs::write(root.join("broken/manifest.json"), "{").unwrap();

    assert_eq!(qrs(&["--out-dir", root.to_str().unwrap(), "report"]), 0);
    let r: serde_json::Value = serde_json::from_slice(&fs::read(root.join("report.json")).unwrap()).unwrap();
    let entry = &r["multiscale"][0];
    assert_eq!(entry["rows"], 3);
    assert_eq!(entry["valid_rows"], 2);
    let table = fs::read_to_string(ms.join("multiscale.csv")).unwrap();
    let errs: Vec<(f64, f64)> = table
        .lines()
        .skip(2)
        .take(2)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[0].parse().unwrap(), c[1].parse().unwrap())
        })
        .collect();
    let expect = (errs[0].1 / errs[1].1).ln() / (errs[0].0 / errs[1].0).ln();
    assert!((entry["error_slope"].as_f64().unwrap() - expect).abs() < 1e-12);
    assert!(entry["control_error"].as_f64().unwrap() < 1e-6);
    let problems: Vec<String> = r["problems"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["path"].as_str().unwrap().to_string())
        .collect();
    assert!(problems.contains(&"orphan".to_string()) && problems.contains(&"broken".to_string()));
    let md = fs::read_to_string(root.join("report.md")).unwrap();
    assert!(md.contains("2/3") && md.contains("row_valid M=0.5"));
}

#[test]
fn report_flags_modified_outputs() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("w");
    assert_eq!(qrs(&["--out-dir", dir.to_str().unwrap(), "weyl", "--N", "2", "--t-samples", "4"]), 0);
    fs::write(dir.join("weyl.csv"), "t,sup\n").unwrap();
    assert_eq!(qrs(&["--out-dir", tmp.path().to_str().unwrap(), "report"]), 0);
    let r: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(r["runs"][0]["modified_outputs"][0], "weyl.csv");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Each key takes the flag value when given and the file value otherwise.
    #[test]
    fn flags_take_precedence(file_n in 1usize..64, flag_n in proptest::option::of(1usize..64),
                             file_dt in proptest::option::of(1u32..8)) {
        use qrs_cli::args::WeylFlags;
        use qrs_cli::config::{resolve, Globals};
        use qrs_cli::params::WeylParams;
        let mut file = toml::Table::new();
        file.insert("N".into(), toml::Value::Float(1.0));
        file.insert("t-samples".into(), toml::Value::Integer(file_n as i64));
        if let Some(s) = file_dt {
            file.insert("seed".into(), toml::Value::Integer(s as i64));
        }
        let flags = WeylFlags { n: None, t_samples: flag_n, out: None };
        let r = resolve::<WeylParams, _>(Some(file), &flags, &Globals { seed: None, threads: None }).unwrap();
        prop_assert_eq!(r.params.t_samples, flag_n.unwrap_or(file_n));
        prop_assert_eq!(r.seed, file_dt.map_or(0, u64::from));
        prop_assert_eq!(r.flag_overrides.contains(&"t-samples".to_string()), flag_n.is_some());
    }
}

use std::fs;
use std::io::Write;
use std::path::{Component, Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Running,
    Ok,
    /// Outputs complete but a validity monitor tripped.
    Invalid,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monitor {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub artifact: String,
    pub version: String,
    pub command: String,
    pub config: toml::Table,
    /// Keys whose value came from a command-line flag.
    pub flag_overrides: Vec<String>,
    pub seed: u64,
    pub threads: usize,
    /// SHA-256 over command, config, seed and version.
    pub config_hash: String,
    pub started: String,
    pub finished: Option<String>,
    pub status: Status,
    pub error: Option<String>,
    pub monitors: Vec<Monitor>,
    pub outputs: Vec<OutputFile>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn config_hash(command: &str, config: &toml::Table, seed: u64, version: &str) -> String {
    let canon = serde_json::json!({
        "command": command,
        "config": config,
        "seed": seed,
        "version": version,
    });
    sha256_hex(canon.to_string().as_bytes())
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Output directory of one run; every file goes through here and is
/// recorded in the manifest, which is rewritten after each change.
pub struct Run {
    dir: PathBuf,
    pub manifest: Manifest,
}

impl Run {
    pub fn start(
        dir: &Path,
        command: &str,
        config: toml::Table,
        flag_overrides: Vec<String>,
        seed: u64,
        threads: usize,
    ) -> Result<Run, CliError> {
        fs::create_dir_all(dir)?;
        let version = env!("CARGO_PKG_VERSION").to_string();
        let manifest = Manifest {
            artifact: "qrs".into(),
            config_hash: config_hash(command, &config, seed, &version),
            version,
            command: command.into(),
            config,
            flag_overrides,
            seed,
            threads,
            started: now(),
            finished: None,
            status: Status::Running,
            error: None,
            monitors: Vec::new(),
            outputs: Vec::new(),
        };
        let run = Run {
            dir: dir.to_path_buf(),
            manifest,
        };
        run.save()?;
        Ok(run)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn save(&self) -> Result<(), CliError> {
        let tmp = self.dir.join(".manifest.json.tmp");
        let mut f = fs::File::create(&tmp)?;
        f.write_all(serde_json::to_string_pretty(&self.manifest)?.as_bytes())?;
        f.write_all(b"\n")?;
        f.sync_all()?;
        fs::rename(tmp, self.dir.join(MANIFEST))?;
        Ok(())
    }

    /// Path of `name` inside the run directory; rejects anything that would
    /// leave it.
    pub fn resolve(&self, name: &str) -> Result<PathBuf, CliError> {
        let p = Path::new(name);
        let inside = !name.is_empty()
            && p.components().all(|c| matches!(c, Component::Normal(_)))
            && name != MANIFEST;
        if !inside {
            return Err(CliError::Config(format!(
                "output name `{name}` must be a relative path inside the output directory"
            )));
        }
        Ok(self.dir.join(p))
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.resolve(name)?;
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes)?;
        self.manifest.outputs.retain(|o| o.path != name);
        self.manifest.outputs.push(OutputFile {
            path: name.into(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        self.save()
    }

    pub fn monitor(&mut self, name: &str, value: f64, limit: f64) -> bool {
        let ok = value <= limit;
        self.manifest.monitors.push(Monitor {
            name: name.into(),
            value,
            limit,
            ok,
        });
        ok
    }

    pub fn finish(mut self, status: Status, error: Option<String>) -> Result<(), CliError> {
        self.manifest.status = status;
        self.manifest.error = error;
        self.manifest.finished = Some(now());
        self.save()
    }
}

pub fn read_manifest(path: &Path) -> Result<Manifest, CliError> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

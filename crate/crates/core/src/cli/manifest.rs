use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    /// Hex SHA-256 of the file contents.
    pub sha256: String,
    /// False for outputs that contain wall-clock measurements.
    #[serde(default = "yes")]
    pub deterministic: bool,
}

fn yes() -> bool {
    true
}

/// Everything needed to repeat a run: the command line, the directory it
/// ran in, the resolved configuration, and digests of inputs and outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub argv: Vec<String>,
    pub cwd: PathBuf,
    pub config: serde_json::Value,
    pub seeds: BTreeMap<String, u64>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub exit_status: i32,
    pub wall_time_secs: f64,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// Collects what a subcommand read, wrote and seeded.
#[derive(Debug, Default)]
pub struct Recorder {
    pub seeds: BTreeMap<String, u64>,
    inputs: Vec<PathBuf>,
    outputs: Vec<(PathBuf, bool)>,
}

impl Recorder {
    pub fn seed(&mut self, name: &str, value: u64) {
        self.seeds.insert(name.to_string(), value);
    }

    pub fn input(&mut self, path: &Path) {
        if !self.inputs.iter().any(|p| p == path) {
            self.inputs.push(path.to_path_buf());
        }
    }

    /// Registers an output before it is written; refuses to overwrite an
    /// input of the same run.
    pub fn output(&mut self, path: &Path, deterministic: bool) -> Result<()> {
        let target = canonical(path);
        if self.inputs.iter().any(|p| canonical(p) == target) {
            return Err(Error::Config(format!(
                "output {} would overwrite an input file",
                path.display()
            )));
        }
        self.outputs.push((path.to_path_buf(), deterministic));
        Ok(())
    }

    pub fn digests(&self) -> Result<(Vec<FileDigest>, Vec<FileDigest>)> {
        let inputs = self
            .inputs
            .iter()
            .map(|p| {
                Ok(FileDigest {
                    path: p.clone(),
                    sha256: sha256_file(p)?,
                    deterministic: true,
                })
            })
            .collect::<Result<_>>()?;
        let outputs = self
            .outputs
            .iter()
            .map(|(p, deterministic)| {
                Ok(FileDigest {
                    path: p.clone(),
                    sha256: sha256_file(p)?,
                    deterministic: *deterministic,
                })
            })
            .collect::<Result<_>>()?;
        Ok((inputs, outputs))
    }
}

/// Absolute form of a path whose file may not exist yet.
fn canonical(path: &Path) -> PathBuf {
    if let Ok(p) = path.canonicalize() {
        return p;
    }
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    match (parent.canonicalize(), path.file_name()) {
        (Ok(dir), Some(name)) => dir.join(name),
        _ => path.to_path_buf(),
    }
}

//! Deterministic artifact writing: fixed-format CSV, JSON sidecars and the
//! run manifest (always written last, so its presence implies completeness).

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

/// 17 significant digits round-trips every f64 exactly and never depends on
/// locale, so identical configs give byte-identical CSVs.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        // avoid "-0" noise
        return "0.0000000000000000e0".into();
    }
    format!("{x:.16e}")
}

pub struct ArtifactWriter {
    dir: PathBuf,
    written: Vec<(String, String)>, // (file name, sha256)
}

impl ArtifactWriter {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create output dir {}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.written.push((name.to_string(), hex::encode(Sha256::digest(bytes))));
        Ok(())
    }

    /// CSV with a header row, Unix newlines, fixed float formatting.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
        let mut out = String::new();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt_float(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        self.put(name, out.as_bytes())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value)
            .map_err(|e| CliError::Io(format!("cannot serialize {name}: {e}")))?;
        bytes.push(b'\n');
        self.put(name, &bytes)
    }

    /// Write the manifest and consume the writer. Must be the last artifact.
    pub fn finish(
        self,
        experiment: &str,
        config_echo: &serde_json::Value,
        wall_time_s: f64,
    ) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Artifact<'a> {
            file: &'a str,
            sha256: &'a str,
        }
        #[derive(Serialize)]
        struct Manifest<'a> {
            experiment: &'a str,
            config: &'a serde_json::Value,
            artifacts: Vec<Artifact<'a>>,
            version: &'a str,
            wall_time_s: f64,
        }
        let manifest = Manifest {
            experiment,
            config: config_echo,
            artifacts: self
                .written
                .iter()
                .map(|(f, h)| Artifact { file: f, sha256: h })
                .collect(),
            version: env!("CARGO_PKG_VERSION"),
            wall_time_s,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest)
            .map_err(|e| CliError::Io(format!("cannot serialize manifest: {e}")))?;
        bytes.push(b'\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, &bytes)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
    }
}

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use super::Failure;

/// Hex SHA-256 of the canonical JSON form of the resolved configuration.
pub fn config_hash(config: &RunConfig) -> String {
    let bytes = serde_json::to_vec(config).expect("configuration serialises");
    let digest = Sha256::digest(&bytes);
    let mut out = String::with_capacity(64);
    for b in digest.iter() {
        write!(out, "{b:02x}").expect("writing to a string");
    }
    out
}

/// Writes the artifacts of one run into a directory.
pub struct Artifacts {
    dir: PathBuf,
    hash: String,
    config: Value,
    command: &'static str,
    written: Vec<String>,
}

/// A CSV cell rendered with the shortest round-trip representation.
pub fn cell<T: ToString>(v: T) -> String {
    v.to_string()
}

pub fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl Artifacts {
    pub fn new(dir: PathBuf, config: &RunConfig, command: &'static str) -> Result<Self, Failure> {
        fs::create_dir_all(&dir)
            .map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir,
            hash: config_hash(config),
            config: serde_json::to_value(config).expect("configuration serialises"),
            command,
            written: Vec::new(),
        })
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    fn write(&mut self, name: &str, text: String) -> Result<(), Failure> {
        let path = self.dir.join(name);
        fs::write(&path, text)
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// CSV with a leading `# config_hash=…` comment line.
    pub fn csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<(), Failure> {
        let mut text = format!("# config_hash={}\n{}\n", self.hash, header.join(","));
        for r in rows {
            debug_assert_eq!(r.len(), header.len());
            text.push_str(&r.join(","));
            text.push('\n');
        }
        self.write(name, text)
    }

    /// JSON summary echoing the command, the configuration and its hash.
    pub fn summary<T: Serialize>(
        &mut self,
        result: &T,
        failure: Option<&Failure>,
    ) -> Result<(), Failure> {
        let mut doc = json!({
            "command": self.command,
            "status": if failure.is_some() { "failure" } else { "ok" },
            "config_hash": self.hash,
            "config": self.config,
            "result": serde_json::to_value(result).expect("result serialises"),
        });
        if let Some(f) = failure {
            doc["reason"] = f.reason();
        }
        let mut text = serde_json::to_string_pretty(&doc).expect("summary serialises");
        text.push('\n');
        let name = format!("{}.json", self.command);
        self.write(&name, text)
    }
}

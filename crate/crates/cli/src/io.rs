//! Input parsing, output staging and run manifests.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use cultnov::builder::{detect_country, parse_dish_specs, DishSpec};
use cultnov::distances::Registry;
use cultnov::{AnnotationProvider, Document, Error, RecipeRecord};
use log::warn;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Parameters, RunConfig};
use crate::{CliError, TOOL_VERSION};

pub fn read_registry(path: &Path) -> Result<Registry, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
    Registry::from_json_str(&text).map_err(|e| CliError::input(path, e))
}

pub fn read_dish_specs(path: &Path) -> Result<Vec<DishSpec>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
    parse_dish_specs(&text).map_err(|e| CliError::input(path, e))
}

/// Documents of a JSONL corpus plus the number of records dropped because
/// nothing was left after annotation. Records without a country take the
/// one detected in their title.
pub fn read_corpus(
    path: &Path,
    provider: AnnotationProvider,
    registry: &Registry,
) -> Result<(Vec<Document>, usize), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
    let mut docs = Vec::new();
    let mut ids = BTreeSet::new();
    let mut dropped = 0;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let at = || format!("{}:{}", path.display(), i + 1);
        let rec: RecipeRecord =
            serde_json::from_str(line).map_err(|e| CliError::Input { path: at(), message: e.to_string() })?;
        if !ids.insert(rec.id.clone()) {
            return Err(CliError::Input { path: at(), message: format!("duplicate id {:?}", rec.id) });
        }
        match Document::from_record(&rec, provider) {
            Ok(mut doc) => {
                if doc.country.is_none() {
                    doc.country = detect_country(&doc.title, registry);
                }
                docs.push(doc);
            }
            Err(e @ (Error::EmptyText | Error::EmptyAfterFilter)) => {
                warn!("{}: dropping record {:?}: {e}", at(), rec.id);
                dropped += 1;
            }
            Err(e) => return Err(CliError::Input { path: at(), message: e.to_string() }),
        }
    }
    Ok((docs, dropped))
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::input(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Shortest decimal that round-trips; `nan` for undefined values.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).map_err(CliError::internal)?;
    for r in rows {
        w.write_record(r).map_err(CliError::internal)?;
    }
    w.into_inner().map_err(CliError::internal)
}

pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(value).map_err(CliError::internal)?;
    out.push(b'\n');
    Ok(out)
}

/// Outputs are collected in memory and written only once every input has
/// been read and every result computed, each through a temporary file.
#[derive(Debug, Default)]
pub struct Staged {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Staged {
    pub fn add(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.files.push((path, bytes));
    }

    pub fn names(&self) -> Vec<String> {
        self.files.iter().map(|(p, _)| file_name(p)).collect()
    }

    pub fn commit(self) -> Result<Vec<PathBuf>, CliError> {
        let mut written = Vec::with_capacity(self.files.len());
        for (path, bytes) in self.files {
            if let Some(dir) = path.parent() {
                fs::create_dir_all(dir).map_err(|e| CliError::input(dir, e))?;
            }
            let tmp = path.with_extension("tmp~");
            fs::write(&tmp, &bytes).map_err(|e| CliError::input(&tmp, e))?;
            fs::rename(&tmp, &path).map_err(|e| CliError::input(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

pub fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub role: String,
    pub file: String,
    pub sha256: String,
}

/// Reproducibility record written next to each command's outputs. Holds no
/// timestamps or absolute paths so reruns are byte-identical.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_sha256: String,
    pub parameters: Parameters,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, cfg: &RunConfig) -> Result<Self, CliError> {
        let parameters = cfg.parameters();
        let config_sha256 = sha256_bytes(&serde_json::to_vec(&parameters).map_err(CliError::internal)?);
        Ok(Self {
            tool: "cultnov",
            version: TOOL_VERSION,
            command: command.to_string(),
            config_sha256,
            parameters,
            inputs: vec![],
            outputs: vec![],
        })
    }

    pub fn input(&mut self, role: &str, path: &Path) -> Result<(), CliError> {
        self.inputs.push(InputDigest { role: role.to_string(), file: file_name(path), sha256: sha256_file(path)? });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, 1e-20, 123456.789, 0.0] {
            assert_eq!(fmt_float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_float(f64::NAN), "nan");
        assert_eq!(fmt_float(1.0), "1");
    }

    #[test]
    fn csv_has_unix_newlines() {
        let b = csv_bytes(&["a", "b"], &[vec!["1".into(), "x,y".into()]]).unwrap();
        assert_eq!(String::from_utf8(b).unwrap(), "a,b\n1,\"x,y\"\n");
    }
}

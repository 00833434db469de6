//! Tabular report output (CSV, JSON, Markdown) and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

/// Literal written for undefined or not-applicable cells in effort tables.
pub const NA: &str = "NA";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
    Md,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Md => "md",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "md" => Ok(Format::Md),
            other => Err(format!("unknown format `{other}` (expected csv, json or md)")),
        }
    }
}

/// A named table of string cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Table { name: name.into(), header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: impl IntoIterator<Item = impl Into<String>>) {
        let row: Vec<String> = row.into_iter().map(Into::into).collect();
        debug_assert_eq!(row.len(), self.header.len(), "row width in table {}", self.name);
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
            Format::Md => self.to_markdown(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> =
                    self.header.iter().zip(r).map(|(h, cell)| (h.clone(), json_cell(cell))).collect();
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&Value::Array(rows)).expect("json");
        s.push('\n');
        s
    }

    fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "| {} |", self.header.join(" | "));
        let _ = writeln!(s, "|{}", "---|".repeat(self.header.len()));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|c| c.replace('|', "\\|")).collect();
            let _ = writeln!(s, "| {} |", cells.join(" | "));
        }
        s
    }
}

fn json_cell(cell: &str) -> Value {
    if cell.is_empty() || cell == NA {
        return Value::Null;
    }
    if let Ok(i) = cell.parse::<i64>() {
        return Value::from(i);
    }
    match cell.parse::<f64>() {
        Ok(f) if f.is_finite() => Value::from(f),
        _ => Value::String(cell.to_string()),
    }
}

/// Formats a real for reports; `None` becomes an empty cell.
pub fn fmt_opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn file_digest(path: &Path) -> io::Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputEntry {
    pub file: String,
    pub sha256: String,
}

/// Provenance written next to every report bundle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub harness_version: String,
    pub inputs: Vec<InputDigest>,
    pub seed: u64,
    pub rng_algorithm: String,
    pub median_convention: String,
    pub config: Value,
    pub timestamp: String,
    pub outputs: Vec<OutputEntry>,
}

/// Writes `contents` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension(format!("{}.tmp", path.extension().and_then(|e| e.to_str()).unwrap_or("")));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

/// Writes every table plus `manifest.json` into `dir`. On failure, files
/// written so far are removed.
pub fn write_bundle(
    dir: &Path,
    tables: &[Table],
    format: Format,
    mut manifest: RunManifest,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written: Vec<PathBuf> = Vec::new();
    let result = (|| {
        for t in tables {
            let file = format!("{}.{}", t.name, format.extension());
            let body = t.render(format);
            let path = dir.join(&file);
            write_atomic(&path, body.as_bytes())?;
            written.push(path);
            manifest.outputs.push(OutputEntry { file, sha256: sha256_hex(body.as_bytes()) });
        }
        let path = dir.join("manifest.json");
        let mut body = serde_json::to_string_pretty(&manifest).map_err(io::Error::other)?;
        body.push('\n');
        write_atomic(&path, body.as_bytes())?;
        written.push(path);
        Ok(())
    })();
    match result {
        Ok(()) => Ok(written),
        Err(e) => {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            Err(e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("x", ["a", "b"]);
        t.push(["1", "NA"]);
        t.push(["0.5", "p|q"]);
        t
    }

    #[test]
    fn renders_all_formats() {
        let t = sample();
        assert_eq!(t.to_csv(), "a,b\n1,NA\n0.5,p|q\n");
        let j: Value = serde_json::from_str(&t.render(Format::Json)).unwrap();
        assert_eq!(j[0]["a"], Value::from(1));
        assert_eq!(j[0]["b"], Value::Null);
        assert_eq!(j[1]["a"], Value::from(0.5));
        let md = t.render(Format::Md);
        assert!(md.starts_with("| a | b |\n|---|---|\n"));
        assert!(md.contains("p\\|q"));
    }

    #[test]
    fn digest_is_sha256() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn bundle_writes_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = RunManifest {
            harness_version: "0".into(),
            inputs: vec![],
            seed: 1,
            rng_algorithm: "r".into(),
            median_convention: "m".into(),
            config: Value::Null,
            timestamp: "t".into(),
            outputs: vec![],
        };
        let files = write_bundle(dir.path(), &[sample()], Format::Csv, manifest).unwrap();
        assert_eq!(files.len(), 2);
        let m: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(m["outputs"][0]["file"], "x.csv");
        assert!(!dir.path().join("x.csv.tmp").exists());
    }
}

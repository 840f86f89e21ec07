use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            // 17 significant digits round-trip every f64.
            Cell::Float(x) if x.is_finite() => write!(out, "{x:.16e}").unwrap(),
            Cell::Float(x) if x.is_nan() => out.push_str("nan"),
            Cell::Float(x) => out.push_str(if *x > 0.0 { "inf" } else { "-inf" }),
            Cell::Int(n) => write!(out, "{n}").unwrap(),
            Cell::Bool(b) => write!(out, "{b}").unwrap(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => write!(out, "\"{}\"", s.replace('"', "\"\"")).unwrap(),
            Cell::Text(s) => out.push_str(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Two provenance comment lines, the header, then one line per row.
    pub fn to_csv(&self, config_hash: &str, seed: u64) -> String {
        let mut out = format!("# config_sha256={config_hash}\n# seed={seed}\n");
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, c) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                c.render(&mut out);
            }
            out.push('\n');
        }
        out
    }
}

/// SHA-256 of the result-determining config together with the contents of
/// the files it references.
pub fn config_hash(cfg: &ExperimentConfig, inputs: &Value) -> String {
    let doc = json!({ "config": cfg.for_hash(), "inputs": inputs });
    let bytes = serde_json::to_vec(&doc).expect("json values serialize");
    hex::encode(Sha256::digest(&bytes))
}

pub struct Artifacts {
    pub csv: PathBuf,
    pub json: PathBuf,
}

pub fn write_artifacts(dir: &Path, stem: &str, csv: &str, summary: &Value) -> Result<Artifacts> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    std::fs::write(&csv_path, csv).with_context(|| format!("writing {}", csv_path.display()))?;
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    std::fs::write(&json_path, text).with_context(|| format!("writing {}", json_path.display()))?;
    Ok(Artifacts { csv: csv_path, json: json_path })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["r", "n", "ok", "name"]);
        t.push(vec![0.1.into(), 3usize.into(), true.into(), "a,b".into()]);
        t.push(vec![f64::NAN.into(), 0usize.into(), false.into(), "c".into()]);
        let csv = t.to_csv("abc", 7);
        assert_eq!(csv, "# config_sha256=abc\n# seed=7\nr,n,ok,name\n1.0000000000000001e-1,3,true,\"a,b\"\nnan,0,false,c\n");
        let x: f64 = "1.0000000000000001e-1".parse().unwrap();
        assert_eq!(x, 0.1);
    }

    #[test]
    fn hash_ignores_threads_and_output() {
        let a = ExperimentConfig { seed: Some(3), threads: Some(1), ..Default::default() };
        let b = ExperimentConfig { seed: Some(3), threads: Some(8), out_dir: Some("x".into()), ..Default::default() };
        assert_eq!(config_hash(&a, &Value::Null), config_hash(&b, &Value::Null));
        let c = ExperimentConfig { seed: Some(4), ..Default::default() };
        assert_ne!(config_hash(&a, &Value::Null), config_hash(&c, &Value::Null));
    }
}

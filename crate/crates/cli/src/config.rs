//! Experiment configuration: JSON files merged with command-line flags.
//!
//! A config file and flags may both set a key. The file wins, and a warning
//! names the key.

use std::fmt;
use std::path::{Path, PathBuf};

use perimetry_core::checks::{Fault, Level};
use perimetry_core::StructuringElement;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Derivative,
    Covariogram,
    Qvariation,
    Contact,
    Counterexample,
    Suite,
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CommandKind::Derivative => "derivative",
            CommandKind::Covariogram => "covariogram",
            CommandKind::Qvariation => "qvariation",
            CommandKind::Contact => "contact",
            CommandKind::Counterexample => "counterexample",
            CommandKind::Suite => "suite",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Auto,
    Exact,
    MonteCarlo,
    Grid,
}

/// `Q` as `"x,y;x,y"` or as an array of coordinate arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Points {
    Text(String),
    List(Vec<Vec<f64>>),
}

impl Points {
    pub fn to_list(&self) -> Result<Vec<Vec<f64>>, String> {
        match self {
            Points::List(p) => Ok(p.clone()),
            Points::Text(t) => StructuringElement::parse(t)
                .map(|q| q.points().iter().map(|p| p.coords().to_vec()).collect())
                .map_err(|e| format!("q: {e}")),
        }
    }
}

/// Every key a config file may carry. All keys are optional here; each
/// command checks for the ones it needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,
    /// Shape description file (derivative, covariogram, qvariation).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<PathBuf>,
    /// Boolean model file (contact).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Points>,
    /// Unit direction for the covariogram slope.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    /// Explicit radii for the contact distribution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodName>,
    /// Grid spacing when `method` is `grid`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Monte Carlo samples per evaluation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realizations: Option<usize>,
    /// Stratified window points per realization (volume fraction).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Shell points per realization (contact distribution).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shell_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<Level>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inject: Option<Vec<Fault>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Worker threads; `PERIMETRY_THREADS` caps it further.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Directory for `<command>.csv` and `<command>.json`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Reads and schema-checks a config file. Relative paths inside it are
    /// taken relative to the file.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.shape, &mut cfg.spec, &mut cfg.out_dir].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Overlays `file` on `self` (the flags). Conflicting keys are reported
    /// in the returned warnings.
    pub fn merge_file(self, file: ExperimentConfig) -> Result<(Self, Vec<String>), ConfigError> {
        let flags = to_map(&self.normalized()?)?;
        let file = to_map(&file.normalized()?)?;
        let mut warnings = Vec::new();
        let mut merged = flags.clone();
        for (k, v) in file {
            if let Some(old) = flags.get(&k) {
                if *old != v {
                    warnings.push(format!("config file overrides --{} ({} -> {})", k.replace('_', "-"), old, v));
                }
            }
            merged.insert(k, v);
        }
        let cfg = serde_json::from_value(Value::Object(merged)).map_err(|e| ConfigError(e.to_string()))?;
        Ok((cfg, warnings))
    }

    /// `q` in list form so that the text and list spellings compare equal.
    pub fn normalized(mut self) -> Result<Self, ConfigError> {
        if let Some(q) = &self.q {
            self.q = Some(Points::List(q.to_list().map_err(ConfigError)?));
        }
        Ok(self)
    }

    /// The keys that determine results: everything but threads and paths
    /// for output.
    pub fn for_hash(&self) -> ExperimentConfig {
        ExperimentConfig { threads: None, out_dir: None, ..self.clone() }
    }
}

fn to_map(cfg: &ExperimentConfig) -> Result<Map<String, Value>, ConfigError> {
    match serde_json::to_value(cfg) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => unreachable!("config serializes to an object"),
        Err(e) => Err(ConfigError(e.to_string())),
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

//! Flat `key = value` run configuration. The same format serves as input
//! config and as the manifest written next to results, so a manifest can be
//! fed back in to reproduce a run.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::environment::{EnvironmentSpec, MeasureMode};
use crate::error::{Error, Result};
use crate::evaluation::OracleConfig;
use crate::network::{NetworkConfig, OutputActivation};
use crate::training::TrainConfig;

/// Ordered key/value pairs with the line each key came from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvDocument {
    entries: BTreeMap<String, (String, usize)>,
    path: PathBuf,
}

impl KvDocument {
    pub fn parse(text: &str, path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    path,
                    line: line_no,
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Parse {
                    path,
                    line: line_no,
                    message: "empty key".into(),
                });
            }
            if entries
                .insert(key.to_string(), (value.trim().to_string(), line_no))
                .is_some()
            {
                return Err(Error::Parse {
                    path,
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Self { entries, path })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    fn line(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |(_, l)| *l)
    }

    fn error(&self, key: &str, message: String) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line: self.line(key),
            message,
        }
    }
}

/// Parses `1,5,9` or the inclusive range `1:21:4` (start:end:step).
pub fn parse_usize_list(text: &str) -> Result<Vec<usize>> {
    let text = text.trim();
    let bad = |why: &str| Error::Config(format!("bad integer list `{text}`: {why}"));
    if let Some((start, rest)) = text.split_once(':') {
        let (end, step) = rest.split_once(':').unwrap_or((rest, "1"));
        let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad("not an integer"));
        let (start, end, step) = (parse(start)?, parse(end)?, parse(step)?);
        if step == 0 || end < start {
            return Err(bad("empty range"));
        }
        return Ok((start..=end).step_by(step).collect());
    }
    let values = text
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| bad("not an integer")))
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(bad("empty"));
    }
    Ok(values)
}

fn format_list(values: &[usize]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub n_values: Vec<usize>,
    pub m_values: Vec<usize>,
    pub seeds: Vec<u64>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            n_values: (1..=21).step_by(4).collect(),
            m_values: (1..=171).step_by(10).collect(),
            seeds: (0..10).collect(),
        }
    }
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() || self.m_values.is_empty() || self.seeds.is_empty() {
            return Err(Error::Config(
                "sweep grid sequences must be nonempty".into(),
            ));
        }
        if self.n_values.contains(&0) || self.m_values.contains(&0) {
            return Err(Error::Config("sweep grid values must be at least 1".into()));
        }
        Ok(())
    }

    /// All `(n, m, seed)` cells in sweep order.
    pub fn cells(&self) -> Vec<(usize, usize, u64)> {
        let mut out = Vec::with_capacity(self.cell_count());
        for &n in &self.n_values {
            for &m in &self.m_values {
                for &seed in &self.seeds {
                    out.push((n, m, seed));
                }
            }
        }
        out
    }

    pub fn cell_count(&self) -> usize {
        self.n_values.len() * self.m_values.len() * self.seeds.len()
    }
}

/// Everything a run depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub env: EnvironmentSpec,
    pub measure: MeasureMode,
    pub network: NetworkConfig,
    pub train: TrainConfig,
    pub grid: SweepGrid,
    pub seed: u64,
    /// Train-error gate for keeping a cell's checkpoint.
    pub checkpoint_gate: f64,
    /// Exact generalization error below which a representation is archived.
    pub extract_threshold: f64,
    pub oracle: OracleConfig,
    pub transfer_m_values: Vec<usize>,
    pub transfer_seeds: Vec<u64>,
    /// Restrict transfer to these held-out tasks; empty means all held-out tasks.
    pub transfer_tasks: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            env: EnvironmentSpec::default(),
            measure: MeasureMode::default(),
            network: NetworkConfig::default(),
            train: TrainConfig::default(),
            grid: SweepGrid::default(),
            seed: 0,
            checkpoint_gate: 0.01,
            extract_threshold: 0.01,
            oracle: OracleConfig::default(),
            transfer_m_values: (1..=91).step_by(10).collect(),
            transfer_seeds: (0..10).collect(),
            transfer_tasks: Vec::new(),
        }
    }
}

pub const KEYS: &[&str] = &[
    "env.input_length",
    "env.ones_min",
    "env.ones_max",
    "measure",
    "net.hidden_sizes",
    "net.rep_dim",
    "net.init_scale",
    "net.output_activation",
    "train.learning_rate",
    "train.max_epochs",
    "train.target_error",
    "grid.n_values",
    "grid.m_values",
    "grid.seeds",
    "seed",
    "checkpoint.train_gate",
    "extract.threshold",
    "oracle.restarts",
    "oracle.init_scale",
    "oracle.learning_rate",
    "oracle.max_epochs",
    "oracle.target_error",
    "transfer.m_values",
    "transfer.seeds",
    "transfer.tasks",
];

impl RunConfig {
    pub fn from_document(doc: &KvDocument) -> Result<Self> {
        let mut cfg = Self::default();
        for key in doc.keys() {
            let value = doc.get(key).unwrap_or_default();
            cfg.set(key, value).map_err(|e| match e {
                Error::Config(message) => doc.error(key, message),
                other => doc.error(key, other.to_string()),
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_document(&KvDocument::read(path)?)
    }

    /// Applies `key=value`.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
        self.set(key.trim(), value.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
        }
        match key {
            "env.input_length" => {
                self.env.input_length = num(key, value)?;
                self.network.input_length = self.env.input_length as usize;
            }
            "env.ones_min" => self.env.ones_min = num(key, value)?,
            "env.ones_max" => self.env.ones_max = num(key, value)?,
            "measure" => self.measure = value.parse()?,
            "net.hidden_sizes" => {
                self.network.hidden_sizes = if value.is_empty() {
                    Vec::new()
                } else {
                    parse_usize_list(value)?
                }
            }
            "net.rep_dim" => self.network.rep_dim = num(key, value)?,
            "net.init_scale" => self.network.init_scale = num(key, value)?,
            "net.output_activation" => {
                self.network.output_activation = OutputActivation::parse(value)?
            }
            "train.learning_rate" => self.train.learning_rate = num(key, value)?,
            "train.max_epochs" => self.train.max_epochs = num(key, value)?,
            "train.target_error" => self.train.target_error = num(key, value)?,
            "grid.n_values" => self.grid.n_values = parse_usize_list(value)?,
            "grid.m_values" => self.grid.m_values = parse_usize_list(value)?,
            "grid.seeds" => self.grid.seeds = (0..num::<u64>(key, value)?).collect(),
            "seed" => self.seed = num(key, value)?,
            "checkpoint.train_gate" => self.checkpoint_gate = num(key, value)?,
            "extract.threshold" => self.extract_threshold = num(key, value)?,
            "oracle.restarts" => self.oracle.restarts = num(key, value)?,
            "oracle.init_scale" => self.oracle.init_scale = num(key, value)?,
            "oracle.learning_rate" => self.oracle.train.learning_rate = num(key, value)?,
            "oracle.max_epochs" => self.oracle.train.max_epochs = num(key, value)?,
            "oracle.target_error" => self.oracle.train.target_error = num(key, value)?,
            "transfer.m_values" => self.transfer_m_values = parse_usize_list(value)?,
            "transfer.seeds" => self.transfer_seeds = (0..num::<u64>(key, value)?).collect(),
            "transfer.tasks" => {
                self.transfer_tasks = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            }
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.env
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.network.input_length != self.env.input_length as usize {
            return Err(Error::Config(format!(
                "network input length {} differs from environment input length {}",
                self.network.input_length, self.env.input_length
            )));
        }
        self.network
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        self.train
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        self.oracle
            .train
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        self.grid.validate()?;
        if self.oracle.restarts == 0 {
            return Err(Error::Config("oracle.restarts must be at least 1".into()));
        }
        if self.transfer_m_values.is_empty() || self.transfer_m_values.contains(&0) {
            return Err(Error::Config(
                "transfer.m_values must be nonempty and at least 1".into(),
            ));
        }
        if self.transfer_seeds.is_empty() {
            return Err(Error::Config("transfer.seeds must be at least 1".into()));
        }
        for (name, v) in [
            ("checkpoint.train_gate", self.checkpoint_gate),
            ("extract.threshold", self.extract_threshold),
        ] {
            if !(v >= 0.0) {
                return Err(Error::Config(format!("{name} must be nonnegative")));
            }
        }
        Ok(())
    }

    /// Renders the effective configuration; parsing it back yields `self`.
    pub fn to_manifest(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("env.input_length", self.env.input_length.to_string());
        put("env.ones_min", self.env.ones_min.to_string());
        put("env.ones_max", self.env.ones_max.to_string());
        put("measure", self.measure.to_string());
        put("net.hidden_sizes", format_list(&self.network.hidden_sizes));
        put("net.rep_dim", self.network.rep_dim.to_string());
        put("net.init_scale", self.network.init_scale.to_string());
        put(
            "net.output_activation",
            self.network.output_activation.as_str().into(),
        );
        put("train.learning_rate", self.train.learning_rate.to_string());
        put("train.max_epochs", self.train.max_epochs.to_string());
        put("train.target_error", self.train.target_error.to_string());
        put("grid.n_values", format_list(&self.grid.n_values));
        put("grid.m_values", format_list(&self.grid.m_values));
        put("grid.seeds", self.grid.seeds.len().to_string());
        put("seed", self.seed.to_string());
        put("checkpoint.train_gate", self.checkpoint_gate.to_string());
        put("extract.threshold", self.extract_threshold.to_string());
        put("oracle.restarts", self.oracle.restarts.to_string());
        put("oracle.init_scale", self.oracle.init_scale.to_string());
        put(
            "oracle.learning_rate",
            self.oracle.train.learning_rate.to_string(),
        );
        put(
            "oracle.max_epochs",
            self.oracle.train.max_epochs.to_string(),
        );
        put(
            "oracle.target_error",
            self.oracle.train.target_error.to_string(),
        );
        put("transfer.m_values", format_list(&self.transfer_m_values));
        put("transfer.seeds", self.transfer_seeds.len().to_string());
        put("transfer.tasks", self.transfer_tasks.join(","));
        s
    }
}

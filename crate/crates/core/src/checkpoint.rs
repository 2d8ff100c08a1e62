//! Plain-text checkpoints of a multitask network together with the tasks
//! its output networks were trained on.
//!
//! ```text
//! bias-learn checkpoint 1
//! meta gen_error 0.0042
//! layers 10 8 2
//! activation sigmoid
//! tasks 1000 0110
//! layer 0 <weights>
//! layer 1 <weights>
//! output 0 <weights>
//! output 1 <weights>
//! ```
//!
//! Weights are written in shortest round-trip form, so loading a checkpoint
//! reproduces the network bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::environment::{EnvironmentSpec, SymmetricTask};
use crate::error::{Error, Result};
use crate::network::{Layer, MultitaskNetwork, OutputActivation, OutputNet, RepresentationNet};

const MAGIC: &str = "bias-learn checkpoint 1";

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub network: MultitaskNetwork,
    /// One task per output network.
    pub tasks: Vec<SymmetricTask>,
    /// Free-form metadata; keys and values must not contain whitespace.
    pub meta: BTreeMap<String, String>,
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:e}"))
        .collect::<Vec<_>>()
        .join(" ")
}

impl Checkpoint {
    pub fn new(network: MultitaskNetwork, tasks: Vec<SymmetricTask>) -> Result<Self> {
        if tasks.len() != network.task_count() {
            return Err(Error::DimensionMismatch {
                expected: network.task_count(),
                actual: tasks.len(),
            });
        }
        Ok(Self {
            network,
            tasks,
            meta: BTreeMap::new(),
        })
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.insert(key.to_string(), value.to_string());
        self
    }

    pub fn meta_f64(&self, key: &str) -> Result<f64> {
        self.meta
            .get(key)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| {
                Error::ArchiveVerification(format!("missing or malformed metadata `{key}`"))
            })
    }

    pub fn meta_usize(&self, key: &str) -> Result<usize> {
        self.meta
            .get(key)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| {
                Error::ArchiveVerification(format!("missing or malformed metadata `{key}`"))
            })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{MAGIC}");
        for (k, v) in &self.meta {
            let _ = writeln!(s, "meta {k} {v}");
        }
        let sizes = self.network.rep().layer_sizes();
        let _ = writeln!(
            s,
            "layers {}",
            sizes
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        );
        let activation = self
            .network
            .outputs()
            .first()
            .map_or(OutputActivation::Sigmoid, |g| g.activation());
        let _ = writeln!(s, "activation {}", activation.as_str());
        let _ = writeln!(
            s,
            "tasks {}",
            self.tasks
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        );
        for (i, layer) in self.network.rep().layers().iter().enumerate() {
            let _ = writeln!(s, "layer {i} {}", join(layer.weights()));
        }
        for (i, g) in self.network.outputs().iter().enumerate() {
            let _ = writeln!(s, "output {i} {}", join(g.weights()));
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn parse(text: &str, spec: &EnvironmentSpec, path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let err = |line: usize, message: String| Error::Parse {
            path: path.clone(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, first)) if first.trim() == MAGIC => {}
            _ => return Err(err(1, format!("expected header `{MAGIC}`"))),
        }

        let mut meta = BTreeMap::new();
        let mut sizes: Option<Vec<usize>> = None;
        let mut activation = OutputActivation::Sigmoid;
        let mut tasks: Option<Vec<SymmetricTask>> = None;
        let mut layers: Vec<Vec<f64>> = Vec::new();
        let mut outputs: Vec<Vec<f64>> = Vec::new();

        for (no, line) in lines {
            let mut words = line.split_whitespace();
            let Some(tag) = words.next() else { continue };
            let rest: Vec<&str> = words.collect();
            let floats = |rest: &[&str]| -> Result<Vec<f64>> {
                rest.iter()
                    .map(|w| {
                        w.parse::<f64>()
                            .map_err(|_| err(no, format!("bad number `{w}`")))
                    })
                    .collect()
            };
            let indexed = |rest: &[&str], expected: usize| -> Result<()> {
                match rest.first().and_then(|w| w.parse::<usize>().ok()) {
                    Some(i) if i == expected => Ok(()),
                    _ => Err(err(no, format!("expected index {expected}"))),
                }
            };
            match tag {
                "meta" => {
                    if rest.len() != 2 {
                        return Err(err(no, "meta lines take a key and a value".into()));
                    }
                    meta.insert(rest[0].to_string(), rest[1].to_string());
                }
                "layers" => {
                    sizes = Some(
                        rest.iter()
                            .map(|w| {
                                w.parse::<usize>()
                                    .map_err(|_| err(no, format!("bad size `{w}`")))
                            })
                            .collect::<Result<_>>()?,
                    )
                }
                "activation" => {
                    activation = OutputActivation::parse(rest.first().copied().unwrap_or(""))
                        .map_err(|e| err(no, e.to_string()))?
                }
                "tasks" => {
                    tasks = Some(
                        rest.iter()
                            .map(|w| {
                                SymmetricTask::parse(spec, w).map_err(|e| err(no, e.to_string()))
                            })
                            .collect::<Result<_>>()?,
                    )
                }
                "layer" => {
                    indexed(&rest, layers.len())?;
                    layers.push(floats(&rest[1..])?);
                }
                "output" => {
                    indexed(&rest, outputs.len())?;
                    outputs.push(floats(&rest[1..])?);
                }
                other => return Err(err(no, format!("unknown record `{other}`"))),
            }
        }

        let end = text.lines().count();
        let sizes = sizes.ok_or_else(|| err(end, "missing `layers` record".into()))?;
        let tasks = tasks.ok_or_else(|| err(end, "missing `tasks` record".into()))?;
        if sizes.len() < 2 || layers.len() != sizes.len() - 1 {
            return Err(err(
                end,
                format!("expected {} layer records", sizes.len().saturating_sub(1)),
            ));
        }
        let rep_layers = sizes
            .windows(2)
            .zip(layers)
            .map(|(w, weights)| Layer::from_weights(w[0], w[1], weights))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| err(end, e.to_string()))?;
        let rep = RepresentationNet::new(rep_layers).map_err(|e| err(end, e.to_string()))?;
        let outputs = outputs
            .into_iter()
            .map(|w| OutputNet::from_weights(w, activation))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| err(end, e.to_string()))?;
        let network = MultitaskNetwork::new(rep, outputs).map_err(|e| err(end, e.to_string()))?;
        let mut ckpt = Self::new(network, tasks).map_err(|e| err(end, e.to_string()))?;
        ckpt.meta = meta;
        Ok(ckpt)
    }

    pub fn read(path: &Path, spec: &EnvironmentSpec) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, spec, path)
    }
}

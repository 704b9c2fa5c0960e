//! Experiment configuration files.

use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{read_graph, CrossingVector, Graph, OrientedSpanningTree};
use crate::harness::{CylinderEvent, OccupationWindow, Thresholds};
use crate::sim::{ProcessSpec, StopRule};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSpec {
    Ball { d: usize, r: usize },
    Complete { n: usize },
    Path { n: usize },
    Cycle { n: usize },
    RegularTree { degree: usize, depth: usize },
    File { path: PathBuf },
}

impl GraphSpec {
    pub fn build(&self) -> Result<Graph> {
        match self {
            GraphSpec::Ball { d, r } => Graph::ball(*d, *r),
            GraphSpec::Complete { n } => Graph::complete(*n),
            GraphSpec::Path { n } => Graph::path(*n),
            GraphSpec::Cycle { n } => Graph::cycle(*n),
            GraphSpec::RegularTree { degree, depth } => Graph::regular_tree(*degree, *depth),
            GraphSpec::File { path } => read_graph(&std::fs::read_to_string(path)?),
        }
    }
}

/// Crossing count of one oriented edge, `[from, to, count]`.
pub type CrossingEntry = (usize, usize, u64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct LocalTimeTargetSpec {
    pub vertices: BTreeSet<usize>,
    /// Tree edges `[child, parent]`, pointing towards `terminal`.
    pub tree: Vec<(usize, usize)>,
    pub terminal: usize,
    pub crossings: Vec<CrossingEntry>,
}

impl LocalTimeTargetSpec {
    pub fn resolve(&self, g: &Graph) -> Result<(OrientedSpanningTree, CrossingVector)> {
        let tree = OrientedSpanningTree::from_pairs(g, self.terminal, &self.tree)?;
        let k = CrossingVector::from_pairs(g, &self.crossings)?;
        Ok((tree, k))
    }
}

fn default_mean_tol() -> f64 {
    0.02
}

fn default_rho_max() -> f64 {
    0.05
}

fn default_bins() -> usize {
    10
}

fn default_min_prob() -> f64 {
    0.01
}

/// One validation or data-producing task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Suite {
    /// Simulates the configured process and records observables.
    Simulate {
        #[serde(default)]
        trajectories: bool,
    },
    /// Exposures between edge-range increments against Exp(a).
    DeltaExponential {
        samples: usize,
        #[serde(rename = "per-trajectory")]
        per_trajectory: usize,
        #[serde(default = "default_mean_tol", rename = "mean-tol")]
        mean_tol: f64,
        #[serde(default = "default_rho_max", rename = "rho-max")]
        rho_max: f64,
    },
    ChangeOfMeasure { event: CylinderEvent },
    ComForms { trajectories: u64, jumps: u64 },
    LocalTime {
        target: LocalTimeTargetSpec,
        t: f64,
        axis: usize,
        #[serde(default = "default_bins")]
        bins: usize,
    },
    DirichletAnnealed {
        t: f64,
        #[serde(default = "default_min_prob", rename = "min-prob")]
        min_prob: f64,
    },
    Ldp {
        window: OccupationWindow,
        #[serde(rename = "t-grid")]
        t_grid: Vec<f64>,
        slack: f64,
    },
    RangeTrend {
        u: f64,
        p: f64,
        #[serde(rename = "n-grid")]
        n_grid: Vec<u64>,
    },
    Coupling {
        #[serde(rename = "big-radius")]
        big_radius: usize,
        jumps: u64,
    },
    TreeReturn { times: Vec<f64> },
    QStatistics { jumps: usize },
    FormulaEval { op: String, args: Vec<f64> },
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Simulate { .. } => "simulate",
            Suite::DeltaExponential { .. } => "delta-exponential",
            Suite::ChangeOfMeasure { .. } => "change-of-measure",
            Suite::ComForms { .. } => "com-forms",
            Suite::LocalTime { .. } => "local-time",
            Suite::DirichletAnnealed { .. } => "dirichlet-annealed",
            Suite::Ldp { .. } => "ldp",
            Suite::RangeTrend { .. } => "range-trend",
            Suite::Coupling { .. } => "coupling",
            Suite::TreeReturn { .. } => "tree-return",
            Suite::QStatistics { .. } => "q-statistics",
            Suite::FormulaEval { .. } => "formula-eval",
        }
    }
}

/// Parameter grid: `path` is a dotted key into the configuration, such as
/// `process.a` or `suite.0.t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub path: String,
    pub values: Vec<toml::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub replicas: u64,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    pub graph: GraphSpec,
    pub process: ProcessSpec,
    #[serde(default)]
    pub stop: Option<StopRule>,
    /// Per-trajectory event cap for the `simulate` suite.
    #[serde(default)]
    pub max_events: Option<u64>,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub suite: Vec<Suite>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

impl ExperimentConfig {
    /// Parses and validates; messages carry the line of the offending key.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(0, |s| text[..s.start].lines().count().max(1));
            Error::Parse {
                line,
                msg: e.message().to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::InvalidParameter("replicas must be positive".into()));
        }
        if self.max_events == Some(0) {
            return Err(Error::InvalidParameter("max-events must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidParameter("threads must be positive".into()));
        }
        if self.suite.is_empty() {
            return Err(Error::InvalidParameter("no suite selected".into()));
        }
        let t = &self.thresholds;
        if !(t.p_min > 0.0 && t.p_min < 1.0 && t.z_max > 0.0 && t.rel_err > 0.0) {
            return Err(Error::InvalidParameter("thresholds out of range".into()));
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err(Error::InvalidParameter("sweep grid is empty".into()));
            }
        }
        Ok(())
    }

    /// Copy of the configuration with the sweep key set to `value`.
    pub fn with_override(&self, path: &str, value: &toml::Value) -> Result<Self> {
        let mut tree = toml::Value::try_from(self).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let mut node = &mut tree;
        let parts: Vec<&str> = path.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            let last = i + 1 == parts.len();
            node = match node {
                toml::Value::Table(t) => {
                    if last {
                        t.insert(part.to_string(), value.clone());
                        break;
                    }
                    t.get_mut(*part)
                        .ok_or_else(|| Error::InvalidParameter(format!("sweep path {path}: no key {part}")))?
                }
                toml::Value::Array(a) => {
                    let idx: usize = part
                        .parse()
                        .map_err(|_| Error::InvalidParameter(format!("sweep path {path}: {part} is not an index")))?;
                    let len = a.len();
                    let slot = a
                        .get_mut(idx)
                        .ok_or_else(|| Error::InvalidParameter(format!("sweep path {path}: index {idx} of {len}")))?;
                    if last {
                        *slot = value.clone();
                        break;
                    }
                    slot
                }
                _ => return Err(Error::InvalidParameter(format!("sweep path {path} runs through a scalar"))),
            };
        }
        let mut cfg: ExperimentConfig = tree.try_into().map_err(|e: toml::de::Error| Error::InvalidParameter(e.message().to_string()))?;
        cfg.sweep = None;
        cfg.validate()?;
        Ok(cfg)
    }
}

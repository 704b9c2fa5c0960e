//! Continuous-time simulation of reinforced walks and the observables
//! extracted from their trajectories.

mod diagnostics;
mod engine;
mod environment;
mod observables;
pub mod rng;
mod spec;
mod strong;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, OrientedEdge};

pub use diagnostics::{q_statistic, QStatistic};
pub use engine::{simulate, simulate_tilted, simulate_with_rng};
pub use environment::sample_dirichlet_environment;
pub use observables::{extract_observables, Observables};
pub use spec::{ProcessSpec, Reinforcement};
pub use strong::{couple_on_shared_clocks, simulate_strong_construction, simulate_strong_with_key, CouplingReport};

pub const DEFAULT_EVENT_CAP: u64 = 100_000_000;

/// When a simulation stops.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "value", rename_all = "kebab-case")]
pub enum StopRule {
    /// Run up to the deterministic time `t`.
    Time(f64),
    /// Stop at the `N`-th jump.
    Jumps(u64),
    /// Stop at `H_n`, the first time `n` distinct undirected edges have been crossed.
    EdgeRange(usize),
    /// Stop once `n` distinct oriented edges have been crossed.
    DirectedEdgeRange(usize),
}

impl StopRule {
    pub fn check_reachable(&self, g: &Graph) -> Result<()> {
        match *self {
            StopRule::Time(t) if !(t >= 0.0 && t.is_finite()) => {
                Err(Error::InvalidParameter(format!("stopping time {t} must be finite and >= 0")))
            }
            StopRule::Jumps(n) if n > 0 && g.num_edges() == 0 => {
                Err(Error::Unreachable("graph has no edges".into()))
            }
            StopRule::EdgeRange(n) if n > g.num_edges() => Err(Error::Unreachable(format!(
                "edge range {n} exceeds the {} edges of the graph",
                g.num_edges()
            ))),
            StopRule::DirectedEdgeRange(n) if n > g.num_oriented() => Err(Error::Unreachable(format!(
                "directed edge range {n} exceeds the {} oriented edges of the graph",
                g.num_oriented()
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub max_events: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            max_events: DEFAULT_EVENT_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub time: f64,
    pub from: usize,
    pub to: usize,
    pub edge: OrientedEdge,
}

/// Jump record of one walk, started at `root` at time 0 and observed up to `horizon`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub root: usize,
    pub horizon: f64,
    pub jumps: Vec<Jump>,
    pub spec: ProcessSpec,
}

impl Trajectory {
    pub fn num_jumps(&self) -> usize {
        self.jumps.len()
    }

    /// Position at the horizon.
    pub fn position(&self) -> usize {
        self.jumps.last().map_or(self.root, |j| j.to)
    }

    /// Position at time `t` (right-continuous).
    pub fn position_at(&self, t: f64) -> usize {
        let n = self.jumps.partition_point(|j| j.time <= t);
        if n == 0 {
            self.root
        } else {
            self.jumps[n - 1].to
        }
    }

    /// Vertex after the `n`-th jump (`n = 0` is the root).
    pub fn vertex_after(&self, n: usize) -> usize {
        if n == 0 {
            self.root
        } else {
            self.jumps[n - 1].to
        }
    }

    /// `tau_n`, with `tau_0 = 0`.
    pub fn jump_time(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.jumps[n - 1].time
        }
    }

    /// The first `n` jumps, observed up to `tau_n`.
    pub fn prefix(&self, n: usize) -> Trajectory {
        let n = n.min(self.jumps.len());
        Trajectory {
            root: self.root,
            horizon: self.jump_time(n),
            jumps: self.jumps[..n].to_vec(),
            spec: self.spec.clone(),
        }
    }

    /// Checks the structural invariants against the graph.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let mut at = self.root;
        let mut last = 0.0;
        for (n, j) in self.jumps.iter().enumerate() {
            if j.from != at {
                return Err(Error::InvalidParameter(format!("jump {n} does not start at {at}")));
            }
            if !(j.time > last) || j.time > self.horizon {
                return Err(Error::InvalidParameter(format!("jump {n} time out of order")));
            }
            if g.oriented(j.from, j.to) != Some(j.edge) {
                return Err(Error::InvalidParameter(format!("jump {n} is not along an edge")));
            }
            at = j.to;
            last = j.time;
        }
        Ok(())
    }

    /// Text record stream `n tau_n from to`, one line per jump, with exact
    /// (round-trippable) times.
    pub fn to_records(&self) -> String {
        let mut s = String::new();
        for (n, j) in self.jumps.iter().enumerate() {
            let _ = writeln!(s, "{} {:?} {} {}", n + 1, j.time, j.from, j.to);
        }
        s
    }
}

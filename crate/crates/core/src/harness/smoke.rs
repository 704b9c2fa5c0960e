//! Informational diagnostics with no pass/fail threshold.

use serde::{Deserialize, Serialize};

use super::stats::Tally;
use crate::error::Result;
use crate::graph::Graph;
use crate::sim::rng::run_replicas;
use crate::sim::{q_statistic, simulate_with_rng, ProcessSpec, QStatistic, SimOptions, StopRule};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReturnPoint {
    pub t: f64,
    pub prob: f64,
    pub se: f64,
}

/// `P(X_t = root)` for the once-reinforced walk on a finite regular tree
/// deep enough that the leaves are rarely reached by time `max(times)`.
pub fn tree_return_smoke(degree: usize, depth: usize, a: f64, times: &[f64], replicas: u64, seed: u64) -> Result<Vec<ReturnPoint>> {
    let g = Graph::regular_tree(degree, depth)?;
    let horizon = times.iter().copied().fold(0.0, f64::max);
    let spec = ProcessSpec::Orrw { a };
    let runs = run_replicas(seed, replicas, |_, rng| -> Result<Vec<bool>> {
        let traj = simulate_with_rng(&g, &spec, StopRule::Time(horizon), rng, SimOptions::default())?;
        Ok(times.iter().map(|&t| traj.position_at(t) == traj.root).collect())
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let tally: Tally = runs.iter().map(|r| r[k] as u8 as f64).collect();
            ReturnPoint {
                t,
                prob: tally.mean(),
                se: tally.se(),
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QSummary {
    pub a: f64,
    pub jumps: usize,
    pub mean_q: f64,
    pub mean_abs_q: f64,
    pub mean_s: f64,
    pub mean_u_plus: f64,
    pub mean_u_minus: f64,
    pub mean_u_bullet: f64,
}

/// Averages of the horizontal-displacement statistics of the directed
/// once-reinforced walk on a lattice ball after `jumps` jumps.
pub fn q_summary(g: &Graph, a: f64, jumps: usize, replicas: u64, seed: u64) -> Result<QSummary> {
    let spec = ProcessSpec::Dorrw { a };
    let stats = run_replicas(seed, replicas, |_, rng| -> Result<QStatistic> {
        let traj = simulate_with_rng(g, &spec, StopRule::Jumps(jumps as u64), rng, SimOptions::default())?;
        q_statistic(g, &traj, jumps)
    });
    let stats = stats.into_iter().collect::<Result<Vec<_>>>()?;
    let mean = |f: &dyn Fn(&QStatistic) -> f64| stats.iter().map(f).collect::<Tally>().mean();
    Ok(QSummary {
        a,
        jumps,
        mean_q: mean(&|s| s.q as f64),
        mean_abs_q: mean(&|s| s.q.abs() as f64),
        mean_s: mean(&|s| s.s as f64),
        mean_u_plus: mean(&|s| s.u_plus as f64),
        mean_u_minus: mean(&|s| s.u_minus as f64),
        mean_u_bullet: mean(&|s| s.u_bullet as f64),
    })
}

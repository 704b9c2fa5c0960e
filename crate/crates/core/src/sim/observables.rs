use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::Trajectory;
use crate::error::{Error, Result};
use crate::graph::{divergence, CrossingVector, Graph, OrientedEdge, OrientedSpanningTree};
use crate::numeric::CompensatedSum;

/// Everything the formulas predict about a trajectory observed up to `time`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub time: f64,
    pub position: usize,
    /// Number of jumps in `[0, time]`.
    pub jumps: usize,
    pub crossings: CrossingVector,
    pub local_times: Vec<f64>,
    /// Last departure edge of every visited vertex except the current one.
    pub last_exit_tree: OrientedSpanningTree,
    /// Visited vertices, sorted.
    pub vertex_range: Vec<usize>,
    /// Crossed undirected edge ids, in order of first crossing.
    pub edge_range: Vec<usize>,
    /// Crossed oriented edges, in order of first crossing.
    pub directed_edge_range: Vec<OrientedEdge>,
    /// First crossing time of each undirected edge, if crossed by `time`.
    pub first_crossing: Vec<Option<f64>>,
    /// Time spent at an endpoint of each edge while that edge was uncrossed.
    pub exposures: Vec<f64>,
    /// `H_0 = 0, H_1, ...`: times at which the edge range grows.
    pub range_times: Vec<f64>,
    /// Total exposure accumulated between consecutive range times.
    pub deltas: Vec<f64>,
}

/// Computes all observables of `traj` at time `t` in a single pass.
pub fn extract_observables(g: &Graph, traj: &Trajectory, t: f64) -> Result<Observables> {
    if !(t >= 0.0) || t > traj.horizon {
        return Err(Error::InvalidParameter(format!(
            "evaluation time {t} outside [0, {}]",
            traj.horizon
        )));
    }
    let n = g.num_vertices();
    let mut crossings = CrossingVector::zeros(g);
    let mut ell = vec![CompensatedSum::new(); n];
    let mut exposure = vec![CompensatedSum::new(); g.num_edges()];
    let mut first_crossing = vec![None; g.num_edges()];
    let mut visited = vec![false; n];
    let mut last_exit: BTreeMap<usize, OrientedEdge> = BTreeMap::new();
    let mut edge_range = Vec::new();
    let mut directed_edge_range = Vec::new();
    let mut range_times = vec![0.0];
    let mut exposure_total = CompensatedSum::new();
    let mut exposure_at_range = vec![0.0];

    let hold = |x: usize,
                    d: f64,
                    ell: &mut [CompensatedSum],
                    exposure: &mut [CompensatedSum],
                    first_crossing: &[Option<f64>],
                    exposure_total: &mut CompensatedSum| {
        ell[x].add(d);
        let mut fresh = 0usize;
        for &(_, o) in g.out_edges(x) {
            if first_crossing[o.edge()].is_none() {
                exposure[o.edge()].add(d);
                fresh += 1;
            }
        }
        exposure_total.add(fresh as f64 * d);
    };

    let mut x = traj.root;
    visited[x] = true;
    let mut now = 0.0;
    let mut count = 0;
    for j in traj.jumps.iter().take_while(|j| j.time <= t) {
        hold(x, j.time - now, &mut ell, &mut exposure, &first_crossing, &mut exposure_total);
        now = j.time;
        let o = j.edge;
        if crossings.get(o) == 0 {
            directed_edge_range.push(o);
        }
        crossings.increment(o);
        if first_crossing[o.edge()].is_none() {
            first_crossing[o.edge()] = Some(now);
            edge_range.push(o.edge());
            range_times.push(now);
            exposure_at_range.push(exposure_total.value());
        }
        last_exit.insert(x, o);
        x = j.to;
        visited[x] = true;
        count += 1;
    }
    hold(x, t - now, &mut ell, &mut exposure, &first_crossing, &mut exposure_total);

    last_exit.remove(&x);
    let edges: Vec<OrientedEdge> = last_exit.into_values().collect();
    let last_exit_tree = OrientedSpanningTree::from_edges(g, x, &edges)?;
    let deltas = exposure_at_range.windows(2).map(|w| w[1] - w[0]).collect();

    Ok(Observables {
        time: t,
        position: x,
        jumps: count,
        crossings,
        local_times: ell.iter().map(|s| s.value()).collect(),
        last_exit_tree,
        vertex_range: (0..n).filter(|&v| visited[v]).collect(),
        edge_range,
        directed_edge_range,
        first_crossing,
        exposures: exposure.iter().map(|s| s.value()).collect(),
        range_times,
        deltas,
    })
}

impl Observables {
    /// `sum_e T_e`.
    pub fn total_exposure(&self) -> f64 {
        self.exposures.iter().copied().collect::<CompensatedSum>().value()
    }

    /// Checks the structural invariants that every trajectory must satisfy.
    pub fn validate(&self, g: &Graph, root: usize) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidParameter(m));
        let total: f64 = self.local_times.iter().copied().collect::<CompensatedSum>().value();
        let tol = (self.jumps as f64 + 1.0) * f64::EPSILON * self.time.max(1.0) * 4.0;
        if (total - self.time).abs() > tol {
            return fail(format!("local times sum to {total}, expected {}", self.time));
        }
        let (_, div) = divergence(g, &self.crossings);
        for (v, &d) in div.iter().enumerate() {
            let expected = (v == root) as i64 - (v == self.position) as i64;
            if d != expected {
                return fail(format!("divergence {d} at {v}, expected {expected}"));
            }
        }
        self.last_exit_tree.validate(g)?;
        if self.last_exit_tree.root() != self.position
            || self.last_exit_tree.vertices().into_iter().collect::<Vec<_>>() != self.vertex_range
        {
            return fail("last-exit tree does not span the range".into());
        }
        for o in g.oriented_edges() {
            if self.crossings.get(o) < self.last_exit_tree.h(g, o) {
                return fail(format!("tree edge {o} never crossed"));
            }
        }
        if self.range_times.len() != self.edge_range.len() + 1
            || self.range_times.windows(2).any(|w| w[0] > w[1])
        {
            return fail("range times inconsistent".into());
        }
        Ok(())
    }

    /// Flat JSON object keyed by vertex and oriented-edge ids.
    pub fn to_flat_json(&self, g: &Graph) -> Value {
        let mut m = Map::new();
        m.insert("time".into(), self.time.into());
        m.insert("position".into(), self.position.into());
        m.insert("jumps".into(), self.jumps.into());
        for (v, l) in self.local_times.iter().enumerate() {
            m.insert(format!("local_time.{v}"), (*l).into());
        }
        for o in g.oriented_edges() {
            let (u, v) = g.endpoints(o);
            let key = format!("{u}->{v}");
            m.insert(format!("crossings.{key}"), self.crossings.get(o).into());
            m.insert(format!("tree.{key}"), self.last_exit_tree.h(g, o).into());
        }
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            m.insert(format!("exposure.{u}-{v}"), self.exposures[e].into());
            if let Some(s) = self.first_crossing[e] {
                m.insert(format!("first_crossing.{u}-{v}"), s.into());
            }
        }
        m.insert("vertex_range".into(), self.vertex_range.len().into());
        m.insert("edge_range".into(), self.edge_range.len().into());
        m.insert("directed_edge_range".into(), self.directed_edge_range.len().into());
        Value::Object(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{simulate, Jump, ProcessSpec, StopRule};

    fn k2_one_jump(s: f64, t: f64) -> (Graph, Trajectory) {
        let g = Graph::complete(2).unwrap();
        let o = g.oriented(0, 1).unwrap();
        let traj = Trajectory {
            root: 0,
            horizon: t,
            jumps: vec![Jump {
                time: s,
                from: 0,
                to: 1,
                edge: o,
            }],
            spec: ProcessSpec::simple(),
        };
        (g, traj)
    }

    #[test]
    fn no_jumps() {
        let g = Graph::complete(3).unwrap();
        let traj = Trajectory {
            root: 0,
            horizon: 2.0,
            jumps: vec![],
            spec: ProcessSpec::simple(),
        };
        let obs = extract_observables(&g, &traj, 2.0).unwrap();
        assert_eq!(obs.local_times, vec![2.0, 0.0, 0.0]);
        assert_eq!(obs.crossings.total(), 0);
        assert_eq!(obs.last_exit_tree.num_edges(), 0);
        assert!(obs.deltas.is_empty());
        assert_eq!(obs.exposures, vec![2.0, 2.0, 0.0]);
        obs.validate(&g, 0).unwrap();
    }

    #[test]
    fn single_jump_on_k2() {
        let (g, traj) = k2_one_jump(0.3, 1.0);
        let obs = extract_observables(&g, &traj, 1.0).unwrap();
        let o = g.oriented(0, 1).unwrap();
        assert_eq!(obs.crossings.get(o), 1);
        assert_eq!(obs.local_times, vec![0.3, 1.0 - 0.3]);
        assert!(obs.last_exit_tree.contains(&g, o));
        assert_eq!(obs.exposures, vec![0.3]);
        assert_eq!(obs.range_times, vec![0.0, 0.3]);
        assert_eq!(obs.deltas, vec![0.3]);
        obs.validate(&g, 0).unwrap();

        let early = extract_observables(&g, &traj, 0.2).unwrap();
        assert_eq!(early.jumps, 0);
        assert_eq!(early.exposures, vec![0.2]);
    }

    #[test]
    fn simulated_trajectories_satisfy_invariants() {
        let g = Graph::ball(2, 3).unwrap();
        for (i, spec) in [
            ProcessSpec::Orrw { a: 0.4 },
            ProcessSpec::Dorrw { a: 2.0 },
            ProcessSpec::simple(),
        ]
        .iter()
        .enumerate()
        {
            let traj = simulate(&g, spec, StopRule::Time(30.0), i as u64).unwrap();
            for t in [0.0, 7.5, 30.0] {
                let obs = extract_observables(&g, &traj, t).unwrap();
                obs.validate(&g, g.root()).unwrap();
                let total: f64 = obs.deltas.iter().sum();
                let last_h = *obs.range_times.last().unwrap();
                let upto = extract_observables(&g, &traj, last_h).unwrap();
                assert!((total - upto.total_exposure()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn flat_json_has_expected_keys() {
        let (g, traj) = k2_one_jump(0.3, 1.0);
        let obs = extract_observables(&g, &traj, 1.0).unwrap();
        let v = obs.to_flat_json(&g);
        assert_eq!(v["crossings.0->1"], 1);
        assert_eq!(v["tree.1->0"], 0);
        assert_eq!(v["local_time.0"], 0.3);
    }
}
